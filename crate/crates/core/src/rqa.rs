//! Recurrence quantification for trajectories in real n-space.
//!
//! Everything is derived from the per-diagonal recurrence counts of the
//! (never materialised) recurrence matrix: for each offset `d >= 1`, the number
//! of pairs `(t, t + d)` whose Euclidean distance is at most the radius.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// Euclidean distance between two points of equal dimension.
pub fn pairwise_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(euclidean(x, y))
}

#[inline]
fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Closed Euclidean neighbourhood radius: points recur when `distance <= radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceConfig {
    radius: f64,
}

impl RecurrenceConfig {
    pub fn new(radius: f64) -> Result<Self> {
        if radius.is_finite() && radius >= 0.0 {
            Ok(Self { radius })
        } else {
            Err(Error::OutOfRange {
                name: "radius",
                value: radius,
                domain: "finite, >= 0",
            })
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    pub fn recurs(&self, x: &[f64], y: &[f64]) -> bool {
        euclidean(x, y) <= self.radius
    }
}

/// Recurrence counts for every diagonal below the main one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalProfile {
    len: usize,
    /// `counts[d - 1]` for offsets `d = 1..len`
    counts: Vec<usize>,
}

impl DiagonalProfile {
    /// Builds a profile from explicit counts, checking `count(d) <= len - d`.
    pub fn from_counts(len: usize, counts: Vec<usize>) -> Result<Self> {
        if len < 2 {
            return Err(Error::TooShort { min: 2, len });
        }
        if counts.len() != len - 1 {
            return Err(Error::DimensionMismatch {
                expected: len - 1,
                found: counts.len(),
            });
        }
        for (i, &c) in counts.iter().enumerate() {
            if c > len - (i + 1) {
                return Err(Error::OutOfRange {
                    name: "diagonal count",
                    value: c as f64,
                    domain: "[0, T - d]",
                });
            }
        }
        Ok(Self { len, counts })
    }

    /// Trajectory length `T`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, offset: usize) -> usize {
        self.counts[offset - 1]
    }

    pub fn diagonal_len(&self, offset: usize) -> usize {
        self.len - offset
    }

    pub fn is_full(&self, offset: usize) -> bool {
        self.count(offset) == self.diagonal_len(offset)
    }

    /// `(offset, count, diagonal length)` for `offset = 1..T`.
    pub fn diagonals(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i + 1, c, self.len - i - 1))
    }

    /// Offsets whose diagonal is recurrent everywhere, ascending.
    pub fn full_lines(&self) -> Vec<usize> {
        self.diagonals()
            .filter(|&(_, c, l)| c == l)
            .map(|(d, _, _)| d)
            .collect()
    }
}

/// Streaming diagonal profile at one radius.
pub fn diagonal_profile(traj: &Trajectory, cfg: &RecurrenceConfig) -> Result<DiagonalProfile> {
    let len = traj.len();
    if len < 2 {
        return Err(Error::TooShort { min: 2, len });
    }
    let mut counts = Vec::with_capacity(len - 1);
    for d in 1..len {
        let count = (0..len - d)
            .filter(|&t| cfg.recurs(traj.point(t), traj.point(t + d)))
            .count();
        counts.push(count);
    }
    Ok(DiagonalProfile { len, counts })
}

/// Profiles for several radii from a single pass over all pairs.
///
/// Each pair distance is computed once and binned against the sorted radii, so
/// the result for every radius is identical to [`diagonal_profile`] at that radius.
pub fn diagonal_profiles(traj: &Trajectory, radii: &[RecurrenceConfig]) -> Result<Vec<DiagonalProfile>> {
    let len = traj.len();
    if len < 2 {
        return Err(Error::TooShort { min: 2, len });
    }
    if radii.is_empty() {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].radius.total_cmp(&radii[b].radius));
    let sorted: Vec<f64> = order.iter().map(|&i| radii[i].radius).collect();

    let r = sorted.len();
    let mut counts = vec![vec![0usize; len - 1]; r];
    let mut bucket = vec![0usize; r + 1];
    for d in 1..len {
        bucket.iter_mut().for_each(|b| *b = 0);
        for t in 0..len - d {
            let dist = euclidean(traj.point(t), traj.point(t + d));
            // first radius with dist <= radius
            bucket[sorted.partition_point(|&rad| rad < dist)] += 1;
        }
        let mut acc = 0;
        for (i, &b) in bucket[..r].iter().enumerate() {
            acc += b;
            counts[i][d - 1] = acc;
        }
    }

    let mut out = vec![None; r];
    for (rank, &original) in order.iter().enumerate() {
        out[original] = Some(DiagonalProfile {
            len,
            counts: std::mem::take(&mut counts[rank]),
        });
    }
    Ok(out.into_iter().map(|p| p.expect("every radius filled")).collect())
}

/// The three diagonal-line statistics of a recurrence profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceStats {
    /// Share of sub-main diagonals holding at least one recurrence.
    pub recurrence_probability: f64,
    /// Mean recurrent fraction of the recurrent diagonals.
    pub mean_recurrence_strength: Option<f64>,
    /// Share of recurrent diagonals that are fully recurrent.
    pub conditional_full_recurrence_probability: Option<f64>,
}

pub fn recurrence_stats(profile: &DiagonalProfile) -> RecurrenceStats {
    let total = profile.counts.len();
    let mut recurrent = 0usize;
    let mut full = 0usize;
    let mut strength = 0.0;
    for (_, count, length) in profile.diagonals() {
        if count > 0 {
            recurrent += 1;
            strength += count as f64 / length as f64;
            if count == length {
                full += 1;
            }
        }
    }
    let (mean_recurrence_strength, conditional_full_recurrence_probability) = if recurrent == 0 {
        (None, None)
    } else {
        (
            Some(strength / recurrent as f64),
            Some(full as f64 / recurrent as f64),
        )
    };
    RecurrenceStats {
        recurrence_probability: recurrent as f64 / total as f64,
        mean_recurrence_strength,
        conditional_full_recurrence_probability,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBin {
    pub gap: usize,
    pub frequency: usize,
    pub percent: f64,
}

/// Histogram of spacings between consecutive fully recurrent diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct LineDistanceHistogram {
    pub full_lines: Vec<usize>,
    pub bins: Vec<GapBin>,
}

impl LineDistanceHistogram {
    /// Fewer than two full lines: no gaps to measure.
    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn frequency(&self, gap: usize) -> usize {
        self.bins
            .iter()
            .find(|b| b.gap == gap)
            .map_or(0, |b| b.frequency)
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.frequency).sum()
    }
}

pub fn full_recurrence_line_gaps(profile: &DiagonalProfile) -> LineDistanceHistogram {
    let full_lines = profile.full_lines();
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for w in full_lines.windows(2) {
        *freq.entry(w[1] - w[0]).or_default() += 1;
    }
    let total: usize = freq.values().sum();
    let bins = freq
        .into_iter()
        .map(|(gap, frequency)| GapBin {
            gap,
            frequency,
            percent: 100.0 * frequency as f64 / total as f64,
        })
        .collect();
    LineDistanceHistogram { full_lines, bins }
}

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub const BLACK: u8 = 0;
    pub const WHITE: u8 = 255;

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Binary portable graymap (`P5`, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Recurrence plot over `window`: pixel `(t, t')` is black iff the points recur.
/// Row `t'` is drawn top-down.
pub fn render_recurrence_plot(
    traj: &Trajectory,
    cfg: &RecurrenceConfig,
    window: Range<usize>,
) -> Result<GrayImage> {
    if window.is_empty() {
        return Err(Error::Empty("recurrence plot window"));
    }
    if window.end > traj.len() {
        return Err(Error::OutOfRange {
            name: "window end",
            value: window.end as f64,
            domain: "<= trajectory length",
        });
    }
    let size = window.len();
    let mut pixels = vec![GrayImage::WHITE; size * size];
    for row in 0..size {
        pixels[row * size + row] = GrayImage::BLACK;
        for col in 0..row {
            if cfg.recurs(traj.point(window.start + row), traj.point(window.start + col)) {
                pixels[row * size + col] = GrayImage::BLACK;
                pixels[col * size + row] = GrayImage::BLACK;
            }
        }
    }
    Ok(GrayImage {
        width: size,
        height: size,
        pixels,
    })
}

/// Sample Pearson correlation; `None` when either series has zero variance.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooShort { min: 2, len: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}
