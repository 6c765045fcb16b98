//! Raw periodograms and power-law slope fits.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Shortest series accepted by [`power_spectrum`].
pub const MIN_SERIES_LEN: usize = 16;
/// Fewest positive-power bins a slope fit needs.
pub const MIN_BAND_BINS: usize = 10;

/// One-sided power at normalized frequencies `j / T`, `j = 1..=T/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    frequencies: Vec<f64>,
    power: Vec<f64>,
}

impl Periodogram {
    pub fn new(frequencies: Vec<f64>, power: Vec<f64>) -> Result<Self> {
        if frequencies.len() != power.len() {
            return Err(Error::DimensionMismatch {
                expected: frequencies.len(),
                found: power.len(),
            });
        }
        if let Some(index) = power.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { frequencies, power })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn median_power(&self) -> f64 {
        let mut sorted = self.power.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        match n {
            0 => 0.0,
            _ if n % 2 == 1 => sorted[n / 2],
            _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
        }
    }

    /// Indices of strict local maxima whose power exceeds `factor` times the median.
    pub fn prominent_peaks(&self, factor: f64) -> Vec<usize> {
        let threshold = factor * self.median_power();
        (1..self.power.len().saturating_sub(1))
            .filter(|&i| {
                let p = self.power[i];
                p > threshold && p > self.power[i - 1] && p > self.power[i + 1]
            })
            .collect()
    }
}

/// Periodogram of the mean-removed series, `|X_j|^2 / T`, no windowing.
pub fn power_spectrum(series: &[f64]) -> Result<Periodogram> {
    let len = series.len();
    if len < MIN_SERIES_LEN {
        return Err(Error::TooShort {
            min: MIN_SERIES_LEN,
            len,
        });
    }
    if let Some(index) = series.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mean = series.iter().sum::<f64>() / len as f64;
    let mut buf: Vec<Complex64> = series.iter().map(|&x| Complex64::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);

    let half = len / 2;
    let frequencies = (1..=half).map(|j| j as f64 / len as f64).collect();
    let power = buf[1..=half].iter().map(|z| z.norm_sqr() / len as f64).collect();
    Periodogram::new(frequencies, power)
}

/// Least-squares slope of `log10 power` against `log10 frequency` over `[lo, hi]`.
pub fn loglog_slope(p: &Periodogram, lo: f64, hi: f64) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = p
        .frequencies
        .iter()
        .zip(&p.power)
        .filter(|&(&f, &pw)| f >= lo && f <= hi && f > 0.0 && pw > 0.0)
        .map(|(&f, &pw)| (f.log10(), pw.log10()))
        .unzip();
    if xs.len() < MIN_BAND_BINS {
        return Err(Error::DegenerateBand(format!(
            "[{lo}, {hi}] holds {} positive bins, need {MIN_BAND_BINS}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateBand("all frequencies coincide".into()));
    }
    Ok(sxy / sxx)
}
