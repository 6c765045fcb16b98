use crate::error::{Error, Result};

/// A firing pattern `(s0, ..., s(n-1))` with `0 <= s_k < levels`.
///
/// The flat index uses place value with neuron 0 as the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    levels: usize,
    digits: Vec<usize>,
}

impl BasisIndex {
    pub fn new(levels: usize, digits: Vec<usize>) -> Result<Self> {
        if levels < 2 {
            return Err(Error::OutOfRange {
                name: "levels",
                value: levels as f64,
                domain: ">= 2",
            });
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= levels) {
            return Err(Error::OutOfRange {
                name: "digit",
                value: d as f64,
                domain: "[0, levels)",
            });
        }
        Ok(Self { levels, digits })
    }

    pub fn from_flat(flat: usize, neurons: usize, levels: usize) -> Result<Self> {
        let dim = super::network_dim(neurons, levels).ok_or(Error::DimensionCap {
            dim: usize::MAX,
            cap: usize::MAX,
        })?;
        if flat >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: flat,
            });
        }
        let mut digits = vec![0; neurons];
        let mut rest = flat;
        for slot in digits.iter_mut().rev() {
            *slot = rest % levels;
            rest /= levels;
        }
        Self::new(levels, digits)
    }

    pub fn flat(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * self.levels + d)
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn neurons(&self) -> usize {
        self.digits.len()
    }

    pub fn levels(&self) -> usize {
        self.levels
    }
}

/// Digit of neuron `site` inside flat index `flat`, without allocating.
#[inline]
pub(crate) fn digit_at(flat: usize, site: usize, neurons: usize, levels: usize) -> usize {
    let stride = levels.pow((neurons - 1 - site) as u32);
    (flat / stride) % levels
}
