//! Empirical entropy, conditional entropy, information gain and symmetrical
//! uncertainty over categorical columns.
//!
//! All probabilities are maximum-likelihood frequencies and every logarithm
//! is base 2, so results are in bits.

use crate::error::{Error, Result};

/// A categorical column: codes in `[0, cardinality)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteColumn {
    codes: Vec<u32>,
    cardinality: u32,
}

impl DiscreteColumn {
    pub fn new(codes: Vec<u32>, cardinality: u32) -> Result<Self> {
        if codes.is_empty() {
            return Err(Error::EmptyColumn);
        }
        if cardinality == 0 {
            return Err(Error::Parameter("cardinality must be at least 1".into()));
        }
        if let Some(&code) = codes.iter().find(|&&c| c >= cardinality) {
            return Err(Error::CodeOutOfRange { code, cardinality });
        }
        Ok(Self { codes, cardinality })
    }

    /// Builds a column whose cardinality is one past the largest code.
    pub fn from_codes(codes: Vec<u32>) -> Result<Self> {
        let cardinality = codes.iter().max().map_or(0, |&m| m + 1);
        Self::new(codes, cardinality)
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn cardinality(&self) -> u32 {
        self.cardinality
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

fn check_same_len(x: &DiscreteColumn, y: &DiscreteColumn) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// `-sum c/n log2(c/n)` over non-zero counts.
fn entropy_of_counts(counts: &[u32], n: u32) -> f64 {
    let n = f64::from(n);
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = f64::from(c) / n;
            -p * p.log2()
        })
        .sum()
}

/// Joint and marginal histograms of `(x, y)` restricted to `rows`.
///
/// Every quantity in this module is computed from one of these tables, so a
/// subsample spanning all rows in order yields bit-identical results to the
/// full-column functions.
struct Contingency {
    joint: Vec<u32>,
    x_counts: Vec<u32>,
    y_counts: Vec<u32>,
    x_card: usize,
    n: u32,
}

impl Contingency {
    fn tally(x: &DiscreteColumn, y: &DiscreteColumn, rows: impl Iterator<Item = usize>) -> Self {
        let x_card = x.cardinality as usize;
        let y_card = y.cardinality as usize;
        let mut joint = vec![0u32; x_card * y_card];
        let mut x_counts = vec![0u32; x_card];
        let mut y_counts = vec![0u32; y_card];
        let mut n = 0u32;
        for r in rows {
            let a = x.codes[r] as usize;
            let b = y.codes[r] as usize;
            joint[b * x_card + a] += 1;
            x_counts[a] += 1;
            y_counts[b] += 1;
            n += 1;
        }
        Self {
            joint,
            x_counts,
            y_counts,
            x_card,
            n,
        }
    }

    fn entropy_x(&self) -> f64 {
        entropy_of_counts(&self.x_counts, self.n)
    }

    fn entropy_y(&self) -> f64 {
        entropy_of_counts(&self.y_counts, self.n)
    }

    /// `H(X|Y) = sum_y P(y) H(X | Y=y)`.
    fn conditional_entropy_x_given_y(&self) -> f64 {
        let n = f64::from(self.n);
        self.y_counts
            .iter()
            .enumerate()
            .filter(|(_, &ny)| ny > 0)
            .map(|(b, &ny)| {
                let slice = &self.joint[b * self.x_card..(b + 1) * self.x_card];
                f64::from(ny) / n * entropy_of_counts(slice, ny)
            })
            .sum()
    }

    fn information_gain(&self) -> f64 {
        let ig = self.entropy_x() - self.conditional_entropy_x_given_y();
        // rounding noise only; true IG is never negative
        ig.max(0.0)
    }

    fn symmetrical_uncertainty(&self) -> f64 {
        let denom = self.entropy_x() + self.entropy_y();
        if denom <= 0.0 {
            return 0.0;
        }
        2.0 * self.information_gain() / denom
    }
}

pub fn entropy(x: &DiscreteColumn) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let mut counts = vec![0u32; x.cardinality as usize];
    for &c in &x.codes {
        counts[c as usize] += 1;
    }
    Ok(entropy_of_counts(&counts, x.len() as u32))
}

/// Entropy of `x` remaining after observing `y`.
pub fn conditional_entropy(x: &DiscreteColumn, y: &DiscreteColumn) -> Result<f64> {
    check_same_len(x, y)?;
    Ok(Contingency::tally(x, y, 0..x.len()).conditional_entropy_x_given_y())
}

/// `H(X) - H(X|Y)`, clamped at zero.
pub fn information_gain(x: &DiscreteColumn, y: &DiscreteColumn) -> Result<f64> {
    check_same_len(x, y)?;
    Ok(Contingency::tally(x, y, 0..x.len()).information_gain())
}

/// `2 IG(X,Y) / (H(X) + H(Y))`; zero when both columns are constant.
pub fn symmetrical_uncertainty(x: &DiscreteColumn, y: &DiscreteColumn) -> Result<f64> {
    check_same_len(x, y)?;
    Ok(Contingency::tally(x, y, 0..x.len()).symmetrical_uncertainty())
}

/// Symmetrical uncertainty computed only over the listed rows.
///
/// Callers guarantee that every index is in bounds and that both columns have
/// the same length.
pub(crate) fn symmetrical_uncertainty_on_rows(x: &DiscreteColumn, y: &DiscreteColumn, rows: &[usize]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    Contingency::tally(x, y, rows.iter().copied()).symmetrical_uncertainty()
}
