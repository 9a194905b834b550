//! Modified-CFCS defuzzification: grey matrix to crisp matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grey::{GreyMatrix, GreyNumber};

/// Real n x n matrix. Reused for the crisp matrix Z, the normalized
/// direct matrix X, and the total-relation matrix M.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CrispMatrix {
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.len().checked_div(n).unwrap_or(0),
            });
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGreyNumber {
                lower: *bad,
                upper: *bad,
            });
        }
        Ok(CrispMatrix { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        CrispMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                sums[j] += self.get(i, j);
            }
        }
        sums
    }

    pub fn scale(&self, factor: f64) -> CrispMatrix {
        CrispMatrix {
            n: self.n,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Which reading of the CFCS rescaling equations to use.
///
/// The two diverge in which row minimum the upper-bound normalization
/// subtracts and which minimum the final rescale adds back. They agree
/// bit-for-bit whenever every row's minimum lower and upper bound is zero,
/// which a zero diagonal on a non-negative scale guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CfcsVariant {
    /// Upper bounds normalize against the row minimum of the uppers;
    /// the rescale adds the minimum of the normalized lowers (always 0).
    #[default]
    PaperLiteral,
    /// Upper bounds normalize against the row minimum of the lowers;
    /// the rescale adds the row minimum of the original lowers.
    StandardCfcs,
}

/// Row statistics used by the normalization stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowNormalization {
    pub min_lower: f64,
    pub min_upper: f64,
    pub max_upper: f64,
    /// max_upper - min_lower
    pub delta: f64,
}

/// Scan one row of grey numbers for its normalization statistics.
pub fn row_normalization(row: &[GreyNumber]) -> Result<RowNormalization> {
    if row.is_empty() {
        return Err(Error::TooFewFactors);
    }
    let min_lower = row.iter().map(|g| g.lower).fold(f64::INFINITY, f64::min);
    let min_upper = row.iter().map(|g| g.upper).fold(f64::INFINITY, f64::min);
    let max_upper = row.iter().map(|g| g.upper).fold(f64::NEG_INFINITY, f64::max);
    Ok(RowNormalization {
        min_lower,
        min_upper,
        max_upper,
        delta: max_upper - min_lower,
    })
}

/// Defuzzify a grey matrix into crisp values, row by row.
///
/// Per row: lower bounds normalize as (lower - min_lower) / delta, upper
/// bounds per the variant, the total normalized crisp value is
/// (L(1-L) + U^2) / (1 - L + U), and the final value rescales by delta.
/// Rows with delta = 0 carry no discriminating information and map every
/// entry to the row's min_lower.
///
/// `include_diagonal` controls whether the diagonal [0,0] entry
/// participates in the row statistics (default true; when false the
/// diagonal output is pinned to 0).
pub fn defuzzify(
    grey: &GreyMatrix,
    variant: CfcsVariant,
    include_diagonal: bool,
) -> Result<CrispMatrix> {
    let n = grey.n();
    let mut out = CrispMatrix::zeros(n);
    for i in 0..n {
        let row = grey.row(i);
        let stats = if include_diagonal {
            row_normalization(row)?
        } else {
            let off: Vec<GreyNumber> = row
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, g)| *g)
                .collect();
            if off.is_empty() {
                // 1x1 matrix: single zero diagonal entry
                out.set(i, i, 0.0);
                continue;
            }
            row_normalization(&off)?
        };
        for (j, g) in row.iter().enumerate() {
            if !include_diagonal && i == j {
                out.set(i, j, 0.0);
                continue;
            }
            let z = if stats.delta == 0.0 {
                stats.min_lower
            } else {
                let l = (g.lower - stats.min_lower) / stats.delta;
                let u = match variant {
                    CfcsVariant::PaperLiteral => (g.upper - stats.min_upper) / stats.delta,
                    CfcsVariant::StandardCfcs => (g.upper - stats.min_lower) / stats.delta,
                };
                let denom = 1.0 - l + u;
                assert!(denom > 0.0, "CFCS denominator must stay positive");
                let y = (l * (1.0 - l) + u * u) / denom;
                match variant {
                    // min of the normalized lowers is 0 by construction
                    CfcsVariant::PaperLiteral => y * stats.delta,
                    CfcsVariant::StandardCfcs => stats.min_lower + y * stats.delta,
                }
            };
            out.set(i, j, z);
        }
    }
    Ok(out)
}
