//! Grey interval numbers, the linguistic rating scale, and grey matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lower, upper]` encoding one uncertain judgment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreyNumber {
    pub lower: f64,
    pub upper: f64,
}

impl GreyNumber {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::NonFiniteGreyNumber { lower, upper });
        }
        if lower > upper {
            return Err(Error::InvalidGreyNumber { lower, upper });
        }
        Ok(GreyNumber { lower, upper })
    }

    pub fn zero() -> Self {
        GreyNumber {
            lower: 0.0,
            upper: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lower == 0.0 && self.upper == 0.0
    }
}

/// Ordered mapping from linguistic codes to grey values.
///
/// The default is the six-level scale N/VL/L/M/H/VH with intervals
/// [0,0] through [4,5]. Codes are matched case-insensitively and
/// canonicalized to upper case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticScale {
    levels: Vec<(String, GreyNumber)>,
}

impl Default for LinguisticScale {
    fn default() -> Self {
        LinguisticScale {
            levels: vec![
                ("N".to_string(), GreyNumber { lower: 0.0, upper: 0.0 }),
                ("VL".to_string(), GreyNumber { lower: 0.0, upper: 1.0 }),
                ("L".to_string(), GreyNumber { lower: 1.0, upper: 2.0 }),
                ("M".to_string(), GreyNumber { lower: 2.0, upper: 3.0 }),
                ("H".to_string(), GreyNumber { lower: 3.0, upper: 4.0 }),
                ("VH".to_string(), GreyNumber { lower: 4.0, upper: 5.0 }),
            ],
        }
    }
}

impl LinguisticScale {
    /// Build a custom scale. Codes must be unique (case-insensitive) and
    /// grey values non-decreasing in both bounds along the scale order.
    pub fn new(levels: Vec<(String, GreyNumber)>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidScale("scale has no levels".into()));
        }
        let canon: Vec<(String, GreyNumber)> = levels
            .into_iter()
            .map(|(code, g)| (code.trim().to_uppercase(), g))
            .collect();
        for (i, (code, _)) in canon.iter().enumerate() {
            if code.is_empty() {
                return Err(Error::InvalidScale("empty code".into()));
            }
            if canon[..i].iter().any(|(c, _)| c == code) {
                return Err(Error::InvalidScale(format!("duplicate code {code:?}")));
            }
        }
        for pair in canon.windows(2) {
            let (ref a_code, a) = pair[0];
            let (ref b_code, b) = pair[1];
            if b.lower < a.lower || b.upper < a.upper {
                return Err(Error::InvalidScale(format!(
                    "grey values must be non-decreasing along the scale: {b_code:?} < {a_code:?}"
                )));
            }
        }
        Ok(LinguisticScale { levels: canon })
    }

    pub fn lookup(&self, code: &str) -> Option<GreyNumber> {
        let canon = code.trim().to_uppercase();
        self.levels
            .iter()
            .find(|(c, _)| *c == canon)
            .map(|(_, g)| *g)
    }

    pub fn levels(&self) -> &[(String, GreyNumber)] {
        &self.levels
    }
}

/// Square grid of grey numbers with a zero diagonal; one expert's
/// grey relation matrix, or the panel average.
#[derive(Debug, Clone, PartialEq)]
pub struct GreyMatrix {
    n: usize,
    entries: Vec<GreyNumber>,
}

impl GreyMatrix {
    pub fn from_entries(n: usize, entries: Vec<GreyNumber>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.len().checked_div(n).unwrap_or(0),
            });
        }
        for i in 0..n {
            let d = entries[i * n + i];
            if !d.is_zero() {
                return Err(Error::NonZeroDiagonal {
                    row: i + 1,
                    col: i + 1,
                    code: format!("[{}, {}]", d.lower, d.upper),
                    context: String::new(),
                });
            }
        }
        Ok(GreyMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> GreyNumber {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[GreyNumber] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Map one linguistic code to its grey value.
pub fn rating_to_grey(code: &str, scale: &LinguisticScale) -> Result<GreyNumber> {
    scale.lookup(code).ok_or_else(|| Error::UnknownCode {
        code: code.trim().to_uppercase(),
        context: String::new(),
    })
}

/// Convert one expert's n x n grid of linguistic codes into a grey matrix.
///
/// Diagonal codes must be "N"; errors name the offending cell so callers
/// can attach the expert id.
pub fn assessment_to_grey_matrix(
    ratings: &[Vec<String>],
    scale: &LinguisticScale,
) -> Result<GreyMatrix> {
    let n = ratings.len();
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in ratings.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NonSquareGrid {
                row: i + 1,
                found: row.len(),
                expected: n,
                context: String::new(),
            });
        }
        for (j, code) in row.iter().enumerate() {
            let grey = scale.lookup(code).ok_or_else(|| Error::UnknownCode {
                code: code.trim().to_uppercase(),
                context: format!(" at row {}, column {}", i + 1, j + 1),
            })?;
            if i == j && !grey.is_zero() {
                return Err(Error::NonZeroDiagonal {
                    row: i + 1,
                    col: j + 1,
                    code: code.clone(),
                    context: String::new(),
                });
            }
            entries.push(grey);
        }
    }
    GreyMatrix::from_entries(n, entries)
}

/// Entrywise weighted mean of expert grey matrices.
///
/// Weights are normalized to sum 1 (a 50/30/20 percentage split is fine as
/// given); with uniform weights this is the plain arithmetic mean across
/// experts. Lower and upper bounds average independently.
pub fn weighted_average_grey(matrices: &[GreyMatrix], weights: &[f64]) -> Result<GreyMatrix> {
    if matrices.is_empty() {
        return Err(Error::EmptyMatrixList);
    }
    if weights.len() != matrices.len() {
        return Err(Error::WeightCountMismatch {
            weights: weights.len(),
            matrices: matrices.len(),
        });
    }
    for (index, &w) in weights.iter().enumerate() {
        if w < 0.0 || !w.is_finite() {
            return Err(Error::NegativeWeight { weight: w, index });
        }
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    if (total - 1.0).abs() > 1e-9 {
        log::info!("normalizing expert weights (sum {total} != 1)");
    }
    let n = matrices[0].n();
    for m in &matrices[1..] {
        if m.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.n(),
            });
        }
    }
    // equal weights reduce to the plain arithmetic mean; taking 1/K directly
    // keeps uniform-weight scenarios bit-identical to the unweighted run
    let all_equal = weights.windows(2).all(|p| p[0] == p[1]);
    let count = matrices.len() as f64;
    let mut entries = vec![GreyNumber::zero(); n * n];
    for (m, &w) in matrices.iter().zip(weights) {
        let w = if all_equal { 1.0 / count } else { w / total };
        for (acc, g) in entries.iter_mut().zip(&m.entries) {
            acc.lower += w * g.lower;
            acc.upper += w * g.upper;
        }
    }
    GreyMatrix::from_entries(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn table4_mappings() {
        let scale = LinguisticScale::default();
        let h = rating_to_grey("H", &scale).unwrap();
        assert_eq!((h.lower, h.upper), (3.0, 4.0));
        let n = rating_to_grey("N", &scale).unwrap();
        assert_eq!((n.lower, n.upper), (0.0, 0.0));
        assert!(matches!(
            rating_to_grey("X", &scale),
            Err(Error::UnknownCode { .. })
        ));
    }

    #[test]
    fn codes_are_case_insensitive() {
        let scale = LinguisticScale::default();
        let vh = rating_to_grey("vh", &scale).unwrap();
        assert_eq!((vh.lower, vh.upper), (4.0, 5.0));
    }

    #[test]
    fn assessment_conversion() {
        let scale = LinguisticScale::default();
        let m = assessment_to_grey_matrix(&grid(&[&["N", "H"], &["L", "N"]]), &scale).unwrap();
        assert_eq!(m.get(0, 1), GreyNumber { lower: 3.0, upper: 4.0 });
        assert_eq!(m.get(1, 0), GreyNumber { lower: 1.0, upper: 2.0 });
        assert!(m.get(0, 0).is_zero());
        assert!(m.get(1, 1).is_zero());
    }

    #[test]
    fn degenerate_one_by_one() {
        let scale = LinguisticScale::default();
        let m = assessment_to_grey_matrix(&grid(&[&["N"]]), &scale).unwrap();
        assert_eq!(m.n(), 1);
        assert!(m.get(0, 0).is_zero());
    }

    #[test]
    fn diagonal_must_be_n() {
        let scale = LinguisticScale::default();
        let err = assessment_to_grey_matrix(&grid(&[&["N", "H"], &["L", "M"]]), &scale)
            .unwrap_err();
        assert!(matches!(err, Error::NonZeroDiagonal { row: 2, col: 2, .. }));
    }

    #[test]
    fn non_square_grid_rejected() {
        let scale = LinguisticScale::default();
        let err =
            assessment_to_grey_matrix(&grid(&[&["N", "H", "L"], &["L", "N"]]), &scale).unwrap_err();
        assert!(matches!(err, Error::NonSquareGrid { row: 1, .. }));
    }

    #[test]
    fn mean_of_two_matrices() {
        let scale = LinguisticScale::default();
        let a = assessment_to_grey_matrix(&grid(&[&["N", "L"], &["N", "N"]]), &scale).unwrap();
        let b = assessment_to_grey_matrix(&grid(&[&["N", "H"], &["N", "N"]]), &scale).unwrap();
        let avg = weighted_average_grey(&[a, b], &[0.5, 0.5]).unwrap();
        assert_eq!(avg.get(0, 1), GreyNumber { lower: 2.0, upper: 3.0 });
    }

    #[test]
    fn single_matrix_identity() {
        let scale = LinguisticScale::default();
        let a = assessment_to_grey_matrix(&grid(&[&["N", "VH"], &["M", "N"]]), &scale).unwrap();
        let avg = weighted_average_grey(std::slice::from_ref(&a), &[1.0]).unwrap();
        assert_eq!(avg, a);
    }

    #[test]
    fn weighted_mean_hand_value() {
        // entry pair [0,1] and [4,5] at weights 0.75/0.25 -> [1,2]
        let scale = LinguisticScale::default();
        let a = assessment_to_grey_matrix(&grid(&[&["N", "VL"], &["N", "N"]]), &scale).unwrap();
        let b = assessment_to_grey_matrix(&grid(&[&["N", "VH"], &["N", "N"]]), &scale).unwrap();
        let avg = weighted_average_grey(&[a, b], &[0.75, 0.25]).unwrap();
        let e = avg.get(0, 1);
        assert!((e.lower - 1.0).abs() < 1e-15);
        assert!((e.upper - 2.0).abs() < 1e-15);
    }

    #[test]
    fn weight_errors() {
        let scale = LinguisticScale::default();
        let a = assessment_to_grey_matrix(&grid(&[&["N"]]), &scale).unwrap();
        assert!(matches!(
            weighted_average_grey(std::slice::from_ref(&a), &[-1.0]),
            Err(Error::NegativeWeight { .. })
        ));
        assert!(matches!(
            weighted_average_grey(std::slice::from_ref(&a), &[0.0]),
            Err(Error::AllZeroWeights)
        ));
        assert!(matches!(
            weighted_average_grey(&[], &[]),
            Err(Error::EmptyMatrixList)
        ));
    }

    #[test]
    fn custom_scale_must_be_monotone() {
        let err = LinguisticScale::new(vec![
            ("A".into(), GreyNumber { lower: 1.0, upper: 2.0 }),
            ("B".into(), GreyNumber { lower: 0.0, upper: 3.0 }),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::InvalidScale(_)));
    }
}
