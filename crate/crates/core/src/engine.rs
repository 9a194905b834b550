//! Normalization, total-relation matrix, and prominence / net-influence scoring.

use serde::{Deserialize, Serialize};

use crate::defuzz::CrispMatrix;
use crate::error::{Error, Result};

/// Cause/effect classification from the sign of R - C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Cause,
    Effect,
}

impl Group {
    pub fn label(&self) -> &'static str {
        match self {
            Group::Cause => "C",
            Group::Effect => "E",
        }
    }
}

/// Per-factor scores and ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProminenceRecord {
    pub factor_code: String,
    pub r: f64,
    pub c: f64,
    /// R + C
    pub prominence: f64,
    /// R - C
    pub net_influence: f64,
    pub prominence_rank: usize,
    pub influence_rank: usize,
    pub group: Group,
}

/// One point of the Influence-Prominence Map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpmPoint {
    pub code: String,
    pub x: f64,
    pub y: f64,
    pub group: Group,
}

/// Scale the crisp matrix by the reciprocal of its largest row sum.
pub fn normalize_direct_matrix(z: &CrispMatrix) -> Result<CrispMatrix> {
    let s = z.row_sums().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if s <= 0.0 {
        return Err(Error::DegenerateStudy);
    }
    Ok(z.scale(1.0 / s))
}

/// Total-relation matrix M = X (I - X)^-1, via Gauss-Jordan inversion
/// with partial pivoting.
pub fn total_relation_matrix(x: &CrispMatrix) -> Result<CrispMatrix> {
    let n = x.n();
    // a = I - X
    let mut a = CrispMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j { 1.0 } else { 0.0 } - x.get(i, j);
            a.set(i, j, v);
        }
    }
    let max_norm = a
        .entries()
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let tol = 1e-12 * max_norm;

    let mut inv = CrispMatrix::zeros(n);
    for i in 0..n {
        inv.set(i, i, 1.0);
    }
    for col in 0..n {
        // partial pivot: largest magnitude in this column at or below the diagonal
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a.get(r, col)))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .unwrap();
        if pivot.abs() < tol {
            return Err(Error::SingularMatrix { pivot: pivot.abs() });
        }
        if pivot_row != col {
            for j in 0..n {
                let (u, v) = (a.get(col, j), a.get(pivot_row, j));
                a.set(col, j, v);
                a.set(pivot_row, j, u);
                let (u, v) = (inv.get(col, j), inv.get(pivot_row, j));
                inv.set(col, j, v);
                inv.set(pivot_row, j, u);
            }
        }
        let inv_pivot = 1.0 / a.get(col, col);
        for j in 0..n {
            a.set(col, j, a.get(col, j) * inv_pivot);
            inv.set(col, j, inv.get(col, j) * inv_pivot);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a.get(r, col);
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                a.set(r, j, a.get(r, j) - factor * a.get(col, j));
                inv.set(r, j, inv.get(r, j) - factor * inv.get(col, j));
            }
        }
    }

    // M = X * inv
    let mut m = CrispMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let xik = x.get(i, k);
            if xik == 0.0 {
                continue;
            }
            for j in 0..n {
                m.set(i, j, m.get(i, j) + xik * inv.get(k, j));
            }
        }
    }
    Ok(m)
}

/// Row sums R and column sums C of the total-relation matrix.
pub fn row_column_sums(m: &CrispMatrix) -> (Vec<f64>, Vec<f64>) {
    (m.row_sums(), m.col_sums())
}

/// Descending competition ranks: ties share the smallest rank.
pub fn competition_ranks(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|&v| 1 + values.iter().filter(|&&w| w > v).count())
        .collect()
}

/// Build the prominence table from R, C vectors and factor codes.
pub fn prominence_table(r: &[f64], c: &[f64], codes: &[String]) -> Result<Vec<ProminenceRecord>> {
    if r.len() != c.len() || r.len() != codes.len() {
        return Err(Error::FactorSetMismatch(format!(
            "R has {} entries, C has {}, codes has {}",
            r.len(),
            c.len(),
            codes.len()
        )));
    }
    let prominence: Vec<f64> = r.iter().zip(c).map(|(a, b)| a + b).collect();
    let net: Vec<f64> = r.iter().zip(c).map(|(a, b)| a - b).collect();
    let prominence_ranks = competition_ranks(&prominence);
    let influence_ranks = competition_ranks(&net);
    Ok(codes
        .iter()
        .enumerate()
        .map(|(i, code)| ProminenceRecord {
            factor_code: code.clone(),
            r: r[i],
            c: c[i],
            prominence: prominence[i],
            net_influence: net[i],
            prominence_rank: prominence_ranks[i],
            influence_rank: influence_ranks[i],
            // R - C = 0 counts as cause
            group: if net[i] >= 0.0 {
                Group::Cause
            } else {
                Group::Effect
            },
        })
        .collect())
}

/// Plot-ready Influence-Prominence Map points at (R+C, R-C).
pub fn ipm_points(records: &[ProminenceRecord]) -> Vec<IpmPoint> {
    records
        .iter()
        .map(|r| IpmPoint {
            code: r.factor_code.clone(),
            x: r.prominence,
            y: r.net_influence,
            group: r.group,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, entries: &[f64]) -> CrispMatrix {
        CrispMatrix::from_entries(n, entries.to_vec()).unwrap()
    }

    #[test]
    fn normalize_by_max_row_sum() {
        let x = normalize_direct_matrix(&m(2, &[0.0, 2.0, 1.0, 0.0])).unwrap();
        assert_eq!(x.entries(), &[0.0, 1.0, 0.5, 0.0]);
    }

    #[test]
    fn normalize_identity_when_max_row_sum_is_one() {
        let z = m(2, &[0.0, 1.0, 1.0, 0.0]);
        let x = normalize_direct_matrix(&z).unwrap();
        assert_eq!(x.entries(), z.entries());
    }

    #[test]
    fn normalize_rejects_all_zero() {
        assert!(matches!(
            normalize_direct_matrix(&m(1, &[0.0])),
            Err(Error::DegenerateStudy)
        ));
    }

    #[test]
    fn total_relation_closed_form_2x2() {
        let x = m(2, &[0.0, 0.5, 0.5, 0.0]);
        let total = total_relation_matrix(&x).unwrap();
        let expect = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0];
        for (got, want) in total.entries().iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn total_relation_zero_in_zero_out() {
        let total = total_relation_matrix(&m(2, &[0.0; 4])).unwrap();
        assert_eq!(total.entries(), &[0.0; 4]);
    }

    #[test]
    fn total_relation_singular_rejected() {
        // det(I - X) = 0 for X = [[0,1],[1,0]]
        let err = total_relation_matrix(&m(2, &[0.0, 1.0, 1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
    }

    #[test]
    fn sums_from_closed_form() {
        let total = m(2, &[1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]);
        let (r, c) = row_column_sums(&total);
        assert_eq!(r, vec![1.0, 1.0]);
        assert_eq!(c, vec![1.0, 1.0]);
    }

    #[test]
    fn sums_single_edge() {
        let (r, c) = row_column_sums(&m(2, &[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(r, vec![1.0, 0.0]);
        assert_eq!(c, vec![0.0, 1.0]);
    }

    #[test]
    fn competition_ranks_share_smallest() {
        assert_eq!(competition_ranks(&[3.0, 1.0, 3.0, 0.5]), vec![1, 3, 1, 4]);
    }

    #[test]
    fn published_prominence_spot_checks() {
        let codes: Vec<String> = ["LCA", "MNC"].iter().map(|s| s.to_string()).collect();
        let records =
            prominence_table(&[0.483, 0.415], &[0.692, 0.281], &codes).unwrap();
        let lca = &records[0];
        assert!((lca.prominence - 1.175).abs() < 1e-12);
        assert!((lca.net_influence + 0.209).abs() < 1e-12);
        assert_eq!(lca.prominence_rank, 1);
        assert_eq!(lca.group, Group::Effect);
        let mnc = &records[1];
        assert!((mnc.net_influence - 0.134).abs() < 1e-12);
        assert_eq!(mnc.influence_rank, 1);
        assert_eq!(mnc.group, Group::Cause);
    }

    #[test]
    fn zero_factor_is_cause_by_tie_rule() {
        let records = prominence_table(&[0.0], &[0.0], &["A".to_string()]).unwrap();
        assert_eq!(records[0].prominence_rank, 1);
        assert_eq!(records[0].group, Group::Cause);
    }

    #[test]
    fn ipm_points_follow_groups() {
        let codes: Vec<String> = ["LCA", "PLE"].iter().map(|s| s.to_string()).collect();
        let records = prominence_table(&[0.483, 0.068], &[0.692, 0.063], &codes).unwrap();
        let points = ipm_points(&records);
        assert!((points[0].x - 1.175).abs() < 1e-12);
        assert!(points[0].y < 0.0);
        assert!(points[1].y > 0.0);
        assert!(ipm_points(&[]).is_empty());
    }
}
