//! Column selection: Dantzig most-negative reduced cost and steepest edge.

use crate::model::Tableau;
use crate::numeric::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PricingRule {
    Dantzig,
    SteepestEdge,
}

impl PricingRule {
    pub fn select<S: Scalar>(&self, t: &Tableau<S>) -> Option<usize> {
        match self {
            PricingRule::Dantzig => dantzig_select(t),
            PricingRule::SteepestEdge => steepest_edge_select(t),
        }
    }
}

/// Nonbasic column with the most negative reduced cost; ties go to the
/// lowest column index. None means optimal.
pub fn dantzig_select<S: Scalar>(t: &Tableau<S>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for j in 0..t.total_vars() {
        if t.is_basic(j) || !t.objective_row[j].is_negative() {
            continue;
        }
        match best {
            Some(b) if t.objective_row[j] >= t.objective_row[b] => {}
            _ => best = Some(j),
        }
    }
    best
}

/// Among nonbasic columns with negative reduced cost d_j, the one minimizing
/// d_j / sqrt(1 + sum_i body[i][j]^2). The +1 accounts for the entering
/// variable's own unit change; the objective row is excluded from the norm.
///
/// The comparison is evaluated without square roots: for negative scores,
/// d_j/sqrt(g_j) < d_b/sqrt(g_b) iff d_j^2 * g_b > d_b^2 * g_j. Ties go to
/// the lowest column index.
pub fn steepest_edge_select<S: Scalar>(t: &Tableau<S>) -> Option<usize> {
    let mut best: Option<(usize, S, S)> = None;
    for j in 0..t.total_vars() {
        if t.is_basic(j) || !t.objective_row[j].is_negative() {
            continue;
        }
        let d = t.objective_row[j].clone();
        let gamma = column_norm_sq(t, j);
        match &best {
            Some((_, bd, bg)) => {
                let lhs = d.clone() * d.clone() * bg.clone();
                let rhs = bd.clone() * bd.clone() * gamma.clone();
                if lhs > rhs {
                    best = Some((j, d, gamma));
                }
            }
            None => best = Some((j, d, gamma)),
        }
    }
    best.map(|(j, _, _)| j)
}

/// 1 + squared norm of the constraint-row entries of column j.
fn column_norm_sq<S: Scalar>(t: &Tableau<S>, j: usize) -> S {
    t.body.iter().fold(S::one(), |acc, row| {
        acc + row[j].clone() * row[j].clone()
    })
}

/// Steepest-edge scores as binary64 for reporting: d_j / sqrt(gamma_j) for
/// every candidate column, None elsewhere.
pub fn steepest_edge_scores<S: Scalar>(t: &Tableau<S>) -> Vec<Option<f64>> {
    (0..t.total_vars())
        .map(|j| {
            if t.is_basic(j) || !t.objective_row[j].is_negative() {
                None
            } else {
                let d = t.objective_row[j].to_f64_lossy();
                let gamma = column_norm_sq(t, j).to_f64_lossy();
                Some(d / gamma.sqrt())
            }
        })
        .collect()
}
