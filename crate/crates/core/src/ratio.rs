//! Row selection: the standard ratio test with largest-pivot tie-breaking,
//! and the EXPAND two-pass ratio test with its expanding tolerance schedule.

use crate::model::Tableau;
use crate::numeric::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Step that zeroes the leaving variable.
    Full,
    /// EXPAND's guaranteed positive step tau / pivot.
    Min,
    /// Degenerate standard step of length zero.
    Zero,
    /// No positive pivot entry: terminal record of an unbounded run.
    Unbounded,
}

impl StepKind {
    pub fn label(&self) -> &'static str {
        match self {
            StepKind::Full => "full",
            StepKind::Min => "min",
            StepKind::Zero => "zero",
            StepKind::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepChoice<S> {
    Pivot { row: usize, alpha: S, kind: StepKind },
    Unbounded,
}

/// The expanding-tolerance schedule threaded through an EXPAND run.
///
/// At the start of iteration n+1 (n completed advances since the last
/// reset) the tolerance is delta = tau * (u0 + n); each call to
/// [`expand_ratio_test`] first advances it by tau.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandState<S> {
    pub tau: S,
    pub u0: S,
    /// Advances since the last reset.
    pub n: usize,
    /// Current expanded tolerance.
    pub delta: S,
    pub delta_initial: S,
    /// Reset the schedule every this many iterations.
    pub reset_period: usize,
}

impl<S: Scalar> ExpandState<S> {
    pub fn new(tau: S, u0: S, reset_period: usize) -> Self {
        let delta_initial = tau.clone() * u0.clone();
        ExpandState {
            tau,
            u0,
            n: 0,
            delta: delta_initial.clone(),
            delta_initial,
            reset_period,
        }
    }

    /// Deployed defaults: initial tolerance 5e-7 (half a 1e-6 feasibility
    /// tolerance), tau 5e-11, hence u0 = 10^4, reset every 10^4 iterations.
    pub fn deployed_defaults() -> Self {
        ExpandState::new(
            S::from_fraction(1, 20_000_000_000),
            S::from_int(10_000),
            10_000,
        )
    }

    fn advance(&mut self) {
        self.delta = self.delta.clone() + self.tau.clone();
        self.n += 1;
    }
}

/// Among rows with a positive pivot entry, picks the minimum ratio
/// values[basic]/pivot; ties on the ratio go to the largest pivot, then the
/// lowest row index. No positive entry means the problem is unbounded in
/// this column.
pub fn standard_ratio_test<S: Scalar>(t: &Tableau<S>, col: usize) -> StepChoice<S> {
    let mut best: Option<(usize, S, S)> = None; // (row, alpha, pivot)
    for (i, row) in t.body.iter().enumerate() {
        let p = row[col].clone();
        if !p.is_positive() {
            continue;
        }
        let alpha = t.values[t.basis[i]].clone() / p.clone();
        let replace = match &best {
            None => true,
            Some((_, ba, bp)) => alpha < *ba || (alpha == *ba && p > *bp),
        };
        if replace {
            best = Some((i, alpha, p));
        }
    }
    match best {
        None => StepChoice::Unbounded,
        Some((row, alpha, _)) => {
            let kind = if alpha.is_zero() { StepKind::Zero } else { StepKind::Full };
            StepChoice::Pivot { row, alpha, kind }
        }
    }
}

/// The EXPAND two-pass ratio test.
///
/// Advances the tolerance, then pass 1 bounds the step so every basic
/// variable keeps its new expanded bound x >= -delta, and pass 2 picks the
/// largest pivot whose plain ratio is acceptable. The returned step is
/// max(tau/pivot, full step) and is always strictly positive. The caller
/// applies the value update x := x - alpha * p (entering += alpha).
pub fn expand_ratio_test<S: Scalar>(
    t: &Tableau<S>,
    col: usize,
    mut state: ExpandState<S>,
) -> Result<(StepChoice<S>, ExpandState<S>)> {
    // every variable must satisfy the previous expanded bound
    let slack = if S::EXACT {
        S::zero()
    } else {
        S::from_fraction(1, 1_000_000_000_000)
    };
    let floor = -(state.delta.clone() + slack);
    for (var, x) in t.values.iter().enumerate() {
        if *x < floor {
            return Err(Error::ExpandInfeasible { iteration: t.iteration + 1, var });
        }
    }

    state.advance();
    let delta = state.delta.clone();

    let mut alpha_max: Option<S> = None;
    for (i, row) in t.body.iter().enumerate() {
        let p = row[col].clone();
        if !p.is_positive() {
            continue;
        }
        let bound = (t.values[t.basis[i]].clone() + delta.clone()) / p;
        if alpha_max.as_ref().is_none_or(|b| bound < *b) {
            alpha_max = Some(bound);
        }
    }
    let Some(alpha_max) = alpha_max else {
        return Ok((StepChoice::Unbounded, state));
    };

    let mut chosen: Option<(usize, S)> = None; // (row, pivot)
    for (i, row) in t.body.iter().enumerate() {
        let p = row[col].clone();
        if !p.is_positive() {
            continue;
        }
        let ratio = t.values[t.basis[i]].clone() / p.clone();
        if ratio <= alpha_max && chosen.as_ref().is_none_or(|(_, bp)| p > *bp) {
            chosen = Some((i, p));
        }
    }
    let (row, pivot) = chosen.expect("the row attaining alpha_max is always acceptable");
    debug_assert!(
        t.body
            .iter()
            .enumerate()
            .filter(|(i, r)| {
                r[col].is_positive()
                    && t.values[t.basis[*i]].clone() / r[col].clone() <= alpha_max
            })
            .all(|(_, r)| r[col] <= pivot),
        "selected pivot must be the maximum over acceptable rows"
    );

    let alpha_full = t.values[t.basis[row]].clone() / pivot.clone();
    let alpha_min = state.tau.clone() / pivot;
    let (alpha, kind) = if alpha_min > alpha_full {
        (alpha_min, StepKind::Min)
    } else {
        (alpha_full, StepKind::Full)
    };
    debug_assert!(alpha.is_positive(), "EXPAND steps are strictly positive");
    Ok((StepChoice::Pivot { row, alpha, kind }, state))
}

/// Resets the tolerance to its initial value and recomputes basic-variable
/// values from the nonbasic bounds (all nonbasics snapped to 0).
pub fn expand_reset<S: Scalar>(
    t: &Tableau<S>,
    state: &ExpandState<S>,
) -> (Tableau<S>, ExpandState<S>) {
    let mut t = t.clone();
    for v in &mut t.values {
        *v = S::zero();
    }
    for (i, &b) in t.basis.iter().enumerate() {
        t.values[b] = t.rhs[i].clone();
    }
    let mut state = state.clone();
    state.delta = state.delta_initial.clone();
    state.n = 0;
    (t, state)
}
