//! The simplex driver: pricing + ratio test + pivot, per-iteration records,
//! cycle detection, outcome classification and trajectory verification.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use crate::family::{closed_form_state, FamilyParams};
use crate::model::{to_tableau, LpInstance, Tableau};
use crate::numeric::Scalar;
use crate::pricing::PricingRule;
use crate::ratio::{expand_ratio_test, expand_reset, standard_ratio_test, ExpandState, StepChoice, StepKind};
use crate::{Error, Result};

/// Row-selection rule for one run.
#[derive(Debug, Clone)]
pub enum RatioRule<S> {
    Standard,
    Expand(ExpandState<S>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    Standard,
    Expand,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub max_iters: usize,
    /// Stop an EXPAND run as soon as the basis sequence has been p-periodic
    /// for 20 consecutive periods (used by the region sweep to keep exact
    /// arithmetic small). Off by default so trajectories run to the limit.
    pub early_cycle_stop: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_iters: 10_000, early_cycle_stop: false }
    }
}

/// State of the run at the start of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<S> {
    pub n: usize,
    pub entering: usize,
    pub leaving: Option<usize>,
    pub pivot_row: Option<usize>,
    pub alpha: S,
    pub kind: StepKind,
    /// Objective value at the start of the iteration.
    pub objective: S,
    /// Variable values at the start of the iteration.
    pub values: Vec<S>,
    /// Ordered basis fingerprint at the start of the iteration.
    pub basis_key: String,
}

/// Start-of-iteration snapshot where the run stopped (no step was taken).
#[derive(Debug, Clone, PartialEq)]
pub struct StateSnapshot<S> {
    pub n: usize,
    pub values: Vec<S>,
    pub basis_key: String,
    pub objective: S,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Cycles {
        period: usize,
        first_repeat_at: usize,
        /// False when proven by exact state repetition, true when inferred
        /// from basis periodicity over at least 20 periods.
        empirical: bool,
    },
    Unbounded { at: usize },
    Optimal { at: usize },
    IterationLimit,
}

impl Outcome {
    pub fn is_cycling(&self) -> bool {
        matches!(self, Outcome::Cycles { .. })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Cycles { period, first_repeat_at, empirical } => {
                write!(f, "CYCLES period={period} first_repeat_at={first_repeat_at}")?;
                if *empirical {
                    write!(f, " (empirical)")?;
                }
                Ok(())
            }
            Outcome::Unbounded { at } => write!(f, "UNBOUNDED at={at}"),
            Outcome::Optimal { at } => write!(f, "OPTIMAL at={at}"),
            Outcome::IterationLimit => write!(f, "ITERATION_LIMIT"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport<S> {
    pub instance_name: String,
    pub pricing: PricingRule,
    pub ratio: RatioKind,
    pub records: Vec<IterationRecord<S>>,
    pub final_state: StateSnapshot<S>,
    /// Start-of-iteration tableaux; index 0 is the initial tableau.
    pub tableaux: Vec<Tableau<S>>,
    pub outcome: Outcome,
}

pub fn run<S: Scalar>(
    instance: &LpInstance<S>,
    pricing: PricingRule,
    ratio: RatioRule<S>,
    max_iters: usize,
) -> Result<RunReport<S>> {
    run_with_options(instance, pricing, ratio, &RunOptions { max_iters, ..RunOptions::default() })
}

pub fn run_with_options<S: Scalar>(
    instance: &LpInstance<S>,
    pricing: PricingRule,
    ratio: RatioRule<S>,
    options: &RunOptions,
) -> Result<RunReport<S>> {
    for (i, b) in instance.rhs.iter().enumerate() {
        if b.is_negative() {
            return Err(Error::NegativeRhs(i));
        }
    }
    let ratio_kind = match &ratio {
        RatioRule::Standard => RatioKind::Standard,
        RatioRule::Expand(_) => RatioKind::Expand,
    };
    let mut expand = match ratio {
        RatioRule::Standard => None,
        RatioRule::Expand(state) => Some(state),
    };

    let mut t = to_tableau(instance);
    let mut tableaux = vec![t.clone()];
    let mut records: Vec<IterationRecord<S>> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();

    let outcome = loop {
        let n = t.iteration + 1;
        let basis_key = t.basis_key();
        let objective = instance.objective_value(&t.values);

        if expand.is_none() && S::EXACT {
            // with a fixed instance the tableau is determined by the ordered
            // basis, so repeating (basis, values) repeats the run forever
            let key = state_token(&basis_key, &t.values);
            if let Some(&first) = seen.get(&key) {
                break Outcome::Cycles { period: n - first, first_repeat_at: n, empirical: false };
            }
            seen.insert(key, n);
        }
        if n > options.max_iters {
            break Outcome::IterationLimit;
        }

        let Some(col) = pricing.select(&t) else {
            break Outcome::Optimal { at: n };
        };

        let step = match &mut expand {
            None => standard_ratio_test(&t, col),
            Some(state) => {
                let (step, next) = expand_ratio_test(&t, col, state.clone())?;
                *state = next;
                step
            }
        };

        match step {
            StepChoice::Unbounded => {
                records.push(IterationRecord {
                    n,
                    entering: col,
                    leaving: None,
                    pivot_row: None,
                    alpha: S::zero(),
                    kind: StepKind::Unbounded,
                    objective,
                    values: t.values.clone(),
                    basis_key,
                });
                break Outcome::Unbounded { at: n };
            }
            StepChoice::Pivot { row, alpha, kind } => {
                let start_values = t.values.clone();
                let leaving = t.basis[row];
                for i in 0..t.num_rows() {
                    let p = t.body[i][col].clone();
                    let basic = t.basis[i];
                    t.values[basic] = t.values[basic].clone() - alpha.clone() * p;
                }
                t.values[col] = t.values[col].clone() + alpha.clone();
                records.push(IterationRecord {
                    n,
                    entering: col,
                    leaving: Some(leaving),
                    pivot_row: Some(row),
                    alpha,
                    kind,
                    objective,
                    values: start_values,
                    basis_key,
                });
                t = t.pivot(row, col)?;
                t.iteration = n;

                if let Some(state) = &expand {
                    debug_assert!(
                        t.values.iter().all(|x| *x >= -state.delta.clone() || !S::EXACT),
                        "every value stays within the expanded bound"
                    );
                    if state.reset_period > 0 && n.is_multiple_of(state.reset_period) {
                        let (reset_t, reset_state) = expand_reset(&t, state);
                        t = reset_t;
                        expand = Some(reset_state);
                    }
                }
                tableaux.push(t.clone());

                if options.early_cycle_stop && expand.is_some() && n.is_multiple_of(60) {
                    let keys: Vec<&str> = records.iter().map(|r| r.basis_key.as_str()).collect();
                    if let Some((period, start)) = basis_periodicity(&keys, 20) {
                        break Outcome::Cycles {
                            period,
                            first_repeat_at: start + period,
                            empirical: true,
                        };
                    }
                }
            }
        }
    };

    let final_state = StateSnapshot {
        n: t.iteration + 1,
        values: t.values.clone(),
        basis_key: t.basis_key(),
        objective: instance.objective_value(&t.values),
    };
    Ok(RunReport {
        instance_name: instance.name.clone(),
        pricing,
        ratio: ratio_kind,
        records,
        final_state,
        tableaux,
        outcome,
    })
}

fn state_token<S: Scalar>(basis_key: &str, values: &[S]) -> String {
    let mut out = String::from(basis_key);
    for v in values {
        let _ = write!(out, ";{v}");
    }
    out
}

/// Smallest period p such that the key sequence is p-periodic for at least
/// `min_periods` consecutive periods ending at the last key; returns the
/// 1-based iteration where the periodic window begins.
fn basis_periodicity(keys: &[&str], min_periods: usize) -> Option<(usize, usize)> {
    let n = keys.len();
    for period in 1..=n / min_periods {
        let window = min_periods * period;
        let tail_start = n - window;
        if (tail_start..n - period).all(|i| keys[i] == keys[i + period]) {
            let mut start = tail_start;
            while start > 0 && keys[start - 1] == keys[start - 1 + period] {
                start -= 1;
            }
            return Some((period, start + 1));
        }
    }
    None
}

/// Identifies the cycle in a finished run.
///
/// Exact standard runs: the first exact repetition of (ordered basis,
/// values). Anything else: basis periodicity sustained for at least 20
/// periods within the record window (values are allowed to drift, as they do
/// under EXPAND's expanding bounds).
pub fn detect_cycle<S: Scalar>(report: &RunReport<S>) -> Option<(usize, usize)> {
    // the final snapshot repeats the terminal record's iteration when the
    // run ended on an unbounded step; include it only when it is new
    let fresh_final = report
        .records
        .last()
        .is_none_or(|r| r.n < report.final_state.n);
    if report.ratio == RatioKind::Standard && S::EXACT {
        let mut seen: HashMap<String, usize> = HashMap::new();
        let states = report
            .records
            .iter()
            .map(|r| (r.n, state_token(&r.basis_key, &r.values)))
            .chain(fresh_final.then(|| {
                (
                    report.final_state.n,
                    state_token(&report.final_state.basis_key, &report.final_state.values),
                )
            }));
        for (n, token) in states {
            if let Some(&first) = seen.get(&token) {
                return Some((n - first, first));
            }
            seen.insert(token, n);
        }
        return None;
    }
    let mut keys: Vec<&str> = report.records.iter().map(|r| r.basis_key.as_str()).collect();
    if fresh_final {
        keys.push(report.final_state.basis_key.as_str());
    }
    basis_periodicity(&keys, 20)
}

/// One disagreement between a recorded state and the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMismatch<S> {
    pub iteration: usize,
    /// 0-based variable index.
    pub variable: usize,
    pub expected: S,
    pub actual: S,
}

/// Compares every recorded start-of-iteration state of an EXPAND run on a
/// family instance against the closed forms. Exact equality on the rational
/// backend, relative tolerance 1e-9 on binary64. Empty result means the
/// whole trajectory matches.
pub fn verify_trajectory<S: Scalar>(
    report: &RunReport<S>,
    params: &FamilyParams<S>,
    tau: &S,
) -> Vec<TrajectoryMismatch<S>> {
    let mut mismatches = Vec::new();
    let fresh_final = report
        .records
        .last()
        .is_none_or(|r| r.n < report.final_state.n);
    let states = report
        .records
        .iter()
        .map(|r| (r.n, &r.values))
        .chain(fresh_final.then_some((report.final_state.n, &report.final_state.values)));
    for (n, values) in states {
        let expected = closed_form_state(params, tau, n);
        for (j, e) in expected.iter().enumerate() {
            if !values[j].pattern_eq(e) {
                mismatches.push(TrajectoryMismatch {
                    iteration: n,
                    variable: j,
                    expected: e.clone(),
                    actual: values[j].clone(),
                });
            }
        }
    }
    mismatches
}

/// How an EXPAND run left the two-iteration pattern, if it did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeBreak {
    /// Even iteration in which the first row was selected.
    pub broke_at: usize,
    /// Iteration of the unbounded step that followed, when the run ended.
    pub unbounded_at: Option<usize>,
}

/// Detects the only possible escape from the pattern: a first-row pivot in
/// an even iteration, after which the run goes unbounded within two further
/// iterations. Returns None for standard-ratio runs and for runs that kept
/// the pattern throughout.
pub fn classify_escape<S: Scalar>(report: &RunReport<S>) -> Option<EscapeBreak> {
    if report.ratio != RatioKind::Expand {
        return None;
    }
    for r in &report.records {
        let Some(row) = r.pivot_row else { continue };
        let expected = if r.n % 2 == 1 { 0 } else { 1 };
        if row != expected {
            if r.n % 2 == 0 && row == 0 {
                let unbounded_at = match report.outcome {
                    Outcome::Unbounded { at } => Some(at),
                    _ => None,
                };
                return Some(EscapeBreak { broke_at: r.n, unbounded_at });
            }
            return None;
        }
    }
    None
}

/// Iteration log: n, entering, leaving, pivot_row, alpha, kind, objective,
/// then one column per variable. Rationals render as p/q.
pub fn iteration_log_csv<S: Scalar>(report: &RunReport<S>) -> String {
    let vars = report
        .tableaux
        .first()
        .map(|t| t.total_vars())
        .unwrap_or(0);
    let mut out = String::from("n,entering,leaving,pivot_row,alpha,kind,objective");
    for j in 1..=vars {
        let _ = write!(out, ",x{j}");
    }
    out.push('\n');
    for r in &report.records {
        let leaving = r.leaving.map(|v| (v + 1).to_string()).unwrap_or_default();
        let pivot_row = r.pivot_row.map(|v| (v + 1).to_string()).unwrap_or_default();
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.entering + 1,
            leaving,
            pivot_row,
            r.alpha,
            r.kind.label(),
            r.objective
        );
        for v in &r.values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}
