//! Parameter-region mapping over (a11, a12) with a mu rule per cell:
//! evaluates the closed-form cycling predicates and the actual simulations
//! side by side, and renders the region as CSV or SVG.
//!
//! The sweep always runs in exact arithmetic with Dantzig pricing; cells are
//! independent and evaluated in parallel with deterministic ordering.

use std::fmt::Write as _;

use num::traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::engine::{detect_cycle, run_with_options, Outcome, RatioRule, RunOptions};
use crate::family::{cycling_predicate_dantzig, cycling_predicate_expand, mu_bounds, FamilyParams};
use crate::numeric::Scalar;
use crate::ratio::ExpandState;
use crate::Rational;

#[derive(Debug, Clone)]
pub struct RangeSpec {
    pub lo: Rational,
    pub hi: Rational,
    pub steps: usize,
}

impl RangeSpec {
    pub fn new(lo: Rational, hi: Rational, steps: usize) -> Self {
        RangeSpec { lo, hi, steps }
    }

    fn step(&self) -> Rational {
        if self.steps == 0 {
            return Rational::zero();
        }
        (self.hi.clone() - self.lo.clone()) / Rational::from_int(self.steps as i64)
    }

    /// Cell centers: lo + (2i+1)/(2n) * (hi - lo), exact rationals that never
    /// land on the boundary curves.
    fn center(&self, i: usize) -> Rational {
        self.lo.clone()
            + (self.hi.clone() - self.lo.clone())
                * Rational::from_fraction(2 * i as i64 + 1, 2 * self.steps as i64)
    }
}

#[derive(Debug, Clone)]
pub enum MuRule {
    Fixed(Rational),
    /// Midpoint of the open mu interval when nonempty.
    Midpoint,
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub a11: RangeSpec,
    pub a12: RangeSpec,
    pub mu: MuRule,
    /// Iteration cap per simulated cell.
    pub max_iters: usize,
}

impl GridSpec {
    pub fn new(a11: RangeSpec, a12: RangeSpec, mu: MuRule) -> Self {
        GridSpec { a11, a12, mu, max_iters: 600 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimOutcome {
    Cycles { period: usize },
    Unbounded,
    Optimal,
    IterationLimit,
    /// Cell with an empty mu interval under the midpoint rule.
    NotRun,
}

impl SimOutcome {
    pub fn is_cycling(&self) -> bool {
        matches!(self, SimOutcome::Cycles { .. })
    }

    pub fn label(&self) -> String {
        match self {
            SimOutcome::Cycles { period } => format!("cycles({period})"),
            SimOutcome::Unbounded => "unbounded".into(),
            SimOutcome::Optimal => "optimal".into(),
            SimOutcome::IterationLimit => "limit".into(),
            SimOutcome::NotRun => "not-run".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub a11: Rational,
    pub a12: Rational,
    pub mu: Option<Rational>,
    pub predicted_dantzig: bool,
    pub predicted_expand: bool,
    pub sim_dantzig: SimOutcome,
    pub sim_expand: SimOutcome,
    /// Within one grid step of a region boundary; predicate/simulation
    /// agreement is not asserted there.
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub spec: GridSpec,
    /// Row-major: index = a11_index * a12.steps + a12_index.
    pub cells: Vec<Cell>,
}

/// Evaluates predicates and simulations (standard and EXPAND ratio tests,
/// Dantzig pricing, exact arithmetic) on every cell of the grid.
pub fn region_sweep(spec: &GridSpec) -> RegionGrid {
    let coords: Vec<(usize, usize)> = (0..spec.a11.steps)
        .flat_map(|i| (0..spec.a12.steps).map(move |j| (i, j)))
        .collect();
    let cells: Vec<Cell> = coords
        .par_iter()
        .map(|&(i, j)| evaluate_cell(spec, spec.a11.center(i), spec.a12.center(j)))
        .collect();
    RegionGrid { spec: spec.clone(), cells }
}

fn evaluate_cell(spec: &GridSpec, a11: Rational, a12: Rational) -> Cell {
    let (lo, hi) = mu_bounds(&a11, &a12);
    let interval_nonempty = lo < hi;
    let mu = match &spec.mu {
        MuRule::Fixed(v) => Some(v.clone()),
        MuRule::Midpoint => interval_nonempty
            .then(|| (lo.clone() + hi.clone()) / Rational::from_int(2)),
    };

    let step_a11 = spec.a11.step();
    let step_a12 = spec.a12.step();
    let curve = a11.clone() * (a11.clone() + Rational::one())
        / (a11.clone() + Rational::from_int(2));
    let mut boundary = (a12.clone() - curve).abs() <= step_a12
        || (a11.clone() - Rational::from_fraction(1, 2)).abs() <= step_a11
        || (a12.clone() - Rational::one()).abs() <= step_a12;
    if let Some(mu) = &mu {
        if interval_nonempty {
            let margin_lo = mu.clone() - lo.clone();
            let margin_hi = hi.clone() - mu.clone();
            let margin = if margin_lo < margin_hi { margin_lo } else { margin_hi };
            let step = if step_a11 > step_a12 { step_a11.clone() } else { step_a12.clone() };
            boundary = boundary || margin <= step;
        }
    }

    let (predicted_dantzig, predicted_expand, sim_dantzig, sim_expand) = match &mu {
        None => (false, false, SimOutcome::NotRun, SimOutcome::NotRun),
        Some(mu) => {
            let params = FamilyParams::new(a11.clone(), a12.clone(), mu.clone(), Rational::one())
                .expect("grid a12 is positive");
            let pd = cycling_predicate_dantzig(&params);
            let pe = cycling_predicate_expand(&params);
            let sd = simulate(&params, RatioRule::Standard, spec.max_iters);
            let se = simulate(
                &params,
                RatioRule::Expand(ExpandState::new(Rational::one(), Rational::one(), 0)),
                spec.max_iters,
            );
            (pd, pe, sd, se)
        }
    };

    Cell {
        a11,
        a12,
        mu,
        predicted_dantzig,
        predicted_expand,
        sim_dantzig,
        sim_expand,
        boundary,
    }
}

fn simulate(params: &FamilyParams<Rational>, ratio: RatioRule<Rational>, max_iters: usize) -> SimOutcome {
    let options = RunOptions { max_iters, early_cycle_stop: true };
    let report = run_with_options(&params.instance(""), crate::pricing::PricingRule::Dantzig, ratio, &options)
        .expect("family instances are feasible at the origin");
    match report.outcome {
        Outcome::Cycles { period, .. } => SimOutcome::Cycles { period },
        Outcome::Unbounded { .. } => SimOutcome::Unbounded,
        Outcome::Optimal { .. } => SimOutcome::Optimal,
        Outcome::IterationLimit => match detect_cycle(&report) {
            Some((period, _)) => SimOutcome::Cycles { period },
            None => SimOutcome::IterationLimit,
        },
    }
}

/// Non-boundary cells where a predicate disagrees with its simulation. Empty
/// on every grid we know of; the executable form of the two cycling
/// characterizations.
pub fn disagreements(grid: &RegionGrid) -> Vec<&Cell> {
    grid.cells
        .iter()
        .filter(|c| {
            !c.boundary
                && (c.predicted_dantzig != c.sim_dantzig.is_cycling()
                    || c.predicted_expand != c.sim_expand.is_cycling())
        })
        .collect()
}

/// One row per cell; exact values (terminating decimals or p/q).
pub fn emit_region_csv(grid: &RegionGrid) -> String {
    let mut out =
        String::from("a11,a12,mu,pred_dantzig,pred_expand,sim_dantzig,sim_expand,boundary\n");
    for c in &grid.cells {
        let mu = c.mu.as_ref().map(|m| m.render_exact()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.a11.render_exact(),
            c.a12.render_exact(),
            mu,
            c.predicted_dantzig,
            c.predicted_expand,
            c.sim_dantzig.label(),
            c.sim_expand.label(),
            c.boundary
        );
    }
    out
}

const SVG_PLOT: f64 = 480.0;
const SVG_MARGIN: f64 = 56.0;

/// Standalone SVG: cells coloured by cycling behaviour, with the analytic
/// boundary curve a12 = a11(a11+1)/(a11+2) and the a11 = 1/2 line overlaid.
pub fn emit_region_svg(grid: &RegionGrid) -> String {
    let a11_lo = grid.spec.a11.lo.to_f64_lossy();
    let a11_hi = grid.spec.a11.hi.to_f64_lossy();
    let a12_lo = grid.spec.a12.lo.to_f64_lossy();
    let a12_hi = grid.spec.a12.hi.to_f64_lossy();
    let span_x = (a11_hi - a11_lo).max(f64::MIN_POSITIVE);
    let span_y = (a12_hi - a12_lo).max(f64::MIN_POSITIVE);
    let to_x = |a11: f64| SVG_MARGIN + (a11 - a11_lo) / span_x * SVG_PLOT;
    let to_y = |a12: f64| SVG_MARGIN + (a12_hi - a12) / span_y * SVG_PLOT;
    let width = SVG_PLOT + 2.0 * SVG_MARGIN;

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{width}\" viewBox=\"0 0 {width} {width}\">"
    );
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{width}\" fill=\"white\"/>"
    );

    if grid.spec.a11.steps > 0 && grid.spec.a12.steps > 0 {
        let cell_w = SVG_PLOT / grid.spec.a11.steps as f64;
        let cell_h = SVG_PLOT / grid.spec.a12.steps as f64;
        out.push_str("  <g stroke=\"none\">\n");
        for (idx, cell) in grid.cells.iter().enumerate() {
            let i = idx / grid.spec.a12.steps;
            let j = idx % grid.spec.a12.steps;
            let x = SVG_MARGIN + i as f64 * cell_w;
            let y = SVG_MARGIN + SVG_PLOT - (j + 1) as f64 * cell_h;
            let fill = match (cell.sim_dantzig.is_cycling(), cell.sim_expand.is_cycling()) {
                (true, true) => "#1b9e77",
                (true, false) => "#d95f02",
                (false, true) => "#7570b3",
                (false, false) => "#f0f0f0",
            };
            let opacity = if cell.boundary { 0.45 } else { 1.0 };
            let _ = writeln!(
                out,
                "    <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cell_w:.2}\" height=\"{cell_h:.2}\" fill=\"{fill}\" fill-opacity=\"{opacity}\"/>"
            );
        }
        out.push_str("  </g>\n");
    }

    // mu-interval closing curve a12 = a11(a11+1)/(a11+2)
    let mut path = String::new();
    let samples = 256;
    let mut started = false;
    for k in 0..=samples {
        let a11 = a11_lo + span_x * k as f64 / samples as f64;
        let a12 = a11 * (a11 + 1.0) / (a11 + 2.0);
        if a12 < a12_lo || a12 > a12_hi {
            started = false;
            continue;
        }
        let cmd = if started { 'L' } else { 'M' };
        let _ = write!(path, "{}{:.2} {:.2} ", cmd, to_x(a11), to_y(a12));
        started = true;
    }
    if !path.is_empty() {
        let _ = writeln!(
            out,
            "  <path d=\"{}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\"/>",
            path.trim_end()
        );
    }
    if a11_lo < 0.5 && 0.5 < a11_hi {
        let x = to_x(0.5);
        let _ = writeln!(
            out,
            "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#222222\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>",
            to_y(a12_hi),
            to_y(a12_lo)
        );
    }

    // axes
    let x0 = SVG_MARGIN;
    let y0 = SVG_MARGIN + SVG_PLOT;
    let _ = writeln!(
        out,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"black\"/>",
        SVG_MARGIN + SVG_PLOT
    );
    let _ = writeln!(
        out,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{SVG_MARGIN}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">a11</text>",
        SVG_MARGIN + SVG_PLOT / 2.0,
        y0 + 36.0
    );
    let _ = writeln!(
        out,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 {:.1} {:.1})\">a12</text>",
        x0 - 36.0,
        SVG_MARGIN + SVG_PLOT / 2.0,
        x0 - 36.0,
        SVG_MARGIN + SVG_PLOT / 2.0
    );
    for (value, label_x) in [(a11_lo, true), (a11_hi, true), (a12_lo, false), (a12_hi, false)] {
        if label_x {
            let _ = writeln!(
                out,
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{value}</text>",
                to_x(value),
                y0 + 18.0
            );
        } else {
            let _ = writeln!(
                out,
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{value}</text>",
                x0 - 6.0,
                to_y(value) + 4.0
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn single_cell_spec(a11: &str, a12: &str, mu: MuRule) -> GridSpec {
        // one cell centred on (a11, a12) with a tight step so the centre is
        // not flagged as boundary unless genuinely near a curve
        let a = rat(a11);
        let b = rat(a12);
        let eps = rat("0.01");
        GridSpec::new(
            RangeSpec::new(a.clone() - eps.clone(), a + eps.clone(), 1),
            RangeSpec::new(b.clone() - eps.clone(), b + eps, 1),
            mu,
        )
    }

    #[test]
    fn canonical_cell_agrees() {
        let spec = single_cell_spec("0.4", "0.2", MuRule::Fixed(rat("-2.15/2.3")));
        let grid = region_sweep(&spec);
        let cell = &grid.cells[0];
        assert_eq!(cell.a11, rat("0.4"));
        assert_eq!(cell.a12, rat("0.2"));
        assert!(!cell.boundary);
        assert!(cell.predicted_dantzig && cell.predicted_expand);
        assert_eq!(cell.sim_dantzig, SimOutcome::Cycles { period: 6 });
        assert_eq!(cell.sim_expand, SimOutcome::Cycles { period: 6 });
        assert!(disagreements(&grid).is_empty());
    }

    #[test]
    fn escape_cell_cycles_only_under_standard() {
        let spec = single_cell_spec("0.6", "0.2", MuRule::Midpoint);
        let grid = region_sweep(&spec);
        let cell = &grid.cells[0];
        assert!(cell.predicted_dantzig);
        assert!(!cell.predicted_expand);
        assert_eq!(cell.sim_dantzig, SimOutcome::Cycles { period: 6 });
        assert_eq!(cell.sim_expand, SimOutcome::Unbounded);
        assert!(disagreements(&grid).is_empty());
    }

    #[test]
    fn empty_mu_interval_cell_is_not_run() {
        let spec = single_cell_spec("0.4", "0.35", MuRule::Midpoint);
        let grid = region_sweep(&spec);
        let cell = &grid.cells[0];
        assert_eq!(cell.mu, None);
        assert!(!cell.predicted_dantzig && !cell.predicted_expand);
        assert_eq!(cell.sim_dantzig, SimOutcome::NotRun);
        assert_eq!(cell.sim_expand, SimOutcome::NotRun);
        assert!(disagreements(&grid).is_empty());
    }

    #[test]
    fn csv_has_header_and_one_row_per_cell() {
        let spec = GridSpec::new(
            RangeSpec::new(rat("0.3"), rat("0.5"), 2),
            RangeSpec::new(rat("0.1"), rat("0.3"), 2),
            MuRule::Midpoint,
        );
        let grid = region_sweep(&spec);
        let csv = emit_region_csv(&grid);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[0],
            "a11,a12,mu,pred_dantzig,pred_expand,sim_dantzig,sim_expand,boundary"
        );
        assert!(lines[1].starts_with("0.35,0.15,"));
    }

    #[test]
    fn expand_region_within_dantzig_region() {
        let spec = GridSpec::new(
            RangeSpec::new(rat("0"), rat("1"), 8),
            RangeSpec::new(rat("0"), rat("0.5"), 8),
            MuRule::Midpoint,
        );
        let grid = region_sweep(&spec);
        for cell in &grid.cells {
            if cell.sim_expand.is_cycling() {
                assert!(cell.sim_dantzig.is_cycling(), "cell ({}, {})", cell.a11, cell.a12);
            }
            if cell.predicted_expand {
                assert!(cell.predicted_dantzig);
            }
        }
        assert!(disagreements(&grid).is_empty());
    }

    #[test]
    fn svg_is_well_formed_xml() {
        let spec = GridSpec::new(
            RangeSpec::new(rat("0"), rat("1"), 4),
            RangeSpec::new(rat("0"), rat("0.5"), 4),
            MuRule::Midpoint,
        );
        let svg = emit_region_svg(&region_sweep(&spec));
        let doc = roxmltree::Document::parse(&svg).expect("well-formed SVG");
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let rects = doc.descendants().filter(|n| n.has_tag_name("rect")).count();
        assert_eq!(rects, 17); // background + 16 cells
        assert!(doc.descendants().any(|n| n.has_tag_name("path")));
    }

    #[test]
    fn empty_grid_svg_has_axes_only() {
        let spec = GridSpec::new(
            RangeSpec::new(rat("0"), rat("1"), 0),
            RangeSpec::new(rat("0"), rat("0.5"), 0),
            MuRule::Midpoint,
        );
        let grid = region_sweep(&spec);
        assert!(grid.cells.is_empty());
        let svg = emit_region_svg(&grid);
        let doc = roxmltree::Document::parse(&svg).expect("well-formed SVG");
        assert!(doc.descendants().filter(|n| n.has_tag_name("line")).count() >= 2);
    }
}
