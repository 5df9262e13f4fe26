//! LP instances in detached-coefficient form, the tableau with its pivot
//! operation, cyclic-shift comparison and the MPS / instance-text writers.
//!
//! Orientation is maximization throughout: the tableau objective row stores
//! the negated, basis-reduced cost row, so columns with negative entries are
//! the improving candidates and the printed rows of the source tableaux can
//! be compared entry for entry.

use std::fmt::Write as _;

use crate::numeric::Scalar;
use crate::{Error, Result};

/// A "maximize c^T x subject to Mx <= b, x >= 0" instance before slacks.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance<S> {
    pub name: String,
    pub num_structural: usize,
    pub num_constraints: usize,
    /// Maximization coefficients over the structural variables.
    pub objective: Vec<S>,
    /// Dense rows of M.
    pub matrix: Vec<Vec<S>>,
    pub rhs: Vec<S>,
}

impl<S: Scalar> LpInstance<S> {
    pub fn new(name: impl Into<String>, objective: Vec<S>, matrix: Vec<Vec<S>>, rhs: Vec<S>) -> Result<Self> {
        let num_structural = objective.len();
        let num_constraints = matrix.len();
        if rhs.len() != num_constraints {
            return Err(Error::Dimension(format!(
                "{} matrix rows but {} rhs entries",
                num_constraints,
                rhs.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != num_structural {
                return Err(Error::Dimension(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    num_structural
                )));
            }
        }
        Ok(LpInstance {
            name: name.into(),
            num_structural,
            num_constraints,
            objective,
            matrix,
            rhs,
        })
    }

    /// Appends one constraint row (over structural variables) with its rhs.
    pub fn with_extra_row(mut self, row: Vec<S>, rhs: S) -> Result<Self> {
        if row.len() != self.num_structural {
            return Err(Error::Dimension(format!(
                "extra row has {} entries, expected {}",
                row.len(),
                self.num_structural
            )));
        }
        self.matrix.push(row);
        self.rhs.push(rhs);
        self.num_constraints += 1;
        Ok(self)
    }

    /// c^T x over the structural variables.
    pub fn objective_value(&self, values: &[S]) -> S {
        self.objective
            .iter()
            .zip(values)
            .fold(S::zero(), |acc, (c, x)| acc + c.clone() * x.clone())
    }
}

/// Detached-coefficient tableau. One slack per constraint, slacks appended
/// after the structural columns. `values` carries every variable's current
/// value; pivoting never touches it (value updates belong to the ratio test).
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau<S> {
    pub num_structural: usize,
    /// num_constraints x total_vars coefficients.
    pub body: Vec<Vec<S>>,
    /// Transformed right-hand side, updated by pivots.
    pub rhs: Vec<S>,
    /// Reduced-cost row: candidate entering columns have negative entries.
    pub objective_row: Vec<S>,
    /// Right-hand side of the objective row (stays 0 on the cycling family).
    pub objective_rhs: S,
    /// Row index -> basic variable index.
    pub basis: Vec<usize>,
    pub values: Vec<S>,
    pub iteration: usize,
}

impl<S: Scalar> Tableau<S> {
    pub fn num_rows(&self) -> usize {
        self.body.len()
    }

    pub fn total_vars(&self) -> usize {
        self.objective_row.len()
    }

    pub fn is_basic(&self, col: usize) -> bool {
        self.basis.contains(&col)
    }

    /// Gauss-Jordan pivot making `col` the unit column with 1 in `row`.
    pub fn pivot(&self, row: usize, col: usize) -> Result<Tableau<S>> {
        if self.is_basic(col) {
            return Err(Error::PivotOnBasic(col));
        }
        let pivot = self.body[row][col].clone();
        if pivot.is_zero() {
            return Err(Error::ZeroPivot { row, col });
        }
        let mut t = self.clone();
        for x in &mut t.body[row] {
            *x = x.clone() / pivot.clone();
        }
        t.rhs[row] = t.rhs[row].clone() / pivot.clone();
        for i in 0..t.num_rows() {
            if i == row {
                continue;
            }
            let factor = t.body[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..t.total_vars() {
                let delta = factor.clone() * t.body[row][j].clone();
                t.body[i][j] = t.body[i][j].clone() - delta;
            }
            t.rhs[i] = t.rhs[i].clone() - factor.clone() * t.rhs[row].clone();
        }
        let factor = t.objective_row[col].clone();
        if !factor.is_zero() {
            for j in 0..t.total_vars() {
                let delta = factor.clone() * t.body[row][j].clone();
                t.objective_row[j] = t.objective_row[j].clone() - delta;
            }
            t.objective_rhs = t.objective_rhs.clone() - factor * t.rhs[row].clone();
        }
        t.basis[row] = col;
        debug_assert!(t.basic_columns_are_unit());
        Ok(t)
    }

    /// Basic columns must form an identity submatrix with zero reduced cost.
    pub fn basic_columns_are_unit(&self) -> bool {
        self.basis.iter().enumerate().all(|(row, &col)| {
            self.objective_row[col].is_zero()
                && self.body.iter().enumerate().all(|(i, r)| {
                    if i == row {
                        r[col].is_one()
                    } else {
                        r[col].is_zero()
                    }
                })
        })
    }

    /// Ordered basis fingerprint, e.g. "5|6".
    pub fn basis_key(&self) -> String {
        let mut out = String::new();
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            let _ = write!(out, "{b}");
        }
        out
    }
}

/// Introduces one slack per constraint and seats them as the initial basis.
/// The objective row holds -c on structural columns.
pub fn to_tableau<S: Scalar>(instance: &LpInstance<S>) -> Tableau<S> {
    let m = instance.num_constraints;
    let n = instance.num_structural;
    let total = n + m;
    let mut body = Vec::with_capacity(m);
    for (i, row) in instance.matrix.iter().enumerate() {
        let mut r: Vec<S> = row.clone();
        r.extend((0..m).map(|k| if k == i { S::one() } else { S::zero() }));
        body.push(r);
    }
    let mut objective_row: Vec<S> = instance.objective.iter().map(|c| -c.clone()).collect();
    objective_row.extend((0..m).map(|_| S::zero()));
    let basis: Vec<usize> = (n..total).collect();
    let mut values = vec![S::zero(); total];
    for (i, &b) in basis.iter().enumerate() {
        values[b] = instance.rhs[i].clone();
    }
    Tableau {
        num_structural: n,
        body,
        rhs: instance.rhs.clone(),
        objective_row,
        objective_rhs: S::zero(),
        basis,
        values,
        iteration: 0,
    }
}

/// True iff the first `num_cycling_cols` columns of `t2` (objective row
/// included) equal those of `t1` shifted cyclically right by `shift`.
/// Comparison is exact on the rational backend.
pub fn cyclic_shift_equal<S: Scalar>(
    t1: &Tableau<S>,
    t2: &Tableau<S>,
    shift: usize,
    num_cycling_cols: usize,
) -> Result<bool> {
    if t1.num_rows() != t2.num_rows()
        || t1.total_vars() != t2.total_vars()
        || num_cycling_cols > t1.total_vars()
    {
        return Err(Error::ShapeMismatch);
    }
    let k = num_cycling_cols;
    for j in 0..k {
        let src = (j + k - shift % k) % k;
        for i in 0..t1.num_rows() {
            if !t2.body[i][j].pattern_eq(&t1.body[i][src]) {
                return Ok(false);
            }
        }
        if !t2.objective_row[j].pattern_eq(&t1.objective_row[src]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fixed-format MPS text. The COST row stores the negated objective so that
/// an external minimizer reproduces the maximizing pivot sequence; a comment
/// records the convention. Terminating values are rendered exactly.
pub fn export_mps<S: Scalar>(instance: &LpInstance<S>) -> String {
    let mut out = String::new();
    let name = if instance.name.is_empty() { "CYCLE" } else { &instance.name };
    out.push_str("* Maximization instance: row COST holds the negated objective,\n");
    out.push_str("* so minimizing COST reproduces the original maximization.\n");
    let _ = writeln!(out, "NAME          {}", mps_name(name));
    out.push_str("ROWS\n N  COST\n");
    for i in 0..instance.num_constraints {
        let _ = writeln!(out, " L  R{}", i + 1);
    }
    out.push_str("COLUMNS\n");
    for j in 0..instance.num_structural {
        let col = format!("X{}", j + 1);
        let mut entries: Vec<(String, String)> = Vec::new();
        if !instance.objective[j].is_zero() {
            entries.push(("COST".into(), (-instance.objective[j].clone()).render_decimal()));
        }
        for i in 0..instance.num_constraints {
            if !instance.matrix[i][j].is_zero() {
                entries.push((format!("R{}", i + 1), instance.matrix[i][j].render_decimal()));
            }
        }
        for pair in entries.chunks(2) {
            let _ = write!(out, "    {col:<10}");
            for (row, value) in pair {
                let _ = write!(out, "{row:<10}{value:<15}");
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        }
    }
    out.push_str("RHS\n");
    for i in 0..instance.num_constraints {
        if !instance.rhs[i].is_zero() {
            let _ = writeln!(
                out,
                "    RHS       R{:<9}{}",
                i + 1,
                instance.rhs[i].render_decimal()
            );
        }
    }
    out.push_str("BOUNDS\n");
    out.push_str("* default bounds: all variables nonnegative\n");
    out.push_str("ENDATA\n");
    out
}

fn mps_name(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' })
        .take(8)
        .collect()
}

/// Line-oriented instance text: header lines `maximize`, `constraints m`,
/// `vars n`, then the objective row, m matrix rows and the rhs row. Values
/// are whitespace-separated decimals or p/q fractions; `#` starts a comment.
pub fn write_instance_text<S: Scalar>(instance: &LpInstance<S>) -> String {
    let mut out = String::new();
    if !instance.name.is_empty() {
        let _ = writeln!(out, "# {}", instance.name);
    }
    let _ = writeln!(out, "maximize");
    let _ = writeln!(out, "constraints {}", instance.num_constraints);
    let _ = writeln!(out, "vars {}", instance.num_structural);
    let row_text = |row: &[S]| {
        row.iter().map(|v| v.render_exact()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{}", row_text(&instance.objective));
    for row in &instance.matrix {
        let _ = writeln!(out, "{}", row_text(row));
    }
    let _ = writeln!(out, "{}", row_text(&instance.rhs));
    out
}

pub fn parse_instance_text<S: Scalar>(text: &str) -> Result<LpInstance<S>> {
    let mut name = String::new();
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if name.is_empty() {
                name = comment.trim().to_owned();
            }
            return None;
        }
        (!line.is_empty()).then(|| (i + 1, line.to_owned()))
    });
    let mut expect = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::InstanceFormat(format!("missing {what}")))
    };

    let (ln, header) = expect("header line `maximize`")?;
    if header != "maximize" {
        return Err(Error::InstanceFormat(format!(
            "line {ln}: expected `maximize`, found {header:?}"
        )));
    }
    let parse_count = |(ln, line): (usize, String), key: &str| -> Result<usize> {
        let rest = line.strip_prefix(key).ok_or_else(|| {
            Error::InstanceFormat(format!("line {ln}: expected `{key} <count>`"))
        })?;
        rest.trim().parse().map_err(|_| {
            Error::InstanceFormat(format!("line {ln}: bad count in `{line}`"))
        })
    };
    let m = parse_count(expect("constraints line")?, "constraints")?;
    let n = parse_count(expect("vars line")?, "vars")?;

    let parse_row = |(ln, line): (usize, String), want: usize| -> Result<Vec<S>> {
        let row = line
            .split_whitespace()
            .map(S::parse_number)
            .collect::<Result<Vec<S>>>()?;
        if row.len() != want {
            return Err(Error::InstanceFormat(format!(
                "line {ln}: expected {want} values, found {}",
                row.len()
            )));
        }
        Ok(row)
    };
    let objective = parse_row(expect("objective row")?, n)?;
    let mut matrix = Vec::with_capacity(m);
    for _ in 0..m {
        matrix.push(parse_row(expect("matrix row")?, n)?);
    }
    let rhs = parse_row(expect("rhs row")?, m)?;
    if lines.next().is_some() {
        return Err(Error::InstanceFormat("trailing content after rhs row".into()));
    }
    LpInstance::new(name, objective, matrix, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, Rational};
    use num::traits::Zero;
    use proptest::prelude::*;

    pub(crate) fn rats(row: &[&str]) -> Vec<Rational> {
        row.iter().map(|s| rat(s)).collect()
    }

    /// Problem (1): the canonical cycling example.
    pub(crate) fn problem_one() -> LpInstance<Rational> {
        LpInstance::new(
            "problem-one",
            rats(&["2.3", "2.15", "-13.55", "-0.4"]),
            vec![
                rats(&["0.4", "0.2", "-1.4", "-0.2"]),
                rats(&["-7.8", "-1.4", "7.8", "0.4"]),
            ],
            rats(&["0", "0"]),
        )
        .unwrap()
    }

    #[test]
    fn to_tableau_matches_printed_initial_tableau() {
        let t = to_tableau(&problem_one());
        assert_eq!(t.body[0], rats(&["0.4", "0.2", "-1.4", "-0.2", "1", "0"]));
        assert_eq!(t.body[1], rats(&["-7.8", "-1.4", "7.8", "0.4", "0", "1"]));
        assert_eq!(
            t.objective_row,
            rats(&["-2.3", "-2.15", "13.55", "0.4", "0", "0"])
        );
        assert_eq!(t.basis, vec![4, 5]);
        assert_eq!(t.values, rats(&["0", "0", "0", "0", "0", "0"]));
        assert!(t.basic_columns_are_unit());
        assert_eq!(t.basis_key(), "4|5");
    }

    #[test]
    fn to_tableau_trivial_instance() {
        let inst = LpInstance::new(
            "one-constraint",
            rats(&["0"]),
            vec![rats(&["1"])],
            rats(&["0"]),
        )
        .unwrap();
        let t = to_tableau(&inst);
        assert_eq!(t.basis, vec![1]);
        assert_eq!(t.values[1], rat("0"));
    }

    #[test]
    fn dimension_checks() {
        assert!(LpInstance::new("bad", rats(&["1"]), vec![rats(&["1", "2"])], rats(&["0"])).is_err());
        assert!(LpInstance::new("bad", rats(&["1"]), vec![rats(&["1"])], rats(&[])).is_err());
    }

    fn second_tableau() -> Tableau<Rational> {
        to_tableau(&problem_one()).pivot(0, 0).unwrap()
    }

    #[test]
    fn pivot_reproduces_second_tableau() {
        let t2 = second_tableau();
        assert_eq!(t2.body[0], rats(&["1", "0.5", "-3.5", "-0.5", "2.5", "0"]));
        assert_eq!(t2.body[1], rats(&["0", "2.5", "-19.5", "-3.5", "19.5", "1"]));
        assert_eq!(t2.objective_row, rats(&["0", "-1", "5.5", "-0.75", "5.75", "0"]));
        assert_eq!(t2.basis, vec![0, 5]);
        // entry (2,2) of the printed tableau
        assert_eq!(t2.body[1][1], rat("5/2"));
    }

    #[test]
    fn two_pivots_shift_the_pattern() {
        let t1 = to_tableau(&problem_one());
        let t3 = second_tableau().pivot(1, 1).unwrap();
        assert_eq!(t3.body[0], rats(&["1", "0", "0.4", "0.2", "-1.4", "-0.2"]));
        assert_eq!(t3.body[1], rats(&["0", "1", "-7.8", "-1.4", "7.8", "0.4"]));
        assert_eq!(
            t3.objective_row,
            rats(&["0", "0", "-2.3", "-2.15", "13.55", "0.4"])
        );
        assert!(cyclic_shift_equal(&t1, &t3, 2, 6).unwrap());
        assert!(cyclic_shift_equal(&t1, &t1, 0, 6).unwrap());
        assert!(!cyclic_shift_equal(&t1, &second_tableau(), 2, 6).unwrap());
    }

    #[test]
    fn pivot_rejects_basic_and_zero_columns() {
        let t = to_tableau(&problem_one());
        assert_eq!(t.pivot(0, 4), Err(Error::PivotOnBasic(4)));
        let t2 = second_tableau();
        // column 1 entry in row 2 is 0 after the first pivot
        assert_eq!(t2.body[1][0], rat("0"));
        assert!(matches!(t2.pivot(1, 0), Err(Error::PivotOnBasic(0))));
        // a genuinely zero nonbasic pivot entry
        let inst = LpInstance::new(
            "zero-col",
            rats(&["1", "1"]),
            vec![rats(&["1", "0"])],
            rats(&["0"]),
        )
        .unwrap();
        let t = to_tableau(&inst);
        assert_eq!(t.pivot(0, 1), Err(Error::ZeroPivot { row: 0, col: 1 }));
    }

    #[test]
    fn structural_columns_read_back() {
        let inst = problem_one();
        let t = to_tableau(&inst);
        for i in 0..inst.num_constraints {
            assert_eq!(&t.body[i][..inst.num_structural], &inst.matrix[i][..]);
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let t1 = to_tableau(&problem_one());
        let small = to_tableau(
            &LpInstance::new("s", rats(&["1"]), vec![rats(&["1"])], rats(&["0"])).unwrap(),
        );
        assert_eq!(cyclic_shift_equal(&t1, &small, 2, 6), Err(Error::ShapeMismatch));
    }

    #[test]
    fn mps_export_canonical() {
        let mps = export_mps(&problem_one());
        assert!(mps.contains("NAME"));
        assert!(mps.contains(" N  COST"));
        assert!(mps.contains(" L  R1"));
        assert!(mps.contains(" L  R2"));
        // negated objective for maximization
        assert!(mps.contains("-2.3"));
        assert!(mps.contains("13.55"));
        // all-zero rhs: no RHS entries between RHS and BOUNDS
        let rhs_section: Vec<&str> = mps
            .lines()
            .skip_while(|l| *l != "RHS")
            .take_while(|l| *l != "BOUNDS")
            .collect();
        assert_eq!(rhs_section, vec!["RHS"]);
        assert!(mps.ends_with("ENDATA\n"));
    }

    #[test]
    fn mps_export_nonzero_rhs() {
        let inst = problem_one()
            .with_extra_row(rats(&["0", "-20", "156", "8"]), rat("1"))
            .unwrap();
        let mps = export_mps(&inst);
        assert!(mps.lines().any(|l| l.starts_with("    RHS") && l.contains("R3")));
    }

    #[test]
    fn instance_text_roundtrip() {
        let inst = problem_one();
        let text = write_instance_text(&inst);
        let back: LpInstance<Rational> = parse_instance_text(&text).unwrap();
        assert_eq!(back, inst);
        // byte determinism
        assert_eq!(text, write_instance_text(&back));
    }

    #[test]
    fn instance_text_accepts_fractions() {
        let text = "maximize\nconstraints 1\nvars 2\n1/3 -0.5\n1 2/7\n0\n";
        let inst: LpInstance<Rational> = parse_instance_text(text).unwrap();
        assert_eq!(inst.matrix[0][1], rat("2/7"));
        assert_eq!(inst.objective[0], rat("1/3"));
    }

    #[test]
    fn instance_text_errors() {
        assert!(parse_instance_text::<Rational>("minimize\n").is_err());
        assert!(parse_instance_text::<Rational>("maximize\nconstraints x\n").is_err());
        let short = "maximize\nconstraints 1\nvars 2\n1 2\n1 2\n";
        assert!(parse_instance_text::<Rational>(short).is_err());
    }

    proptest! {
        /// Pivoting (r, c) then (r, previous basic of r) restores the tableau.
        #[test]
        fn pivot_involution(
            entries in proptest::collection::vec((-50i64..50, 1i64..12), 8),
            c in (-20i64..20, 1i64..6),
        ) {
            let vals: Vec<Rational> = entries
                .iter()
                .map(|&(n, d)| Rational::from_fraction(n, d))
                .collect();
            let inst = LpInstance::new(
                "prop",
                vec![Rational::from_fraction(c.0, c.1); 4],
                vec![vals[..4].to_vec(), vals[4..].to_vec()],
                vec![rat("0"), rat("0")],
            ).unwrap();
            let t = to_tableau(&inst);
            prop_assume!(!t.body[0][0].is_zero());
            let old_basic = t.basis[0];
            let pivoted = t.pivot(0, 0).unwrap();
            prop_assert!(pivoted.basic_columns_are_unit());
            let restored = pivoted.pivot(0, old_basic).unwrap();
            prop_assert_eq!(restored, t);
        }
    }
}
