//! The three-parameter family of 2/6-cycle instances.
//!
//! Every member is determined by (a11, a12, mu) plus an objective scale. The
//! 2x2 block `A` has trace -1 and determinant 1, so A^3 = I and two pivots
//! shift the coefficient pattern cyclically by two columns. a21 is always
//! derived, never free, which keeps that identity an invariant instead of a
//! runtime check.

use crate::model::{to_tableau, LpInstance, Tableau};
use crate::numeric::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams<S> {
    pub a11: S,
    pub a12: S,
    pub mu: S,
    /// Objective row multiplier; selection behaviour is invariant to it.
    pub scale: S,
}

impl<S: Scalar> FamilyParams<S> {
    pub fn new(a11: S, a12: S, mu: S, scale: S) -> Result<Self> {
        if a12.is_zero() {
            return Err(Error::Family("a12 must be nonzero".into()));
        }
        if scale.is_zero() {
            return Err(Error::Family("objective scale must be nonzero".into()));
        }
        let p = FamilyParams { a11, a12, mu, scale };
        debug_assert!({
            let lhs = -(p.a21() * p.a12.clone());
            let rhs = S::one() + p.a11.clone() + p.a11.clone() * p.a11.clone();
            lhs == rhs || !S::EXACT
        });
        Ok(p)
    }

    /// a21 = -(1 + a11 + a11^2) / a12.
    pub fn a21(&self) -> S {
        -(S::one() + self.a11.clone() + self.a11.clone() * self.a11.clone()) / self.a12.clone()
    }

    /// a22 = -1 - a11 (the trace condition).
    pub fn a22(&self) -> S {
        -(S::one() + self.a11.clone())
    }

    pub fn a_block(&self) -> [[S; 2]; 2] {
        [
            [self.a11.clone(), self.a12.clone()],
            [self.a21(), self.a22()],
        ]
    }

    /// A^{-1} = [[-(a11+1), -a12], [-a21, a11]]; det A = 1.
    pub fn inverse_block(&self) -> [[S; 2]; 2] {
        [
            [self.a22(), -self.a12.clone()],
            [-self.a21(), self.a11.clone()],
        ]
    }

    /// Objective blocks: the row starts as scale * [-1, mu | b | 0 0] with
    /// b = [-(a11+1) + mu*a21, -a12 - mu*a11].
    pub fn objective_b_block(&self) -> [S; 2] {
        [
            self.a22() + self.mu.clone() * self.a21(),
            -self.a12.clone() - self.mu.clone() * self.a11.clone(),
        ]
    }

    /// The instance whose initial tableau is the first-pattern layout:
    /// constraint rows [A | A^{-1}], objective scale*[-1, mu | b], rhs 0.
    pub fn instance(&self, name: impl Into<String>) -> LpInstance<S> {
        let a = self.a_block();
        let b = self.inverse_block();
        let [b1, b2] = self.objective_b_block();
        let obj_row = [-S::one(), self.mu.clone(), b1, b2];
        let objective = obj_row
            .into_iter()
            .map(|x| -(self.scale.clone() * x))
            .collect();
        let matrix = vec![
            vec![a[0][0].clone(), a[0][1].clone(), b[0][0].clone(), b[0][1].clone()],
            vec![a[1][0].clone(), a[1][1].clone(), b[1][0].clone(), b[1][1].clone()],
        ];
        LpInstance::new(name, objective, matrix, vec![S::zero(), S::zero()])
            .expect("family dimensions are consistent")
    }

    /// Initial tableau of [`Self::instance`].
    pub fn build_m1(&self) -> Tableau<S> {
        to_tableau(&self.instance(""))
    }

    /// The closed-form tableau after one pivot of the pattern, for checking
    /// against the pivoted form entry by entry. Requires a11 != 0.
    pub fn build_m2(&self) -> Result<Tableau<S>> {
        if self.a11.is_zero() {
            return Err(Error::Family("second-pattern tableau needs a11 != 0".into()));
        }
        let inv = S::one() / self.a11.clone();
        let a12_over = self.a12.clone() / self.a11.clone();
        let a21_over = self.a21() / self.a11.clone();
        let mut t = self.build_m1();
        t.body[0] = vec![
            S::one(),
            a12_over.clone(),
            -(S::one() + inv.clone()),
            -a12_over.clone(),
            inv.clone(),
            S::zero(),
        ];
        t.body[1] = vec![
            S::zero(),
            inv.clone(),
            a21_over.clone(),
            -(S::one() + inv.clone()),
            -a21_over,
            S::one(),
        ];
        let two = S::from_int(2);
        let obj = [
            S::zero(),
            self.mu.clone() + a12_over.clone(),
            self.mu.clone() * self.a21() - (two + self.a11.clone() + inv.clone()),
            -self.a12.clone() * (S::one() + inv.clone()) - self.mu.clone() * self.a11.clone(),
            inv,
            S::zero(),
        ];
        t.objective_row = obj
            .into_iter()
            .map(|x| self.scale.clone() * x)
            .collect();
        t.basis = vec![0, 5];
        t.iteration = 1;
        Ok(t)
    }

    /// Extra-constraint coefficients [a | -a * A^{-1}] over the structural
    /// variables; rows of this shape behave like the objective row and keep
    /// the two-pivot pattern.
    pub fn extra_row(&self, a_extra: &[S; 2]) -> Vec<S> {
        let inv = self.inverse_block();
        let prod0 = a_extra[0].clone() * inv[0][0].clone() + a_extra[1].clone() * inv[1][0].clone();
        let prod1 = a_extra[0].clone() * inv[0][1].clone() + a_extra[1].clone() * inv[1][1].clone();
        vec![a_extra[0].clone(), a_extra[1].clone(), -prod0, -prod1]
    }

    /// Family instance plus one pattern-preserving constraint row.
    pub fn augmented_instance(
        &self,
        name: impl Into<String>,
        a_extra: &[S; 2],
        rhs: S,
    ) -> LpInstance<S> {
        self.instance(name)
            .with_extra_row(self.extra_row(a_extra), rhs)
            .expect("extra row dimensions are consistent")
    }
}

impl FamilyParams<crate::Rational> {
    /// (0.4, 0.2, -2.15/2.3) with the objective row scaled by 2.3: the
    /// canonical cycling example.
    pub fn canonical() -> Self {
        use crate::numeric::rat;
        FamilyParams::new(rat("0.4"), rat("0.2"), rat("-2.15/2.3"), rat("2.3")).unwrap()
    }

    /// (0.4, 0.2, -1.75): mu chosen so the second-pattern tableau has a
    /// single candidate column, the base of the steepest-edge example.
    pub fn steepest_edge_example() -> Self {
        use crate::numeric::rat;
        FamilyParams::new(rat("0.4"), rat("0.2"), rat("-1.75"), rat("1")).unwrap()
    }
}

/// The steepest-edge cycling instance: the single-candidate member plus the
/// weight-shifting row [0, -20] with right-hand side 1.
pub fn steepest_edge_instance() -> LpInstance<crate::Rational> {
    use crate::numeric::rat;
    FamilyParams::steepest_edge_example().augmented_instance(
        "steepest-edge-cycling",
        &[rat("0"), rat("-20")],
        rat("1"),
    )
}

/// Tableau-level version of [`FamilyParams::augmented_instance`]: inserts a
/// pattern-preserving row (with its own slack) into a fresh first-pattern
/// tableau, before the objective row.
pub fn augment_extra_row<S: Scalar>(
    t: &Tableau<S>,
    params: &FamilyParams<S>,
    a_extra: &[S; 2],
    rhs: S,
) -> Result<Tableau<S>> {
    if t.num_structural != 4 || t.iteration != 0 {
        return Err(Error::Dimension(
            "extra rows are inserted into a fresh first-pattern tableau".into(),
        ));
    }
    let mut t = t.clone();
    let old_total = t.total_vars();
    let slacks = t.num_rows();
    let mut row = params.extra_row(a_extra);
    row.extend((0..slacks).map(|_| S::zero()));
    row.push(S::one());
    for r in &mut t.body {
        r.push(S::zero());
    }
    t.body.push(row);
    t.objective_row.push(S::zero());
    t.rhs.push(rhs.clone());
    t.basis.push(old_total);
    t.values.push(rhs);
    Ok(t)
}

/// The open interval of mu for which the first-pattern column is selected in
/// odd iterations and the second in even ones: (-1, -a12(a11+2)/(a11(a11+1))).
/// Nonempty iff a12 < a11(a11+1)/(a11+2).
pub fn mu_bounds<S: Scalar>(a11: &S, a12: &S) -> (S, S) {
    debug_assert!(a11.is_positive() && a12.is_positive());
    let hi = -(a12.clone() * (a11.clone() + S::from_int(2)))
        / (a11.clone() * (a11.clone() + S::one()));
    (-S::one(), hi)
}

/// Cycling under most-negative-reduced-cost pricing with the standard
/// largest-pivot ratio test: a11 > 0, 0 < a12 < 1 and mu strictly inside
/// [`mu_bounds`].
pub fn cycling_predicate_dantzig<S: Scalar>(p: &FamilyParams<S>) -> bool {
    if !p.a11.is_positive() || !p.a12.is_positive() || p.a12 >= S::one() {
        return false;
    }
    let (lo, hi) = mu_bounds(&p.a11, &p.a12);
    lo < p.mu && p.mu < hi
}

/// Cycling under EXPAND row selection: 0 < a11 <= 1/2, a12 > 0 and mu
/// strictly inside [`mu_bounds`]. The a12 < 1 condition is implied here, not
/// re-imposed.
pub fn cycling_predicate_expand<S: Scalar>(p: &FamilyParams<S>) -> bool {
    if !p.a11.is_positive() || p.a11 > S::from_fraction(1, 2) || !p.a12.is_positive() {
        return false;
    }
    let (lo, hi) = mu_bounds(&p.a11, &p.a12);
    let inside = lo < p.mu && p.mu < hi;
    // the interval is nonempty only when a12 < a11(a11+1)/(a11+2) < 3/10
    debug_assert!(!inside || p.a12 < S::one());
    inside
}

/// s_k = sum_{i=0..k} a11^i, zero for k < 0.
pub fn geometric_sum<S: Scalar>(a11: &S, k: isize) -> S {
    if k < 0 {
        return S::zero();
    }
    let mut total = S::zero();
    let mut power = S::one();
    for _ in 0..=k {
        total = total + power.clone();
        power = power * a11.clone();
    }
    total
}

/// S_k = sum_{i=0..k} (k+1-i) a11^i, zero for k < 0.
pub fn weighted_sum<S: Scalar>(a11: &S, k: isize) -> S {
    if k < 0 {
        return S::zero();
    }
    let mut total = S::zero();
    let mut power = S::one();
    for i in 0..=k {
        total = total + S::from_int((k + 1 - i) as i64) * power.clone();
        power = power * a11.clone();
    }
    total
}

/// Cached s_k, S_k and G_k sequences for one (family, u0) pair.
///
/// G_k = (a12 a21 / a11) s_k + 1/a11 - S_{k-2} + (u0 + 2k + 2); its sign
/// decides whether the second-row pivot stays acceptable in the iteration
/// where the tolerance has grown 2k+2 times. Construction cross-checks the
/// recurrences s_k = 1 + a11 s_{k-1}, S_k - S_{k-1} = s_k and
/// G_{k+1} - G_k = 2 - s_{k+2} against the direct sums.
#[derive(Debug, Clone)]
pub struct SeriesCache<S> {
    pub a11: S,
    pub u0: S,
    s: Vec<S>,
    big_s: Vec<S>,
    g: Vec<S>,
}

impl<S: Scalar> SeriesCache<S> {
    pub fn new(params: &FamilyParams<S>, u0: &S, kmax: usize) -> Result<Self> {
        if params.a11.is_zero() {
            return Err(Error::Family("series need a11 != 0".into()));
        }
        let a11 = params.a11.clone();
        let upto = kmax + 2;
        let mut s = Vec::with_capacity(upto + 1);
        let mut big_s = Vec::with_capacity(upto + 1);
        let mut power = S::one();
        let mut acc = S::zero();
        let mut weighted = S::zero();
        for k in 0..=upto {
            acc = acc + power.clone();
            weighted = weighted + acc.clone();
            power = power * a11.clone();
            s.push(acc.clone());
            big_s.push(weighted.clone());
            debug_assert!(self_check(&a11, &s, &big_s, k));
        }
        let coupling = params.a12.clone() * params.a21() / a11.clone();
        let inv = S::one() / a11.clone();
        let g: Vec<S> = (0..=kmax)
            .map(|k| {
                let tail = u0.clone() + S::from_int(2 * k as i64 + 2);
                let lag = if k >= 2 { big_s[k - 2].clone() } else { S::zero() };
                coupling.clone() * s[k].clone() + inv.clone() - lag + tail
            })
            .collect();
        for k in 0..kmax {
            let diff = g[k + 1].clone() - g[k].clone();
            let expected = S::from_int(2) - s[k + 2].clone();
            let consistent = if S::EXACT {
                diff == expected
            } else {
                let scale = if expected.abs() > S::one() { expected.abs() } else { S::one() };
                diff.approx_eq(&expected, &(S::from_fraction(1, 1_000_000) * scale))
            };
            if !consistent {
                panic!("series self-check failed at k={k}: {diff} vs {expected}");
            }
        }
        Ok(SeriesCache { a11, u0: u0.clone(), s, big_s, g })
    }

    pub fn kmax(&self) -> usize {
        self.g.len() - 1
    }

    pub fn s(&self, k: isize) -> S {
        if k < 0 { S::zero() } else { self.s[k as usize].clone() }
    }

    pub fn big_s(&self, k: isize) -> S {
        if k < 0 { S::zero() } else { self.big_s[k as usize].clone() }
    }

    pub fn g(&self, k: usize) -> S {
        self.g[k].clone()
    }
}

fn self_check<S: Scalar>(a11: &S, s: &[S], big_s: &[S], k: usize) -> bool {
    if !S::EXACT {
        return true;
    }
    let prev_s = if k >= 1 { s[k - 1].clone() } else { S::zero() };
    let prev_big = if k >= 1 { big_s[k - 1].clone() } else { S::zero() };
    s[k] == S::one() + a11.clone() * prev_s && big_s[k].clone() - prev_big == s[k]
}

/// Smallest k <= cap with G_k < 0, scanning incrementally in O(1) memory.
/// None when G stays nonnegative up to the cap; guaranteed None for
/// 0 < a11 <= 1/2 and guaranteed Some for a11 > 1/2 once cap is large enough.
pub fn first_negative_g<S: Scalar>(
    params: &FamilyParams<S>,
    u0: &S,
    cap: usize,
) -> Result<Option<usize>> {
    if params.a11.is_zero() {
        return Err(Error::Family("series need a11 != 0".into()));
    }
    let a11 = params.a11.clone();
    let coupling = params.a12.clone() * params.a21() / a11.clone();
    let inv = S::one() / a11.clone();
    let mut s_k = S::one(); // s_0
    let mut s_prev = S::zero(); // s_{k-1}
    let mut lag_sum = S::zero(); // S_{k-2}
    for k in 0..=cap {
        let tail = u0.clone() + S::from_int(2 * k as i64 + 2);
        let g = coupling.clone() * s_k.clone() + inv.clone() - lag_sum.clone() + tail;
        if g.is_negative() {
            return Ok(Some(k));
        }
        // advance: S_{k-1} = S_{k-2} + s_{k-1}, then s_{k+1} = 1 + a11 s_k
        lag_sum = lag_sum + s_prev.clone();
        s_prev = s_k.clone();
        s_k = S::one() + a11.clone() * s_k;
    }
    Ok(None)
}

/// Start-of-iteration variable values (x1..x6, original indexing) of an
/// EXPAND run on a cycling family member, as closed forms linear in tau.
pub fn closed_form_state<S: Scalar>(params: &FamilyParams<S>, tau: &S, n: usize) -> Vec<S> {
    assert!(n >= 1, "iterations are 1-based");
    let a11 = &params.a11;
    let a21 = params.a21();
    let mut out = vec![S::zero(); 6];
    let mut put = |subscript: usize, value: S| {
        out[(subscript - 1) % 6] = value;
    };
    if n % 2 == 1 {
        let k = ((n - 1) / 2) as isize;
        put(
            (2 * k + 1) as usize,
            -(tau.clone() * weighted_sum(a11, k - 2)),
        );
        put((2 * k + 3) as usize, -(tau.clone() * weighted_sum(a11, k - 1)));
        put(
            (2 * k + 5) as usize,
            tau.clone() * (S::one() - weighted_sum(a11, k)),
        );
        put(
            (2 * k + 6) as usize,
            -(tau.clone() * a21 * geometric_sum(a11, k - 1)),
        );
    } else {
        let k = ((n - 2) / 2) as isize;
        let inv = S::one() / a11.clone();
        put(
            (2 * k + 1) as usize,
            tau.clone() * (inv.clone() - weighted_sum(a11, k - 2)),
        );
        put((2 * k + 3) as usize, -(tau.clone() * weighted_sum(a11, k - 1)));
        put((2 * k + 5) as usize, -(tau.clone() * weighted_sum(a11, k)));
        put(
            (2 * k + 6) as usize,
            -(tau.clone() * (a21 / a11.clone()) * geometric_sum(a11, k)),
        );
    }
    out
}
