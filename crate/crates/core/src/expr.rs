//! Load functions: expression trees whose members are componentwise increasing
//! self-bijections of the reals, together with their componentwise inverses.
//!
//! The grammar is `var | sum | max | oddpow | shift` over positive-coefficient
//! variables. A well-formed tree (see [`LoadExpr::check_fa`]) is strictly
//! increasing and onto in every variable it mentions:
//!
//! * `sum` of increasing bijections is one in every variable some child mentions;
//! * `max` keeps the property only when every child mentions the same variables,
//!   since `t ↦ max(t, c)` is constant below `c`;
//! * odd powers and constant shifts are increasing bijections of the reals.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::instance::EdgeId;
use crate::numeric::{Rational, Scalar};

/// Magnitude past which bracket expansion gives up (2^64).
pub const BRACKET_LIMIT: f64 = 18_446_744_073_709_551_616.0;
/// Bisection iteration budget.
pub const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("no value supplied for edge {0}")]
    KeyMismatch(EdgeId),
    #[error("could not bracket a root for target {target}; function is not an increasing bijection")]
    NoBracket { target: String },
    #[error("nonlinear function cannot be inverted in exact arithmetic")]
    NonlinearExact,
    #[error("free edge {0} does not influence the function")]
    FreeEdgeUnused(EdgeId),
}

/// Anything that can supply a value per edge.
pub trait EdgeValues<T> {
    fn value(&self, e: EdgeId) -> Option<&T>;
}

impl<T> EdgeValues<T> for [T] {
    fn value(&self, e: EdgeId) -> Option<&T> {
        self.get(e.0)
    }
}

impl<T> EdgeValues<T> for Vec<T> {
    fn value(&self, e: EdgeId) -> Option<&T> {
        self.get(e.0)
    }
}

impl<T> EdgeValues<T> for BTreeMap<EdgeId, T> {
    fn value(&self, e: EdgeId) -> Option<&T> {
        self.get(&e)
    }
}

impl<T> EdgeValues<T> for HashMap<EdgeId, T> {
    fn value(&self, e: EdgeId) -> Option<&T> {
        self.get(&e)
    }
}

/// `base` with one edge overridden.
struct Override<'a, T, P: ?Sized> {
    base: &'a P,
    edge: EdgeId,
    value: T,
}

impl<T, P: EdgeValues<T> + ?Sized> EdgeValues<T> for Override<'_, T, P> {
    fn value(&self, e: EdgeId) -> Option<&T> {
        if e == self.edge {
            Some(&self.value)
        } else {
            self.base.value(e)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadExpr {
    Var { edge: EdgeId, coeff: Rational },
    Sum(Vec<LoadExpr>),
    Max(Vec<LoadExpr>),
    OddPow { base: Box<LoadExpr>, exp: u32 },
    Shift { base: Box<LoadExpr>, offset: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FaViolation {
    #[error("non-positive coefficient on edge {0}")]
    NonPositiveCoeff(EdgeId),
    #[error("exponent {0} is not an odd positive integer")]
    BadExponent(u32),
    #[error("sum or max without children")]
    EmptyNode,
    #[error("max children do not share the same edge set")]
    MaxEdgeMismatch,
    #[error("edge {0} of the vertex is not referenced")]
    MissingEdge(EdgeId),
    #[error("edge {0} is not incident to the vertex")]
    ForeignEdge(EdgeId),
}

impl LoadExpr {
    pub fn var(edge: EdgeId, coeff: Rational) -> Self {
        LoadExpr::Var { edge, coeff }
    }

    /// `Σ coeff_e · x_e`.
    pub fn linear(terms: impl IntoIterator<Item = (EdgeId, Rational)>) -> Self {
        LoadExpr::Sum(terms.into_iter().map(|(edge, coeff)| LoadExpr::Var { edge, coeff }).collect())
    }

    pub fn oddpow(base: LoadExpr, exp: u32) -> Self {
        LoadExpr::OddPow { base: Box::new(base), exp }
    }

    pub fn shift(base: LoadExpr, offset: Rational) -> Self {
        LoadExpr::Shift { base: Box::new(base), offset }
    }

    pub fn edges(&self) -> BTreeSet<EdgeId> {
        let mut out = BTreeSet::new();
        self.collect_edges(&mut out);
        out
    }

    fn collect_edges(&self, out: &mut BTreeSet<EdgeId>) {
        match self {
            LoadExpr::Var { edge, .. } => {
                out.insert(*edge);
            }
            LoadExpr::Sum(children) | LoadExpr::Max(children) => children.iter().for_each(|c| c.collect_edges(out)),
            LoadExpr::OddPow { base, .. } | LoadExpr::Shift { base, .. } => base.collect_edges(out),
        }
    }

    /// Nesting depth; a bare variable has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            LoadExpr::Var { .. } => 0,
            LoadExpr::Sum(c) | LoadExpr::Max(c) => 1 + c.iter().map(Self::depth).max().unwrap_or(0),
            LoadExpr::OddPow { base, .. } | LoadExpr::Shift { base, .. } => 1 + base.depth(),
        }
    }

    pub fn eval<T: Scalar, P: EdgeValues<T> + ?Sized>(&self, point: &P) -> Result<T, ExprError> {
        match self {
            LoadExpr::Var { edge, coeff } => {
                let x = point.value(*edge).ok_or(ExprError::KeyMismatch(*edge))?;
                Ok(T::from_rational(coeff) * x.clone())
            }
            LoadExpr::Sum(children) => {
                let mut acc = T::zero();
                for c in children {
                    acc = acc + c.eval(point)?;
                }
                Ok(acc)
            }
            LoadExpr::Max(children) => {
                let mut best: Option<T> = None;
                for c in children {
                    let v = c.eval(point)?;
                    best = Some(match best {
                        Some(b) if b >= v => b,
                        _ => v,
                    });
                }
                Ok(best.unwrap_or_else(T::zero))
            }
            LoadExpr::OddPow { base, exp } => Ok(num_traits::pow(base.eval(point)?, *exp as usize)),
            LoadExpr::Shift { base, offset } => Ok(base.eval(point)? + T::from_rational(offset)),
        }
    }

    /// Affine form when the tree only uses `var`, `sum`, `shift`, single-child
    /// `max` and exponent 1.
    pub fn linear_form(&self) -> Option<LinearForm> {
        match self {
            LoadExpr::Var { edge, coeff } => {
                Some(LinearForm { terms: vec![(*edge, coeff.clone())], constant: Rational::zero() })
            }
            LoadExpr::Sum(children) => {
                let mut acc = LinearForm::default();
                for c in children {
                    acc.add_assign(&c.linear_form()?);
                }
                Some(acc)
            }
            LoadExpr::Max(children) if children.len() == 1 => children[0].linear_form(),
            LoadExpr::Max(_) => None,
            LoadExpr::OddPow { base, exp: 1 } => base.linear_form(),
            LoadExpr::OddPow { .. } => None,
            LoadExpr::Shift { base, offset } => {
                let mut form = base.linear_form()?;
                form.constant += offset;
                Some(form)
            }
        }
    }

    /// Structural check that this tree is an increasing self-bijection in each
    /// of exactly the edges in `required`.
    pub fn check_fa(&self, required: &BTreeSet<EdgeId>) -> Vec<FaViolation> {
        let mut out = Vec::new();
        self.check_node(&mut out);
        let present = self.edges();
        out.extend(required.difference(&present).map(|&e| FaViolation::MissingEdge(e)));
        out.extend(present.difference(required).map(|&e| FaViolation::ForeignEdge(e)));
        out
    }

    fn check_node(&self, out: &mut Vec<FaViolation>) {
        match self {
            LoadExpr::Var { edge, coeff } => {
                if !coeff.is_positive() {
                    out.push(FaViolation::NonPositiveCoeff(*edge));
                }
            }
            LoadExpr::Sum(children) => {
                if children.is_empty() {
                    out.push(FaViolation::EmptyNode);
                }
                children.iter().for_each(|c| c.check_node(out));
            }
            LoadExpr::Max(children) => {
                if children.is_empty() {
                    out.push(FaViolation::EmptyNode);
                }
                let first = children.first().map(Self::edges);
                if children.iter().any(|c| Some(c.edges()) != first) {
                    out.push(FaViolation::MaxEdgeMismatch);
                }
                children.iter().for_each(|c| c.check_node(out));
            }
            LoadExpr::OddPow { base, exp } => {
                if exp % 2 == 0 {
                    out.push(FaViolation::BadExponent(*exp));
                }
                base.check_node(out);
            }
            LoadExpr::Shift { base, .. } => base.check_node(out),
        }
    }
}

impl fmt::Display for LoadExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, c: &[LoadExpr]| {
            write!(f, "{name}(")?;
            for (i, child) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{child}")?;
            }
            write!(f, ")")
        };
        match self {
            LoadExpr::Var { edge, coeff } => write!(f, "{coeff}*x[{edge}]"),
            LoadExpr::Sum(c) => list(f, "sum", c),
            LoadExpr::Max(c) => list(f, "max", c),
            LoadExpr::OddPow { base, exp } => write!(f, "({base})^{exp}"),
            LoadExpr::Shift { base, offset } => write!(f, "({base} + {offset})"),
        }
    }
}

/// `constant + Σ coeff_e · x_e`, terms sorted by edge.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearForm {
    pub terms: Vec<(EdgeId, Rational)>,
    pub constant: Rational,
}

impl LinearForm {
    pub fn coeff(&self, e: EdgeId) -> Rational {
        self.terms
            .binary_search_by_key(&e, |(edge, _)| *edge)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    fn add_assign(&mut self, other: &LinearForm) {
        for (e, c) in &other.terms {
            match self.terms.binary_search_by_key(e, |(edge, _)| *edge) {
                Ok(i) => self.terms[i].1 += c,
                Err(i) => self.terms.insert(i, (*e, c.clone())),
            }
        }
        self.constant += &other.constant;
    }

    pub fn eval<T: Scalar, P: EdgeValues<T> + ?Sized>(&self, point: &P) -> Result<T, ExprError> {
        let mut acc = T::from_rational(&self.constant);
        for (e, c) in &self.terms {
            let x = point.value(*e).ok_or(ExprError::KeyMismatch(*e))?;
            acc = acc + T::from_rational(c) * x.clone();
        }
        Ok(acc)
    }

    /// Value of `free` making the form equal `target`, the other edges read from `point`.
    pub fn solve_for<T: Scalar, P: EdgeValues<T> + ?Sized>(
        &self,
        point: &P,
        free: EdgeId,
        target: &T,
    ) -> Result<T, ExprError> {
        let mut rest = T::from_rational(&self.constant);
        let mut pivot = None;
        for (e, c) in &self.terms {
            if *e == free {
                pivot = Some(c);
                continue;
            }
            let x = point.value(*e).ok_or(ExprError::KeyMismatch(*e))?;
            rest = rest + T::from_rational(c) * x.clone();
        }
        match pivot {
            Some(c) if !c.is_zero() => Ok((target.clone() - rest) / T::from_rational(c)),
            _ => Err(ExprError::FreeEdgeUnused(free)),
        }
    }
}

/// A vertex load function with its linear form cached.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFn {
    expr: LoadExpr,
    linear: Option<LinearForm>,
}

impl VertexFn {
    pub fn new(expr: LoadExpr) -> Self {
        let linear = expr.linear_form();
        Self { expr, linear }
    }

    pub fn expr(&self) -> &LoadExpr {
        &self.expr
    }

    pub fn linear(&self) -> Option<&LinearForm> {
        self.linear.as_ref()
    }

    pub fn eval<T: Scalar, P: EdgeValues<T> + ?Sized>(&self, point: &P) -> Result<T, ExprError> {
        match &self.linear {
            Some(l) => l.eval(point),
            None => self.expr.eval(point),
        }
    }

    /// See [`invert_component`].
    pub fn invert<T: Scalar, P: EdgeValues<T> + ?Sized>(
        &self,
        point: &P,
        free: EdgeId,
        target: &T,
        tol: f64,
    ) -> Result<T, ExprError> {
        match &self.linear {
            Some(l) => l.solve_for(point, free, target),
            None if T::is_exact() => Err(ExprError::NonlinearExact),
            None => {
                let base = |s: f64| -> f64 {
                    let v = T::from_f64(s).unwrap_or_else(T::zero);
                    let probe = Override { base: point, edge: free, value: v };
                    self.expr.eval::<T, _>(&probe).map(|r| r.to_f64()).unwrap_or(f64::NAN)
                };
                // surface missing keys before searching
                for e in self.expr.edges() {
                    if e != free && point.value(e).is_none() {
                        return Err(ExprError::KeyMismatch(e));
                    }
                }
                if !self.expr.edges().contains(&free) {
                    return Err(ExprError::FreeEdgeUnused(free));
                }
                let s = solve_increasing(base, target.to_f64(), tol)?;
                Ok(T::from_f64(s).unwrap_or_else(T::zero))
            }
        }
    }
}

/// Evaluates `expr` at `point`.
pub fn eval_expr<T: Scalar, P: EdgeValues<T> + ?Sized>(expr: &LoadExpr, point: &P) -> Result<T, ExprError> {
    expr.eval(point)
}

/// Solves `expr(point with free_edge := s) = target` for `s`.
///
/// Linear expressions are solved in closed form (exactly for rationals, `tol`
/// unused). Otherwise the solution is found by doubling a bracket out from
/// `s = 0` and bisecting until the residual is within `tol`, or the bracket
/// collapses to adjacent floats, whichever happens first.
pub fn invert_component<T: Scalar, P: EdgeValues<T> + ?Sized>(
    expr: &LoadExpr,
    point: &P,
    free_edge: EdgeId,
    target: &T,
    tol: f64,
) -> Result<T, ExprError> {
    VertexFn::new(expr.clone()).invert(point, free_edge, target, tol)
}

/// Root of an increasing function `h(s) = target`.
pub fn solve_increasing(mut h: impl FnMut(f64) -> f64, target: f64, tol: f64) -> Result<f64, ExprError> {
    let no_bracket = || ExprError::NoBracket { target: format!("{target:?}") };
    if !target.is_finite() {
        return Err(no_bracket());
    }
    let mut residual = |s: f64| h(s) - target;

    let r0 = residual(0.0);
    if r0.is_nan() {
        return Err(no_bracket());
    }
    if r0.abs() <= tol {
        return Ok(0.0);
    }
    // (lo, hi) with residual(lo) < 0 < residual(hi)
    let (mut lo, mut hi, mut r_lo, mut r_hi);
    let direction = if r0 < 0.0 { 1.0 } else { -1.0 };
    let mut inner = 0.0;
    let mut r_inner = r0;
    let mut step = 1.0;
    loop {
        let outer = direction * step;
        let r_outer = residual(outer);
        if r_outer.is_nan() {
            return Err(no_bracket());
        }
        if r_outer.abs() <= tol {
            return Ok(outer);
        }
        if (r_outer > 0.0) == (direction > 0.0) {
            if direction > 0.0 {
                (lo, r_lo, hi, r_hi) = (inner, r_inner, outer, r_outer);
            } else {
                (lo, r_lo, hi, r_hi) = (outer, r_outer, inner, r_inner);
            }
            break;
        }
        inner = outer;
        r_inner = r_outer;
        step *= 2.0;
        if step > BRACKET_LIMIT {
            return Err(no_bracket());
        }
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let r_mid = residual(mid);
        if r_mid.is_nan() {
            return Err(no_bracket());
        }
        if r_mid.abs() <= tol {
            return Ok(mid);
        }
        if r_mid < 0.0 {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    Ok(if r_lo.abs() <= r_hi.abs() { lo } else { hi })
}

/// The map `t ↦ s` with `expr(fixed, in_edge = t, out_edge = s) = level`.
///
/// Decreasing and continuous for a well-formed expression.
pub fn g_map<T: Scalar, P: EdgeValues<T> + ?Sized>(
    expr: &LoadExpr,
    fixed: &P,
    in_edge: EdgeId,
    out_edge: EdgeId,
    level: T,
    tol: f64,
) -> Result<impl Fn(T) -> Result<T, ExprError>, ExprError> {
    let mut frozen = BTreeMap::new();
    for e in expr.edges() {
        if e == in_edge || e == out_edge {
            continue;
        }
        let v = fixed.value(e).ok_or(ExprError::KeyMismatch(e))?;
        frozen.insert(e, v.clone());
    }
    let f = VertexFn::new(expr.clone());
    Ok(move |t: T| {
        let mut point = frozen.clone();
        point.insert(in_edge, t);
        point.insert(out_edge, T::zero());
        f.invert(&point, out_edge, &level, tol)
    })
}

/// `true` when every coefficient is one.
pub fn is_unit_linear(form: &LinearForm) -> bool {
    form.constant.is_zero() && form.terms.iter().all(|(_, c)| c.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn e(i: usize) -> EdgeId {
        EdgeId(i)
    }

    #[test]
    fn fig3_worker_function() {
        // x_{u1w1} + 1/2 x_{u2w1}
        let f = LoadExpr::linear([(e(0), int(1)), (e(2), rat(1, 2))]);
        let point: BTreeMap<EdgeId, Rational> = [(e(0), int(0)), (e(2), int(1))].into();
        assert_eq!(eval_expr::<Rational, _>(&f, &point).unwrap(), rat(1, 2));
    }

    #[test]
    fn zero_point_and_max() {
        let f = LoadExpr::linear([(e(0), int(1)), (e(1), int(1))]);
        assert!(eval_expr::<Rational, _>(&f, &vec![int(0), int(0)]).unwrap().is_zero());
        let m = LoadExpr::Max(vec![LoadExpr::var(e(0), int(1)), LoadExpr::var(e(1), int(1))]);
        assert_eq!(eval_expr::<Rational, _>(&m, &vec![int(1), int(2)]).unwrap(), int(2));
    }

    #[test]
    fn missing_key() {
        let f = LoadExpr::linear([(e(0), int(1)), (e(3), int(1))]);
        let point = vec![int(0), int(0)];
        assert_eq!(eval_expr::<Rational, _>(&f, &point), Err(ExprError::KeyMismatch(e(3))));
    }

    #[test]
    fn linear_inversions_are_exact() {
        // 2 x_j + 3 with x_j free, target 7
        let f = LoadExpr::Sum(vec![LoadExpr::var(e(0), int(2)), LoadExpr::var(e(1), int(3))]);
        let s = invert_component(&f, &vec![int(0), int(1)], e(0), &int(7), 0.0).unwrap();
        assert_eq!(s, int(2));

        let fig3 = LoadExpr::linear([(e(0), int(1)), (e(2), rat(1, 2))]);
        let s = invert_component(&fig3, &vec![int(1), int(0), int(99)], e(2), &int(1), 0.0).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn cube_inversion() {
        let f = LoadExpr::oddpow(LoadExpr::var(e(0), int(1)), 3);
        let s: f64 = invert_component(&f, &vec![0.0], e(0), &8.0, 1e-12).unwrap();
        assert!((s - 2.0).abs() < 1e-10, "{s}");
        // rationals refuse nonlinear inversion rather than approximating
        assert_eq!(invert_component(&f, &vec![int(0)], e(0), &int(8), 0.0), Err(ExprError::NonlinearExact));
    }

    #[test]
    fn max_edge_mismatch_is_not_fa() {
        let m = LoadExpr::Max(vec![LoadExpr::var(e(0), int(1)), LoadExpr::var(e(1), int(1))]);
        let required: BTreeSet<_> = [e(0), e(1)].into();
        assert_eq!(m.check_fa(&required), vec![FaViolation::MaxEdgeMismatch]);
        let ok = LoadExpr::Max(vec![
            LoadExpr::linear([(e(0), int(1)), (e(1), int(2))]),
            LoadExpr::oddpow(LoadExpr::linear([(e(0), int(1)), (e(1), int(1))]), 3),
        ]);
        assert!(ok.check_fa(&required).is_empty());
        // flat max cannot be inverted when the free edge is dominated
        let err = invert_component(&m, &vec![0.0, 5.0], e(0), &1.0, 1e-12);
        assert!(matches!(err, Err(ExprError::NoBracket { .. })), "{err:?}");
    }

    #[test]
    fn linear_form_folds_shifts() {
        let f =
            LoadExpr::shift(LoadExpr::Sum(vec![LoadExpr::var(e(1), int(2)), LoadExpr::var(e(1), int(1))]), rat(-1, 2));
        let form = f.linear_form().unwrap();
        assert_eq!(form.terms, vec![(e(1), int(3))]);
        assert_eq!(form.constant, rat(-1, 2));
        assert!(LoadExpr::oddpow(LoadExpr::var(e(0), int(1)), 3).linear_form().is_none());
    }

    #[test]
    fn g_map_examples() {
        let f = LoadExpr::linear([(e(0), int(1)), (e(1), int(1))]);
        let g = g_map(&f, &Vec::<Rational>::new(), e(0), e(1), int(10), 0.0).unwrap();
        assert_eq!(g(int(3)).unwrap(), int(7));

        let fig3 = LoadExpr::linear([(e(0), int(1)), (e(2), rat(1, 2))]);
        let g = g_map(&fig3, &Vec::<Rational>::new(), e(0), e(2), rat(1, 2), 0.0).unwrap();
        assert_eq!(g(int(0)).unwrap(), int(1));
        assert_eq!(g(rat(1, 4)).unwrap(), rat(1, 2));
    }

    #[test]
    fn bracket_failure_on_bounded_function() {
        let r = solve_increasing(f64::atan, 5.0, 1e-12);
        assert!(matches!(r, Err(ExprError::NoBracket { .. })));
    }
}
