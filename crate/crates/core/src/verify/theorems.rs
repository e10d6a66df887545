//! Mechanical checks of the min-spread/min-max equivalence and of the
//! equalization theorem on single instances.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::VerifyError;
use crate::instance::{check_membership, evaluate_loads, Assignment, BipartiteInstance, Mode, WorkerId};
use crate::io::{assignment_to_json, instance_to_json};
use crate::lp::{self, LpStatus, SolveResult};
use crate::numeric::{Rational, Scalar};
use crate::tree::{equalize_connected, TreePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TheoremKind {
    Prop1,
    Thm1,
    Thm2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Confirmed,
    HypothesisVoid,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Relation {
    Eq,
    Lt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    /// Exact rational comparison; otherwise within the report tolerance.
    pub exact: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// sha256 of the compact canonical instance JSON.
    pub digest: String,
    pub hypothesis: Hypothesis,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

pub fn instance_digest(inst: &BipartiteInstance) -> String {
    let text = serde_json::to_string(&instance_to_json(inst)).expect("instance JSON serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn exact_eq(name: &str, lhs: &Rational, rhs: &Rational) -> Check {
    Check {
        name: name.into(),
        lhs: lhs.to_string(),
        relation: Relation::Eq,
        rhs: rhs.to_string(),
        exact: true,
        holds: lhs == rhs,
    }
}

fn report(
    theorem: TheoremKind,
    inst: &BipartiteInstance,
    hypothesis: Hypothesis,
    checks: Vec<Check>,
    witness: impl FnOnce() -> Value,
) -> TheoremReport {
    let verdict = if !hypothesis.holds {
        Verdict::HypothesisVoid
    } else if checks.iter().all(|c| c.holds) {
        Verdict::Confirmed
    } else {
        Verdict::Violated
    };
    TheoremReport {
        theorem,
        seed: None,
        digest: instance_digest(inst),
        witness: (verdict == Verdict::Violated).then(witness),
        hypothesis,
        checks,
        verdict,
    }
}

fn optimal(r: SolveResult) -> Option<(Rational, Assignment<Rational>)> {
    match r.status {
        LpStatus::Optimal => Some((r.value?, r.assignment?)),
        _ => None,
    }
}

/// Extreme loads over the min-spread set, each with its worker and assignment.
struct SpreadSetExtremes {
    spread: Rational,
    min_lmax: (Rational, Assignment<Rational>),
    max_lmin: (Rational, Assignment<Rational>),
    worst_high: (WorkerId, Rational, Assignment<Rational>),
    worst_low: (WorkerId, Rational, Assignment<Rational>),
    spread_x: Assignment<Rational>,
}

fn spread_set_extremes(inst: &BipartiteInstance) -> Result<Option<SpreadSetExtremes>, VerifyError> {
    let Some(min_lmax) = optimal(lp::solve_min_lmax(inst)?) else {
        return Ok(None);
    };
    let max_lmin = optimal(lp::solve_max_lmin(inst)?).ok_or(VerifyError::Solver("max-min not optimal"))?;
    let (spread, spread_x) =
        optimal(lp::solve_min_spread(inst)?).ok_or(VerifyError::Solver("min-spread not optimal"))?;
    let mut worst_high: Option<(WorkerId, Rational, Assignment<Rational>)> = None;
    let mut worst_low: Option<(WorkerId, Rational, Assignment<Rational>)> = None;
    for w in inst.worker_ids() {
        let (hi, hx) = optimal(lp::max_load_of_worker_given_spread(inst, w, &spread)?)
            .ok_or(VerifyError::Solver("bounded-spread max load not optimal"))?;
        if worst_high.as_ref().is_none_or(|(_, v, _)| hi > *v) {
            worst_high = Some((w, hi, hx));
        }
        let (lo, lx) = optimal(lp::min_load_of_worker_given_spread(inst, w, &spread)?)
            .ok_or(VerifyError::Solver("bounded-spread min load not optimal"))?;
        if worst_low.as_ref().is_none_or(|(_, v, _)| lo < *v) {
            worst_low = Some((w, lo, lx));
        }
    }
    let zero = || (WorkerId(0), Rational::zero(), spread_x.clone());
    Ok(Some(SpreadSetExtremes {
        worst_high: worst_high.unwrap_or_else(zero),
        worst_low: worst_low.unwrap_or_else(zero),
        spread,
        spread_x,
        min_lmax,
        max_lmin,
    }))
}

fn spread_checks(s: &SpreadSetExtremes) -> Vec<Check> {
    vec![
        exact_eq("max load over min-spread set = min lmax", &s.worst_high.1, &s.min_lmax.0),
        exact_eq("min load over min-spread set = max lmin", &s.worst_low.1, &s.max_lmin.0),
    ]
}

fn spread_witness(inst: &BipartiteInstance, s: &SpreadSetExtremes) -> Value {
    json!({
        "instance": instance_to_json(inst),
        "min_spread": s.spread.to_string(),
        "high": {
            "worker": inst.workers()[s.worst_high.0 .0],
            "load": s.worst_high.1.to_string(),
            "assignment": assignment_to_json(inst, &s.worst_high.2),
        },
        "low": {
            "worker": inst.workers()[s.worst_low.0 .0],
            "load": s.worst_low.1.to_string(),
            "assignment": assignment_to_json(inst, &s.worst_low.2),
        },
    })
}

/// When no assignment has equal loads, the largest load over min-spread
/// assignments equals the minimal maximal load, and symmetrically for the
/// minimal load. Checked exactly.
pub fn check_theorem1(inst: &BipartiteInstance) -> Result<TheoremReport, VerifyError> {
    if inst.mode() != Mode::LinearNonneg {
        return Err(VerifyError::WrongMode);
    }
    let equal = lp::equal_load_feasible(inst)?;
    if equal.status == LpStatus::Optimal {
        let level = equal.value.expect("optimal result has a value");
        let hypothesis = Hypothesis { holds: false, detail: format!("equal loads feasible at {level}") };
        return Ok(report(TheoremKind::Thm1, inst, hypothesis, Vec::new(), || Value::Null));
    }
    let Some(s) = spread_set_extremes(inst)? else {
        let hypothesis = Hypothesis { holds: false, detail: "feasible set is empty".into() };
        return Ok(report(TheoremKind::Thm1, inst, hypothesis, Vec::new(), || Value::Null));
    };
    let hypothesis = Hypothesis { holds: true, detail: format!("spread bounded below by {}", s.spread) };
    let checks = spread_checks(&s);
    Ok(report(TheoremKind::Thm1, inst, hypothesis, checks, || spread_witness(inst, &s)))
}

/// The unit-weight case, without the strict-spread hypothesis. Also checks
/// that total load equals total demand on every solver output and, when loads
/// can be equal, that the common load is the average demand per worker.
pub fn check_prop1(inst: &BipartiteInstance) -> Result<TheoremReport, VerifyError> {
    if inst.mode() != Mode::LinearNonneg {
        return Err(VerifyError::WrongMode);
    }
    if !inst.has_unit_weights() {
        return Err(VerifyError::BadParameter("all weights must be 1".into()));
    }
    let Some(s) = spread_set_extremes(inst)? else {
        let hypothesis = Hypothesis { holds: false, detail: "feasible set is empty".into() };
        return Ok(report(TheoremKind::Prop1, inst, hypothesis, Vec::new(), || Value::Null));
    };
    let mut checks = spread_checks(&s);
    let demand: Rational = inst.tasks().iter().map(|t| t.demand.clone()).sum();
    let outputs = [
        ("min lmax", &s.min_lmax.1),
        ("max lmin", &s.max_lmin.1),
        ("min spread", &s.spread_x),
        ("bounded-spread max load", &s.worst_high.2),
        ("bounded-spread min load", &s.worst_low.2),
    ];
    for (label, x) in outputs {
        let total: Rational = evaluate_loads(inst, x).expect("sized").per_worker.into_iter().sum();
        checks.push(exact_eq(&format!("total load = total demand ({label})"), &total, &demand));
    }
    let detail = if s.spread.is_zero() && inst.num_workers() > 0 {
        let average = &demand / Rational::from_integer(inst.num_workers().into());
        checks.push(exact_eq("common load = average demand", &s.min_lmax.0, &average));
        format!("equal loads feasible at {average}")
    } else {
        format!("min spread {}", s.spread)
    };
    let hypothesis = Hypothesis { holds: true, detail };
    Ok(report(TheoremKind::Prop1, inst, hypothesis, checks, || spread_witness(inst, &s)))
}

/// Equalizes from `x0` and checks the strict sandwich
/// `lmin(x0) < λ < lmax(x0)` with margin `tol`, equal final loads within
/// `tol`, and membership of the result.
pub fn check_theorem2<T: Scalar>(
    inst: &BipartiteInstance,
    x0: &Assignment<T>,
    tol: f64,
) -> Result<TheoremReport, VerifyError> {
    if inst.mode() != Mode::GeneralReal {
        return Err(VerifyError::WrongMode);
    }
    if !inst.is_connected() {
        return Err(VerifyError::BadParameter("instance is not connected".into()));
    }
    if !check_membership(inst, x0, tol) {
        return Err(VerifyError::NotInXa);
    }
    let start = evaluate_loads(inst, x0).map_err(|_| VerifyError::NotInXa)?;
    let (hi, lo) = (start.lmax.to_f64(), start.lmin.to_f64());
    if hi - lo <= tol || hi.is_nan() || lo.is_nan() {
        let hypothesis = Hypothesis { holds: false, detail: "starting loads already equal".into() };
        return Ok(report(TheoremKind::Thm2, inst, hypothesis, Vec::new(), || Value::Null));
    }
    let hypothesis = Hypothesis { holds: true, detail: format!("start loads in [{lo:?}, {hi:?}]") };
    let base_witness = || {
        json!({
            "instance": instance_to_json(inst),
            "x0": assignment_to_json(inst, x0),
        })
    };
    let out = match equalize_connected(inst, x0, &TreePolicy::Bfs, tol) {
        Ok(out) => out,
        Err(e) => {
            let check = Check {
                name: "equalization succeeds".into(),
                lhs: e.to_string(),
                relation: Relation::Eq,
                rhs: "ok".into(),
                exact: false,
                holds: false,
            };
            return Ok(report(TheoremKind::Thm2, inst, hypothesis, vec![check], || {
                let mut w = base_witness();
                w["error"] = Value::String(e.to_string());
                w
            }));
        }
    };
    let lambda = out.lambda.to_f64();
    let end = evaluate_loads(inst, &out.x).map_err(|_| VerifyError::NotInXa)?;
    let (end_hi, end_lo) = (end.lmax.to_f64(), end.lmin.to_f64());
    let check = |name: &str, lhs: f64, relation: Relation, rhs: f64, holds: bool| Check {
        name: name.into(),
        lhs: format!("{lhs:?}"),
        relation,
        rhs: format!("{rhs:?}"),
        exact: false,
        holds,
    };
    let in_xf = check_membership(inst, &out.x, tol);
    let checks = vec![
        check("lmin(x0) < lambda", lo, Relation::Lt, lambda, lambda - lo > tol),
        check("lambda < lmax(x0)", lambda, Relation::Lt, hi, hi - lambda > tol),
        check("final loads equal", end_hi, Relation::Eq, end_lo, end_hi - end_lo <= tol),
        check("final load = lambda", end_hi, Relation::Eq, lambda, (end_hi - lambda).abs() <= tol),
        Check {
            name: "result satisfies every task equation".into(),
            lhs: in_xf.to_string(),
            relation: Relation::Eq,
            rhs: "true".into(),
            exact: false,
            holds: in_xf,
        },
    ];
    Ok(report(TheoremKind::Thm2, inst, hypothesis, checks, || {
        let mut w = base_witness();
        w["x_prime"] = assignment_to_json(inst, &out.x);
        w["lambda"] = Value::String(out.lambda.to_canonical_string());
        w
    }))
}
