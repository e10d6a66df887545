//! The local improvement step and the interpolation used in the proof that
//! spread minimizers also minimize the maximal load.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::rng::SplitMix64;
use super::VerifyError;
use crate::instance::{
    check_membership, evaluate_loads, task_neighborhood, Assignment, BipartiteInstance, EdgeId, Mode, WorkerId,
};
use crate::numeric::Rational;

fn require_xa(inst: &BipartiteInstance, x: &Assignment<Rational>) -> Result<(), VerifyError> {
    if inst.mode() != Mode::LinearNonneg || !inst.is_linear() {
        return Err(VerifyError::WrongMode);
    }
    if !check_membership(inst, x, 0.0) {
        return Err(VerifyError::NotInXa);
    }
    Ok(())
}

fn weights(inst: &BipartiteInstance, e: EdgeId) -> (Rational, Rational) {
    (inst.task_weight(e).expect("linear instance"), inst.worker_weight(e).expect("linear instance"))
}

/// Moves flow of one maximal-load task from a maximal worker to a
/// non-maximal neighbor, when the neighborhood of the maximal tasks is larger
/// than the set of maximal workers. Returns `None` when it is not.
///
/// The step keeps the edge non-negative and the donor at or above the minimal
/// load. If other workers share the maximal load, the receiver goes at most
/// halfway to it, so the donor leaves the maximal set. If the donor alone is
/// maximal, it moves at most halfway to the next load and the receiver at
/// most halfway to meeting it, so the maximal load drops and stays unique.
pub fn improvement_step(
    inst: &BipartiteInstance,
    x: &Assignment<Rational>,
) -> Result<Option<Assignment<Rational>>, VerifyError> {
    require_xa(inst, x)?;
    if inst.tasks().iter().all(|t| t.demand.is_zero()) {
        return Ok(None);
    }
    let loads = evaluate_loads(inst, x).map_err(|_| VerifyError::NotInXa)?;
    if loads.lmax == loads.lmin {
        return Ok(None);
    }
    let wmax: BTreeSet<WorkerId> = loads.wmax_set.iter().copied().collect();
    if task_neighborhood(inst, &loads.umax_set) == wmax {
        return Ok(None);
    }
    for &u in &loads.umax_set {
        let edges = inst.task_edges(u);
        let receiver = edges.iter().copied().find(|&e| !wmax.contains(&inst.edge(e).worker));
        let donor =
            edges.iter().copied().find(|&e| wmax.contains(&inst.edge(e).worker) && x.get(e) > &Rational::zero());
        let (Some(e1), Some(e2)) = (receiver, donor) else {
            continue;
        };
        let (a1, b1) = weights(inst, e1);
        let (a2, b2) = weights(inst, e2);
        let w1 = inst.edge(e1).worker;
        let w2 = inst.edge(e2).worker;
        let transfer = &a2 / &a1;
        let rise = &transfer * &b1;
        let two = Rational::from_integer(2.into());
        let mut bounds = vec![x.get(e2).clone(), (&loads.per_worker[w2.0] - &loads.lmin) / &b2];
        if wmax.len() > 1 {
            // another worker holds the maximum; the receiver must stay below it
            bounds.push((&loads.lmax - &loads.per_worker[w1.0]) / (&two * &rise));
        } else {
            // the donor must stay the unique maximum: above every other load
            // and above the receiver after the move
            let second = loads
                .per_worker
                .iter()
                .enumerate()
                .filter(|&(w, _)| w != w2.0)
                .map(|(_, l)| l.clone())
                .max()
                .unwrap_or_else(|| loads.lmin.clone());
            bounds.push((&loads.lmax - second) / (&two * &b2));
            bounds.push((&loads.lmax - &loads.per_worker[w1.0]) / (&two * (&rise + &b2)));
        }
        let delta = bounds.into_iter().min().expect("non-empty bounds");
        let mut next = x.clone();
        next.set(e2, x.get(e2) - &delta);
        next.set(e1, x.get(e1) + &delta * transfer);
        return Ok(Some(next));
    }
    unreachable!("a maximal task reaches a non-maximal worker")
}

/// The three monotonicity relations between `x` and its improvement `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImprovementCheck {
    pub wmax_not_larger: bool,
    pub lmax_not_larger: bool,
    pub lmin_not_smaller: bool,
    pub some_strict: bool,
}

impl ImprovementCheck {
    pub fn holds(&self) -> bool {
        self.wmax_not_larger && self.lmax_not_larger && self.lmin_not_smaller && self.some_strict
    }
}

pub fn check_improvement(
    inst: &BipartiteInstance,
    x: &Assignment<Rational>,
    y: &Assignment<Rational>,
) -> ImprovementCheck {
    let a = evaluate_loads(inst, x).expect("assignment sized for instance");
    let b = evaluate_loads(inst, y).expect("assignment sized for instance");
    let in_xa = check_membership(inst, y, 0.0);
    ImprovementCheck {
        wmax_not_larger: in_xa && b.wmax_set.len() <= a.wmax_set.len(),
        lmax_not_larger: in_xa && b.lmax <= a.lmax,
        lmin_not_smaller: in_xa && b.lmin >= a.lmin,
        some_strict: b.wmax_set.len() < a.wmax_set.len() || b.lmax < a.lmax || b.lmin > a.lmin,
    }
}

/// `z(t)`: `t·y + (1−t)·x̄` on edges of tasks sending flow to a maximal
/// worker under `x̄`, `x̄` elsewhere.
pub fn interpolate_umax(
    inst: &BipartiteInstance,
    xbar: &Assignment<Rational>,
    ystar: &Assignment<Rational>,
    t: &Rational,
) -> Result<Assignment<Rational>, VerifyError> {
    require_xa(inst, xbar)?;
    require_xa(inst, ystar)?;
    if t < &Rational::zero() || t > &Rational::one() {
        return Err(VerifyError::BadParameter(format!("t = {t} outside [0, 1]")));
    }
    let loads = evaluate_loads(inst, xbar).map_err(|_| VerifyError::NotInXa)?;
    let mut z = xbar.clone();
    for &u in &loads.umax_set {
        for &e in inst.task_edges(u) {
            z.set(e, t * ystar.get(e) + (Rational::one() - t) * xbar.get(e));
        }
    }
    Ok(z)
}

/// A random point of `X^a`: each task splits its demand in proportion to
/// random integer shares in `0..=4`, at least one of them positive.
pub fn random_point_in_xa(inst: &BipartiteInstance, rng: &mut SplitMix64) -> Assignment<Rational> {
    let mut x = Assignment::zeros(inst);
    for u in inst.task_ids() {
        let edges = inst.task_edges(u);
        if edges.is_empty() {
            continue;
        }
        let mut shares: Vec<u64> = edges.iter().map(|_| rng.below(5)).collect();
        if shares.iter().all(|&s| s == 0) {
            shares[rng.below(edges.len() as u64) as usize] = 1;
        }
        let total: Rational = edges
            .iter()
            .zip(&shares)
            .map(|(&e, &s)| inst.task_weight(e).expect("linear instance") * Rational::from_integer(s.into()))
            .sum();
        for (&e, &s) in edges.iter().zip(&shares) {
            x.set(e, inst.demand(u) * Rational::from_integer(s.into()) / &total);
        }
    }
    x
}
