//! Exact linear programs over the weighted non-negative feasible set: minimal
//! maximal load, maximal minimal load, minimal spread, equal-load feasibility
//! and the extreme load of one worker among bounded-spread assignments.

pub mod simplex;

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{check_membership, Assignment, BipartiteInstance, Mode, WorkerId};
use crate::numeric::Rational;
use simplex::{LinearProgram, LpOutcome, Relation, Sense, VarBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MinLmax,
    MaxLmin,
    MinSpread,
    /// Highest common load among assignments with all loads equal.
    EqualFeas,
    /// Largest load of the worker among assignments of spread at most the cap.
    MaxLoadOf(WorkerId),
    /// Smallest load of the worker among assignments of spread at most the cap.
    MinLoadOf(WorkerId),
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::MinLmax => write!(f, "MIN_LMAX"),
            Objective::MaxLmin => write!(f, "MAX_LMIN"),
            Objective::MinSpread => write!(f, "MIN_SPREAD"),
            Objective::EqualFeas => write!(f, "EQUAL_FEAS"),
            Objective::MaxLoadOf(w) => write!(f, "MAX_LOAD_OF({})", w.0),
            Objective::MinLoadOf(w) => write!(f, "MIN_LOAD_OF({})", w.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: LpStatus,
    pub objective: Objective,
    pub value: Option<Rational>,
    pub assignment: Option<Assignment<Rational>>,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Optimal value; panics on infeasible or unbounded results.
    pub fn optimal_value(&self) -> &Rational {
        self.value.as_ref().expect("solve result is not optimal")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear programs require a LINEAR_NONNEG instance")]
    WrongMode,
    #[error("load function of {0:?} is not linear")]
    Nonlinear(String),
    #[error("worker index {0} out of range")]
    UnknownWorker(usize),
}

/// Edge variables, task equations and per-worker load rows of an instance.
struct Model {
    lp: LinearProgram,
    x: Vec<usize>,
    loads: Vec<Vec<(usize, Rational)>>,
}

impl Model {
    fn new(inst: &BipartiteInstance, sense: Sense) -> Result<Self, LpError> {
        if inst.mode() != Mode::LinearNonneg {
            return Err(LpError::WrongMode);
        }
        let mut lp = LinearProgram::new(sense);
        let x: Vec<usize> = inst.edge_ids().map(|_| lp.add_var(VarBound::NonNeg)).collect();
        for u in inst.task_ids() {
            let form = inst.task_fn(u).linear().ok_or_else(|| LpError::Nonlinear(inst.tasks()[u.0].id.clone()))?;
            let terms = form.terms.iter().map(|(e, a)| (x[e.0], a.clone())).collect();
            lp.add_constraint(terms, Relation::Eq, inst.demand(u) - &form.constant);
        }
        let mut loads = Vec::with_capacity(inst.num_workers());
        for w in inst.worker_ids() {
            let form = inst.worker_fn(w).linear().ok_or_else(|| LpError::Nonlinear(inst.workers()[w.0].clone()))?;
            if !form.constant.is_zero() {
                return Err(LpError::Nonlinear(inst.workers()[w.0].clone()));
            }
            loads.push(form.terms.iter().map(|(e, a)| (x[e.0], a.clone())).collect());
        }
        Ok(Self { lp, x, loads })
    }

    /// `load_w - t  (rel)  0`
    fn bound_loads(&mut self, t: usize, relation: Relation) {
        for w in 0..self.loads.len() {
            let mut terms = self.loads[w].clone();
            terms.push((t, Rational::from_integer((-1).into())));
            self.lp.add_constraint(terms, relation, Rational::zero());
        }
    }

    /// Pins an auxiliary to zero when there are no workers (empty max/min is 0).
    fn pin_if_no_workers(&mut self, vars: &[usize]) {
        if self.loads.is_empty() {
            for &v in vars {
                self.lp.add_constraint(vec![(v, Rational::from_integer(1.into()))], Relation::Eq, Rational::zero());
            }
        }
    }

    fn finish(self, inst: &BipartiteInstance, objective: Objective) -> SolveResult {
        match self.lp.solve() {
            LpOutcome::Optimal { values, objective: value } => {
                let x = Assignment::new(self.x.iter().map(|&v| values[v].clone()).collect());
                debug_assert!(check_membership(inst, &x, 0.0));
                SolveResult { status: LpStatus::Optimal, objective, value: Some(value), assignment: Some(x) }
            }
            LpOutcome::Infeasible => {
                SolveResult { status: LpStatus::Infeasible, objective, value: None, assignment: None }
            }
            LpOutcome::Unbounded => {
                SolveResult { status: LpStatus::Unbounded, objective, value: None, assignment: None }
            }
        }
    }
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// `min t` subject to every load at most `t`.
pub fn solve_min_lmax(inst: &BipartiteInstance) -> Result<SolveResult, LpError> {
    let mut m = Model::new(inst, Sense::Minimize)?;
    let t = m.lp.add_var(VarBound::Free);
    m.bound_loads(t, Relation::Le);
    m.pin_if_no_workers(&[t]);
    m.lp.set_objective(vec![(t, one())]);
    Ok(m.finish(inst, Objective::MinLmax))
}

/// `max t` subject to every load at least `t`.
pub fn solve_max_lmin(inst: &BipartiteInstance) -> Result<SolveResult, LpError> {
    let mut m = Model::new(inst, Sense::Maximize)?;
    let t = m.lp.add_var(VarBound::Free);
    m.bound_loads(t, Relation::Ge);
    m.pin_if_no_workers(&[t]);
    m.lp.set_objective(vec![(t, one())]);
    Ok(m.finish(inst, Objective::MaxLmin))
}

/// `min t_max - t_min` subject to every load in `[t_min, t_max]`.
///
/// Ties are broken by a second program: the witness has the largest minimal
/// load among assignments of optimal spread.
pub fn solve_min_spread(inst: &BipartiteInstance) -> Result<SolveResult, LpError> {
    let mut m = Model::new(inst, Sense::Minimize)?;
    let lo = m.lp.add_var(VarBound::Free);
    let hi = m.lp.add_var(VarBound::Free);
    m.bound_loads(lo, Relation::Ge);
    m.bound_loads(hi, Relation::Le);
    m.pin_if_no_workers(&[lo, hi]);
    m.lp.set_objective(vec![(hi, one()), (lo, -one())]);
    let first = m.finish(inst, Objective::MinSpread);
    let Some(spread) = first.value.clone().filter(|_| first.is_optimal()) else {
        return Ok(first);
    };
    let mut m = Model::new(inst, Sense::Maximize)?;
    let lo = m.lp.add_var(VarBound::Free);
    let hi = m.lp.add_var(VarBound::Free);
    m.bound_loads(lo, Relation::Ge);
    m.bound_loads(hi, Relation::Le);
    m.pin_if_no_workers(&[lo, hi]);
    m.lp.add_constraint(vec![(hi, one()), (lo, -one())], Relation::Le, spread.clone());
    m.lp.set_objective(vec![(lo, one())]);
    let second = m.finish(inst, Objective::MinSpread);
    Ok(SolveResult { value: Some(spread), ..second })
}

/// Is there an assignment with every load equal? The witness returned is the
/// one with the highest common load, which is also the reported value.
pub fn equal_load_feasible(inst: &BipartiteInstance) -> Result<SolveResult, LpError> {
    let mut m = Model::new(inst, Sense::Maximize)?;
    let level = m.lp.add_var(VarBound::Free);
    m.bound_loads(level, Relation::Eq);
    m.pin_if_no_workers(&[level]);
    m.lp.set_objective(vec![(level, one())]);
    Ok(m.finish(inst, Objective::EqualFeas))
}

fn extreme_load_given_spread(
    inst: &BipartiteInstance,
    w: WorkerId,
    spread_cap: &Rational,
    sense: Sense,
) -> Result<SolveResult, LpError> {
    if w.0 >= inst.num_workers() {
        return Err(LpError::UnknownWorker(w.0));
    }
    let mut m = Model::new(inst, sense)?;
    let lo = m.lp.add_var(VarBound::Free);
    let hi = m.lp.add_var(VarBound::Free);
    m.bound_loads(lo, Relation::Ge);
    m.bound_loads(hi, Relation::Le);
    m.lp.add_constraint(vec![(hi, one()), (lo, -one())], Relation::Le, spread_cap.clone());
    let objective = m.loads[w.0].clone();
    m.lp.set_objective(objective);
    let tag = match sense {
        Sense::Maximize => Objective::MaxLoadOf(w),
        Sense::Minimize => Objective::MinLoadOf(w),
    };
    Ok(m.finish(inst, tag))
}

/// Largest load of `w` over assignments whose spread is at most `spread_cap`.
pub fn max_load_of_worker_given_spread(
    inst: &BipartiteInstance,
    w: WorkerId,
    spread_cap: &Rational,
) -> Result<SolveResult, LpError> {
    extreme_load_given_spread(inst, w, spread_cap, Sense::Maximize)
}

/// Smallest load of `w` over assignments whose spread is at most `spread_cap`.
pub fn min_load_of_worker_given_spread(
    inst: &BipartiteInstance,
    w: WorkerId,
    spread_cap: &Rational,
) -> Result<SolveResult, LpError> {
    extreme_load_given_spread(inst, w, spread_cap, Sense::Minimize)
}

/// Dispatches on `objective`; `spread_cap` is only read by the per-worker objectives.
pub fn solve(inst: &BipartiteInstance, objective: Objective, spread_cap: &Rational) -> Result<SolveResult, LpError> {
    match objective {
        Objective::MinLmax => solve_min_lmax(inst),
        Objective::MaxLmin => solve_max_lmin(inst),
        Objective::MinSpread => solve_min_spread(inst),
        Objective::EqualFeas => equal_load_feasible(inst),
        Objective::MaxLoadOf(w) => max_load_of_worker_given_spread(inst, w, spread_cap),
        Objective::MinLoadOf(w) => min_load_of_worker_given_spread(inst, w, spread_cap),
    }
}
