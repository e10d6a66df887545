//! Brute-force study of the integer points of the linear feasible set.
//!
//! Every task's demand is split over its edges in all possible non-negative
//! integer ways; the cartesian product over tasks is the solution set. Worker
//! loads are tracked as integers over a common denominator so comparisons are
//! exact and cheap.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::instance::{Assignment, BipartiteInstance, EdgeId, Mode};
use crate::numeric::Rational;

/// Default bound on the number of points enumerated.
pub const DEFAULT_CAP: u128 = 10_000_000;
/// Argmin sets larger than this are counted but not listed.
pub const ARGMIN_LIST_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegralError {
    #[error("instance has {predicted} integer points, above the cap of {cap}")]
    TooLarge { predicted: u128, cap: u128 },
    #[error("non-integer data: {0}")]
    NonIntegerData(String),
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error("instance has no integer points")]
    Empty,
}

struct TaskPlan {
    edges: Vec<EdgeId>,
    comps: Vec<Vec<u64>>,
    // scaled load added to each worker, sparse, per composition
    contrib: Vec<Vec<(usize, i128)>>,
}

/// The integer points of `X^a`, materialized per task and enumerated lazily
/// across tasks.
pub struct IntegralSolutionSet<'a> {
    inst: &'a BipartiteInstance,
    tasks: Vec<TaskPlan>,
    scale: BigInt,
    count: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub lmax: Rational,
    pub lmin: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSummary {
    pub count: u128,
    pub min_lmax: Rational,
    pub max_lmin: Rational,
    pub min_spread: Rational,
    /// Non-dominated `(lmax, lmin)` pairs, by increasing `lmax`.
    pub pareto: Vec<ParetoPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinLmax {
    pub value: Rational,
    pub argmin_count: u64,
    /// All minimizers in enumeration order, when there are at most
    /// [`ARGMIN_LIST_LIMIT`] of them.
    pub argmin: Option<Vec<Assignment<Rational>>>,
    /// Smallest spread attained by a minimizer.
    pub min_spread_among_argmin: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinSpread {
    pub value: Rational,
    /// First minimizer in enumeration order.
    pub witness: Assignment<Rational>,
}

fn to_u64(r: &Rational, what: &str) -> Result<u64, IntegralError> {
    if !r.is_integer() || r.is_negative() {
        return Err(IntegralError::NonIntegerData(format!("{what} = {r}")));
    }
    r.to_integer().to_u64().ok_or_else(|| IntegralError::Unsupported(format!("{what} = {r} is too large")))
}

/// Number of non-negative integer solutions of `sum a_i x_i = d`, saturating.
fn count_solutions(weights: &[u64], d: u64) -> u128 {
    let d = d as usize;
    let mut ways = vec![0u128; d + 1];
    ways[0] = 1;
    for &a in weights {
        let a = a as usize;
        for s in a..=d {
            ways[s] = ways[s].saturating_add(ways[s - a]);
        }
    }
    ways[d]
}

/// Solutions of `sum a_i x_i = d` in ascending lexicographic order.
fn compositions(weights: &[u64], d: u64) -> Vec<Vec<u64>> {
    fn rec(weights: &[u64], rem: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let i = cur.len();
        if i + 1 == weights.len() {
            if rem.is_multiple_of(weights[i]) {
                cur.push(rem / weights[i]);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for v in 0..=rem / weights[i] {
            cur.push(v);
            rec(weights, rem - v * weights[i], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if weights.is_empty() {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(weights, d, &mut Vec::with_capacity(weights.len()), &mut out);
    out
}

/// Enumerates with the default cap.
pub fn enumerate_integral(inst: &BipartiteInstance) -> Result<IntegralSolutionSet<'_>, IntegralError> {
    enumerate_integral_with_cap(inst, DEFAULT_CAP)
}

pub fn enumerate_integral_with_cap(
    inst: &BipartiteInstance,
    cap: u128,
) -> Result<IntegralSolutionSet<'_>, IntegralError> {
    if inst.mode() != Mode::LinearNonneg {
        return Err(IntegralError::Unsupported("integer enumeration needs a LINEAR_NONNEG instance".into()));
    }

    // task side: integer demands and weights
    let mut task_data = Vec::with_capacity(inst.num_tasks());
    let mut predicted: u128 = 1;
    for u in inst.task_ids() {
        let name = &inst.tasks()[u.0].id;
        let form = inst
            .task_fn(u)
            .linear()
            .ok_or_else(|| IntegralError::Unsupported(format!("task {name} has a nonlinear function")))?;
        if !form.constant.is_zero() {
            return Err(IntegralError::Unsupported(format!("task {name} has a constant offset")));
        }
        let d = to_u64(inst.demand(u), &format!("demand of {name}"))?;
        let edges = inst.task_edges(u).to_vec();
        let mut weights = Vec::with_capacity(edges.len());
        for &e in &edges {
            let a = to_u64(&form.coeff(e), &format!("task weight on {}", inst.edge_key(e)))?;
            if a == 0 {
                return Err(IntegralError::Unsupported(format!("zero task weight on {}", inst.edge_key(e))));
            }
            weights.push(a);
        }
        if usize::try_from(d).map_or(true, |d| d > 1 << 32) {
            return Err(IntegralError::TooLarge { predicted: u128::MAX, cap });
        }
        predicted = predicted.saturating_mul(count_solutions(&weights, d));
        task_data.push((edges, weights, d));
    }
    if predicted > cap {
        return Err(IntegralError::TooLarge { predicted, cap });
    }

    // worker side: common denominator of all coefficients
    let mut scale = BigInt::one();
    let mut worker_coeff: Vec<Option<(usize, Rational)>> = vec![None; inst.num_edges()];
    for w in inst.worker_ids() {
        let name = &inst.workers()[w.0];
        let form = inst
            .worker_fn(w)
            .linear()
            .ok_or_else(|| IntegralError::Unsupported(format!("worker {name} has a nonlinear function")))?;
        if !form.constant.is_zero() {
            return Err(IntegralError::Unsupported(format!("worker {name} has a constant offset")));
        }
        for (e, c) in &form.terms {
            if c.is_negative() {
                return Err(IntegralError::Unsupported(format!("negative worker weight on {}", inst.edge_key(*e))));
            }
            scale = scale.lcm(c.denom());
            worker_coeff[e.0] = Some((w.0, c.clone()));
        }
    }
    let mut scaled = vec![None; inst.num_edges()];
    let mut bound = BigInt::zero();
    for (e, slot) in worker_coeff.iter().enumerate() {
        if let Some((w, c)) = slot {
            let s = (c * Rational::from_integer(scale.clone())).to_integer();
            let d = inst.demand(inst.edge(EdgeId(e)).task).to_integer();
            bound += &s * d;
            let s = s.to_i128().ok_or_else(|| IntegralError::Unsupported("worker weights too large".into()))?;
            scaled[e] = Some((*w, s));
        }
    }
    if bound > BigInt::from(i128::MAX >> 2) {
        return Err(IntegralError::Unsupported("loads exceed 128-bit range".into()));
    }

    let count = if predicted == 0 { 0 } else { predicted };
    let tasks = task_data
        .into_iter()
        .map(|(edges, weights, d)| {
            let comps = if count == 0 { Vec::new() } else { compositions(&weights, d) };
            let contrib = comps
                .iter()
                .map(|c| {
                    edges
                        .iter()
                        .zip(c)
                        .filter(|(_, &v)| v > 0)
                        .filter_map(|(e, &v)| scaled[e.0].map(|(w, s)| (w, s * v as i128)))
                        .collect()
                })
                .collect();
            TaskPlan { edges, comps, contrib }
        })
        .collect();
    Ok(IntegralSolutionSet { inst, tasks, scale, count })
}

/// Running statistics over a stream of points.
#[derive(Clone)]
struct Stats {
    count: u128,
    min_lmax: Option<i128>,
    max_lmin: Option<i128>,
    min_spread: Option<i128>,
    pairs: BTreeSet<(i128, i128)>,
}

impl Stats {
    fn new() -> Self {
        Self { count: 0, min_lmax: None, max_lmin: None, min_spread: None, pairs: BTreeSet::new() }
    }

    fn add(&mut self, lmax: i128, lmin: i128) {
        self.count += 1;
        self.min_lmax = Some(self.min_lmax.map_or(lmax, |v| v.min(lmax)));
        self.max_lmin = Some(self.max_lmin.map_or(lmin, |v| v.max(lmin)));
        let spread = lmax - lmin;
        self.min_spread = Some(self.min_spread.map_or(spread, |v| v.min(spread)));
        self.pairs.insert((lmax, lmin));
    }

    fn merge(mut self, other: Self) -> Self {
        fn pick(a: Option<i128>, b: Option<i128>, f: fn(i128, i128) -> i128) -> Option<i128> {
            match (a, b) {
                (Some(x), Some(y)) => Some(f(x, y)),
                (x, None) => x,
                (None, y) => y,
            }
        }
        self.count += other.count;
        self.min_lmax = pick(self.min_lmax, other.min_lmax, i128::min);
        self.max_lmin = pick(self.max_lmin, other.max_lmin, i128::max);
        self.min_spread = pick(self.min_spread, other.min_spread, i128::min);
        self.pairs.extend(other.pairs);
        self
    }
}

fn extremes(loads: &[i128]) -> (i128, i128) {
    let hi = loads.iter().copied().max().unwrap_or(0);
    let lo = loads.iter().copied().min().unwrap_or(0);
    (hi, lo)
}

/// Non-dominated pairs under (minimize lmax, maximize lmin), by increasing lmax.
fn frontier(pairs: &BTreeSet<(i128, i128)>) -> Vec<(i128, i128)> {
    let mut out: Vec<(i128, i128)> = Vec::new();
    // pairs ascend by lmax, then lmin; keep the best lmin per lmax if it beats every smaller lmax
    let mut best_lmin: Option<i128> = None;
    let mut iter = pairs.iter().peekable();
    while let Some(&(hi, lo)) = iter.next() {
        if iter.peek().is_some_and(|&&(next_hi, _)| next_hi == hi) {
            continue;
        }
        if best_lmin.is_none_or(|b| lo > b) {
            out.push((hi, lo));
            best_lmin = Some(lo);
        }
    }
    out
}

impl<'a> IntegralSolutionSet<'a> {
    pub fn instance(&self) -> &'a BipartiteInstance {
        self.inst
    }

    pub fn count(&self) -> u128 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Points in enumeration order: tasks nested in task order, each task's
    /// splits in ascending lexicographic order over its edges.
    pub fn iter(&self) -> IntegralIter<'_, 'a> {
        IntegralIter { set: self, choice: vec![0; self.tasks.len()], done: self.count == 0 }
    }

    fn unscale(&self, v: i128) -> Rational {
        Rational::new(BigInt::from(v), self.scale.clone())
    }

    fn assignment(&self, choice: &[usize]) -> Assignment<Rational> {
        let mut values = vec![Rational::zero(); self.inst.num_edges()];
        for (plan, &c) in self.tasks.iter().zip(choice) {
            for (e, &v) in plan.edges.iter().zip(&plan.comps[c]) {
                values[e.0] = Rational::from_integer(v.into());
            }
        }
        Assignment::new(values)
    }

    fn apply(&self, depth: usize, c: usize, loads: &mut [i128], sign: i128) {
        for &(w, s) in &self.tasks[depth].contrib[c] {
            loads[w] += sign * s;
        }
    }

    /// Depth-first walk; `prune` sees partial loads, `visit` full ones.
    fn walk(
        &self,
        depth: usize,
        choice: &mut Vec<usize>,
        loads: &mut Vec<i128>,
        prune: &mut dyn FnMut(&[i128]) -> bool,
        visit: &mut dyn FnMut(&[usize], &[i128]),
    ) {
        if depth == self.tasks.len() {
            visit(choice, loads);
            return;
        }
        for c in 0..self.tasks[depth].comps.len() {
            self.apply(depth, c, loads, 1);
            if !prune(loads) {
                choice.push(c);
                self.walk(depth + 1, choice, loads, prune, visit);
                choice.pop();
            }
            self.apply(depth, c, loads, -1);
        }
    }

    fn stats(&self) -> Stats {
        let n = self.inst.num_workers();
        if self.count == 0 {
            return Stats::new();
        }
        if self.tasks.is_empty() {
            let mut s = Stats::new();
            s.add(0, 0);
            return s;
        }
        // split on the first task's choice
        (0..self.tasks[0].comps.len())
            .into_par_iter()
            .map(|c| {
                let mut stats = Stats::new();
                let mut loads = vec![0i128; n];
                self.apply(0, c, &mut loads, 1);
                let mut choice = vec![c];
                self.walk(1, &mut choice, &mut loads, &mut |_| false, &mut |_, l| {
                    let (hi, lo) = extremes(l);
                    stats.add(hi, lo);
                });
                stats
            })
            .reduce(Stats::new, Stats::merge)
    }

    pub fn summary(&self) -> Result<IntegralSummary, IntegralError> {
        let stats = self.stats();
        let (Some(min_lmax), Some(max_lmin), Some(min_spread)) = (stats.min_lmax, stats.max_lmin, stats.min_spread)
        else {
            return Err(IntegralError::Empty);
        };
        Ok(IntegralSummary {
            count: stats.count,
            min_lmax: self.unscale(min_lmax),
            max_lmin: self.unscale(max_lmin),
            min_spread: self.unscale(min_spread),
            pareto: self.pareto_of(&stats.pairs),
        })
    }

    fn pareto_of(&self, pairs: &BTreeSet<(i128, i128)>) -> Vec<ParetoPoint> {
        frontier(pairs)
            .into_iter()
            .map(|(hi, lo)| ParetoPoint { lmax: self.unscale(hi), lmin: self.unscale(lo) })
            .collect()
    }

    /// Minimum maximal load, pruning branches whose partial loads already
    /// exceed the best value found.
    pub fn min_lmax(&self) -> Result<MinLmax, IntegralError> {
        if self.count == 0 {
            return Err(IntegralError::Empty);
        }
        let n = self.inst.num_workers();
        let mut best: Option<i128> = None;
        let mut argmin: Vec<Vec<usize>> = Vec::new();
        let mut argmin_count: u64 = 0;
        let mut best_spread = i128::MAX;
        let best_cell = std::cell::Cell::new(None::<i128>);
        self.walk(
            0,
            &mut Vec::with_capacity(self.tasks.len()),
            &mut vec![0i128; n],
            &mut |partial| best_cell.get().is_some_and(|b| partial.iter().any(|&l| l > b)),
            &mut |choice, loads| {
                let (hi, lo) = extremes(loads);
                match best {
                    Some(b) if hi > b => return,
                    Some(b) if hi == b => {}
                    _ => {
                        best = Some(hi);
                        best_cell.set(best);
                        argmin.clear();
                        argmin_count = 0;
                        best_spread = i128::MAX;
                    }
                }
                argmin_count += 1;
                best_spread = best_spread.min(hi - lo);
                if argmin.len() <= ARGMIN_LIST_LIMIT {
                    argmin.push(choice.to_vec());
                }
            },
        );
        let value = best.expect("non-empty set has a minimum");
        let listed = argmin_count as usize <= ARGMIN_LIST_LIMIT;
        Ok(MinLmax {
            value: self.unscale(value),
            argmin_count,
            argmin: listed.then(|| argmin.iter().map(|c| self.assignment(c)).collect()),
            min_spread_among_argmin: self.unscale(best_spread),
        })
    }

    /// Minimum spread and the first point attaining it.
    pub fn min_spread(&self) -> Result<MinSpread, IntegralError> {
        let mut best: Option<(i128, Vec<usize>)> = None;
        self.walk(
            0,
            &mut Vec::with_capacity(self.tasks.len()),
            &mut vec![0i128; self.inst.num_workers()],
            &mut |_| false,
            &mut |choice, loads| {
                let (hi, lo) = extremes(loads);
                if best.as_ref().is_none_or(|(b, _)| hi - lo < *b) {
                    best = Some((hi - lo, choice.to_vec()));
                }
            },
        );
        let (value, choice) = best.ok_or(IntegralError::Empty)?;
        Ok(MinSpread { value: self.unscale(value), witness: self.assignment(&choice) })
    }

    pub fn pareto(&self) -> Result<Vec<ParetoPoint>, IntegralError> {
        let stats = self.stats();
        if stats.count == 0 {
            return Err(IntegralError::Empty);
        }
        Ok(self.pareto_of(&stats.pairs))
    }
}

pub struct IntegralIter<'s, 'a> {
    set: &'s IntegralSolutionSet<'a>,
    choice: Vec<usize>,
    done: bool,
}

impl Iterator for IntegralIter<'_, '_> {
    type Item = Assignment<Rational>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.set.assignment(&self.choice);
        // odometer, last task fastest
        self.done = true;
        for i in (0..self.choice.len()).rev() {
            self.choice[i] += 1;
            if self.choice[i] < self.set.tasks[i].comps.len() {
                self.done = false;
                break;
            }
            self.choice[i] = 0;
        }
        Some(out)
    }
}

pub fn integral_min_lmax(inst: &BipartiteInstance) -> Result<MinLmax, IntegralError> {
    enumerate_integral(inst)?.min_lmax()
}

pub fn integral_min_spread(inst: &BipartiteInstance) -> Result<MinSpread, IntegralError> {
    enumerate_integral(inst)?.min_spread()
}

pub fn integral_pareto(inst: &BipartiteInstance) -> Result<Vec<ParetoPoint>, IntegralError> {
    enumerate_integral(inst)?.pareto()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{evaluate_loads, InstanceBuilder};
    use crate::numeric::{int, rat};

    fn ints(x: &Assignment<Rational>) -> Vec<i64> {
        x.values().iter().map(|v| v.to_integer().to_i64().unwrap()).collect()
    }

    fn single_edge(d: i64, ww: i64) -> BipartiteInstance {
        InstanceBuilder::new(Mode::LinearNonneg)
            .task("u", int(d))
            .worker("w")
            .weighted_edge("u", "w", int(1), int(ww))
            .build()
            .unwrap()
    }

    #[test]
    fn compositions_in_lex_order() {
        assert_eq!(compositions(&[1, 1], 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(&[2, 1], 3), vec![vec![0, 3], vec![1, 1]]);
        assert_eq!(compositions(&[2], 3), Vec::<Vec<u64>>::new());
        assert_eq!(compositions(&[], 0), vec![Vec::<u64>::new()]);
        assert_eq!(count_solutions(&[1, 1, 1], 9), 55);
        assert_eq!(count_solutions(&[2, 1], 3), 2);
    }

    #[test]
    fn forced_points() {
        let inst = single_edge(3, 2);
        let set = enumerate_integral(&inst).unwrap();
        assert_eq!(set.count(), 1);
        assert_eq!(set.iter().map(|x| ints(&x)).collect::<Vec<_>>(), vec![vec![3]]);
        let best = set.min_lmax().unwrap();
        assert_eq!(best.value, int(6));
        assert_eq!(set.min_spread().unwrap().value, int(0));
        assert_eq!(set.pareto().unwrap(), vec![ParetoPoint { lmax: int(6), lmin: int(6) }]);
    }

    #[test]
    fn unit_demand_two_edges() {
        let inst = InstanceBuilder::new(Mode::LinearNonneg)
            .task("u", int(1))
            .worker("a")
            .worker("b")
            .edge("u", "a")
            .edge("u", "b")
            .build()
            .unwrap();
        let set = enumerate_integral(&inst).unwrap();
        assert_eq!(set.iter().map(|x| ints(&x)).collect::<Vec<_>>(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn fig2_claims() {
        let inst = fixtures::fig2();
        let set = enumerate_integral(&inst).unwrap();
        assert_eq!(set.count(), 3630);
        assert_eq!(set.iter().count(), 3630);

        let best = set.min_lmax().unwrap();
        assert_eq!(best.value, int(9));
        assert_eq!(best.argmin_count, 9);
        let listed: Vec<Vec<i64>> = best.argmin.unwrap().iter().map(ints).collect();
        let expected: Vec<Vec<i64>> = (1..=9).map(|k| vec![9, 0, 0, 0, k, 10 - k]).collect();
        assert_eq!(listed, expected);
        assert_eq!(best.min_spread_among_argmin, int(4));

        let spread = set.min_spread().unwrap();
        assert_eq!(spread.value, int(1));
        let loads = evaluate_loads(&inst, &spread.witness).unwrap();
        assert_eq!(loads.spread, int(1));

        let summary = set.summary().unwrap();
        assert_eq!(summary.max_lmin, int(405));
        let pareto: Vec<(Rational, Rational)> = summary.pareto.into_iter().map(|p| (p.lmax, p.lmin)).collect();
        let expected: Vec<(Rational, Rational)> =
            [(9, 5), (100, 8), (107, 104), (200, 106), (205, 204), (304, 303), (402, 306), (403, 401), (500, 405)]
                .iter()
                .map(|&(a, b)| (int(a), int(b)))
                .collect();
        assert_eq!(pareto, expected);
    }

    #[test]
    fn fig1_summary() {
        let inst = fixtures::fig1();
        let set = enumerate_integral(&inst).unwrap();
        let summary = set.summary().unwrap();
        assert_eq!(summary.count, 30360);
        assert_eq!(summary.min_lmax, int(13));
        assert_eq!(summary.max_lmin, int(20));
        assert_eq!(summary.min_spread, int(0));
        assert_eq!(
            summary.pareto,
            vec![ParetoPoint { lmax: int(13), lmin: int(10) }, ParetoPoint { lmax: int(20), lmin: int(20) }]
        );
        let best = set.min_lmax().unwrap();
        assert_eq!(best.argmin_count, 6);
        assert_eq!(best.min_spread_among_argmin, int(3));
        assert_eq!(ints(&set.min_spread().unwrap().witness), vec![20, 1, 0, 10, 2, 2]);
    }

    #[test]
    fn fractional_worker_weights_are_exact() {
        let inst = InstanceBuilder::new(Mode::LinearNonneg)
            .task("u", int(3))
            .worker("a")
            .worker("b")
            .weighted_edge("u", "a", int(1), rat(1, 3))
            .weighted_edge("u", "b", int(1), rat(1, 2))
            .build()
            .unwrap();
        let best = integral_min_lmax(&inst).unwrap();
        // (2,1) gives loads 2/3, 1/2
        assert_eq!(best.value, rat(2, 3));
    }

    #[test]
    fn rejects_bad_data() {
        let frac =
            InstanceBuilder::new(Mode::LinearNonneg).task("u", rat(1, 2)).worker("w").edge("u", "w").build().unwrap();
        assert!(matches!(enumerate_integral(&frac), Err(IntegralError::NonIntegerData(_))));
        let heavy = InstanceBuilder::new(Mode::LinearNonneg)
            .task("u", int(2))
            .worker("w")
            .weighted_edge("u", "w", rat(3, 2), int(1))
            .build()
            .unwrap();
        assert!(matches!(enumerate_integral(&heavy), Err(IntegralError::NonIntegerData(_))));
        assert_eq!(
            enumerate_integral_with_cap(&fixtures::fig2(), 3629).err(),
            Some(IntegralError::TooLarge { predicted: 3630, cap: 3629 })
        );
    }

    #[test]
    fn infeasible_is_empty() {
        let inst = InstanceBuilder::new(Mode::LinearNonneg)
            .task("u", int(1))
            .worker("w")
            .weighted_edge("u", "w", int(2), int(1))
            .build()
            .unwrap();
        let set = enumerate_integral(&inst).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.iter().count(), 0);
        assert_eq!(set.min_lmax().unwrap_err(), IntegralError::Empty);
    }
}
