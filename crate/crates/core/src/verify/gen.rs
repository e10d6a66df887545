//! Seeded random instances.
//!
//! Draw order, all from one splitmix64 stream seeded with `seed`:
//! demands in task order; candidate edges row-major over (task, worker), each
//! kept when a uniform draw falls below `density`; one random worker for every
//! task left without edges; in GENERAL_REAL, bridging edges until connected;
//! random removals down to `max_edges`; then, with edges sorted by (task,
//! worker), the task-side and worker-side weight of each edge; finally, in
//! GENERAL_REAL, a random load expression for every task and then every worker.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rng::SplitMix64;
use crate::expr::LoadExpr;
use crate::instance::{BipartiteInstance, EdgeId, InstanceBuilder, Mode};
use crate::numeric::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenParams {
    pub tasks: usize,
    pub workers: usize,
    #[serde(default = "default_density")]
    pub density: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_edges: Option<usize>,
    /// Inclusive integer range.
    #[serde(default = "default_demands")]
    pub demand_range: [i64; 2],
    /// Inclusive range of positive rationals, sampled on the grid `1/weight_denominator`.
    #[serde(default = "default_weights")]
    pub weight_range: [String; 2],
    #[serde(default = "default_denominator")]
    pub weight_denominator: u64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Maximal expression depth in GENERAL_REAL.
    #[serde(default = "default_depth")]
    pub depth: usize,
    pub seed: u64,
}

fn default_density() -> f64 {
    1.0
}
fn default_demands() -> [i64; 2] {
    [0, 10]
}
fn default_weights() -> [String; 2] {
    ["1".into(), "1".into()]
}
fn default_denominator() -> u64 {
    1
}
fn default_mode() -> Mode {
    Mode::LinearNonneg
}
fn default_depth() -> usize {
    1
}

impl GenParams {
    pub fn new(tasks: usize, workers: usize, seed: u64) -> Self {
        Self {
            tasks,
            workers,
            density: default_density(),
            max_edges: None,
            demand_range: default_demands(),
            weight_range: default_weights(),
            weight_denominator: default_denominator(),
            mode: default_mode(),
            depth: default_depth(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unsatisfiable generator parameters: {0}")]
    UnsatisfiableParams(String),
}

fn unsat(msg: impl Into<String>) -> GenError {
    GenError::UnsatisfiableParams(msg.into())
}

/// Numerator bounds of the weight grid.
fn weight_grid(p: &GenParams) -> Result<(i64, i64), GenError> {
    let lo = parse_rational(&p.weight_range[0]).map_err(|e| unsat(format!("weight_range: {e}")))?;
    let hi = parse_rational(&p.weight_range[1]).map_err(|e| unsat(format!("weight_range: {e}")))?;
    if !lo.is_positive() {
        return Err(unsat("weights must be strictly positive"));
    }
    if p.weight_denominator == 0 {
        return Err(unsat("weight_denominator must be positive"));
    }
    let den = Rational::from_integer(BigInt::from(p.weight_denominator));
    let lo_num = (lo * &den).ceil().to_integer().to_i64();
    let hi_num = (hi * &den).floor().to_integer().to_i64();
    match (lo_num, hi_num) {
        (Some(a), Some(b)) if a <= b => Ok((a, b)),
        _ => Err(unsat("no grid point inside weight_range")),
    }
}

struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn connected(tasks: usize, workers: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let n = tasks + workers;
    if n <= 1 {
        return true;
    }
    let mut c = Components::new(n);
    for &(u, w) in edges {
        c.union(u, tasks + w);
    }
    let root = c.find(0);
    (1..n).all(|v| c.find(v) == root)
}

/// A random increasing expression over `terms` with depth at most `budget`.
///
/// Leaves reuse the given coefficients; the second branch of a `max` draws
/// fresh ones. At most one cube appears on any root-to-leaf path.
pub fn random_expr(
    rng: &mut SplitMix64,
    terms: &[(EdgeId, Rational)],
    budget: usize,
    grid: (i64, i64, u64),
    cube_allowed: bool,
) -> LoadExpr {
    let linear = |terms: &[(EdgeId, Rational)]| {
        if terms.len() == 1 {
            LoadExpr::var(terms[0].0, terms[0].1.clone())
        } else {
            LoadExpr::linear(terms.iter().cloned())
        }
    };
    let min_depth = usize::from(terms.len() > 1);
    if budget <= min_depth.max(1) {
        return linear(terms);
    }
    match rng.below(5) {
        1 => {
            let offset = rng.grid(-4, 4, 4);
            LoadExpr::shift(random_expr(rng, terms, budget - 1, grid, cube_allowed), offset)
        }
        2 if cube_allowed => LoadExpr::oddpow(random_expr(rng, terms, budget - 1, grid, false), 3),
        3 if terms.len() >= 2 => {
            let mut order: Vec<usize> = (0..terms.len()).collect();
            rng.shuffle(&mut order);
            let cut = 1 + rng.below(terms.len() as u64 - 1) as usize;
            let mut left: Vec<usize> = order[..cut].to_vec();
            let mut right: Vec<usize> = order[cut..].to_vec();
            left.sort();
            right.sort();
            let pick = |idx: &[usize]| idx.iter().map(|&i| terms[i].clone()).collect::<Vec<_>>();
            LoadExpr::Sum(vec![
                random_expr(rng, &pick(&left), budget - 1, grid, cube_allowed),
                random_expr(rng, &pick(&right), budget - 1, grid, cube_allowed),
            ])
        }
        4 => {
            let first = random_expr(rng, terms, budget - 1, grid, cube_allowed);
            let fresh: Vec<(EdgeId, Rational)> =
                terms.iter().map(|(e, _)| (*e, rng.grid(grid.0, grid.1, grid.2))).collect();
            let second = random_expr(rng, &fresh, budget - 1, grid, cube_allowed);
            LoadExpr::Max(vec![first, second])
        }
        _ => linear(terms),
    }
}

/// Deterministic in `p`; see the module docs for the draw order.
pub fn gen_random_instance(p: &GenParams) -> Result<BipartiteInstance, GenError> {
    if !(0.0..=1.0).contains(&p.density) {
        return Err(unsat("density must lie in [0, 1]"));
    }
    let [dlo, dhi] = p.demand_range;
    if dlo > dhi {
        return Err(unsat("empty demand range"));
    }
    if p.mode == Mode::LinearNonneg && dlo < 0 {
        return Err(unsat("LINEAR_NONNEG demands must be non-negative"));
    }
    let (wlo, whi) = weight_grid(p)?;
    let general = p.mode == Mode::GeneralReal;
    if p.tasks > 0 && p.workers == 0 {
        return Err(unsat("tasks need at least one worker"));
    }
    if general && p.tasks + p.workers > 1 && (p.tasks == 0 || p.workers == 0) {
        return Err(unsat("GENERAL_REAL instances must be connected"));
    }
    if general && p.depth == 0 {
        return Err(unsat("GENERAL_REAL needs depth at least 1"));
    }
    let needed = if general { (p.tasks + p.workers).saturating_sub(1) } else { p.tasks };
    if let Some(m) = p.max_edges {
        if m < needed {
            return Err(unsat(format!("max_edges {m} is below the {needed} edges required")));
        }
    }

    let mut rng = SplitMix64::new(p.seed);
    let demands: Vec<i64> = (0..p.tasks).map(|_| rng.range_i64(dlo, dhi)).collect();

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for u in 0..p.tasks {
        for w in 0..p.workers {
            if rng.next_f64() < p.density {
                edges.insert((u, w));
            }
        }
    }
    for u in 0..p.tasks {
        if !edges.iter().any(|&(t, _)| t == u) {
            edges.insert((u, rng.below(p.workers as u64) as usize));
        }
    }
    if general {
        let n = p.tasks + p.workers;
        let mut c = Components::new(n);
        for &(u, w) in &edges {
            c.union(u, p.tasks + w);
        }
        // merge every other component into the one holding task 0
        for v in 1..n {
            let main = c.find(0);
            if c.find(v) == main {
                continue;
            }
            let comp = c.find(v);
            let members: Vec<usize> = (0..n).filter(|&x| c.find(x) == comp).collect();
            let outside: Vec<usize> = (0..n).filter(|&x| c.find(x) == main).collect();
            let comp_workers: Vec<usize> = members.iter().filter(|&&x| x >= p.tasks).map(|x| x - p.tasks).collect();
            let edge = if !comp_workers.is_empty() {
                let w = comp_workers[rng.below(comp_workers.len() as u64) as usize];
                let tasks_in_main: Vec<usize> = outside.iter().copied().filter(|&x| x < p.tasks).collect();
                (tasks_in_main[rng.below(tasks_in_main.len() as u64) as usize], w)
            } else {
                let comp_tasks: Vec<usize> = members.clone();
                let workers_in_main: Vec<usize> =
                    outside.iter().filter(|&&x| x >= p.tasks).map(|x| x - p.tasks).collect();
                if workers_in_main.is_empty() {
                    return Err(unsat("cannot connect the graph"));
                }
                (
                    comp_tasks[rng.below(comp_tasks.len() as u64) as usize],
                    workers_in_main[rng.below(workers_in_main.len() as u64) as usize],
                )
            };
            edges.insert(edge);
            c.union(edge.0, p.tasks + edge.1);
        }
    }
    if let Some(m) = p.max_edges {
        while edges.len() > m {
            let removable: Vec<(usize, usize)> = edges
                .iter()
                .copied()
                .filter(|&(u, w)| {
                    let mut rest = edges.clone();
                    rest.remove(&(u, w));
                    rest.iter().any(|&(t, _)| t == u) && (!general || connected(p.tasks, p.workers, &rest))
                })
                .collect();
            if removable.is_empty() {
                return Err(unsat(format!("cannot trim to {m} edges")));
            }
            let victim = removable[rng.below(removable.len() as u64) as usize];
            edges.remove(&victim);
        }
    }

    let grid = (wlo, whi, p.weight_denominator);
    let edge_list: Vec<(usize, usize)> = edges.into_iter().collect();
    let weights: Vec<(Rational, Rational)> = edge_list
        .iter()
        .map(|_| {
            let a = rng.grid(wlo, whi, p.weight_denominator);
            let b = rng.grid(wlo, whi, p.weight_denominator);
            (a, b)
        })
        .collect();

    let task_name = |u: usize| format!("u{}", u + 1);
    let worker_name = |w: usize| format!("w{}", w + 1);
    let mut b = InstanceBuilder::new(p.mode);
    for (u, &d) in demands.iter().enumerate() {
        b = b.task(task_name(u), Rational::from_integer(BigInt::from(d)));
    }
    for w in 0..p.workers {
        b = b.worker(worker_name(w));
    }
    for (&(u, w), (a, c)) in edge_list.iter().zip(&weights) {
        b = b.weighted_edge(task_name(u), worker_name(w), a.clone(), c.clone());
    }
    if general {
        for u in 0..p.tasks {
            let terms: Vec<(EdgeId, Rational)> = edge_list
                .iter()
                .enumerate()
                .filter(|(_, &(t, _))| t == u)
                .map(|(i, _)| (EdgeId(i), weights[i].0.clone()))
                .collect();
            b = b.task_fn(task_name(u), random_expr(&mut rng, &terms, p.depth, grid, true));
        }
        for w in 0..p.workers {
            let terms: Vec<(EdgeId, Rational)> = edge_list
                .iter()
                .enumerate()
                .filter(|(_, &(_, x))| x == w)
                .map(|(i, _)| (EdgeId(i), weights[i].1.clone()))
                .collect();
            b = b.worker_fn(worker_name(w), random_expr(&mut rng, &terms, p.depth, grid, true));
        }
    }
    b.build().map_err(|e| unsat(e.to_string()))
}
