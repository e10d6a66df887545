//! Fixing loads along a spanning tree and driving every worker to a common load.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::expr::{ExprError, BRACKET_LIMIT, MAX_BISECTIONS};
use crate::instance::{check_membership, evaluate_loads, Assignment, BipartiteInstance, EdgeId, TaskId, WorkerId};
use crate::numeric::{approx_eq, Scalar};

/// Grid size of the monotonicity probe in [`fixed_point_bisect`].
const MONOTONE_SAMPLES: usize = 9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("kept edges do not form a spanning tree: {0}")]
    NotATree(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("instance has no edges")]
    NoEdges,
    #[error("no target load for worker {0}")]
    MissingTarget(String),
    #[error("starting assignment violates a task equation")]
    NotInXf,
    #[error("fixed point not bracketed within magnitude 2^64")]
    BracketFail,
    #[error("map is not non-increasing near {at}")]
    NotMonotone { at: f64 },
    #[error("fixed point residual {residual} exceeds tolerance")]
    Tolerance { residual: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Vertex {
    Task(TaskId),
    Worker(WorkerId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreePolicy {
    /// Breadth-first from the root, neighbors in edge order.
    Bfs,
    Given(Vec<EdgeId>),
}

/// A spanning tree of the instance rooted at a worker, with every non-tree
/// edge pinned to a fixed value.
#[derive(Debug, Clone)]
pub struct RootedTreeView<'a, T> {
    inst: &'a BipartiteInstance,
    root: WorkerId,
    tree: Vec<EdgeId>,
    in_tree: Vec<bool>,
    parent: Vec<Option<EdgeId>>,
    // children before parents, root excluded
    order: Vec<Vertex>,
    pinned: Vec<T>,
}

fn slot(inst: &BipartiteInstance, v: Vertex) -> usize {
    match v {
        Vertex::Task(u) => u.0,
        Vertex::Worker(w) => inst.num_tasks() + w.0,
    }
}

fn other_end(inst: &BipartiteInstance, e: EdgeId, v: Vertex) -> Vertex {
    let edge = inst.edge(e);
    match v {
        Vertex::Task(_) => Vertex::Worker(edge.worker),
        Vertex::Worker(_) => Vertex::Task(edge.task),
    }
}

fn incident(inst: &BipartiteInstance, v: Vertex) -> &[EdgeId] {
    match v {
        Vertex::Task(u) => inst.task_edges(u),
        Vertex::Worker(w) => inst.worker_edges(w),
    }
}

/// The worker with the lexicographically smallest id.
pub fn default_root(inst: &BipartiteInstance) -> Option<WorkerId> {
    inst.worker_ids().min_by(|a, b| inst.workers()[a.0].cmp(&inst.workers()[b.0]))
}

/// BFS spanning tree edges from `root`; `None` if some vertex is unreachable.
pub fn bfs_tree(inst: &BipartiteInstance, root: WorkerId) -> Option<Vec<EdgeId>> {
    let n = inst.num_tasks() + inst.num_workers();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([Vertex::Worker(root)]);
    seen[slot(inst, Vertex::Worker(root))] = true;
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    while let Some(v) = queue.pop_front() {
        for &e in incident(inst, v) {
            let next = other_end(inst, e, v);
            let s = slot(inst, next);
            if !seen[s] {
                seen[s] = true;
                tree.push(e);
                queue.push_back(next);
            }
        }
    }
    if seen.iter().all(|&b| b) {
        tree.sort();
        Some(tree)
    } else {
        None
    }
}

impl<'a, T: Scalar> RootedTreeView<'a, T> {
    /// `pinned` supplies the values of the non-tree edges; its entries on tree
    /// edges are ignored.
    pub fn new(
        inst: &'a BipartiteInstance,
        tree: Vec<EdgeId>,
        root: WorkerId,
        pinned: Assignment<T>,
    ) -> Result<Self, TreeError> {
        let n = inst.num_tasks() + inst.num_workers();
        if root.0 >= inst.num_workers() {
            return Err(TreeError::NotATree(format!("root {} is not a worker", root.0)));
        }
        if pinned.len() != inst.num_edges() {
            return Err(TreeError::NotATree(format!(
                "pinned values cover {} edges, instance has {}",
                pinned.len(),
                inst.num_edges()
            )));
        }
        let mut in_tree = vec![false; inst.num_edges()];
        for &e in &tree {
            if e.0 >= inst.num_edges() {
                return Err(TreeError::NotATree(format!("unknown edge {e}")));
            }
            if std::mem::replace(&mut in_tree[e.0], true) {
                return Err(TreeError::NotATree(format!("edge {e} listed twice")));
            }
        }
        if tree.len() + 1 != n {
            return Err(TreeError::NotATree(format!("{} edges for {} vertices", tree.len(), n)));
        }

        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut bfs = Vec::with_capacity(n);
        let mut queue = VecDeque::from([Vertex::Worker(root)]);
        seen[slot(inst, Vertex::Worker(root))] = true;
        while let Some(v) = queue.pop_front() {
            bfs.push(v);
            for &e in incident(inst, v) {
                if !in_tree[e.0] || Some(e) == parent[slot(inst, v)] {
                    continue;
                }
                let next = other_end(inst, e, v);
                let s = slot(inst, next);
                if seen[s] {
                    return Err(TreeError::NotATree(format!("edge {e} closes a cycle")));
                }
                seen[s] = true;
                parent[s] = Some(e);
                queue.push_back(next);
            }
        }
        if bfs.len() != n {
            return Err(TreeError::NotATree("kept edges leave vertices unreachable".into()));
        }
        bfs.reverse();
        bfs.pop(); // the root
        let mut tree = tree;
        tree.sort();
        Ok(Self { inst, root, tree, in_tree, parent, order: bfs, pinned: pinned.into_values() })
    }

    pub fn from_policy(
        inst: &'a BipartiteInstance,
        policy: &TreePolicy,
        root: WorkerId,
        pinned: Assignment<T>,
    ) -> Result<Self, TreeError> {
        let tree = match policy {
            TreePolicy::Bfs => bfs_tree(inst, root).ok_or(TreeError::NotConnected)?,
            TreePolicy::Given(edges) => edges.clone(),
        };
        Self::new(inst, tree, root, pinned)
    }

    /// Same tree and pins, different root.
    pub fn with_root(&self, root: WorkerId) -> Result<Self, TreeError> {
        Self::new(self.inst, self.tree.clone(), root, Assignment::new(self.pinned.clone()))
    }

    pub fn instance(&self) -> &'a BipartiteInstance {
        self.inst
    }

    pub fn root(&self) -> WorkerId {
        self.root
    }

    pub fn tree_edges(&self) -> &[EdgeId] {
        &self.tree
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.in_tree[e.0]
    }

    pub fn parent_edge(&self, v: Vertex) -> Option<EdgeId> {
        self.parent[slot(self.inst, v)]
    }

    /// Non-root vertices, every child ahead of its parent.
    pub fn bottom_up(&self) -> &[Vertex] {
        &self.order
    }

    fn fix_with(&self, target: impl Fn(WorkerId) -> Option<T>, tol: f64) -> Result<Vec<T>, TreeError> {
        let inst = self.inst;
        let mut x = self.pinned.clone();
        for &v in &self.order {
            let p = self.parent[slot(inst, v)].expect("non-root vertex has a parent");
            let (f, goal) = match v {
                Vertex::Task(u) => (inst.task_fn(u), T::from_rational(inst.demand(u))),
                Vertex::Worker(w) => {
                    let goal = target(w).ok_or_else(|| TreeError::MissingTarget(inst.workers()[w.0].clone()))?;
                    (inst.worker_fn(w), goal)
                }
            };
            x[p.0] = f.invert(&x, p, &goal, tol)?;
        }
        Ok(x)
    }

    fn root_load(&self, x: &[T]) -> Result<T, TreeError> {
        Ok(self.inst.worker_fn(self.root).eval(x)?)
    }
}

/// The unique assignment meeting every task demand and every non-root worker
/// target, with non-tree edges at their pinned values.
pub fn fix_loads<T: Scalar>(
    view: &RootedTreeView<'_, T>,
    targets: &BTreeMap<WorkerId, T>,
    tol: f64,
) -> Result<Assignment<T>, TreeError> {
    view.fix_with(|w| targets.get(&w).cloned(), tol).map(Assignment::new)
}

/// Root load when every other worker is fixed at `level`.
fn transport<T: Scalar>(view: &RootedTreeView<'_, T>, level: &T, tol: f64) -> Result<T, TreeError> {
    let x = view.fix_with(|_| Some(level.clone()), tol)?;
    view.root_load(&x)
}

/// Equal-load assignment on a tree and the common load.
///
/// With linear functions the root load is affine in the common level,
/// `F(λ) = α − βλ`, and `λ = α / (1 + β)` is read off two probes. Otherwise
/// `λ` is found by [`fixed_point_bisect`] in floating point.
pub fn equalize_tree<T: Scalar>(view: &RootedTreeView<'_, T>, tol: f64) -> Result<(Assignment<T>, T), TreeError> {
    let inst = view.instance();
    if inst.num_edges() == 0 {
        return Err(TreeError::NoEdges);
    }
    // inner inversions bisect down to adjacent floats: a value residual says
    // little about the edge value where an inverse is steep
    let inner = 0.0;
    let lambda = if inst.is_linear() {
        let alpha = transport(view, &T::zero(), inner)?;
        let beta = alpha.clone() - transport(view, &T::one(), inner)?;
        if beta.is_negative() && !approx_eq(&beta, &T::zero(), tol) {
            return Err(TreeError::NotMonotone { at: 0.0 });
        }
        alpha / (T::one() + beta)
    } else {
        if T::is_exact() {
            return Err(ExprError::NonlinearExact.into());
        }
        let lambda = try_fixed_point_bisect(
            |l| {
                let level = T::from_f64(l).ok_or(TreeError::BracketFail)?;
                Ok(transport(view, &level, inner)?.to_f64())
            },
            tol,
        )?;
        T::from_f64(lambda).ok_or(TreeError::BracketFail)?
    };
    let x = view.fix_with(|_| Some(lambda.clone()), inner)?;
    Ok((Assignment::new(x), lambda))
}

/// Solves `F(λ) = λ` for a continuous non-increasing `F`.
pub fn fixed_point_bisect(mut f: impl FnMut(f64) -> f64, tol: f64) -> Result<f64, TreeError> {
    try_fixed_point_bisect(|l| Ok(f(l)), tol)
}

/// [`fixed_point_bisect`] for a fallible `F`.
///
/// The bracket doubles outward from zero up to magnitude 2^64. Before
/// bisecting, `F` is sampled on a grid over the bracket and rejected if it
/// increases anywhere.
pub fn try_fixed_point_bisect(mut f: impl FnMut(f64) -> Result<f64, TreeError>, tol: f64) -> Result<f64, TreeError> {
    let mut g = |l: f64| -> Result<f64, TreeError> {
        let v = f(l)?;
        if v.is_nan() {
            return Err(TreeError::BracketFail);
        }
        Ok(v - l)
    };
    // absolute tolerance, widened by a few ulps of the iterate
    let accept = |l: f64, r: f64| r.abs() <= tol + 4.0 * f64::EPSILON * l.abs().max(1.0);

    let g0 = g(0.0)?;
    if accept(0.0, g0) {
        return Ok(0.0);
    }
    // g is decreasing: positive below the root, negative above
    let direction = if g0 > 0.0 { 1.0 } else { -1.0 };
    let (mut inner, mut g_inner) = (0.0, g0);
    let mut step = 1.0;
    let (mut lo, mut g_lo, mut hi, mut g_hi);
    loop {
        let outer = direction * step;
        let g_outer = g(outer)?;
        if accept(outer, g_outer) {
            return Ok(outer);
        }
        if (g_outer > 0.0) != (g0 > 0.0) {
            if direction > 0.0 {
                (lo, g_lo, hi, g_hi) = (inner, g_inner, outer, g_outer);
            } else {
                (lo, g_lo, hi, g_hi) = (outer, g_outer, inner, g_inner);
            }
            break;
        }
        (inner, g_inner) = (outer, g_outer);
        step *= 2.0;
        if step > BRACKET_LIMIT {
            return Err(TreeError::BracketFail);
        }
    }

    // F non-increasing means F(a) >= F(b) for a < b
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..MONOTONE_SAMPLES {
        let l = lo + (hi - lo) * i as f64 / (MONOTONE_SAMPLES - 1) as f64;
        let value = g(l)? + l;
        if let Some((_, before)) = prev {
            if value > before + tol * before.abs().max(1.0) {
                return Err(TreeError::NotMonotone { at: l });
            }
        }
        prev = Some((l, value));
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid)?;
        if accept(mid, g_mid) {
            return Ok(mid);
        }
        if g_mid > 0.0 {
            (lo, g_lo) = (mid, g_mid);
        } else {
            (hi, g_hi) = (mid, g_mid);
        }
    }
    let (best, residual) = if g_lo.abs() <= g_hi.abs() { (lo, g_lo) } else { (hi, g_hi) };
    if accept(best, residual) {
        Ok(best)
    } else {
        Err(TreeError::Tolerance { residual: residual.abs() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualizeOutcome<T> {
    pub x: Assignment<T>,
    pub lambda: T,
    /// `false` when the start already had equal loads and was returned as is.
    pub improved: bool,
    pub tree: Vec<EdgeId>,
    pub root: WorkerId,
    /// Some component of `x` is negative.
    pub warn_negative: bool,
}

/// Equalizes every load on a connected instance, keeping the non-tree edges
/// at their starting values.
pub fn equalize_connected<T: Scalar>(
    inst: &BipartiteInstance,
    x0: &Assignment<T>,
    policy: &TreePolicy,
    tol: f64,
) -> Result<EqualizeOutcome<T>, TreeError> {
    if inst.num_edges() == 0 {
        return Err(TreeError::NoEdges);
    }
    if !inst.is_connected() {
        return Err(TreeError::NotConnected);
    }
    if !check_membership(&inst.with_mode(crate::instance::Mode::GeneralReal), x0, tol) {
        return Err(TreeError::NotInXf);
    }
    let root = default_root(inst).expect("connected instance with edges has a worker");
    let loads = evaluate_loads(inst, x0).map_err(|_| TreeError::NotInXf)?;
    if approx_eq(&loads.lmax, &loads.lmin, tol) {
        let tree = match policy {
            TreePolicy::Bfs => bfs_tree(inst, root).ok_or(TreeError::NotConnected)?,
            TreePolicy::Given(edges) => {
                let mut edges = edges.clone();
                edges.sort();
                edges
            }
        };
        return Ok(EqualizeOutcome {
            warn_negative: !x0.is_nonnegative(),
            x: x0.clone(),
            lambda: loads.lmax,
            improved: false,
            tree,
            root,
        });
    }
    let view = RootedTreeView::from_policy(inst, policy, root, x0.clone())?;
    // the equal-load point is root independent, but the conditioning of F is
    // not: a root behind a steep inverse can leave no float within tolerance.
    // Retry other roots, then (BFS policy only) trees grown from other workers.
    let mut candidates: Vec<(Vec<EdgeId>, WorkerId)> = Vec::new();
    let mut trees = vec![view.tree_edges().to_vec()];
    if matches!(policy, TreePolicy::Bfs) {
        for w in inst.worker_ids().filter(|&w| w != root) {
            let t = bfs_tree(inst, w).ok_or(TreeError::NotConnected)?;
            if !trees.contains(&t) {
                trees.push(t);
            }
        }
    }
    for t in &trees {
        candidates.push((t.clone(), root));
        candidates.extend(inst.worker_ids().filter(|&w| w != root).map(|w| (t.clone(), w)));
    }
    let mut attempt = equalize_tree(&view, tol).map(|r| (r, view.tree_edges().to_vec(), root));
    for (t, r) in candidates.into_iter().skip(1) {
        if !matches!(attempt, Err(TreeError::Tolerance { .. })) {
            break;
        }
        let view = RootedTreeView::new(inst, t.clone(), r, x0.clone())?;
        attempt = equalize_tree(&view, tol).map(|res| (res, t, r));
    }
    let ((x, lambda), tree, root) = attempt?;
    Ok(EqualizeOutcome { warn_negative: !x.is_nonnegative(), x, lambda, improved: true, tree, root })
}
