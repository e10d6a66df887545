//! Bipartite task/worker instances, assignments and load evaluation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExprError, FaViolation, LoadExpr, VertexFn};
use crate::numeric::{approx_eq, max_of, min_of, NumericKind, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WorkerId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Feasible-set flavour of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    /// Positive linear loads, `x >= 0`.
    LinearNonneg,
    /// Componentwise increasing bijective loads, `x` of any sign.
    GeneralReal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: String,
    pub demand: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub task: TaskId,
    pub worker: WorkerId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("duplicate vertex id {0:?}")]
    DuplicateId(String),
    #[error("edge references unknown task {0:?}")]
    UnknownTask(String),
    #[error("edge references unknown worker {0:?}")]
    UnknownWorker(String),
    #[error("duplicate edge {task}:{worker}")]
    DuplicateEdge { task: String, worker: String },
    #[error("load function of {vertex:?} references an edge that does not exist")]
    UnknownEdge { vertex: String },
    #[error("assignment has {got} values, instance has {expected} edges")]
    KeyMismatch { expected: usize, got: usize },
    #[error("assignment key {0:?} is not an edge of the instance")]
    UnknownKey(String),
    #[error("assignment is missing edge {0:?}")]
    MissingKey(String),
}

/// The graph `G = (U, W, E)`, task demands and per-vertex load functions.
///
/// Immutable once built; structural invariants (known ids, no duplicate edges)
/// are enforced by [`InstanceBuilder::build`], the remaining ones are reported
/// by [`validate_instance`].
#[derive(Debug, Clone)]
pub struct BipartiteInstance {
    mode: Mode,
    tasks: Vec<Task>,
    workers: Vec<String>,
    edges: Vec<Edge>,
    task_fns: Vec<VertexFn>,
    worker_fns: Vec<VertexFn>,
    task_edges: Vec<Vec<EdgeId>>,
    worker_edges: Vec<Vec<EdgeId>>,
    edge_index: HashMap<(TaskId, WorkerId), EdgeId>,
    // weights the edges were declared with, kept for serialization
    declared_weights: Vec<(Rational, Rational)>,
}

impl BipartiteInstance {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn workers(&self) -> &[String] {
        &self.workers
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn num_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn task_ids(&self) -> impl Iterator<Item = TaskId> {
        (0..self.tasks.len()).map(TaskId)
    }

    pub fn worker_ids(&self) -> impl Iterator<Item = WorkerId> {
        (0..self.workers.len()).map(WorkerId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e.0]
    }

    pub fn demand(&self, u: TaskId) -> &Rational {
        &self.tasks[u.0].demand
    }

    pub fn task_fn(&self, u: TaskId) -> &VertexFn {
        &self.task_fns[u.0]
    }

    pub fn worker_fn(&self, w: WorkerId) -> &VertexFn {
        &self.worker_fns[w.0]
    }

    /// `δ(u)` in edge order.
    pub fn task_edges(&self, u: TaskId) -> &[EdgeId] {
        &self.task_edges[u.0]
    }

    /// `δ(w)` in edge order.
    pub fn worker_edges(&self, w: WorkerId) -> &[EdgeId] {
        &self.worker_edges[w.0]
    }

    pub fn edge_between(&self, u: TaskId, w: WorkerId) -> Option<EdgeId> {
        self.edge_index.get(&(u, w)).copied()
    }

    pub fn task_by_id(&self, id: &str) -> Option<TaskId> {
        self.tasks.iter().position(|t| t.id == id).map(TaskId)
    }

    pub fn worker_by_id(&self, id: &str) -> Option<WorkerId> {
        self.workers.iter().position(|w| w == id).map(WorkerId)
    }

    /// `"task:worker"`, the edge key used in assignment files.
    pub fn edge_key(&self, e: EdgeId) -> String {
        let edge = self.edges[e.0];
        format!("{}:{}", self.tasks[edge.task.0].id, self.workers[edge.worker.0])
    }

    pub fn edge_by_key(&self, key: &str) -> Option<EdgeId> {
        let (t, w) = key.split_once(':')?;
        self.edge_between(self.task_by_id(t)?, self.worker_by_id(w)?)
    }

    pub(crate) fn declared_weights(&self, e: EdgeId) -> &(Rational, Rational) {
        &self.declared_weights[e.0]
    }

    /// Task-side coefficient of `e` when the task function is linear.
    pub fn task_weight(&self, e: EdgeId) -> Option<Rational> {
        let u = self.edges[e.0].task;
        self.task_fns[u.0].linear().map(|l| l.coeff(e))
    }

    /// Worker-side coefficient of `e` when the worker function is linear.
    pub fn worker_weight(&self, e: EdgeId) -> Option<Rational> {
        let w = self.edges[e.0].worker;
        self.worker_fns[w.0].linear().map(|l| l.coeff(e))
    }

    /// Every vertex function is (structurally) linear.
    pub fn is_linear(&self) -> bool {
        self.task_fns.iter().chain(&self.worker_fns).all(|f| f.linear().is_some())
    }

    /// Every task and worker coefficient equals one.
    pub fn has_unit_weights(&self) -> bool {
        self.edge_ids().all(|e| {
            self.task_weight(e).is_some_and(|a| a == Rational::from_integer(1.into()))
                && self.worker_weight(e).is_some_and(|a| a == Rational::from_integer(1.into()))
        })
    }

    /// Same instance under a different mode.
    pub fn with_mode(&self, mode: Mode) -> Self {
        let mut copy = self.clone();
        copy.mode = mode;
        copy
    }

    /// Whether the graph (all of `U ∪ W`) is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.tasks.len() + self.workers.len();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let nt = self.tasks.len();
        while let Some(v) = stack.pop() {
            let incident = if v < nt { &self.task_edges[v] } else { &self.worker_edges[v - nt] };
            for &e in incident {
                let edge = self.edges[e.0];
                for other in [edge.task.0, nt + edge.worker.0] {
                    if !seen[other] {
                        seen[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Incremental constructor for [`BipartiteInstance`].
///
/// Edges added without an explicit function get linear task/worker loads with
/// the supplied weights (default 1).
#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    mode: Mode,
    tasks: Vec<Task>,
    workers: Vec<String>,
    edges: Vec<(String, String, Rational, Rational)>,
    task_exprs: HashMap<String, LoadExpr>,
    worker_exprs: HashMap<String, LoadExpr>,
}

impl InstanceBuilder {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            tasks: Vec::new(),
            workers: Vec::new(),
            edges: Vec::new(),
            task_exprs: HashMap::new(),
            worker_exprs: HashMap::new(),
        }
    }

    pub fn task(mut self, id: impl Into<String>, demand: Rational) -> Self {
        self.tasks.push(Task { id: id.into(), demand });
        self
    }

    pub fn worker(mut self, id: impl Into<String>) -> Self {
        self.workers.push(id.into());
        self
    }

    pub fn edge(self, task: impl Into<String>, worker: impl Into<String>) -> Self {
        let one = Rational::from_integer(1.into());
        self.weighted_edge(task, worker, one.clone(), one)
    }

    pub fn weighted_edge(
        mut self,
        task: impl Into<String>,
        worker: impl Into<String>,
        weight_task: Rational,
        weight_worker: Rational,
    ) -> Self {
        self.edges.push((task.into(), worker.into(), weight_task, weight_worker));
        self
    }

    /// Overrides the load function of a task. Edges in `expr` are positions in
    /// the final edge list (declaration order).
    pub fn task_fn(mut self, task: impl Into<String>, expr: LoadExpr) -> Self {
        self.task_exprs.insert(task.into(), expr);
        self
    }

    pub fn worker_fn(mut self, worker: impl Into<String>, expr: LoadExpr) -> Self {
        self.worker_exprs.insert(worker.into(), expr);
        self
    }

    pub fn build(self) -> Result<BipartiteInstance, InstanceError> {
        let mut task_pos = HashMap::new();
        for (i, t) in self.tasks.iter().enumerate() {
            if task_pos.insert(t.id.clone(), TaskId(i)).is_some() {
                return Err(InstanceError::DuplicateId(t.id.clone()));
            }
        }
        let mut worker_pos = HashMap::new();
        for (i, w) in self.workers.iter().enumerate() {
            if worker_pos.insert(w.clone(), WorkerId(i)).is_some() || task_pos.contains_key(w) {
                return Err(InstanceError::DuplicateId(w.clone()));
            }
        }

        let mut edges = Vec::with_capacity(self.edges.len());
        let mut declared_weights = Vec::with_capacity(self.edges.len());
        let mut edge_index = HashMap::new();
        let mut task_edges = vec![Vec::new(); self.tasks.len()];
        let mut worker_edges = vec![Vec::new(); self.workers.len()];
        for (t, w, at, aw) in self.edges {
            let u = *task_pos.get(&t).ok_or_else(|| InstanceError::UnknownTask(t.clone()))?;
            let v = *worker_pos.get(&w).ok_or_else(|| InstanceError::UnknownWorker(w.clone()))?;
            let id = EdgeId(edges.len());
            if edge_index.insert((u, v), id).is_some() {
                return Err(InstanceError::DuplicateEdge { task: t, worker: w });
            }
            edges.push(Edge { task: u, worker: v });
            declared_weights.push((at, aw));
            task_edges[u.0].push(id);
            worker_edges[v.0].push(id);
        }

        let linear_default = |incident: &[EdgeId], pick: &dyn Fn(EdgeId) -> Rational| {
            LoadExpr::linear(incident.iter().map(|&e| (e, pick(e))))
        };
        let mut task_fns = Vec::with_capacity(self.tasks.len());
        for (i, t) in self.tasks.iter().enumerate() {
            let expr = match self.task_exprs.get(&t.id) {
                Some(expr) => expr.clone(),
                None => linear_default(&task_edges[i], &|e| declared_weights[e.0].0.clone()),
            };
            if expr.edges().iter().any(|e| e.0 >= edges.len()) {
                return Err(InstanceError::UnknownEdge { vertex: t.id.clone() });
            }
            task_fns.push(VertexFn::new(expr));
        }
        let mut worker_fns = Vec::with_capacity(self.workers.len());
        for (i, w) in self.workers.iter().enumerate() {
            let expr = match self.worker_exprs.get(w) {
                Some(expr) => expr.clone(),
                None => linear_default(&worker_edges[i], &|e| declared_weights[e.0].1.clone()),
            };
            if expr.edges().iter().any(|e| e.0 >= edges.len()) {
                return Err(InstanceError::UnknownEdge { vertex: w.clone() });
            }
            worker_fns.push(VertexFn::new(expr));
        }
        for id in self.task_exprs.keys() {
            if !task_pos.contains_key(id) {
                return Err(InstanceError::UnknownTask(id.clone()));
            }
        }
        for id in self.worker_exprs.keys() {
            if !worker_pos.contains_key(id) {
                return Err(InstanceError::UnknownWorker(id.clone()));
            }
        }

        Ok(BipartiteInstance {
            mode: self.mode,
            tasks: self.tasks,
            workers: self.workers,
            edges,
            task_fns,
            worker_fns,
            task_edges,
            worker_edges,
            edge_index,
            declared_weights,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    IsolatedTask,
    NegativeDemand,
    NonpositiveWeight,
    NonlinearFunction,
    EdgeSetMismatch,
    NotIncreasingBijection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertex: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Reports every violated semantic invariant; never fails.
pub fn validate_instance(inst: &BipartiteInstance) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push =
        |kind, vertex: &str, detail: String| violations.push(Violation { kind, vertex: vertex.to_string(), detail });

    for u in inst.task_ids() {
        let task = &inst.tasks[u.0];
        let isolated = inst.task_edges(u).is_empty();
        match inst.mode {
            Mode::LinearNonneg => {
                if task.demand.is_negative() {
                    push(ViolationKind::NegativeDemand, &task.id, format!("demand {}", task.demand));
                }
                if isolated && !task.demand.is_zero() {
                    push(
                        ViolationKind::IsolatedTask,
                        &task.id,
                        format!("no incident edge can absorb demand {}", task.demand),
                    );
                }
            }
            Mode::GeneralReal => {
                if isolated {
                    push(ViolationKind::IsolatedTask, &task.id, "task has no incident edge".into());
                }
            }
        }
    }

    let vertices = inst
        .task_ids()
        .map(|u| (inst.tasks[u.0].id.as_str(), inst.task_fn(u), inst.task_edges(u)))
        .chain(inst.worker_ids().map(|w| (inst.workers[w.0].as_str(), inst.worker_fn(w), inst.worker_edges(w))));
    for (name, f, incident) in vertices {
        let required: BTreeSet<EdgeId> = incident.iter().copied().collect();
        if inst.mode == Mode::LinearNonneg && f.linear().is_none() {
            push(ViolationKind::NonlinearFunction, name, "load function is not linear".into());
        }
        if incident.is_empty() && f.expr().edges().is_empty() {
            continue;
        }
        for v in f.expr().check_fa(&required) {
            let kind = match v {
                FaViolation::NonPositiveCoeff(_) => ViolationKind::NonpositiveWeight,
                FaViolation::MissingEdge(_) | FaViolation::ForeignEdge(_) => ViolationKind::EdgeSetMismatch,
                _ => ViolationKind::NotIncreasingBijection,
            };
            let detail = match v {
                FaViolation::NonPositiveCoeff(e) | FaViolation::MissingEdge(e) | FaViolation::ForeignEdge(e) => {
                    format!("{v} ({})", inst.edge_key(e))
                }
                _ => v.to_string(),
            };
            push(kind, name, detail);
        }
    }

    ValidationReport { violations }
}

/// A value per edge, indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    values: Vec<T>,
}

impl<T: Scalar> Assignment<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn zeros(inst: &BipartiteInstance) -> Self {
        Self { values: vec![T::zero(); inst.num_edges()] }
    }

    /// Checks that there is exactly one value per edge.
    pub fn for_instance(inst: &BipartiteInstance, values: Vec<T>) -> Result<Self, InstanceError> {
        if values.len() != inst.num_edges() {
            return Err(InstanceError::KeyMismatch { expected: inst.num_edges(), got: values.len() });
        }
        Ok(Self { values })
    }

    /// Builds from `"task:worker" -> value` pairs; keys must be exactly `E`.
    pub fn from_keyed<'a>(
        inst: &BipartiteInstance,
        pairs: impl IntoIterator<Item = (&'a str, T)>,
    ) -> Result<Self, InstanceError> {
        let mut slots: Vec<Option<T>> = vec![None; inst.num_edges()];
        for (key, value) in pairs {
            let e = inst.edge_by_key(key).ok_or_else(|| InstanceError::UnknownKey(key.to_string()))?;
            slots[e.0] = Some(value);
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| InstanceError::MissingKey(inst.edge_key(EdgeId(i)))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, e: EdgeId) -> &T {
        &self.values[e.0]
    }

    pub fn set(&mut self, e: EdgeId, value: T) {
        self.values[e.0] = value;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> NumericKind {
        T::KIND
    }

    pub fn to_f64(&self) -> Assignment<f64> {
        Assignment { values: self.values.iter().map(Scalar::to_f64).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }
}

/// Per-worker loads and the extremal witness sets of an assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport<T> {
    pub per_worker: Vec<T>,
    pub lmax: T,
    pub lmin: T,
    pub spread: T,
    pub wmax_set: Vec<WorkerId>,
    pub wmin_set: Vec<WorkerId>,
    pub umax_set: Vec<TaskId>,
}

impl<T: Scalar> LoadReport<T> {
    pub fn is_balanced(&self) -> bool {
        self.spread.is_zero()
    }
}

fn check_len<T>(inst: &BipartiteInstance, x: &Assignment<T>) -> Result<(), InstanceError> {
    if x.values.len() != inst.num_edges() {
        return Err(InstanceError::KeyMismatch { expected: inst.num_edges(), got: x.values.len() });
    }
    Ok(())
}

/// Load of a single worker.
pub fn worker_load<T: Scalar>(inst: &BipartiteInstance, x: &Assignment<T>, w: WorkerId) -> Result<T, ExprError> {
    inst.worker_fn(w).eval(x.values())
}

/// Evaluates every worker load; extremal sets use exact equality.
///
/// With no workers, `lmax = lmin = 0`.
pub fn evaluate_loads<T: Scalar>(inst: &BipartiteInstance, x: &Assignment<T>) -> Result<LoadReport<T>, InstanceError> {
    check_len(inst, x)?;
    let per_worker: Vec<T> = inst
        .worker_ids()
        .map(|w| inst.worker_fn(w).eval(x.values()).expect("worker functions only reference instance edges"))
        .collect();
    let lmax = max_of(&per_worker).unwrap_or_else(T::zero);
    let lmin = min_of(&per_worker).unwrap_or_else(T::zero);
    let wmax_set: Vec<WorkerId> = inst.worker_ids().filter(|w| per_worker[w.0] == lmax).collect();
    let wmin_set: Vec<WorkerId> = inst.worker_ids().filter(|w| per_worker[w.0] == lmin).collect();
    let mut umax: BTreeSet<TaskId> = BTreeSet::new();
    for &w in &wmax_set {
        for &e in inst.worker_edges(w) {
            if x.get(e).is_positive() {
                umax.insert(inst.edge(e).task);
            }
        }
    }
    Ok(LoadReport {
        spread: lmax.clone() - lmin.clone(),
        per_worker,
        lmax,
        lmin,
        wmax_set,
        wmin_set,
        umax_set: umax.into_iter().collect(),
    })
}

/// Residual `f_u(x) - d_u` of every task equation.
pub fn task_residuals<T: Scalar>(inst: &BipartiteInstance, x: &Assignment<T>) -> Vec<T> {
    inst.task_ids()
        .map(|u| {
            inst.task_fn(u).eval(x.values()).expect("task functions only reference instance edges")
                - T::from_rational(inst.demand(u))
        })
        .collect()
}

/// Membership in `X^a` (linear, non-negative) or `X^f` (general), within `tol`.
/// Rational assignments are checked exactly.
pub fn check_membership<T: Scalar>(inst: &BipartiteInstance, x: &Assignment<T>, tol: f64) -> bool {
    if x.values.len() != inst.num_edges() {
        return false;
    }
    let zero = T::zero();
    let equations_hold = task_residuals(inst, x).iter().all(|r| approx_eq(r, &zero, tol));
    let sign_ok = match inst.mode {
        Mode::LinearNonneg => {
            x.values.iter().all(|v| if T::is_exact() { !v.is_negative() } else { v.to_f64() >= -tol })
        }
        Mode::GeneralReal => true,
    };
    equations_hold && sign_ok
}

/// `N(S)` for a set of tasks.
pub fn task_neighborhood(inst: &BipartiteInstance, tasks: &[TaskId]) -> BTreeSet<WorkerId> {
    tasks.iter().flat_map(|&u| inst.task_edges(u).iter().map(|&e| inst.edge(e).worker)).collect()
}
