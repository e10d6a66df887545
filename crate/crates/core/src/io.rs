//! JSON file formats: instances, load expressions and assignments.
//!
//! Rationals are strings (`"21"`, `"21/2"`; decimals such as `"2.5"` are read
//! exactly). Assignment values may also be float strings, recognised by a
//! decimal point or exponent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::expr::LoadExpr;
use crate::instance::{Assignment, BipartiteInstance, EdgeId, InstanceBuilder, InstanceError, LoadReport, Mode};
use crate::numeric::{parse_rational, parse_value, ParseRationalError, ParsedValue, Rational, Scalar};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error(transparent)]
    Number(#[from] ParseRationalError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("expression references unknown edge {0:?}")]
    UnknownEdge(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskEntry {
    pub id: String,
    pub demand: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub task: String,
    pub worker: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_task: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_worker: Option<String>,
}

/// Expression object: `{"op": "var", "edge": "u1:w1", "coeff": "1/2"}`,
/// `{"op": "sum" | "max", "children": [...]}`, `{"op": "oddpow", "child": {...}, "exp": 3}`,
/// `{"op": "shift", "child": {...}, "offset": "-1"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExprSpec {
    Var {
        edge: String,
        #[serde(default = "one_string")]
        coeff: String,
    },
    Sum {
        children: Vec<ExprSpec>,
    },
    Max {
        children: Vec<ExprSpec>,
    },
    Oddpow {
        child: Box<ExprSpec>,
        exp: u32,
    },
    Shift {
        child: Box<ExprSpec>,
        offset: String,
    },
}

fn one_string() -> String {
    "1".to_string()
}

impl ExprSpec {
    pub fn resolve(&self, inst_edges: &dyn Fn(&str) -> Option<EdgeId>) -> Result<LoadExpr, FormatError> {
        Ok(match self {
            ExprSpec::Var { edge, coeff } => LoadExpr::Var {
                edge: inst_edges(edge).ok_or_else(|| FormatError::UnknownEdge(edge.clone()))?,
                coeff: parse_rational(coeff)?,
            },
            ExprSpec::Sum { children } => {
                LoadExpr::Sum(children.iter().map(|c| c.resolve(inst_edges)).collect::<Result<_, _>>()?)
            }
            ExprSpec::Max { children } => {
                LoadExpr::Max(children.iter().map(|c| c.resolve(inst_edges)).collect::<Result<_, _>>()?)
            }
            ExprSpec::Oddpow { child, exp } => LoadExpr::oddpow(child.resolve(inst_edges)?, *exp),
            ExprSpec::Shift { child, offset } => LoadExpr::shift(child.resolve(inst_edges)?, parse_rational(offset)?),
        })
    }

    pub fn from_expr(expr: &LoadExpr, key: &dyn Fn(EdgeId) -> String) -> Self {
        match expr {
            LoadExpr::Var { edge, coeff } => ExprSpec::Var { edge: key(*edge), coeff: coeff.to_string() },
            LoadExpr::Sum(c) => ExprSpec::Sum { children: c.iter().map(|c| Self::from_expr(c, key)).collect() },
            LoadExpr::Max(c) => ExprSpec::Max { children: c.iter().map(|c| Self::from_expr(c, key)).collect() },
            LoadExpr::OddPow { base, exp } => {
                ExprSpec::Oddpow { child: Box::new(Self::from_expr(base, key)), exp: *exp }
            }
            LoadExpr::Shift { base, offset } => {
                ExprSpec::Shift { child: Box::new(Self::from_expr(base, key)), offset: offset.to_string() }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub mode: Mode,
    pub tasks: Vec<TaskEntry>,
    pub workers: Vec<String>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub task_funcs: BTreeMap<String, ExprSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub worker_funcs: BTreeMap<String, ExprSpec>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<BipartiteInstance, FormatError> {
        let key_of = |task: &str, worker: &str| format!("{task}:{worker}");
        let edge_pos: BTreeMap<String, EdgeId> =
            self.edges.iter().enumerate().map(|(i, e)| (key_of(&e.task, &e.worker), EdgeId(i))).collect();
        let lookup = |k: &str| edge_pos.get(k).copied();

        let mut b = InstanceBuilder::new(self.mode);
        for t in &self.tasks {
            b = b.task(t.id.clone(), parse_rational(&t.demand)?);
        }
        for w in &self.workers {
            b = b.worker(w.clone());
        }
        let one = Rational::from_integer(1.into());
        for e in &self.edges {
            let at = e.weight_task.as_deref().map(parse_rational).transpose()?.unwrap_or_else(|| one.clone());
            let aw = e.weight_worker.as_deref().map(parse_rational).transpose()?.unwrap_or_else(|| one.clone());
            b = b.weighted_edge(e.task.clone(), e.worker.clone(), at, aw);
        }
        for (id, spec) in &self.task_funcs {
            b = b.task_fn(id.clone(), spec.resolve(&lookup)?);
        }
        for (id, spec) in &self.worker_funcs {
            b = b.worker_fn(id.clone(), spec.resolve(&lookup)?);
        }
        Ok(b.build()?)
    }

    pub fn from_instance(inst: &BipartiteInstance) -> Self {
        let one = Rational::from_integer(1.into());
        let weight = |r: &Rational| (r != &one).then(|| r.to_string());
        let key = |e: EdgeId| inst.edge_key(e);
        let mut task_funcs = BTreeMap::new();
        for u in inst.task_ids() {
            let default = LoadExpr::linear(inst.task_edges(u).iter().map(|&e| (e, inst.declared_weights(e).0.clone())));
            if inst.task_fn(u).expr() != &default {
                task_funcs.insert(inst.tasks()[u.0].id.clone(), ExprSpec::from_expr(inst.task_fn(u).expr(), &key));
            }
        }
        let mut worker_funcs = BTreeMap::new();
        for w in inst.worker_ids() {
            let default =
                LoadExpr::linear(inst.worker_edges(w).iter().map(|&e| (e, inst.declared_weights(e).1.clone())));
            if inst.worker_fn(w).expr() != &default {
                worker_funcs.insert(inst.workers()[w.0].clone(), ExprSpec::from_expr(inst.worker_fn(w).expr(), &key));
            }
        }
        InstanceFile {
            mode: inst.mode(),
            tasks: inst.tasks().iter().map(|t| TaskEntry { id: t.id.clone(), demand: t.demand.to_string() }).collect(),
            workers: inst.workers().to_vec(),
            edges: inst
                .edge_ids()
                .map(|e| {
                    let edge = inst.edge(e);
                    let (at, aw) = inst.declared_weights(e);
                    EdgeEntry {
                        task: inst.tasks()[edge.task.0].id.clone(),
                        worker: inst.workers()[edge.worker.0].clone(),
                        weight_task: weight(at),
                        weight_worker: weight(aw),
                    }
                })
                .collect(),
            task_funcs,
            worker_funcs,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<BipartiteInstance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    file.into_instance()
}

pub fn instance_to_json(inst: &BipartiteInstance) -> Value {
    serde_json::to_value(InstanceFile::from_instance(inst)).expect("instance file serializes")
}

/// An assignment read from a file, in whichever arithmetic its values used.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAssignment {
    Exact(Assignment<Rational>),
    Float(Assignment<f64>),
}

impl AnyAssignment {
    pub fn to_f64(&self) -> Assignment<f64> {
        match self {
            AnyAssignment::Exact(x) => x.to_f64(),
            AnyAssignment::Float(x) => x.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentFile {
    values: Map<String, Value>,
}

/// `{"values": {"task:worker": "p/q" | "1.25", ...}}`; keys must be exactly the
/// instance edges. Any float value turns the whole assignment into floats.
pub fn parse_assignment(inst: &BipartiteInstance, text: &str) -> Result<AnyAssignment, FormatError> {
    let file: AssignmentFile = serde_json::from_str(text)?;
    let mut parsed = Vec::with_capacity(file.values.len());
    for (k, v) in &file.values {
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => {
                return Err(FormatError::Json {
                    line: 0,
                    column: 0,
                    message: format!("value for {k:?} must be a string, got {other}"),
                })
            }
        };
        parsed.push((k.as_str(), parse_value(&s)?));
    }
    if parsed.iter().all(|(_, v)| matches!(v, ParsedValue::Exact(_))) {
        let pairs = parsed.into_iter().map(|(k, v)| match v {
            ParsedValue::Exact(r) => (k, r),
            ParsedValue::Float(_) => unreachable!(),
        });
        Ok(AnyAssignment::Exact(Assignment::from_keyed(inst, pairs)?))
    } else {
        let pairs = parsed.into_iter().map(|(k, v)| match v {
            ParsedValue::Exact(r) => (k, <Rational as Scalar>::to_f64(&r)),
            ParsedValue::Float(f) => (k, f),
        });
        Ok(AnyAssignment::Float(Assignment::from_keyed(inst, pairs)?))
    }
}

pub fn assignment_to_json<T: Scalar>(inst: &BipartiteInstance, x: &Assignment<T>) -> Value {
    let mut values = Map::new();
    for e in inst.edge_ids() {
        values.insert(inst.edge_key(e), Value::String(x.get(e).to_canonical_string()));
    }
    json!({ "values": values })
}

pub fn loads_to_json<T: Scalar>(inst: &BipartiteInstance, r: &LoadReport<T>) -> Value {
    let mut per_worker = Map::new();
    for w in inst.worker_ids() {
        per_worker.insert(inst.workers()[w.0].clone(), Value::String(r.per_worker[w.0].to_canonical_string()));
    }
    let wname =
        |ws: &[crate::instance::WorkerId]| -> Vec<String> { ws.iter().map(|w| inst.workers()[w.0].clone()).collect() };
    json!({
        "per_worker": per_worker,
        "lmax": r.lmax.to_canonical_string(),
        "lmin": r.lmin.to_canonical_string(),
        "spread": r.spread.to_canonical_string(),
        "wmax_set": wname(&r.wmax_set),
        "wmin_set": wname(&r.wmin_set),
        "umax_set": r.umax_set.iter().map(|u| inst.tasks()[u.0].id.clone()).collect::<Vec<_>>(),
    })
}
