//! Load balancing over bipartite task/worker graphs: instance model, load
//! functions, exact linear programs, tree equalization, integral enumeration
//! and randomized property checks.

pub mod expr;
pub mod fixtures;
pub mod instance;
pub mod integral;
pub mod io;
pub mod lp;
pub mod numeric;
pub mod tree;
pub mod verify;

pub use expr::{LinearForm, LoadExpr, VertexFn};
pub use instance::{
    evaluate_loads, Assignment, BipartiteInstance, Edge, EdgeId, InstanceBuilder, InstanceError, LoadReport, Mode,
    Task, TaskId, WorkerId,
};
pub use numeric::{NumericKind, Rational, Scalar};
