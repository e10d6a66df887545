//! The three small instances shipped in `fixtures/`.
//!
//! * `fig1`: four workers where an equal-load point exists but does not
//!   minimize the maximal load.
//! * `fig2`: integral counter-example; heavy (weight 100) edges force the
//!   integral optimum away from the minimal spread.
//! * `fig3`: unrestricted-sign instance whose maximal load is unbounded below.

use crate::instance::BipartiteInstance;
use crate::io::parse_instance;

pub const FIG1_JSON: &str = include_str!("../fixtures/fig1.json");
pub const FIG2_JSON: &str = include_str!("../fixtures/fig2.json");
pub const FIG3_JSON: &str = include_str!("../fixtures/fig3.json");

pub fn fig1() -> BipartiteInstance {
    parse_instance(FIG1_JSON).expect("fig1 fixture parses")
}

pub fn fig2() -> BipartiteInstance {
    parse_instance(FIG2_JSON).expect("fig2 fixture parses")
}

pub fn fig3() -> BipartiteInstance {
    parse_instance(FIG3_JSON).expect("fig3 fixture parses")
}
