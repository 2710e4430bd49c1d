//! Decision-diagram SAT engine.
//!
//! CNF clause sets are stored as ZDDs whose node labels are literals
//! ([`store`], [`clause_zdd`]). Satisfiability is decided either by
//! Davis-Putnam variable elimination on those ZDDs ([`solver`]) or by
//! building the BDD of all models ([`bdd`]). [`dimacs`] reads and writes
//! instances and generates pigeonhole formulas; [`oracle`] holds the
//! brute-force references the tests compare against.
//!
//! Operators can split their recursion across a rayon pool (feature
//! `parallel`, on by default). Results never depend on the worker count.

mod arena;
pub mod bdd;
pub mod cli;
pub mod clause_zdd;
pub mod dimacs;
pub mod error;
pub mod literal;
pub mod oracle;
pub mod par;
pub mod solver;
pub mod store;

pub use bdd::{Assignment, BddHandle, BddManager};
pub use clause_zdd::Extracted;
pub use dimacs::{gen_pigeonhole, CnfInstance};
pub use error::{Error, Result};
pub use literal::{Clause, Literal, LiteralOrder, Var};
pub use par::Parallelism;
pub use solver::{
    eliminate_variable, select_and_eliminate, solve, Method, SolveOptions, SolveReport, Step,
    Strategy, StrategyKind, Verdict,
};
pub use store::{Limits, ZddHandle, ZddStore};
