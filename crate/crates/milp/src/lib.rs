//! Desk-scale mixed-integer linear programming.
//!
//! A [`Model`] collects bounded continuous and binary variables, linear constraints and one
//! blended linear objective. It can be written out in LP text format with [`export_lp`] for
//! external solvers, or solved in-process: [`solve_lp`] runs a dense bounded-variable primal
//! simplex on the relaxation and [`solve_milp`] a best-first branch-and-bound over the binaries.

mod bnb;
mod error;
mod lp_format;
mod model;
mod simplex;

pub use bnb::{solve_milp, BnbOptions, Solution, SolveStatus};
pub use error::ModelError;
pub use lp_format::{export_lp, format_number};
pub use model::{
    AbsLink, ConstrId, ConstrSense, LinConstraint, LinExpr, Model, ObjSense, Objective, Var, VarId, VarKind,
};
pub use simplex::{solve_lp, solve_lp_with_bounds, LpResult, LpStatus};
