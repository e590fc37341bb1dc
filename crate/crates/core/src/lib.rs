//! Temporal-logic toolkit: STL, MTL, and weighted STL parsing, monitoring, and MILP synthesis.

pub mod encode;
pub mod ops;
pub mod syntax;
pub mod synthesis;
pub mod trace;
pub mod weights;

pub use ops::{horizon, negate, pnf, OpsError};
pub use syntax::{parse, parse_mtl, parse_stl, parse_wstl, print_formula, Formula, Logic};
pub use trace::{Trace, VarBounds};
pub use weights::WeightTable;
