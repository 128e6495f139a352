//! Convex subproblem solvers: a dense simplex for linear programs and a
//! conditional-gradient method for diagonal QPs built on top of it.

mod lp;
mod qp;
mod simplex;

pub use lp::{DiagQp, LinearProgram, LpSolution, LpStatus, Row};
pub use qp::{solve_diag_qp, solve_diag_qp_from, QpSolution};
pub use simplex::solve_lp;
