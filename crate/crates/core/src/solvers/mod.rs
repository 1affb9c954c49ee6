//! Numerical backends: dense simplex LP and ADMM SDP.

pub mod lp;
pub mod sdp;

pub use lp::{dual_infeasibility, duality_gap, lp_solve, primal_residual, LinearProgram, LpSolution, LpStatus};
pub use sdp::{psd_project, MAX_SDP_SIZE, sdp_solve, Cell, LinearRelation, SdpOptions, SdpSolution, SemidefiniteProgram};
