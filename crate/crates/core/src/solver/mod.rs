//! Iterative power, coefficient and common-share optimization for a fixed
//! assignment.

pub mod cubic;
pub mod dual;
pub mod engine;
pub mod eta;
mod weights;

pub use cubic::{
    cubic_coefficients, real_roots, solve_beam_power, stationary_points, CubicCoefficients, NoStationaryPoint,
};
pub use dual::{update_common_share, update_multipliers, Subgradients};
pub use engine::{solve, solve_with, Residuals, SolveOptions, SolveReport, TraceRow, TRACE_HEADER};
pub use eta::{
    assemble as assemble_eta_quadratic, eta_quadratic, solve_common_eta, solve_private_eta, DegenerateQuadratic,
    EtaQuadratic, Interferer,
};
