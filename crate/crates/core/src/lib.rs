//! Grid toolkit for the nonlocal infinity Laplacian
//! `L u(x) = sup_y (u(y) - u(x)) / |y - x|^alpha + inf_y (u(y) - u(x)) / |y - x|^alpha`
//! with `0 < alpha < 1`: operator evaluation, a Dirichlet solver for `L u = f`
//! with exterior data, infimal-convolution regularization and executable
//! checks of the comparison machinery.

pub mod corpus;
pub mod error;
pub mod grid;
pub mod infconv;
pub mod operator;
pub mod output;
pub mod problem;
pub mod runner;
pub mod scenario;
pub mod solver;
pub mod verification;

pub use error::{Error, Result};
pub use grid::{GridDomain, NodeClass, Omega, Point};
pub use operator::{barrier_field, cone_field, Candidate, ConeParams, NonlocalOperator, OperatorEval, Variant};
pub use problem::{Field, ProblemSpec, Profile, SampledData};
pub use solver::{solve, solve_point, point_equation, Init, SolveResult, SolverConfig, SweepMode};

/// Build a grid for a problem.
pub fn build_grid(spec: &ProblemSpec, box_halfwidth: f64, nodes_per_axis: usize) -> Result<GridDomain> {
    spec.validate()?;
    GridDomain::build(&spec.omega, box_halfwidth, nodes_per_axis)
}
