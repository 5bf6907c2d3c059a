use thiserror::Error;

use crate::solver::SolveResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("nodes_per_axis must be odd and at least 3, got {0}")]
    BadResolution(usize),

    #[error("box_halfwidth must be positive and finite, got {0}")]
    BadBox(f64),

    #[error("interior node {node} lies on the box boundary; the domain must be compactly contained in the box")]
    MaskTouchesBox { node: usize },

    #[error("no grid node lies inside the domain")]
    EmptyInterior,

    #[error("bitmap mask has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MaskShape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("domain dimension {0} is not supported (only 1 or 2)")]
    BadDimension(usize),

    #[error("alpha must satisfy 0 < alpha < 1, got {0}")]
    BadAlpha(f64),

    #[error("right-hand side is positive ({value}) at interior node {node}; the sign hypothesis f <= 0 is required unless probe mode is enabled")]
    SignViolation { node: usize, value: f64 },

    #[error("non-finite data: {0}")]
    NonFinite(String),

    #[error("table profile has {got} values, expected one per node ({expected})")]
    TableLength { got: usize, expected: usize },

    #[error("difference quotient requested with y = x (node {0})")]
    SamePoint(usize),

    #[error("candidate set is empty at node {0}")]
    NoCandidates(usize),

    #[error("exterior infimum of the quotient is {0}, which is not negative; the barrier is not applicable")]
    NonNegativeLminus(f64),

    #[error("could not bracket the root at node {node} after {doublings} doublings")]
    BracketFailure { node: usize, doublings: usize },

    #[error("solver did not converge: residual {residual:.3e} after {sweeps} sweeps", residual = .0.residual_max, sweeps = .0.sweeps_used)]
    NotConverged(Box<SolveResult>),

    #[error("infimal-convolution minimizer of node {node} is node {xstar}, which lies outside the domain")]
    ArgminOutsideDomain { node: usize, xstar: usize },

    #[error("unbounded data: {0}")]
    UnboundedData(String),

    #[error("comparison hypothesis violated: v exceeds u by {excess:.3e} at exterior candidate {at}")]
    HypothesisViolation { at: String, excess: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("failed to parse scenario {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("scenario validation failed: {0}")]
    Validation(String),

    #[error("corpus directory {0} contains no scenarios")]
    EmptyCorpus(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
