//! Executable checks of the supersolution properties and of the comparison
//! argument: minimum location, exterior attainment of the infimum,
//! truncation, the comparison experiment, the cutoff perturbation gap and
//! the uniqueness probe. Random negative controls live in [`controls`].
//!
//! A field is a *discrete supersolution* of `L u = f` when
//! `L u(x) <= f(x) + tol` at every Interior node; no search over touching
//! test functions is performed.

mod attainment;
mod comparison;
pub mod controls;
mod max_principle;
mod perturbation;
mod truncation;
mod uniqueness;

use serde::{Deserialize, Serialize};

use crate::operator::{NonlocalOperator, Variant};
use crate::problem::Field;

pub use attainment::{check_attainment, AttainmentEntry, AttainmentReport, WitnessClass};
pub use comparison::{run_comparison, ComparisonConfig, ComparisonReport};
pub use max_principle::{check_strong_max, MaxPrincipleReport};
pub use perturbation::{
    k_eps_localization, perturbation_gap_experiment, planted_violation, GapEntry, LocalizationEntry,
    PerturbationParams, PerturbationReport,
};
pub use truncation::{truncate_supersolution, Truncation};
pub use uniqueness::{uniqueness_probe, RunSummary, UniquenessReport};

/// Tolerance for membership in argmin/argmax sets.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The input does not satisfy the check's hypothesis; nothing was concluded.
    PreconditionFailed,
    /// The check has nothing to examine (for example no violation to dissect).
    Vacuous,
    /// Exploratory output without a pass/fail verdict.
    Reported,
}

/// Interior nodes where `L u(x) > f(x) + tol`, with the excess.
pub fn supersolution_defects(op: &NonlocalOperator, u: &Field, f: &[f64], tol: f64) -> Vec<(usize, f64)> {
    op.domain()
        .interior()
        .iter()
        .zip(op.evaluate_interior(u))
        .filter_map(|(&x, e)| {
            let excess = e.l_inf - f[x];
            (excess > tol).then_some((x, excess))
        })
        .collect()
}

/// Largest one-sided excess `L u(x) - f(x)` over the Interior.
pub fn max_supersolution_excess(op: &NonlocalOperator, u: &Field, f: &[f64]) -> f64 {
    op.domain()
        .interior()
        .iter()
        .zip(op.evaluate_interior(u))
        .map(|(&x, e)| e.l_inf - f[x])
        .fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn l_inf_at(op: &NonlocalOperator, u: &Field, x: usize) -> crate::operator::OperatorEval {
    op.evaluate(u, x, Variant::Global).expect("global candidates never empty")
}
