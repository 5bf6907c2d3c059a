use serde::{Deserialize, Serialize};

use super::CheckStatus;
use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::problem::SampledData;
use crate::solver::{solve_sampled, Init, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub init: String,
    pub sweeps: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub runs: Vec<RunSummary>,
    pub max_pairwise_deviation: f64,
    /// Whether the sign hypothesis holds, making the deviation bound a gated check.
    pub asserted: bool,
    pub tolerance: f64,
    pub status: CheckStatus,
}

fn label(init: &Init) -> String {
    match init {
        Init::ConstantZero => "constant-zero".into(),
        Init::ExteriorMin => "exterior-min".into(),
        Init::Custom(_) => "custom".into(),
    }
}

/// Solves from each initialization and compares the results. The deviation
/// bound `10 tol_residual` is asserted only when `f <= 0` on the Interior.
pub fn uniqueness_probe(
    data: &SampledData,
    domain: &GridDomain,
    cfg: &SolverConfig,
    inits: &[Init],
) -> Result<UniquenessReport> {
    if inits.len() < 2 {
        return Err(Error::InvalidConfig("uniqueness probe needs at least two initializations".into()));
    }
    let mut fields = Vec::with_capacity(inits.len());
    let mut runs = Vec::with_capacity(inits.len());
    for init in inits {
        let r = solve_sampled(data, domain, &cfg.clone().with_init(init.clone()))?;
        runs.push(RunSummary { init: label(init), sweeps: r.sweeps_used, residual: r.residual_max });
        fields.push(r.u);
    }
    let mut dev: f64 = 0.0;
    for (i, a) in fields.iter().enumerate() {
        for b in &fields[i + 1..] {
            dev = dev.max(a.max_abs_diff(b));
        }
    }
    let asserted = domain.interior().iter().all(|&x| data.f[x] <= 0.0);
    let tolerance = 10.0 * cfg.tol_residual;
    let status = if !asserted {
        CheckStatus::Reported
    } else if dev <= tolerance {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(UniquenessReport { runs, max_pairwise_deviation: dev, asserted, tolerance, status })
}
