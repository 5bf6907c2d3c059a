//! Random negative controls: fields that are not supersolutions must make
//! the attainment and minimum-location checks report violations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_attainment, check_strong_max};
use crate::error::Result;
use crate::grid::GridDomain;
use crate::operator::NonlocalOperator;
use crate::problem::Field;

pub const MIN_DETECTION_RATE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlOutcome {
    pub trials: usize,
    pub detected: usize,
    pub rate: f64,
}

impl ControlOutcome {
    fn from_hits(hits: impl Iterator<Item = bool>) -> Self {
        let (mut trials, mut detected) = (0, 0);
        for hit in hits {
            trials += 1;
            detected += usize::from(hit);
        }
        ControlOutcome { trials, detected, rate: detected as f64 / trials.max(1) as f64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlsReport {
    pub attainment: ControlOutcome,
    pub max_principle: ControlOutcome,
    pub passed: bool,
}

/// Uniform values in `[0, 1)` on every node; the tail gets one more draw.
pub fn random_field(domain: &GridDomain, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..domain.len()).map(|_| rng.gen::<f64>()).collect();
    Field::new(values, rng.gen())
}

/// A random field with one Interior node pushed strictly below everything else.
pub fn planted_minimum(domain: &GridDomain, seed: u64) -> Field {
    let mut u = random_field(domain, seed);
    let interior = domain.interior();
    let x = interior[interior.len() / 2];
    u[x] = -1.0;
    u
}

/// Runs `trials` seeded controls starting at `base_seed`.
pub fn run_negative_controls(
    domain: &GridDomain,
    alpha: f64,
    f: &[f64],
    tol: f64,
    trials: usize,
    base_seed: u64,
) -> Result<ControlsReport> {
    let op = NonlocalOperator::new(domain, alpha)?;
    let seeds = base_seed..base_seed + trials as u64;
    let attainment = ControlOutcome::from_hits(
        seeds.clone().map(|s| !check_attainment(&op, &random_field(domain, s)).violations.is_empty()),
    );
    let max_principle = ControlOutcome::from_hits(
        seeds.map(|s| check_strong_max(&op, &planted_minimum(domain, s), f, tol).violations > 0),
    );
    let passed = attainment.rate >= MIN_DETECTION_RATE && max_principle.rate >= MIN_DETECTION_RATE;
    Ok(ControlsReport { attainment, max_principle, passed })
}
