use serde::{Deserialize, Serialize};

use super::TIE_TOL;
use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::infconv::inf_convolve;
use crate::operator::Candidate;
use crate::problem::Field;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    /// Allowed excess of `v` over `u` on the Interior.
    pub tol: f64,
    pub tie_tol: f64,
    /// Regularization used for `M_eps` and `K_eps`.
    pub epsilon: f64,
}

impl ComparisonConfig {
    pub fn new(tol_residual: f64, epsilon: f64) -> Self {
        ComparisonConfig { tol: 10.0 * tol_residual, tie_tol: TIE_TOL, epsilon }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `max (v - u)` over nodes and the tail.
    pub m: f64,
    pub k0: Vec<Candidate>,
    /// `max (v - u_eps)` over nodes and the tail.
    pub m_eps: f64,
    pub k_eps: Vec<Candidate>,
    pub violation_nodes: Vec<usize>,
    pub max_interior_excess: f64,
    pub passed: bool,
}

fn argmax_set(diff: &[f64], tail: f64, tie_tol: f64) -> (f64, Vec<Candidate>) {
    let m = diff.iter().copied().fold(tail, f64::max);
    let mut set: Vec<Candidate> = diff
        .iter()
        .enumerate()
        .filter(|(_, &d)| d >= m - tie_tol)
        .map(|(i, _)| Candidate::Node(i))
        .collect();
    if tail >= m - tie_tol {
        set.push(Candidate::Tail);
    }
    (m, set)
}

/// Compares a supersolution `u` with a subsolution `v` that lies below it
/// off the domain.
pub fn run_comparison(u: &Field, v: &Field, domain: &GridDomain, cfg: &ComparisonConfig) -> Result<ComparisonReport> {
    if v.tail > u.tail + cfg.tie_tol {
        return Err(Error::HypothesisViolation { at: "tail".into(), excess: v.tail - u.tail });
    }
    if let Some(&y) = domain.exterior().iter().find(|&&y| v[y] > u[y] + cfg.tie_tol) {
        return Err(Error::HypothesisViolation { at: format!("node {y}"), excess: v[y] - u[y] });
    }
    let diff: Vec<f64> = v.values.iter().zip(&u.values).map(|(a, b)| a - b).collect();
    let (m, k0) = argmax_set(&diff, v.tail - u.tail, cfg.tie_tol);

    let reg = inf_convolve(u, cfg.epsilon, domain)?;
    let diff_eps: Vec<f64> = v.values.iter().zip(&reg.u_eps.values).map(|(a, b)| a - b).collect();
    let (m_eps, k_eps) = argmax_set(&diff_eps, v.tail - reg.u_eps.tail, cfg.tie_tol);

    let violation_nodes: Vec<usize> = domain.interior().iter().copied().filter(|&x| diff[x] > cfg.tol).collect();
    let max_interior_excess = domain.interior().iter().map(|&x| diff[x]).fold(f64::NEG_INFINITY, f64::max);
    Ok(ComparisonReport {
        m,
        k0,
        m_eps,
        k_eps,
        passed: violation_nodes.is_empty(),
        violation_nodes,
        max_interior_excess,
    })
}
