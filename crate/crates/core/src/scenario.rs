//! Scenario files: problem data, grid, solver settings and the suites to run.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDomain, Omega};
use crate::problem::{check_alpha, ProblemSpec, Profile};
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    MaxPrinciple,
    Attainment,
    Truncation,
    Comparison,
    Infconv,
    Perturbation,
    Uniqueness,
    Controls,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::MaxPrinciple,
        Suite::Attainment,
        Suite::Truncation,
        Suite::Comparison,
        Suite::Infconv,
        Suite::Perturbation,
        Suite::Uniqueness,
        Suite::Controls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MaxPrinciple => "maxprinciple",
            Suite::Attainment => "attainment",
            Suite::Truncation => "truncation",
            Suite::Comparison => "comparison",
            Suite::Infconv => "infconv",
            Suite::Perturbation => "perturbation",
            Suite::Uniqueness => "uniqueness",
            Suite::Controls => "controls",
        }
    }

    /// Parses a suite name, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        s.split(',').map(|p| p.trim().parse()).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown suite {s:?}")))
    }
}

fn all_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

fn default_seeds() -> Vec<u64> {
    vec![42]
}

fn default_epsilon() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Optional; must agree with the dimension of `omega` when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub box_halfwidth: f64,
    pub nodes_per_axis: usize,
    pub alpha: f64,
    pub omega: Omega,
    pub f: Profile,
    pub g: Profile,
    pub tail_value: f64,
    #[serde(default)]
    pub probe_allow_sign_change: bool,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "all_suites")]
    pub suites: Vec<Suite>,
    /// Seeds for randomized initializations and controls.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Regularization parameter for the infconv and perturbation suites.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl Scenario {
    pub fn from_json(text: &str, path: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|source| Error::Parse { path: path.to_string(), source })
    }

    pub fn spec(&self) -> ProblemSpec {
        let spec = ProblemSpec::new(self.alpha, self.omega.clone(), self.f.clone(), self.g.clone(), self.tail_value);
        if self.probe_allow_sign_change {
            spec.probe_mode()
        } else {
            spec
        }
    }

    pub fn domain(&self) -> Result<GridDomain> {
        GridDomain::build(&self.omega, self.box_halfwidth, self.nodes_per_axis)
    }

    /// Enforces every data invariant; failures are reported as
    /// [`Error::Validation`] naming the broken condition.
    pub fn validate(&self) -> Result<()> {
        let invalid = |e: Error| Error::Validation(e.to_string());
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(Error::Validation(format!(
                "name must be non-empty and use only letters, digits, '-', '_' or '.', got {:?}",
                self.name
            )));
        }
        check_alpha(self.alpha).map_err(invalid)?;
        if let Some(dim) = self.dim {
            if dim != self.omega.dim() {
                return Err(Error::Validation(format!(
                    "dim is {dim} but omega describes a {}-dimensional domain",
                    self.omega.dim()
                )));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Validation(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        self.solver.validate().map_err(invalid)?;
        let domain = self.domain().map_err(invalid)?;
        match self.spec().sample(&domain) {
            Ok(_) => Ok(()),
            Err(Error::SignViolation { node, value }) => Err(Error::Validation(format!(
                "sign hypothesis violated: f <= 0 must be bounded and continuous on the domain, \
                 but f = {value} at interior node {node} (enable probe_allow_sign_change to explore)"
            ))),
            Err(e) => Err(invalid(e)),
        }
    }
}

/// Reads a scenario without validating it.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json(&text, &path.display().to_string())
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let scenario = parse_scenario(path)?;
    scenario.validate()?;
    Ok(scenario)
}
