//! Solves a scenario and runs its verification suites.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::infconv::{check_supersolution_shift, inf_convolve, oscillation};
use crate::operator::NonlocalOperator;
use crate::problem::{Field, SampledData};
use crate::scenario::{Scenario, Suite};
use crate::solver::{solve_sampled, Init, SolveResult, SolverConfig};
use crate::verification::controls::run_negative_controls;
use crate::verification::*;

/// Trials per negative control.
pub const CONTROL_TRIALS: usize = 100;
/// Tolerance on the discrete line-concavity of `u_eps - |x|^2 / (2 eps)`.
pub const CONCAVITY_TOL: f64 = 1e-12;
/// Height of the bump planted on top of a solution for the perturbation suite.
pub const PLANTED_HEIGHT: f64 = 0.3;
const MAX_HALVINGS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub check: String,
    pub status: CheckStatus,
    pub details: Value,
}

impl CheckRecord {
    fn new(suite: Suite, check: impl Into<String>, status: CheckStatus, details: impl Serialize) -> Self {
        let details = serde_json::to_value(details).unwrap_or_else(|e| json!({ "serialization_error": e.to_string() }));
        CheckRecord { suite, check: check.into(), status, details }
    }

    fn error(suite: Suite, check: impl Into<String>, err: &Error) -> Self {
        CheckRecord::new(suite, check, CheckStatus::Fail, json!({ "error": err.to_string() }))
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, CheckStatus::Fail | CheckStatus::PreconditionFailed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub converged: bool,
    pub residual_max: f64,
    pub sweeps_used: usize,
    pub last_update: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub solve: SolveSummary,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

pub struct ScenarioRun {
    pub domain: GridDomain,
    pub data: SampledData,
    pub solution: SolveResult,
    pub report: ScenarioReport,
}

fn status(passed: bool) -> CheckStatus {
    if passed {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn sign_hypothesis(data: &SampledData, domain: &GridDomain) -> bool {
    domain.interior().iter().all(|&x| data.f[x] <= 0.0)
}

/// Data dominated by the scenario's: `f' >= f`, `g' <= g`, `C1' <= C1`.
pub fn dominated_variants(data: &SampledData) -> Vec<(&'static str, SampledData)> {
    let raise_f = |d: &mut SampledData| d.f.iter_mut().for_each(|v| *v -= v.min(0.0) / 2.0);
    let lower_g = |d: &mut SampledData| {
        d.g.iter_mut().for_each(|v| *v -= 0.3);
        d.tail -= 0.3;
    };
    let mut a = data.clone();
    raise_f(&mut a);
    let mut b = data.clone();
    lower_g(&mut b);
    let mut c = data.clone();
    raise_f(&mut c);
    lower_g(&mut c);
    vec![("rhs-halved", a), ("exterior-lowered", b), ("both", c)]
}

/// Solves the scenario and runs `suites` on the solution. A solve that stops
/// without converging is reported, not returned as an error.
pub fn run_scenario(scenario: &Scenario, suites: &[Suite]) -> Result<ScenarioRun> {
    let domain = scenario.domain()?;
    let data = scenario.spec().sample(&domain)?;
    let (solution, converged) = match solve_sampled(&data, &domain, &scenario.solver) {
        Ok(r) => (r, true),
        Err(Error::NotConverged(r)) => (*r, false),
        Err(e) => return Err(e),
    };
    let summary = SolveSummary {
        converged,
        residual_max: solution.residual_max,
        sweeps_used: solution.sweeps_used,
        last_update: solution.last_update,
    };
    let mut checks = Vec::new();
    if converged {
        let ctx = Context { scenario, domain: &domain, data: &data, u: &solution.u };
        let mut suites = suites.to_vec();
        suites.sort();
        suites.dedup();
        for suite in suites {
            checks.extend(ctx.run(suite)?);
        }
    }
    let passed = converged && checks.iter().all(|c| !c.failed());
    let report = ScenarioReport { name: scenario.name.clone(), solve: summary, checks, passed };
    Ok(ScenarioRun { domain, data, solution, report })
}

struct Context<'a> {
    scenario: &'a Scenario,
    domain: &'a GridDomain,
    data: &'a SampledData,
    u: &'a Field,
}

impl Context<'_> {
    fn cfg(&self) -> &SolverConfig {
        &self.scenario.solver
    }

    fn tol(&self) -> f64 {
        10.0 * self.cfg().tol_residual
    }

    fn op(&self) -> Result<NonlocalOperator<'_>> {
        NonlocalOperator::new(self.domain, self.data.alpha)
    }

    fn run(&self, suite: Suite) -> Result<Vec<CheckRecord>> {
        Ok(match suite {
            Suite::MaxPrinciple => {
                let rep = check_strong_max(&self.op()?, self.u, &self.data.f, self.tol());
                vec![CheckRecord::new(suite, "strong-minimum", rep.status, &rep)]
            }
            Suite::Attainment => {
                let rep = check_attainment(&self.op()?, self.u);
                vec![CheckRecord::new(suite, "exterior-attainment", status(rep.passed), &rep)]
            }
            Suite::Truncation => vec![self.truncation()?],
            Suite::Comparison => self.comparison()?,
            Suite::Infconv => self.infconv()?,
            Suite::Perturbation => self.perturbation()?,
            Suite::Uniqueness => vec![self.uniqueness()?],
            Suite::Controls => {
                let seed = self.scenario.seeds.first().copied().unwrap_or(0);
                let rep = run_negative_controls(self.domain, self.data.alpha, &self.data.f, self.tol(), CONTROL_TRIALS, seed)?;
                vec![CheckRecord::new(suite, "negative-controls", status(rep.passed), &rep)]
            }
        })
    }

    /// Raises the solution inside the domain, which keeps it a supersolution,
    /// so that the cap actually bites.
    fn truncation(&self) -> Result<CheckRecord> {
        let lift = 1.0 + oscillation(self.u);
        let mut raised = self.u.clone();
        for &x in self.domain.interior() {
            raised[x] += lift;
        }
        let suite = Suite::Truncation;
        let t = match truncate_supersolution(&self.op()?, &raised, &self.data.f, self.cfg().tol_residual) {
            Ok(t) => t,
            Err(e) => return Ok(CheckRecord::error(suite, "cap", &e)),
        };
        let details = json!({
            "lift": lift,
            "k": t.k,
            "truncated_nodes": t.truncated_nodes,
            "max_excess": t.max_excess,
            "preserved": t.preserved,
        });
        Ok(CheckRecord::new(suite, "cap", status(t.preserved), details))
    }

    fn solve_variant(&self, data: &SampledData) -> Result<Field> {
        Ok(solve_sampled(data, self.domain, self.cfg())?.u)
    }

    fn comparison(&self) -> Result<Vec<CheckRecord>> {
        let gated = sign_hypothesis(self.data, self.domain);
        let cfg = ComparisonConfig::new(self.cfg().tol_residual, self.scenario.epsilon);
        let mut out = Vec::new();
        for (label, variant) in dominated_variants(self.data) {
            let check = format!("dominated/{label}");
            let record = match self.solve_variant(&variant).and_then(|v| run_comparison(self.u, &v, self.domain, &cfg)) {
                Ok(rep) => {
                    let st = if gated { status(rep.passed) } else { CheckStatus::Reported };
                    CheckRecord::new(Suite::Comparison, check, st, &rep)
                }
                Err(e) => CheckRecord::error(Suite::Comparison, check, &e),
            };
            out.push(record);
        }
        Ok(out)
    }

    fn infconv(&self) -> Result<Vec<CheckRecord>> {
        let eps0 = self.scenario.epsilon;
        let ladder = [4.0 * eps0, 2.0 * eps0, eps0];
        let h = self.domain.h();
        let mut out = Vec::new();
        let mut previous: Option<Field> = None;
        for eps in ladder {
            let reg = inf_convolve(self.u, eps, self.domain)?;
            let below = (0..self.domain.len()).all(|i| reg.u_eps[i] <= self.u[i]);
            let monotone = previous
                .as_ref()
                .is_none_or(|p| (0..self.domain.len()).all(|i| reg.u_eps[i] >= p[i]));
            let max_distance = reg.max_argmin_distance(self.domain, 0..self.domain.len());
            let concavity = reg.line_concavity_defect(self.domain);
            let envelope_ok = below && monotone && max_distance <= reg.r_eps + h && concavity <= CONCAVITY_TOL;
            let details = json!({
                "epsilon": eps,
                "below": below,
                "monotone": monotone,
                "r_eps": reg.r_eps,
                "max_argmin_distance": max_distance,
                "concavity_defect": concavity,
            });
            out.push(CheckRecord::new(Suite::Infconv, format!("envelope/eps={eps}"), status(envelope_ok), details));

            let check = format!("shifted-supersolution/eps={eps}");
            out.push(
                match check_supersolution_shift(self.u, &self.data.f, self.data.alpha, self.domain, eps, self.cfg().tol_residual) {
                    Ok(rep) => {
                        let gated = sign_hypothesis(self.data, self.domain);
                        let st = if gated { status(rep.passed) } else { CheckStatus::Reported };
                        CheckRecord::new(Suite::Infconv, check, st, &rep)
                    }
                    Err(e) => CheckRecord::error(Suite::Infconv, check, &e),
                },
            );
            previous = Some(reg.u_eps);
        }
        Ok(out)
    }

    fn perturbation(&self) -> Result<Vec<CheckRecord>> {
        let suite = Suite::Perturbation;
        let alpha = self.data.alpha;
        let mut out = Vec::new();

        // A converged comparison pair has nothing to dissect.
        let (_, variant) = dominated_variants(self.data).swap_remove(0);
        let v = self.solve_variant(&variant)?;
        let reg = inf_convolve(self.u, self.scenario.epsilon, self.domain)?;
        let params = self.cutoff(reg.r_eps)?;
        let rep = perturbation_gap_experiment(self.u, &v, alpha, self.domain, self.scenario.epsilon, &params)?;
        out.push(CheckRecord::new(suite, "converged-pair", rep.status, &rep));

        // Planted violation: shrink eps until K_eps sits where the cutoff vanishes.
        let center = self.deepest_node();
        let depth = self.domain.distance_to_exterior(center);
        let v = planted_violation(self.u, self.domain, self.domain.coord(center), depth / 2.0, PLANTED_HEIGHT);
        let mut eps = self.scenario.epsilon;
        let mut planted = None;
        for _ in 0..MAX_HALVINGS {
            let r_eps = inf_convolve(self.u, eps, self.domain)?.r_eps;
            if r_eps < depth {
                let params = self.cutoff_between(r_eps, depth)?;
                let rep = perturbation_gap_experiment(self.u, &v, alpha, self.domain, eps, &params)?;
                let localized = rep.cutoff_valid && rep.k_eps_inside_tau;
                planted = Some(rep);
                if localized {
                    break;
                }
            }
            eps /= 2.0;
        }
        out.push(match planted {
            Some(rep) => CheckRecord::new(suite, "planted-violation", rep.status, &rep),
            None => CheckRecord::new(suite, "planted-violation", CheckStatus::Fail, json!({ "error": "no admissible epsilon" })),
        });

        let beta = depth / 2.0;
        let ladder: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|s| s * self.scenario.epsilon / 0.05).collect();
        let entries = k_eps_localization(self.u, &v, self.domain, &ladder, beta)?;
        out.push(CheckRecord::new(suite, "localization", CheckStatus::Reported, json!({ "beta_nbhd": beta, "entries": entries })));
        Ok(out)
    }

    /// First Interior node farthest from the Exterior.
    fn deepest_node(&self) -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for &x in self.domain.interior() {
            let d = self.domain.distance_to_exterior(x);
            if d > best.0 {
                best = (d, x);
            }
        }
        best.1
    }

    fn cutoff(&self, r_eps: f64) -> Result<PerturbationParams> {
        let depth = self.domain.distance_to_exterior(self.deepest_node());
        self.cutoff_between(r_eps, depth.max(r_eps + self.domain.h()))
    }

    fn cutoff_between(&self, r_eps: f64, depth: f64) -> Result<PerturbationParams> {
        let tau = r_eps + (depth - r_eps) / 2.0;
        PerturbationParams::smoothstep(self.domain, r_eps, tau, depth / 2.0)
    }

    fn uniqueness(&self) -> Result<CheckRecord> {
        let mut inits = vec![Init::ConstantZero, Init::ExteriorMin];
        inits.extend(self.scenario.seeds.iter().map(|&s| Init::random(self.domain, self.data, s)));
        Ok(match uniqueness_probe(self.data, self.domain, self.cfg(), &inits) {
            Ok(rep) => CheckRecord::new(Suite::Uniqueness, "initializations", rep.status, &rep),
            Err(e) => CheckRecord::error(Suite::Uniqueness, "initializations", &e),
        })
    }
}
