//! Runs every scenario of a directory and writes per-scenario outputs and a
//! summary table.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::NonlocalOperator;
use crate::output::solution_csv;
use crate::runner::{run_scenario, ScenarioRun};
use crate::scenario::load_scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub converged: bool,
    pub residual_max: f64,
    pub sweeps_used: usize,
    /// `suite:check=status` entries separated by `;`.
    pub checks: String,
    pub passed: bool,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub rows: Vec<SummaryRow>,
}

impl CorpusSummary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,converged,residual_max,sweeps_used,checks,passed,error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.scenario,
                r.converged,
                r.residual_max,
                r.sweeps_used,
                r.checks,
                r.passed,
                r.error.replace([',', '\n'], " ")
            ));
        }
        out
    }
}

fn scenario_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Writes `solution.csv` and `report.json` for one run into `dir`.
pub fn write_run(run: &ScenarioRun, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let op = NonlocalOperator::new(&run.domain, run.data.alpha)?;
    fs::write(dir.join("solution.csv"), solution_csv(&op, &run.solution.u, &run.data.f))?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&run.report)? + "\n")?;
    Ok(())
}

fn failed_row(name: String, err: &Error) -> SummaryRow {
    SummaryRow {
        scenario: name,
        converged: false,
        residual_max: f64::NAN,
        sweeps_used: 0,
        checks: String::new(),
        passed: false,
        error: err.to_string(),
    }
}

/// Errors inside a scenario land in its summary row; only an unreadable or
/// empty directory aborts the corpus.
pub fn run_corpus(dir: &Path, out_dir: &Path) -> Result<CorpusSummary> {
    let paths = scenario_paths(dir)?;
    if paths.is_empty() {
        return Err(Error::EmptyCorpus(dir.display().to_string()));
    }
    let loaded: Vec<_> = paths.iter().map(|p| (p, load_scenario(p))).collect();
    let mut seen = BTreeSet::new();
    let rows: Vec<SummaryRow> = loaded
        .into_iter()
        .map(|(path, scenario)| {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            match scenario {
                Ok(s) if !seen.insert(s.name.clone()) => {
                    Err(failed_row(s.name.clone(), &Error::Validation(format!("duplicate scenario name {:?}", s.name))))
                }
                Ok(s) => Ok(s),
                Err(e) => Err(failed_row(stem, &e)),
            }
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|item| {
            let scenario = match item {
                Ok(s) => s,
                Err(row) => return row,
            };
            let result = run_scenario(&scenario, &scenario.suites)
                .and_then(|run| write_run(&run, &out_dir.join(&scenario.name)).map(|_| run));
            match result {
                Ok(run) => {
                    let rep = &run.report;
                    let checks: Vec<String> = rep
                        .checks
                        .iter()
                        .map(|c| format!("{}:{}={}", c.suite, c.check, status_name(c.status)))
                        .collect();
                    SummaryRow {
                        scenario: scenario.name.clone(),
                        converged: rep.solve.converged,
                        residual_max: rep.solve.residual_max,
                        sweeps_used: rep.solve.sweeps_used,
                        checks: checks.join(";"),
                        passed: rep.passed,
                        error: if rep.solve.converged { String::new() } else { "not converged".into() },
                    }
                }
                Err(e) => failed_row(scenario.name.clone(), &e),
            }
        })
        .collect();
    let summary = CorpusSummary { rows };
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("summary.csv"), summary.to_csv())?;
    Ok(summary)
}

pub fn status_name(s: crate::verification::CheckStatus) -> &'static str {
    use crate::verification::CheckStatus::*;
    match s {
        Pass => "pass",
        Fail => "fail",
        PreconditionFailed => "precondition-failed",
        Vacuous => "vacuous",
        Reported => "reported",
    }
}
