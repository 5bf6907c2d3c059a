use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nilap::corpus::run_corpus;
use nilap::infconv::inf_convolve;
use nilap::output::{infconv_csv, operator_csv, solution_csv};
use nilap::runner::run_scenario;
use nilap::scenario::{parse_scenario, Scenario, Suite};
use nilap::{solve, Error, NonlocalOperator, Result};

#[derive(Parser)]
#[command(name = "nilap", version, about = "Nonlocal infinity Laplacian on a grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Accept a right-hand side that is positive somewhere.
    #[arg(long)]
    probe_allow_sign_change: bool,
    /// Replace the scenario's seeds with this one.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Dirichlet problem and write the solution table.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "solution.csv")]
        out: PathBuf,
    },
    /// Solve, regularize by infimal convolution and write the envelope table.
    Infconv {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "infconv.csv")]
        out: PathBuf,
    },
    /// Solve, then evaluate the operator on the solution at every Interior node.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "operator.csv")]
        out: PathBuf,
    },
    /// Solve and run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// `all` or a comma-separated list of suite names.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
    /// Run every scenario in a directory.
    Corpus {
        dir: PathBuf,
        #[arg(long, default_value = "corpus-out")]
        out: PathBuf,
    },
}

fn load(common: &Common, epsilon: Option<f64>) -> Result<Scenario> {
    let mut s = parse_scenario(&common.config)?;
    s.probe_allow_sign_change |= common.probe_allow_sign_change;
    if let Some(seed) = common.seed {
        s.seeds = vec![seed];
    }
    if let Some(eps) = epsilon {
        s.epsilon = eps;
    }
    s.validate()?;
    Ok(s)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(std::fs::write(path, text)?)
}

fn solved(s: &Scenario) -> Result<(nilap::GridDomain, nilap::SampledData, nilap::SolveResult)> {
    let domain = s.domain()?;
    let spec = s.spec();
    let data = spec.sample(&domain)?;
    let r = solve(&spec, &domain, &s.solver)?;
    eprintln!("{}: converged in {} sweeps, residual {:e}", s.name, r.sweeps_used, r.residual_max);
    Ok((domain, data, r))
}

/// Returns whether every gated check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve { common, out } => {
            let s = load(&common, None)?;
            let domain = s.domain()?;
            let spec = s.spec();
            let data = spec.sample(&domain)?;
            let (r, ok) = match solve(&spec, &domain, &s.solver) {
                Ok(r) => (r, true),
                Err(Error::NotConverged(r)) => (*r, false),
                Err(e) => return Err(e),
            };
            let op = NonlocalOperator::new(&domain, s.alpha)?;
            write(&out, &solution_csv(&op, &r.u, &data.f))?;
            eprintln!(
                "{}: {} after {} sweeps, residual {:e}",
                s.name,
                if ok { "converged" } else { "NOT converged" },
                r.sweeps_used,
                r.residual_max
            );
            Ok(ok)
        }
        Command::Infconv { common, epsilon, out } => {
            let s = load(&common, epsilon)?;
            let (domain, _, r) = solved(&s)?;
            let reg = inf_convolve(&r.u, s.epsilon, &domain)?;
            write(&out, &infconv_csv(&domain, &r.u, &reg))?;
            Ok(true)
        }
        Command::Evaluate { common, out } => {
            let s = load(&common, None)?;
            let (domain, _, r) = solved(&s)?;
            let op = NonlocalOperator::new(&domain, s.alpha)?;
            write(&out, &operator_csv(&domain, &op.evaluate_interior(&r.u)))?;
            Ok(true)
        }
        Command::Verify { common, suite, epsilon, out } => {
            let s = load(&common, epsilon)?;
            let suites = Suite::parse_list(&suite)?;
            let run = run_scenario(&s, &suites)?;
            write(&out, &(serde_json::to_string_pretty(&run.report)? + "\n"))?;
            for c in &run.report.checks {
                eprintln!("{:<13} {:<40} {}", c.suite, c.check, nilap::corpus::status_name(c.status));
            }
            Ok(run.report.passed)
        }
        Command::Corpus { dir, out } => {
            let summary = run_corpus(&dir, &out)?;
            for r in &summary.rows {
                eprintln!("{:<32} {}", r.scenario, if r.passed { "pass" } else { "FAIL" });
            }
            Ok(summary.passed())
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("NILAP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
