//! Dirichlet solver for `L u = f` on the Interior with `u = g` on Exterior
//! nodes and `C1` at infinity.
//!
//! Each sweep replaces `u(x)` by the unique root `t` of
//! `F_x(t) = max_y q_y(t) + min_y q_y(t) = f(x)`, where `q_y(t) = (u(y) - t) / |y - x|^alpha`
//! and the tail contributes a constant `0`. `F_x` is continuous, piecewise
//! linear and strictly decreasing, so the root is bracketed and then located
//! with bisection safeguarding Newton steps along the active linear piece.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::operator::NonlocalOperator;
use crate::problem::{Field, ProblemSpec, SampledData};

const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SweepMode {
    #[default]
    GaussSeidel,
    Jacobi,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum Init {
    #[default]
    ConstantZero,
    ExteriorMin,
    Custom(Field),
}

impl Init {
    /// Interior values drawn uniformly from the exterior data range widened by one.
    pub fn random(domain: &GridDomain, data: &SampledData, seed: u64) -> Init {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = data.exterior_min(domain) - 1.0;
        let hi = data.exterior_max(domain) + 1.0;
        let values = (0..domain.len())
            .map(|i| if domain.is_interior(i) { rng.gen_range(lo..hi) } else { data.g[i] })
            .collect();
        Init::Custom(Field::new(values, data.tail))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol_residual: f64,
    pub tol_update: f64,
    pub max_sweeps: usize,
    pub sweep_mode: SweepMode,
    pub point_tol: f64,
    pub point_max_iter: usize,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_residual: 1e-8,
            tol_update: 1e-10,
            max_sweeps: 10_000,
            sweep_mode: SweepMode::GaussSeidel,
            point_tol: 1e-12,
            point_max_iter: 200,
            init: Init::ConstantZero,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.tol_residual, self.tol_update, self.point_tol];
        if tols.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidConfig("solver tolerances must be positive".into()));
        }
        if self.max_sweeps == 0 || self.point_max_iter == 0 {
            return Err(Error::InvalidConfig("max_sweeps and point_max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub u: Field,
    pub residual_max: f64,
    pub sweeps_used: usize,
    pub converged: bool,
    /// Largest single-node change in the final sweep.
    pub last_update: f64,
}

/// Evaluates `F_x(t)` quickly from a table of reciprocal distance powers.
/// The self-offset carries weight zero, which makes the node itself behave
/// exactly like the tail candidate.
pub struct PointEquation<'a> {
    domain: &'a GridDomain,
    inv_pow: Vec<f64>,
}

impl<'a> PointEquation<'a> {
    pub fn new(op: &NonlocalOperator<'a>) -> Self {
        let inv_pow = op
            .dist_pow_table()
            .iter()
            .map(|&d| if d == 0.0 { 0.0 } else { 1.0 / d })
            .collect();
        PointEquation { domain: op.domain(), inv_pow }
    }

    /// `(F_x(t), s)` where `-s` is the slope of the active linear piece.
    #[inline]
    pub fn eval(&self, u: &[f64], x: usize, t: f64) -> (f64, f64) {
        let n = self.domain.nodes_per_axis();
        let [ix, jx] = self.domain.axis_index(x);
        let rows = if self.domain.dim() == 2 { n } else { 1 };
        let (mut hi, mut hi_w) = (0.0f64, 0.0f64);
        let (mut lo, mut lo_w) = (0.0f64, 0.0f64);
        for j in 0..rows {
            let w_row = &self.inv_pow[j.abs_diff(jx) * n..][..n];
            let u_row = &u[j * n..][..n];
            for (i, &uy) in u_row.iter().enumerate() {
                let w = w_row[i.abs_diff(ix)];
                let q = (uy - t) * w;
                if q > hi {
                    hi = q;
                    hi_w = w;
                } else if q < lo {
                    lo = q;
                    lo_w = w;
                }
            }
        }
        (hi + lo, hi_w + lo_w)
    }

    /// Range of the grid values seen from `x` (excluding `x`).
    fn candidate_range(&self, u: &[f64], x: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (y, &v) in u.iter().enumerate() {
            if y != x {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Root of `F_x(t) = f_x`.
    pub fn solve(&self, u: &[f64], x: usize, f_x: f64, point_tol: f64, max_iter: usize) -> Result<f64> {
        if !f_x.is_finite() {
            return Err(Error::NonFinite(format!("right-hand side at node {x}")));
        }
        let (mut lo, mut hi) = self.candidate_range(u, x);
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::BracketFailure { node: x, doublings: 0 });
        }
        let mut width = (hi - lo).max(1.0);
        let mut f_lo = self.eval(u, x, lo).0;
        let mut doublings = 0;
        while f_lo < f_x {
            if doublings == MAX_DOUBLINGS {
                return Err(Error::BracketFailure { node: x, doublings });
            }
            hi = lo;
            lo -= width;
            width *= 2.0;
            doublings += 1;
            f_lo = self.eval(u, x, lo).0;
        }
        let mut f_hi = self.eval(u, x, hi).0;
        while f_hi > f_x {
            if doublings == MAX_DOUBLINGS {
                return Err(Error::BracketFailure { node: x, doublings });
            }
            lo = hi;
            hi += width;
            width *= 2.0;
            doublings += 1;
            f_hi = self.eval(u, x, hi).0;
        }
        if (f_lo - f_x).abs() <= point_tol {
            return Ok(lo);
        }
        if (f_hi - f_x).abs() <= point_tol {
            return Ok(hi);
        }

        // warm start from the current value when it is inside the bracket
        let mut t = if u[x] > lo && u[x] < hi { u[x] } else { 0.5 * (lo + hi) };
        let mut best = (f64::INFINITY, t);
        let mut force_bisect = false;
        for _ in 0..max_iter {
            let (ft, s) = self.eval(u, x, t);
            let err = (ft - f_x).abs();
            if err < best.0 {
                best = (err, t);
            }
            if err <= point_tol {
                return Ok(t);
            }
            let before = hi - lo;
            if ft > f_x {
                lo = t;
            } else {
                hi = t;
            }
            let newton = if s > 0.0 { t + (ft - f_x) / s } else { f64::NAN };
            let next = if !force_bisect && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            force_bisect = hi - lo > 0.5 * before;
            if next <= lo || next >= hi {
                break;
            }
            t = next;
        }
        Ok(best.1)
    }
}

/// `F_x(t)`: the operator at `x` with `u(x)` replaced by `t`.
pub fn point_equation(op: &NonlocalOperator, u: &Field, x: usize, t: f64) -> f64 {
    PointEquation::new(op).eval(&u.values, x, t).0
}

pub fn solve_point(op: &NonlocalOperator, u: &Field, x: usize, f_x: f64, cfg: &SolverConfig) -> Result<f64> {
    PointEquation::new(op).solve(&u.values, x, f_x, cfg.point_tol, cfg.point_max_iter)
}

pub fn solve(spec: &ProblemSpec, domain: &GridDomain, cfg: &SolverConfig) -> Result<SolveResult> {
    let data = spec.sample(domain)?;
    solve_sampled(&data, domain, cfg)
}

fn initial_field(data: &SampledData, domain: &GridDomain, init: &Init) -> Result<Field> {
    match init {
        Init::ConstantZero => Ok(data.boundary_field(domain, 0.0)),
        Init::ExteriorMin => Ok(data.boundary_field(domain, data.exterior_min(domain))),
        Init::Custom(field) => {
            if field.len() != domain.len() {
                return Err(Error::InvalidConfig(format!(
                    "custom initial field has {} values, grid has {}",
                    field.len(),
                    domain.len()
                )));
            }
            if !field.is_finite() {
                return Err(Error::NonFinite("custom initial field".into()));
            }
            let mut u = data.boundary_field(domain, 0.0);
            for &x in domain.interior() {
                u[x] = field[x];
            }
            Ok(u)
        }
    }
}

/// Solves with already-sampled data; the sign of `f` is not checked here.
pub fn solve_sampled(data: &SampledData, domain: &GridDomain, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let op = NonlocalOperator::new(domain, data.alpha)?;
    let eq = PointEquation::new(&op);
    let mut u = initial_field(data, domain, &cfg.init)?;
    let interior = domain.interior();

    let mut last_update = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for sweep in 1..=cfg.max_sweeps {
        last_update = 0.0;
        match cfg.sweep_mode {
            SweepMode::GaussSeidel => {
                for &x in interior {
                    let t = eq.solve(&u.values, x, data.f[x], cfg.point_tol, cfg.point_max_iter)?;
                    last_update = last_update.max((t - u[x]).abs());
                    u[x] = t;
                }
            }
            SweepMode::Jacobi => {
                let next: Vec<f64> = interior
                    .par_iter()
                    .map(|&x| eq.solve(&u.values, x, data.f[x], cfg.point_tol, cfg.point_max_iter))
                    .collect::<Result<_>>()?;
                for (&x, t) in interior.iter().zip(next) {
                    last_update = last_update.max((t - u[x]).abs());
                    u[x] = t;
                }
            }
        }
        if last_update <= cfg.tol_update {
            residual = op.residual_max(&u, &data.f);
            if residual <= cfg.tol_residual {
                return Ok(SolveResult { u, residual_max: residual, sweeps_used: sweep, converged: true, last_update });
            }
        }
    }
    if !residual.is_finite() || last_update > cfg.tol_update {
        residual = op.residual_max(&u, &data.f);
    }
    Err(Error::NotConverged(Box::new(SolveResult {
        u,
        residual_max: residual,
        sweeps_used: cfg.max_sweeps,
        converged: false,
        last_update,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Omega;
    use crate::problem::Profile;

    /// One interior node at 0, exterior nodes at -1 and 1 with values 0 and 2.
    fn two_candidates() -> (GridDomain, Field) {
        let d = GridDomain::build(&Omega::Interval { lo: -0.5, hi: 0.5 }, 1.0, 3).unwrap();
        (d, Field::new(vec![0.0, 0.0, 2.0], 0.0))
    }

    #[test]
    fn point_equation_branches() {
        let (d, u) = two_candidates();
        let op = NonlocalOperator::new(&d, 0.5).unwrap();
        // F(t) = max(2 - t, -t, 0) + min(2 - t, -t, 0)
        let brute = |t: f64| {
            let qs = [2.0 - t, -t, 0.0];
            qs.iter().cloned().fold(f64::MIN, f64::max) + qs.iter().cloned().fold(f64::MAX, f64::min)
        };
        assert_eq!(point_equation(&op, &u, 1, 1.0), 0.0);
        assert_eq!(brute(1.0), 0.0);
        assert_eq!(point_equation(&op, &u, 1, 1.5), -1.0);
        assert_eq!(brute(1.5), -1.0);
        let c = Field::constant(3, 2.5);
        assert_eq!(point_equation(&op, &c, 1, 2.5), 0.0);
    }

    #[test]
    fn point_solve_examples() {
        let (d, u) = two_candidates();
        let op = NonlocalOperator::new(&d, 0.5).unwrap();
        let cfg = SolverConfig::default();
        assert!((solve_point(&op, &u, 1, 0.0, &cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!((solve_point(&op, &u, 1, -1.0, &cfg).unwrap() - 1.5).abs() < 1e-12);
        let c = Field::constant(3, -0.75);
        assert_eq!(solve_point(&op, &c, 1, 0.0, &cfg).unwrap(), -0.75);
        // positive right-hand side needs the bracket to grow downwards
        let t = solve_point(&op, &u, 1, 3.0, &cfg).unwrap();
        assert!((point_equation(&op, &u, 1, t) - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn bracket_failure_on_huge_rhs() {
        let (d, u) = two_candidates();
        let op = NonlocalOperator::new(&d, 0.5).unwrap();
        let err = solve_point(&op, &u, 1, 1e300, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn homogeneous_problem_has_zero_solution() {
        let omega = Omega::Interval { lo: -1.0, hi: 1.0 };
        let spec = ProblemSpec::new(0.5, omega.clone(), Profile::constant(0.0), Profile::constant(0.0), 0.0);
        let d = GridDomain::build(&omega, 2.0, 17).unwrap();
        let r = solve(&spec, &d, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.residual_max, 0.0);
        assert!(r.u.values.iter().all(|&v| v == 0.0));
        assert_eq!(r.sweeps_used, 1);
    }

    #[test]
    fn bump_is_symmetric_and_nonnegative() {
        let omega = Omega::Interval { lo: -1.0, hi: 1.0 };
        let spec = ProblemSpec::new(0.5, omega.clone(), Profile::constant(-1.0), Profile::constant(0.0), 0.0);
        let d = GridDomain::build(&omega, 2.0, 9).unwrap();
        let r = solve(&spec, &d, &SolverConfig::default()).unwrap();
        let (a, b, c) = (r.u[3], r.u[4], r.u[5]);
        assert!((a - c).abs() < 1e-9);
        assert!(b >= a && a >= 0.0);
    }

    #[test]
    fn rerun_from_solution_is_a_fixed_point() {
        let omega = Omega::Interval { lo: -1.0, hi: 1.0 };
        let spec = ProblemSpec::new(
            0.4,
            omega.clone(),
            Profile::Quadratic { offset: -1.0, coeff: -1.0 },
            Profile::Affine { offset: 0.0, slope: vec![0.5] },
            0.0,
        );
        let d = GridDomain::build(&omega, 2.0, 41).unwrap();
        let cfg = SolverConfig::default();
        let r = solve(&spec, &d, &cfg).unwrap();
        let again = solve(&spec, &d, &cfg.clone().with_init(Init::Custom(r.u.clone()))).unwrap();
        assert_eq!(again.sweeps_used, 1);
        assert!(again.u.max_abs_diff(&r.u) <= cfg.tol_update);
    }

    #[test]
    fn sign_violation_rejected_outside_probe_mode() {
        let omega = Omega::Interval { lo: -1.0, hi: 1.0 };
        let spec = ProblemSpec::new(0.5, omega.clone(), Profile::constant(0.5), Profile::constant(0.0), 0.0);
        let d = GridDomain::build(&omega, 2.0, 9).unwrap();
        assert!(matches!(solve(&spec, &d, &SolverConfig::default()), Err(Error::SignViolation { .. })));
        assert!(solve(&spec.probe_mode(), &d, &SolverConfig::default()).is_ok());
    }

    #[test]
    fn not_converged_carries_partial_result() {
        let omega = Omega::Interval { lo: -1.0, hi: 1.0 };
        let spec = ProblemSpec::new(0.5, omega.clone(), Profile::constant(-1.0), Profile::constant(0.0), 0.0);
        let d = GridDomain::build(&omega, 2.0, 41).unwrap();
        let cfg = SolverConfig { max_sweeps: 1, ..SolverConfig::default() };
        match solve(&spec, &d, &cfg) {
            Err(Error::NotConverged(partial)) => {
                assert_eq!(partial.sweeps_used, 1);
                assert!(!partial.converged);
                assert!(partial.residual_max > cfg.tol_residual);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_matches_gauss_seidel_solution() {
        let omega = Omega::Interval { lo: -1.0, hi: 1.0 };
        let spec = ProblemSpec::new(0.5, omega.clone(), Profile::constant(-1.0), Profile::constant(0.0), 0.0);
        let d = GridDomain::build(&omega, 2.0, 21).unwrap();
        let gs = solve(&spec, &d, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig { sweep_mode: SweepMode::Jacobi, ..SolverConfig::default() };
        let jac = solve(&spec, &d, &cfg).unwrap();
        assert!(gs.u.max_abs_diff(&jac.u) < 1e-7);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let seq = single.install(|| solve(&spec, &d, &cfg).unwrap());
        assert_eq!(seq, jac);
    }
}
