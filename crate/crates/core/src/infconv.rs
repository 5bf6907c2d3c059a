//! Infimal convolution `u_eps(x) = min_y |x - y|^2 / (2 eps) + u(y)` over grid
//! nodes, its minimizer map, and the shifted right-hand side `f(x*)` under
//! which `u_eps` stays a supersolution on the eroded domain.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::operator::{NonlocalOperator, Variant};
use crate::problem::Field;

/// Slack added per unit of grid spacing when checking the shifted
/// supersolution inequality, on top of `10 * tol_residual`.
pub const SHIFT_SLACK_PER_H: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfConvResult {
    pub u_eps: Field,
    /// Minimizer `x*` of every node.
    pub argmin: Vec<usize>,
    pub epsilon: f64,
    /// Oscillation bound `L` with `0 <= u - min u <= L` on the grid.
    pub l_bound: f64,
    /// `sqrt(2 L eps)`, the radius that contains every minimizer.
    pub r_eps: f64,
}

/// Oscillation of `u` over the grid nodes: the bound `L` after shifting `u`
/// so that its minimum is zero.
pub fn oscillation(u: &Field) -> f64 {
    let lo = u.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = u.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo).max(0.0)
}

pub fn inf_convolve(u: &Field, epsilon: f64, domain: &GridDomain) -> Result<InfConvResult> {
    inf_convolve_with_bound(u, epsilon, domain, oscillation(u))
}

/// Full scan over all nodes for every node; ties go to the lowest node index.
/// The tail is excluded because the quadratic penalty diverges at infinity.
pub fn inf_convolve_with_bound(u: &Field, epsilon: f64, domain: &GridDomain, l_bound: f64) -> Result<InfConvResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    if !u.is_finite() {
        return Err(Error::NonFinite("field passed to infimal convolution".into()));
    }
    let n = domain.nodes_per_axis();
    let rows = if domain.dim() == 2 { n } else { 1 };
    let h2 = domain.h() * domain.h();
    let mut penalty = Vec::with_capacity(n * rows);
    for dj in 0..rows {
        for di in 0..n {
            penalty.push(((di * di + dj * dj) as f64 * h2) / (2.0 * epsilon));
        }
    }
    let (values, argmin): (Vec<f64>, Vec<usize>) = (0..domain.len())
        .into_par_iter()
        .map(|x| {
            let mut best = (f64::INFINITY, x);
            for y in 0..domain.len() {
                let [di, dj] = domain.offset(x, y);
                let c = penalty[dj * n + di] + u[y];
                if c < best.0 {
                    best = (c, y);
                }
            }
            best
        })
        .unzip();
    Ok(InfConvResult {
        u_eps: Field::new(values, u.tail),
        argmin,
        epsilon,
        l_bound,
        r_eps: (2.0 * l_bound * epsilon).sqrt(),
    })
}

impl InfConvResult {
    /// Largest second difference of `u_eps(x) - |x|^2 / (2 eps)` along any
    /// grid line; concavity means this is `<= 0` up to rounding.
    pub fn line_concavity_defect(&self, domain: &GridDomain) -> f64 {
        let v: Vec<f64> = (0..domain.len())
            .map(|i| {
                let p = domain.coord(i);
                self.u_eps[i] - (p[0] * p[0] + p[1] * p[1]) / (2.0 * self.epsilon)
            })
            .collect();
        let n = domain.nodes_per_axis();
        let mut worst = f64::NEG_INFINITY;
        for node in 0..domain.len() {
            let [i, j] = domain.axis_index(node);
            if i >= 1 && i + 1 < n {
                worst = worst.max(v[node - 1] - 2.0 * v[node] + v[node + 1]);
            }
            if domain.dim() == 2 && j >= 1 && j + 1 < n {
                worst = worst.max(v[node - n] - 2.0 * v[node] + v[node + n]);
            }
        }
        worst
    }

    /// Largest `|x - x*|` over the given nodes.
    pub fn max_argmin_distance(&self, domain: &GridDomain, nodes: impl IntoIterator<Item = usize>) -> f64 {
        nodes
            .into_iter()
            .map(|x| domain.distance(x, self.argmin[x]))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedEntry {
    pub node: usize,
    pub xstar: usize,
    /// `f(x*)`
    pub value: f64,
    /// Largest `f` over Interior nodes within `r_eps` of the node.
    pub ball_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedRhs {
    pub eroded: GridDomain,
    pub entries: Vec<ShiftedEntry>,
}

impl ShiftedRhs {
    /// Whether `f(x*) <= sup_{B_r(x)} f` held at every eroded node.
    pub fn ball_bound_holds(&self) -> bool {
        self.entries.iter().all(|e| e.value <= e.ball_sup)
    }
}

/// `f(x*)` on the domain eroded by `r_eps`. `f` is indexed by node.
pub fn shifted_rhs(f: &[f64], result: &InfConvResult, domain: &GridDomain) -> Result<ShiftedRhs> {
    let eroded = domain.erode(result.r_eps);
    let mut entries = Vec::with_capacity(eroded.interior().len());
    for &x in eroded.interior() {
        let xstar = result.argmin[x];
        if !domain.is_interior(xstar) {
            return Err(Error::ArgminOutsideDomain { node: x, xstar });
        }
        let ball_sup = domain
            .interior()
            .iter()
            .filter(|&&y| domain.distance(x, y) <= result.r_eps)
            .map(|&y| f[y])
            .fold(f64::NEG_INFINITY, f64::max);
        entries.push(ShiftedEntry { node: x, xstar, value: f[xstar], ball_sup });
    }
    Ok(ShiftedRhs { eroded, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftMargin {
    pub node: usize,
    pub l_inf: f64,
    pub f_shifted: f64,
    /// `f_shifted + slack - l_inf`; negative means a violation.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub epsilon: f64,
    pub r_eps: f64,
    pub slack: f64,
    pub eroded_nodes: usize,
    pub ball_bound_holds: bool,
    /// Largest `l_inf - f_shifted` seen (may be negative).
    pub max_excess: f64,
    /// Largest amount by which the excess beats the slack (0 when none).
    pub max_violation: f64,
    pub margins: Vec<ShiftMargin>,
    pub passed: bool,
}

/// Checks `L u_eps(x) <= f(x*) + slack` on the eroded domain for a converged
/// solution `u` of `L u = f`.
pub fn check_supersolution_shift(
    u: &Field,
    f: &[f64],
    alpha: f64,
    domain: &GridDomain,
    epsilon: f64,
    tol_residual: f64,
) -> Result<ShiftReport> {
    let result = inf_convolve(u, epsilon, domain)?;
    let shifted = shifted_rhs(f, &result, domain)?;
    let op = NonlocalOperator::new(domain, alpha)?;
    let slack = 10.0 * tol_residual + SHIFT_SLACK_PER_H * domain.h();
    let margins: Vec<ShiftMargin> = shifted
        .entries
        .par_iter()
        .map(|e| {
            let l_inf = op
                .evaluate(&result.u_eps, e.node, Variant::Global)
                .expect("global candidates never empty")
                .l_inf;
            ShiftMargin { node: e.node, l_inf, f_shifted: e.value, margin: e.value + slack - l_inf }
        })
        .collect();
    let max_excess = margins.iter().map(|m| m.l_inf - m.f_shifted).fold(f64::NEG_INFINITY, f64::max);
    let max_violation = margins.iter().map(|m| -m.margin).fold(0.0, f64::max);
    Ok(ShiftReport {
        epsilon,
        r_eps: result.r_eps,
        slack,
        eroded_nodes: shifted.entries.len(),
        ball_bound_holds: shifted.ball_bound_holds(),
        max_excess,
        max_violation,
        passed: max_violation == 0.0,
        margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Omega;

    fn line(n: usize) -> GridDomain {
        GridDomain::build(&Omega::Interval { lo: -1.0, hi: 1.0 }, 2.0, n).unwrap()
    }

    #[test]
    fn constant_field_is_fixed() {
        let d = line(21);
        let u = Field::constant(d.len(), 3.0);
        let r = inf_convolve(&u, 0.1, &d).unwrap();
        assert_eq!(r.u_eps, u);
        assert!(r.argmin.iter().enumerate().all(|(i, &s)| i == s));
        assert_eq!(r.r_eps, 0.0);
    }

    #[test]
    fn absolute_value_gives_huber_envelope() {
        let d = line(801);
        let u = Field::new(d.coords().iter().map(|p| p[0].abs()).collect(), 2.0);
        let eps = 0.1;
        let r = inf_convolve(&u, eps, &d).unwrap();
        let h = d.h();
        for i in 0..d.len() {
            let x = d.coord(i)[0];
            if x.abs() > 1.5 {
                continue;
            }
            let huber = if x.abs() >= eps { x.abs() - eps / 2.0 } else { x * x / (2.0 * eps) };
            // dense scan oracle on a 20x finer lattice
            let dense = (-40_000..=40_000)
                .map(|k| k as f64 * h / 20.0)
                .map(|y| (x - y).powi(2) / (2.0 * eps) + y.abs())
                .fold(f64::INFINITY, f64::min);
            assert!((dense - huber).abs() < 1e-9);
            assert!((r.u_eps[i] - huber).abs() <= h * h, "x = {x}");
        }
        assert_eq!(r.u_eps[400], 0.0);
    }

    #[test]
    fn decreasing_eps_increases_envelope() {
        let d = line(41);
        let u = Field::new(d.coords().iter().map(|p| (3.0 * p[0]).sin()).collect(), 0.0);
        let a = inf_convolve(&u, 0.05, &d).unwrap();
        let b = inf_convolve(&u, 0.2, &d).unwrap();
        for i in 0..d.len() {
            assert!(a.u_eps[i] >= b.u_eps[i]);
            assert!(a.u_eps[i] <= u[i]);
        }
        assert!(a.line_concavity_defect(&d) <= 1e-12);
    }

    #[test]
    fn shifted_rhs_of_constants() {
        let d = line(41);
        let u = Field::new(d.coords().iter().map(|p| 1.0 - p[0] * p[0]).collect(), 0.0);
        let r = inf_convolve(&u, 0.01, &d).unwrap();
        let zero = vec![0.0; d.len()];
        let s = shifted_rhs(&zero, &r, &d).unwrap();
        assert!(!s.entries.is_empty());
        assert!(s.entries.iter().all(|e| e.value == 0.0));
        let minus = vec![-1.0; d.len()];
        assert!(shifted_rhs(&minus, &r, &d).unwrap().entries.iter().all(|e| e.value == -1.0));
    }

    #[test]
    fn shifted_rhs_quadratic_bounded_by_ball_sup() {
        let d = line(41);
        let u = Field::new(d.coords().iter().map(|p| (1.0 - p[0] * p[0]).max(0.0) + 0.3 * p[0]).collect(), 0.0);
        let f: Vec<f64> = d.coords().iter().map(|p| -(1.0 + p[0] * p[0])).collect();
        let r = inf_convolve(&u, 0.02, &d).unwrap();
        let s = shifted_rhs(&f, &r, &d).unwrap();
        for e in &s.entries {
            // enumerate the ball by hand
            let x = d.coord(e.node)[0];
            let sup = d
                .interior()
                .iter()
                .map(|&y| d.coord(y)[0])
                .filter(|y| (y - x).abs() <= r.r_eps)
                .map(|y| -(1.0 + y * y))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(e.ball_sup, sup);
            assert_eq!(e.value, -(1.0 + d.coord(e.xstar)[0].powi(2)));
            assert!(e.value <= sup);
        }
    }

    #[test]
    fn argmin_outside_domain_is_reported() {
        let d = line(41);
        // exterior nodes are much lower, and an undersized bound keeps nodes in the eroded set
        let u = Field::new((0..d.len()).map(|i| if d.is_interior(i) { 5.0 } else { 0.0 }).collect(), 0.0);
        let r = inf_convolve_with_bound(&u, 1.0, &d, 0.0).unwrap();
        let f = vec![-1.0; d.len()];
        assert!(matches!(shifted_rhs(&f, &r, &d), Err(Error::ArgminOutsideDomain { .. })));
    }

    #[test]
    fn zero_field_has_zero_margins() {
        let d = line(21);
        let u = Field::constant(d.len(), 0.0);
        let rep = check_supersolution_shift(&u, &vec![0.0; d.len()], 0.5, &d, 0.1, 1e-8).unwrap();
        assert!(rep.passed);
        assert!(rep.margins.iter().all(|m| m.l_inf == 0.0 && m.f_shifted == 0.0));
    }
}
