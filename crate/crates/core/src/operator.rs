//! Exact evaluation of the nonlocal infinity Laplacian on a grid.
//!
//! At a node `x` the operator is the sum of the infimum and the supremum of the
//! difference quotient `(u(y) - u(x)) / |y - x|^alpha` over every candidate
//! `y != x`. The global variant uses all grid nodes plus a tail candidate that
//! stands for `|y| -> infinity` and always contributes exactly `0`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{offset_length, GridDomain, Point};
use crate::problem::{check_alpha, Field};

/// A candidate `y` in the sup/inf: a grid node or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Candidate {
    Node(usize),
    Tail,
}

impl std::fmt::Display for Candidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Candidate::Node(i) => write!(f, "{i}"),
            Candidate::Tail => write!(f, "tail"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Variant {
    /// All grid nodes and the tail.
    #[default]
    Global,
    /// The discrete closure of the domain, no tail.
    Closure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorEval {
    pub l_minus: f64,
    pub l_plus: f64,
    pub l_inf: f64,
    pub argmin: Candidate,
    pub argmax: Candidate,
}

/// The operator bound to a grid and an exponent. Holds a table of
/// `|offset|^alpha` so that distances never hit `powf` in the inner loops.
#[derive(Debug)]
pub struct NonlocalOperator<'a> {
    domain: &'a GridDomain,
    alpha: f64,
    dist_pow: Vec<f64>,
    closure: OnceLock<Vec<bool>>,
}

impl<'a> NonlocalOperator<'a> {
    pub fn new(domain: &'a GridDomain, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let n = domain.nodes_per_axis();
        let rows = if domain.dim() == 2 { n } else { 1 };
        let h = domain.h();
        let mut dist_pow = Vec::with_capacity(n * rows);
        for dj in 0..rows {
            for di in 0..n {
                dist_pow.push((offset_length(di, dj) * h).powf(alpha));
            }
        }
        Ok(NonlocalOperator { domain, alpha, dist_pow, closure: OnceLock::new() })
    }

    pub fn domain(&self) -> &'a GridDomain {
        self.domain
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `|a - b|^alpha` for two nodes.
    #[inline]
    pub fn dist_pow(&self, a: usize, b: usize) -> f64 {
        let [di, dj] = self.domain.offset(a, b);
        self.dist_pow[dj * self.domain.nodes_per_axis() + di]
    }

    /// Table of `|offset|^alpha`, row-major in `(dj, di)`.
    pub(crate) fn dist_pow_table(&self) -> &[f64] {
        &self.dist_pow
    }

    pub fn quotient(&self, u: &Field, x: usize, y: Candidate) -> Result<f64> {
        match y {
            Candidate::Tail => Ok(0.0),
            Candidate::Node(y) if y == x => Err(Error::SamePoint(x)),
            Candidate::Node(y) => Ok((u[y] - u[x]) / self.dist_pow(x, y)),
        }
    }

    fn closure_mask(&self) -> &[bool] {
        self.closure.get_or_init(|| self.domain.closure_mask())
    }

    pub fn evaluate(&self, u: &Field, x: usize, variant: Variant) -> Result<OperatorEval> {
        let ux = u[x];
        let mut lo = (f64::INFINITY, Candidate::Tail);
        let mut hi = (f64::NEG_INFINITY, Candidate::Tail);
        let mut seen = false;
        let mask = match variant {
            Variant::Global => None,
            Variant::Closure => Some(self.closure_mask()),
        };
        for y in 0..self.domain.len() {
            if y == x || mask.is_some_and(|m| !m[y]) {
                continue;
            }
            seen = true;
            let q = (u[y] - ux) / self.dist_pow(x, y);
            if q < lo.0 {
                lo = (q, Candidate::Node(y));
            }
            if q > hi.0 {
                hi = (q, Candidate::Node(y));
            }
        }
        if variant == Variant::Global {
            seen = true;
            if 0.0 < lo.0 {
                lo = (0.0, Candidate::Tail);
            }
            if 0.0 > hi.0 {
                hi = (0.0, Candidate::Tail);
            }
        }
        if !seen {
            return Err(Error::NoCandidates(x));
        }
        Ok(OperatorEval {
            l_minus: lo.0,
            l_plus: hi.0,
            l_inf: lo.0 + hi.0,
            argmin: lo.1,
            argmax: hi.1,
        })
    }

    /// Global-variant evaluation at every Interior node, in node order.
    pub fn evaluate_interior(&self, u: &Field) -> Vec<OperatorEval> {
        self.domain
            .interior()
            .par_iter()
            .map(|&x| self.evaluate(u, x, Variant::Global).expect("global candidates never empty"))
            .collect()
    }

    /// Largest `|L u(x) - f(x)|` over the Interior.
    pub fn residual_max(&self, u: &Field, f: &[f64]) -> f64 {
        self.domain
            .interior()
            .par_iter()
            .map(|&x| {
                let e = self.evaluate(u, x, Variant::Global).expect("global candidates never empty");
                (e.l_inf - f[x]).abs()
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Infimum of the quotient at `x` over Exterior nodes and the tail.
    pub fn exterior_lminus(&self, u: &Field, x: usize) -> (f64, Candidate) {
        let mut best = (f64::INFINITY, Candidate::Tail);
        for &y in self.domain.exterior() {
            if y == x {
                continue;
            }
            let q = (u[y] - u[x]) / self.dist_pow(x, y);
            if q < best.0 {
                best = (q, Candidate::Node(y));
            }
        }
        if 0.0 < best.0 {
            best = (0.0, Candidate::Tail);
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    pub vertex: Point,
    pub radius: f64,
    pub alpha: f64,
}

impl ConeParams {
    pub fn new(vertex: Point, radius: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidConfig(format!("cone radius must be positive, got {radius}")));
        }
        Ok(ConeParams { vertex, radius, alpha })
    }

    /// Whether every Interior node lies strictly inside the ball, by at least one grid step.
    pub fn encloses_interior(&self, domain: &GridDomain) -> bool {
        domain
            .interior()
            .iter()
            .all(|&x| domain.distance_to_point(x, self.vertex) + domain.h() < self.radius)
    }

    pub fn value_at(&self, distance: f64) -> f64 {
        distance.min(self.radius).powf(self.alpha)
    }
}

/// Samples `min(|x - x0|^alpha, R^alpha)`; the tail takes the saturated value.
pub fn cone_field(params: &ConeParams, domain: &GridDomain) -> Field {
    let values = (0..domain.len())
        .map(|i| params.value_at(domain.distance_to_point(i, params.vertex)))
        .collect();
    Field::new(values, params.radius.powf(params.alpha))
}

/// `w = u(x0) + lminus_outside * C_{x0,R}`. Requires a strictly negative
/// exterior infimum; with `R` at least the box diameter, `w <= u` holds at
/// every Exterior node.
pub fn barrier_field(
    u: &Field,
    x0: usize,
    params: &ConeParams,
    lminus_outside: f64,
    domain: &GridDomain,
) -> Result<Field> {
    if lminus_outside.is_nan() || lminus_outside >= 0.0 {
        return Err(Error::NonNegativeLminus(lminus_outside));
    }
    let cone = cone_field(params, domain);
    Ok(cone.map(|c| u[x0] + lminus_outside * c))
}
