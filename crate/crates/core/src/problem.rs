//! Problem data: exponent, domain, right-hand side, exterior data and the
//! value at infinity, plus the discrete field type shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDomain, Omega, Point};

/// A scalar function on the box, described in closed form or tabulated per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Profile {
    Constant { value: f64 },
    /// `offset + coeff * |x|^2`
    Quadratic { offset: f64, coeff: f64 },
    /// `offset + slope . x`
    Affine { offset: f64, slope: Vec<f64> },
    /// `negative` where the first coordinate is below zero, `positive` above,
    /// `zero` on the hyperplane.
    Split { negative: f64, positive: f64, zero: f64 },
    /// One value per grid node, in node order.
    #[serde(alias = "expression-table")]
    Table { values: Vec<f64> },
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    fn at(&self, node: usize, p: Point) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Quadratic { offset, coeff } => offset + coeff * (p[0] * p[0] + p[1] * p[1]),
            Profile::Affine { offset, slope } => {
                offset + slope.iter().zip(p.iter()).map(|(s, x)| s * x).sum::<f64>()
            }
            Profile::Split { negative, positive, zero } => {
                if p[0] < 0.0 {
                    *negative
                } else if p[0] > 0.0 {
                    *positive
                } else {
                    *zero
                }
            }
            Profile::Table { values } => values[node],
        }
    }

    /// Values at every node of the domain.
    pub fn sample(&self, domain: &GridDomain) -> Result<Vec<f64>> {
        if let Profile::Table { values } = self {
            if values.len() != domain.len() {
                return Err(Error::TableLength { got: values.len(), expected: domain.len() });
            }
        }
        let out: Vec<f64> = (0..domain.len()).map(|i| self.at(i, domain.coord(i))).collect();
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("profile value at node {i}")));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub omega: Omega,
    /// Right-hand side, used at Interior nodes.
    pub f: Profile,
    /// Exterior data, used at Exterior nodes.
    pub g: Profile,
    /// Limit of the exterior data at infinity.
    pub tail_value: f64,
    /// Enforce `f <= 0` on the interior. Probe mode turns this off.
    #[serde(default = "default_true")]
    pub strict_sign_check: bool,
}

fn default_true() -> bool {
    true
}

impl ProblemSpec {
    pub fn new(alpha: f64, omega: Omega, f: Profile, g: Profile, tail_value: f64) -> Self {
        ProblemSpec { alpha, omega, f, g, tail_value, strict_sign_check: true }
    }

    pub fn probe_mode(mut self) -> Self {
        self.strict_sign_check = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !self.tail_value.is_finite() {
            return Err(Error::NonFinite("tail value".into()));
        }
        Ok(())
    }

    /// Samples `f` and `g` on the grid and checks the data hypotheses.
    pub fn sample(&self, domain: &GridDomain) -> Result<SampledData> {
        self.validate()?;
        let f = self.f.sample(domain)?;
        let g = self.g.sample(domain)?;
        if self.strict_sign_check {
            if let Some(&node) = domain.interior().iter().find(|&&i| f[i] > 0.0) {
                return Err(Error::SignViolation { node, value: f[node] });
            }
        }
        Ok(SampledData { alpha: self.alpha, f, g, tail: self.tail_value })
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::BadAlpha(alpha))
    }
}

/// Problem data evaluated on a specific grid. `f` is meaningful at Interior
/// nodes and `g` at Exterior nodes; both are stored for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledData {
    pub alpha: f64,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub tail: f64,
}

impl SampledData {
    /// Field equal to the exterior data off the domain, `fill` inside.
    pub fn boundary_field(&self, domain: &GridDomain, fill: f64) -> Field {
        let values = (0..domain.len())
            .map(|i| if domain.is_interior(i) { fill } else { self.g[i] })
            .collect();
        Field::new(values, self.tail)
    }

    /// Smallest exterior datum, including the value at infinity.
    pub fn exterior_min(&self, domain: &GridDomain) -> f64 {
        domain.exterior().iter().map(|&i| self.g[i]).fold(self.tail, f64::min)
    }

    pub fn exterior_max(&self, domain: &GridDomain) -> f64 {
        domain.exterior().iter().map(|&i| self.g[i]).fold(self.tail, f64::max)
    }

    pub fn rhs_inf(&self, domain: &GridDomain) -> f64 {
        domain.interior().iter().map(|&i| self.f[i]).fold(f64::INFINITY, f64::min)
    }
}

/// One value per grid node plus the value at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub values: Vec<f64>,
    pub tail: f64,
}

impl Field {
    pub fn new(values: Vec<f64>, tail: f64) -> Self {
        Field { values, tail }
    }

    pub fn constant(len: usize, c: f64) -> Self {
        Field { values: vec![c; len], tail: c }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_finite() && self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { values: self.values.iter().map(|&v| f(v)).collect(), tail: f(self.tail) }
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold((self.tail - other.tail).abs(), f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(self.tail, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(self.tail, f64::max)
    }
}

impl std::ops::Index<usize> for Field {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl std::ops::IndexMut<usize> for Field {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}
