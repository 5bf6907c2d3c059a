//! Uniform Cartesian grids over a box `[-a, a]^dim` with an open domain mask.
//!
//! Nodes are numbered lexicographically with the first axis varying fastest,
//! so node `i + j * n` sits at `((i - c) h, (j - c) h)` where `c = (n - 1) / 2`.
//! The origin is always a node. The unbounded complement of the box is not
//! stored; it is represented by a single tail candidate elsewhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeClass {
    Interior,
    Exterior,
}

/// The open domain, given as a predicate on points or a bitmap over nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Omega {
    /// Open interval `(lo, hi)` in 1D.
    Interval { lo: f64, hi: f64 },
    /// Open disk `|x - center| < radius`; `center.len()` fixes the dimension.
    Disk { center: Vec<f64>, radius: f64 },
    /// Per-node membership. A single row describes a 1D grid; otherwise
    /// `rows[j][i]` is the node with first-axis index `i` and second-axis index `j`.
    Bitmap { rows: Vec<Vec<u8>> },
}

impl Omega {
    pub fn dim(&self) -> usize {
        match self {
            Omega::Interval { .. } => 1,
            Omega::Disk { center, .. } => center.len(),
            Omega::Bitmap { rows } => {
                if rows.len() <= 1 {
                    1
                } else {
                    2
                }
            }
        }
    }

    fn contains(&self, index: [usize; 2], p: Point) -> bool {
        match self {
            Omega::Interval { lo, hi } => *lo < p[0] && p[0] < *hi,
            Omega::Disk { center, radius } => {
                let mut r2 = 0.0;
                for (k, c) in center.iter().enumerate() {
                    let d = p[k] - c;
                    r2 += d * d;
                }
                r2 < radius * radius
            }
            Omega::Bitmap { rows } => {
                let row = if rows.len() == 1 { &rows[0] } else { &rows[index[1]] };
                row[index[0]] != 0
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    dim: usize,
    box_halfwidth: f64,
    nodes_per_axis: usize,
    h: f64,
    coords: Vec<Point>,
    class: Vec<NodeClass>,
    interior: Vec<usize>,
    exterior: Vec<usize>,
}

impl GridDomain {
    /// Samples the box and classifies every node against `omega`.
    pub fn build(omega: &Omega, box_halfwidth: f64, nodes_per_axis: usize) -> Result<Self> {
        let dim = omega.dim();
        if dim == 0 || dim > 2 {
            return Err(Error::BadDimension(dim));
        }
        if nodes_per_axis < 3 || nodes_per_axis.is_multiple_of(2) {
            return Err(Error::BadResolution(nodes_per_axis));
        }
        if !(box_halfwidth.is_finite() && box_halfwidth > 0.0) {
            return Err(Error::BadBox(box_halfwidth));
        }
        let n = nodes_per_axis;
        if let Omega::Bitmap { rows } = omega {
            let expected_rows = if dim == 1 { 1 } else { n };
            let cols = rows.first().map_or(0, Vec::len);
            if rows.len() != expected_rows || rows.iter().any(|r| r.len() != n) {
                return Err(Error::MaskShape {
                    rows: rows.len(),
                    cols,
                    expected_rows,
                    expected_cols: n,
                });
            }
        }

        let half = (n - 1) / 2;
        let h = box_halfwidth / half as f64;
        let total = n.pow(dim as u32);
        let mut coords = Vec::with_capacity(total);
        let mut class = Vec::with_capacity(total);
        let mut interior = Vec::new();
        let mut exterior = Vec::new();
        for node in 0..total {
            let index = [node % n, if dim == 2 { node / n } else { 0 }];
            let mut p = [0.0; 2];
            for k in 0..dim {
                p[k] = (index[k] as f64 - half as f64) * h;
            }
            let inside = omega.contains(index, p);
            if inside {
                let on_edge = (0..dim).any(|k| index[k] == 0 || index[k] == n - 1);
                if on_edge {
                    return Err(Error::MaskTouchesBox { node });
                }
                interior.push(node);
                class.push(NodeClass::Interior);
            } else {
                exterior.push(node);
                class.push(NodeClass::Exterior);
            }
            coords.push(p);
        }
        if interior.is_empty() {
            return Err(Error::EmptyInterior);
        }
        Ok(GridDomain {
            dim,
            box_halfwidth,
            nodes_per_axis: n,
            h,
            coords,
            class,
            interior,
            exterior,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_halfwidth(&self) -> f64 {
        self.box_halfwidth
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, node: usize) -> Point {
        self.coords[node]
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn class(&self, node: usize) -> NodeClass {
        self.class[node]
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.class[node] == NodeClass::Interior
    }

    /// Interior nodes in ascending order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Exterior nodes in ascending order.
    pub fn exterior(&self) -> &[usize] {
        &self.exterior
    }

    /// Per-axis integer index of a node.
    pub fn axis_index(&self, node: usize) -> [usize; 2] {
        let n = self.nodes_per_axis;
        if self.dim == 2 {
            [node % n, node / n]
        } else {
            [node, 0]
        }
    }

    /// Absolute index offsets between two nodes along each axis.
    pub fn offset(&self, a: usize, b: usize) -> [usize; 2] {
        let ia = self.axis_index(a);
        let ib = self.axis_index(b);
        [ia[0].abs_diff(ib[0]), ia[1].abs_diff(ib[1])]
    }

    /// Euclidean distance between two nodes, computed from integer offsets so
    /// that it is symmetric and translation invariant on the lattice.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let [di, dj] = self.offset(a, b);
        offset_length(di, dj) * self.h
    }

    pub fn distance_to_point(&self, node: usize, p: Point) -> f64 {
        let q = self.coords[node];
        ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt()
    }

    /// Diagonal length of the box, an upper bound for every node distance.
    pub fn diameter(&self) -> f64 {
        2.0 * self.box_halfwidth * (self.dim as f64).sqrt()
    }

    /// Distance from a node to the nearest Exterior node (0 for Exterior nodes).
    pub fn distance_to_exterior(&self, node: usize) -> f64 {
        if !self.is_interior(node) {
            return 0.0;
        }
        self.exterior
            .iter()
            .map(|&y| self.distance(node, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest distance from a node to any Interior node.
    pub fn max_distance_to_interior(&self, node: usize) -> f64 {
        self.interior
            .iter()
            .map(|&x| self.distance(node, x))
            .fold(0.0, f64::max)
    }

    /// Discrete closure of the domain: Interior nodes plus Exterior nodes within
    /// one grid step (Chebyshev) of some Interior node.
    pub fn closure_mask(&self) -> Vec<bool> {
        let mut mask: Vec<bool> = self.class.iter().map(|c| *c == NodeClass::Interior).collect();
        for &y in &self.exterior {
            mask[y] = self.interior.iter().any(|&x| {
                let [di, dj] = self.offset(x, y);
                di <= 1 && dj <= 1
            });
        }
        mask
    }

    /// Copy whose Interior keeps only nodes farther than `margin` from every
    /// Exterior node. Removed nodes become Exterior; the result may have an
    /// empty interior.
    pub fn erode(&self, margin: f64) -> GridDomain {
        let mut class = self.class.clone();
        for &x in &self.interior {
            if self.distance_to_exterior(x) <= margin {
                class[x] = NodeClass::Exterior;
            }
        }
        let interior = (0..class.len()).filter(|&i| class[i] == NodeClass::Interior).collect();
        let exterior = (0..class.len()).filter(|&i| class[i] == NodeClass::Exterior).collect();
        GridDomain {
            class,
            interior,
            exterior,
            ..self.clone()
        }
    }
}

pub(crate) fn offset_length(di: usize, dj: usize) -> f64 {
    ((di * di + dj * dj) as f64).sqrt()
}
