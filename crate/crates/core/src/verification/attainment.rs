use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TIE_TOL;
use crate::grid::NodeClass;
use crate::operator::{Candidate, NonlocalOperator};
use crate::problem::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessClass {
    Interior,
    Exterior,
    Tail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttainmentEntry {
    pub node: usize,
    pub l_minus: f64,
    pub witness: Candidate,
    pub witness_class: WitnessClass,
    /// Best quotient over the other Interior nodes (`inf` if there are none).
    pub best_interior: f64,
    /// Best quotient over Exterior nodes and the tail.
    pub best_outside: f64,
    /// `best_interior - best_outside`; below `-tie_tol` the infimum is only
    /// reached inside the domain.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttainmentReport {
    pub entries: Vec<AttainmentEntry>,
    pub violations: Vec<usize>,
    pub min_margin: f64,
    pub passed: bool,
}

/// For every Interior node, checks that the infimum of the quotient is
/// attained at an Exterior node or the tail, or ties with one.
pub fn check_attainment(op: &NonlocalOperator, u: &Field) -> AttainmentReport {
    let domain = op.domain();
    let entries: Vec<AttainmentEntry> = domain
        .interior()
        .par_iter()
        .map(|&x| {
            let mut inside = (f64::INFINITY, Candidate::Tail);
            let mut outside = (f64::INFINITY, Candidate::Tail);
            for y in 0..domain.len() {
                if y == x {
                    continue;
                }
                let q = (u[y] - u[x]) / op.dist_pow(x, y);
                let slot = if domain.class(y) == NodeClass::Interior { &mut inside } else { &mut outside };
                if q < slot.0 {
                    *slot = (q, Candidate::Node(y));
                }
            }
            if 0.0 < outside.0 {
                outside = (0.0, Candidate::Tail);
            }
            let (l_minus, witness) = if inside.0 < outside.0
                || (inside.0 == outside.0 && inside.1 < outside.1)
            {
                inside
            } else {
                outside
            };
            let witness_class = match witness {
                Candidate::Tail => WitnessClass::Tail,
                Candidate::Node(y) if domain.is_interior(y) => WitnessClass::Interior,
                Candidate::Node(_) => WitnessClass::Exterior,
            };
            AttainmentEntry {
                node: x,
                l_minus,
                witness,
                witness_class,
                best_interior: inside.0,
                best_outside: outside.0,
                margin: inside.0 - outside.0,
            }
        })
        .collect();
    let violations: Vec<usize> = entries.iter().filter(|e| e.margin < -TIE_TOL).map(|e| e.node).collect();
    let min_margin = entries.iter().map(|e| e.margin).fold(f64::INFINITY, f64::min);
    AttainmentReport { passed: violations.is_empty(), violations, min_margin, entries }
}
