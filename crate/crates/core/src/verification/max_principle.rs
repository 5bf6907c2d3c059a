use serde::{Deserialize, Serialize};

use super::{supersolution_defects, CheckStatus, TIE_TOL};
use crate::operator::{Candidate, NonlocalOperator};
use crate::problem::Field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    pub min_interior: f64,
    pub argmin_interior: usize,
    pub min_outside: f64,
    pub argmin_outside: Candidate,
    /// Some Interior value is no larger than every Exterior/tail value.
    pub interior_minimum: bool,
    pub constant: bool,
    /// Interior nodes where the field fails to be a discrete supersolution.
    pub supersolution_defects: Vec<usize>,
    pub violations: usize,
    pub status: CheckStatus,
}

/// A discrete supersolution whose minimum over the grid is reached inside
/// the domain must be constant.
pub fn check_strong_max(op: &NonlocalOperator, u: &Field, f: &[f64], tol: f64) -> MaxPrincipleReport {
    let domain = op.domain();
    let (min_interior, argmin_interior) = domain
        .interior()
        .iter()
        .map(|&x| (u[x], x))
        .fold((f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 { b } else { a });
    let mut outside = (u.tail, Candidate::Tail);
    for &y in domain.exterior() {
        if u[y] < outside.0 || (u[y] == outside.0 && outside.1 == Candidate::Tail) {
            outside = (u[y], Candidate::Node(y));
        }
    }
    let interior_minimum = min_interior <= outside.0 + TIE_TOL;
    let constant = u.max_value() - u.min_value() <= TIE_TOL;
    let defects: Vec<usize> = supersolution_defects(op, u, f, tol).into_iter().map(|(x, _)| x).collect();
    let principle_failed = interior_minimum && !constant;
    let status = if !defects.is_empty() {
        CheckStatus::PreconditionFailed
    } else if principle_failed {
        CheckStatus::Fail
    } else {
        CheckStatus::Pass
    };
    MaxPrincipleReport {
        min_interior,
        argmin_interior,
        min_outside: outside.0,
        argmin_outside: outside.1,
        interior_minimum,
        constant,
        violations: defects.len() + usize::from(principle_failed),
        supersolution_defects: defects,
        status,
    }
}
