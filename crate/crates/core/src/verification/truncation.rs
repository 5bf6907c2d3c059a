use serde::{Deserialize, Serialize};

use super::max_supersolution_excess;
use crate::error::{Error, Result};
use crate::operator::NonlocalOperator;
use crate::problem::Field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// `min(u, K)` on the Interior, `u` elsewhere.
    pub field: Field,
    pub k: f64,
    pub truncated_nodes: Vec<usize>,
    /// Largest `L u~(x) - f(x)` over the Interior.
    pub max_excess: f64,
    /// `max_excess <= 10 tol` and `u~ = u` wherever `u <= K`.
    pub preserved: bool,
}

/// Caps a supersolution at the level
/// `K = max(sup_ext u, max_y u(y) + |inf f| d_y^alpha)` where `d_y` is the
/// largest distance from the Exterior node `y` to the Interior. At that level
/// every Exterior quotient from a capped node is at most `inf f`, so the cap
/// keeps the supersolution property.
pub fn truncate_supersolution(op: &NonlocalOperator, u: &Field, f: &[f64], tol: f64) -> Result<Truncation> {
    let domain = op.domain();
    let alpha = op.alpha();
    if domain.exterior().iter().any(|&y| !u[y].is_finite()) || !u.tail.is_finite() {
        return Err(Error::UnboundedData("exterior values".into()));
    }
    if domain.interior().iter().any(|&x| !f[x].is_finite()) {
        return Err(Error::UnboundedData("right-hand side".into()));
    }
    let f_inf = domain.interior().iter().map(|&x| f[x]).fold(f64::INFINITY, f64::min);
    let sup_ext = domain.exterior().iter().map(|&y| u[y]).fold(f64::NEG_INFINITY, f64::max);
    let k = domain
        .exterior()
        .iter()
        .map(|&y| u[y] - f_inf.min(0.0) * domain.max_distance_to_interior(y).powf(alpha))
        .fold(sup_ext, f64::max);

    let mut field = u.clone();
    let mut truncated_nodes = Vec::new();
    for &x in domain.interior() {
        if u[x] > k {
            field[x] = k;
            truncated_nodes.push(x);
        }
    }
    let max_excess = max_supersolution_excess(op, &field, f);
    let untouched = domain.interior().iter().all(|&x| u[x] > k || field[x] == u[x]);
    Ok(Truncation { preserved: max_excess <= 10.0 * tol && untouched, field, k, truncated_nodes, max_excess })
}
