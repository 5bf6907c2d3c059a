//! Independent oracle for the 3-unknown problem: nodes at -2, -1.5, ..., 2,
//! unknowns at -0.5, 0, 0.5, zero data outside, `f = -1`, `alpha = 1/2`.
//! The equations are solved by nested bisection without using the library's
//! operator or solver.

pub const ALPHA: f64 = 0.5;
pub const F: f64 = -1.0;
pub const XS: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];
pub const UNKNOWN: [usize; 3] = [3, 4, 5];

/// `max + min - f` of the quotients at node `k`, the tail contributing 0.
pub fn residual(k: usize, vals: &[f64; 9]) -> f64 {
    let mut hi: f64 = 0.0;
    let mut lo: f64 = 0.0;
    for j in 0..9 {
        if j != k {
            let q = (vals[j] - vals[k]) / (XS[j] - XS[k]).abs().powf(ALPHA);
            hi = hi.max(q);
            lo = lo.min(q);
        }
    }
    hi + lo - F
}

/// Root of a decreasing scalar function on `[-50, 50]`.
fn bisect(mut g: impl FnMut(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (-50.0, 50.0);
    assert!(g(lo) > 0.0 && g(hi) < 0.0, "no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn field(a: f64, b: f64, c: f64) -> [f64; 9] {
    let mut v = [0.0; 9];
    v[3] = a;
    v[4] = b;
    v[5] = c;
    v
}

fn innermost(a: f64, b: f64) -> f64 {
    bisect(|c| residual(5, &field(a, b, c)))
}

fn middle(a: f64) -> (f64, f64) {
    let b = bisect(|b| residual(4, &field(a, b, innermost(a, b))));
    (b, innermost(a, b))
}

pub fn oracle() -> [f64; 3] {
    let a = bisect(|a| {
        let (b, c) = middle(a);
        residual(3, &field(a, b, c))
    });
    let (b, c) = middle(a);
    [a, b, c]
}
