#![allow(dead_code)]

pub mod oracle;

use nilap::{solve, GridDomain, Omega, ProblemSpec, Profile, SolveResult, SolverConfig};

pub fn interval() -> Omega {
    Omega::Interval { lo: -1.0, hi: 1.0 }
}

pub fn disk() -> Omega {
    Omega::Disk { center: vec![0.0, 0.0], radius: 1.0 }
}

pub fn grid_1d(n: usize) -> GridDomain {
    GridDomain::build(&interval(), 2.0, n).unwrap()
}

pub fn spec_1d(alpha: f64, f: Profile, g: Profile) -> ProblemSpec {
    ProblemSpec::new(alpha, interval(), f, g, 0.0)
}

pub fn solved(spec: &ProblemSpec, domain: &GridDomain) -> SolveResult {
    let r = solve(spec, domain, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    r
}

/// `f = -1`, `g = 0` on `(-1, 1)` with 81 nodes.
pub fn bump() -> (GridDomain, ProblemSpec, SolveResult) {
    let d = grid_1d(81);
    let spec = spec_1d(0.5, Profile::constant(-1.0), Profile::constant(0.0));
    let r = solved(&spec, &d);
    (d, spec, r)
}
