mod common;

use nilap::infconv::inf_convolve;
use nilap::scenario::Scenario;
use nilap::solver::solve_sampled;
use nilap::verification::truncate_supersolution;
use nilap::*;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn domain_1d() -> GridDomain {
    common::grid_1d(21)
}

fn domain_2d() -> GridDomain {
    GridDomain::build(&common::disk(), 2.0, 9).unwrap()
}

fn field_for(len: usize) -> impl Strategy<Value = Field> {
    (prop::collection::vec(-5.0..5.0f64, len), -5.0..5.0f64).prop_map(|(v, t)| Field::new(v, t))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * (1.0 + a.abs().max(b.abs()))
}

fn check_identities(domain: &GridDomain, alpha: f64, u: &Field, c: f64, lambda: f64) -> std::result::Result<(), TestCaseError> {
    let op = NonlocalOperator::new(domain, alpha).unwrap();
    let shifted = u.map(|v| v + c);
    let scaled = u.map(|v| lambda * v);
    let negated = u.map(|v| -v);
    for &x in domain.interior() {
        let e = op.evaluate(u, x, Variant::Global).unwrap();
        prop_assert!(e.l_minus <= 0.0 && 0.0 <= e.l_plus);
        let s = op.evaluate(&shifted, x, Variant::Global).unwrap();
        prop_assert!(close(s.l_inf, e.l_inf), "translation {} vs {}", s.l_inf, e.l_inf);
        let k = op.evaluate(&scaled, x, Variant::Global).unwrap();
        prop_assert!(close(k.l_inf, lambda * e.l_inf));
        let n = op.evaluate(&negated, x, Variant::Global).unwrap();
        prop_assert!(close(n.l_inf, -e.l_inf));
        prop_assert!(close(n.l_plus, -e.l_minus));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operator_identities_1d(u in field_for(21), alpha in 0.05..0.95f64, c in -3.0..3.0f64, lambda in 0.1..4.0f64) {
        check_identities(&domain_1d(), alpha, &u, c, lambda)?;
    }

    #[test]
    fn operator_identities_2d(u in field_for(81), alpha in 0.05..0.95f64, c in -3.0..3.0f64, lambda in 0.1..4.0f64) {
        check_identities(&domain_2d(), alpha, &u, c, lambda)?;
    }

    #[test]
    fn witnesses_attain_the_extremes(u in field_for(21), alpha in 0.05..0.95f64) {
        let d = domain_1d();
        let op = NonlocalOperator::new(&d, alpha).unwrap();
        for &x in d.interior() {
            let e = op.evaluate(&u, x, Variant::Global).unwrap();
            prop_assert_eq!(op.quotient(&u, x, e.argmin).unwrap(), e.l_minus);
            prop_assert_eq!(op.quotient(&u, x, e.argmax).unwrap(), e.l_plus);
        }
    }

    #[test]
    fn solution_is_monotone_in_the_data(
        shift in 0.0..1.0f64,
        slope in -1.0..1.0f64,
        f_level in -2.0..0.0f64,
        alpha in 0.2..0.9f64,
    ) {
        let d = common::grid_1d(21);
        let spec = common::spec_1d(alpha, Profile::constant(f_level), Profile::Affine { offset: 0.0, slope: vec![slope] });
        let data = spec.sample(&d).unwrap();
        let mut lower = data.clone();
        lower.g.iter_mut().for_each(|g| *g -= shift);
        lower.tail -= shift;
        lower.f.iter_mut().for_each(|f| *f /= 2.0);
        let cfg = SolverConfig::default();
        let u = solve_sampled(&data, &d, &cfg).unwrap();
        let v = solve_sampled(&lower, &d, &cfg).unwrap();
        for &x in d.interior() {
            prop_assert!(v.u[x] <= u.u[x] + 1e-7);
        }
        prop_assert!(u.residual_max <= 1e-8);
    }

    #[test]
    fn converged_field_is_a_fixed_point(f_level in -2.0..0.0f64, alpha in 0.2..0.9f64) {
        let d = common::grid_1d(21);
        let spec = common::spec_1d(alpha, Profile::constant(f_level), Profile::constant(0.0));
        let data = spec.sample(&d).unwrap();
        let u = solve_sampled(&data, &d, &SolverConfig::default()).unwrap();
        let again = solve_sampled(&data, &d, &SolverConfig::default().with_init(Init::Custom(u.u.clone()))).unwrap();
        prop_assert!(again.u.max_abs_diff(&u.u) <= 1e-9);
        prop_assert_eq!(again.sweeps_used, 1);
    }

    #[test]
    fn infimal_convolution_envelope(u in field_for(41), e1 in 0.01..0.5f64, ratio in 0.1..0.9f64) {
        let d = common::grid_1d(41);
        let big = inf_convolve(&u, e1, &d).unwrap();
        let small = inf_convolve(&u, e1 * ratio, &d).unwrap();
        for i in 0..d.len() {
            prop_assert!(big.u_eps[i] <= u[i]);
            prop_assert!(big.u_eps[i] <= small.u_eps[i]);
            prop_assert!(d.distance(i, big.argmin[i]) <= big.r_eps + 1e-12);
        }
        prop_assert!(big.line_concavity_defect(&d) <= 1e-9);
    }

    #[test]
    fn truncation_keeps_a_raised_supersolution(lift in 0.5..20.0f64, f_level in -2.0..0.0f64) {
        let d = common::grid_1d(21);
        let spec = common::spec_1d(0.5, Profile::constant(f_level), Profile::constant(0.0));
        let data = spec.sample(&d).unwrap();
        let mut u = solve_sampled(&data, &d, &SolverConfig::default()).unwrap().u;
        for &x in d.interior() {
            u[x] += lift;
        }
        let op = NonlocalOperator::new(&d, 0.5).unwrap();
        let t = truncate_supersolution(&op, &u, &data.f, 1e-8).unwrap();
        prop_assert!(t.preserved, "excess {}", t.max_excess);
        for &x in d.interior() {
            prop_assert!(t.field[x] <= u[x]);
        }
    }

    #[test]
    fn grid_partition(n in 1usize..30, lo in -1.9..-0.1f64, width in 0.2..1.5f64) {
        let n = 2 * n + 1;
        let omega = Omega::Interval { lo, hi: (lo + width).min(1.9) };
        if let Ok(d) = GridDomain::build(&omega, 2.0, n) {
            prop_assert_eq!(d.interior().len() + d.exterior().len(), d.len());
            for &x in d.interior() {
                let p = d.coord(x)[0];
                prop_assert!(lo < p && p < lo + width);
            }
        }
    }

    #[test]
    fn scenario_round_trip(alpha in 0.01..0.99f64, n in 3usize..40, tail in -3.0..3.0f64) {
        let s = Scenario {
            name: "rt".into(),
            dim: Some(1),
            box_halfwidth: 2.0,
            nodes_per_axis: 2 * n + 1,
            alpha,
            omega: common::interval(),
            f: Profile::constant(-1.0),
            g: Profile::constant(0.0),
            tail_value: tail,
            probe_allow_sign_change: false,
            solver: SolverConfig::default(),
            suites: vec![],
            seeds: vec![1, 2],
            epsilon: 0.05,
        };
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(Scenario::from_json(&text, "rt").unwrap(), s);
    }
}
