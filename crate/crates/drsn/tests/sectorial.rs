use drsn::normalization::normalize;
use drsn::painleve::normalize_p1;
use drsn::random::random_prepared_field;
use drsn::sectorial::{
    build_sectorial_maps, build_sectorial_maps_shrinking, cauchy_coefficient, critical_time_bound,
    domain_membership, homological_path_integral, homological_residual, integrate_flow,
    lie_derivative_fd, replay_flow, torus_nodes, transition_flatness, FlowOptions,
    GeometryOverrides, PathOptions, SectorGeometry, SectorSign, SectorialField,
};
use drsn::{Error, C64};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn model() -> SectorialField {
    SectorialField::model(c(0.8, 0.5), c(1.1, 0.2), c(1.1, 0.2)).unwrap()
}

fn prepared(seed: u64, n: usize) -> SectorialField {
    SectorialField::from_prepared(&random_prepared_field(seed, n, 8, 8).unwrap(), n).unwrap()
}

fn geometry(f: &SectorialField, sign: SectorSign) -> SectorGeometry {
    SectorGeometry::for_field(f, sign, &GeometryOverrides::default()).unwrap()
}

fn unit_geometry(omega: f64) -> SectorGeometry {
    let o = GeometryOverrides {
        omega: Some(omega),
        ..Default::default()
    };
    SectorGeometry::with_parameters(SectorSign::Plus, c(1.0, 0.0), c(2.0, 0.0), 2.0, 0.5, &o)
        .unwrap()
}

#[test]
fn bisector_points_near_the_origin_are_stable() {
    let g = unit_geometry(0.6);
    let m = domain_membership([c(0.0, 0.5 * g.r_prime), c(0.1, 0.0), c(0.0, -0.1)], &g);
    assert!(m.in_omega && m.in_sigma);
}

#[test]
fn positive_real_points_lie_in_theta_plus() {
    let g = unit_geometry(0.6);
    let m = domain_membership([c(0.99 * g.r, 0.0), c(0.0, 0.0), c(0.0, 0.0)], &g);
    assert!(m.in_theta_plus && !m.in_theta_minus && !m.in_sigma);
    let m = domain_membership([c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)], &g);
    assert!(m.in_theta_minus && !m.in_theta_plus);
}

#[test]
fn sigma_boundary_is_excluded() {
    // |0.8 + 0.6i| = 1 and Im = 0.6 = omega |x|
    let g = unit_geometry(0.6);
    let m = domain_membership([c(0.8, 0.6), c(0.0, 0.0), c(0.0, 0.0)], &g);
    assert!(!m.in_sigma);
    assert!(domain_membership([c(0.8, 0.61), c(0.0, 0.0), c(0.0, 0.0)], &g).in_sigma);
}

#[test]
fn omega_shrinks_away_from_sigma() {
    let g = unit_geometry(0.6);
    let theta = 0.3f64;
    let excess = theta - 0.6f64.asin();
    let bound = g.r * (g.kx() * excess).exp();
    let inside = C64::from_polar(0.99 * bound, theta);
    let outside = C64::from_polar(1.01 * bound, theta);
    let y = [c(0.0, 0.0), c(0.0, 0.0)];
    assert!(domain_membership([inside, y[0], y[1]], &g).in_omega);
    assert!(!domain_membership([outside, y[0], y[1]], &g).in_omega);
    let yb = g.r_y * (g.ky() * excess).exp();
    assert!(!domain_membership([inside * 0.5, c(1.01 * yb, 0.0), y[1]], &g).in_omega);
}

#[test]
fn minus_sector_is_the_mirror_image() {
    let f = model();
    let plus = geometry(&f, SectorSign::Plus);
    let minus = geometry(&f, SectorSign::Minus);
    let lam = f.lambda();
    let p = [lam * c(0.0, 0.05), c(0.01, 0.0), c(0.0, 0.01)];
    let q = [lam * c(0.0, -0.05), p[1], p[2]];
    assert!(domain_membership(p, &plus).in_sigma);
    assert!(!domain_membership(p, &minus).in_omega);
    assert!(domain_membership(q, &minus).in_sigma);
}

#[test]
fn default_parameters_satisfy_every_range() {
    let f = prepared(3, 2);
    for sign in [SectorSign::Plus, SectorSign::Minus] {
        let g = geometry(&f, sign);
        g.validate().unwrap();
        let span = g.epsilon + g.omega.asin();
        assert!((g.r_prime - g.r * (-g.kx() * span).exp()).abs() <= 1e-15 * g.r);
        let (q1, q2) = g.sampled_bounds(&f);
        assert!(q1 < g.delta && q2 < g.delta_prime);
    }
}

#[test]
fn invalid_overrides_are_rejected() {
    let o = GeometryOverrides {
        mu: Some(0.99),
        omega: Some(0.5),
        ..Default::default()
    };
    let e =
        SectorGeometry::with_parameters(SectorSign::Plus, c(1.0, 0.0), c(2.0, 0.0), 0.5, 0.5, &o);
    assert!(matches!(e, Err(Error::Geometry(_))));
}

#[test]
fn critical_time_scales_like_inverse_radius() {
    let g = unit_geometry(0.6);
    let x0 = c(0.02, 0.01);
    let a = critical_time_bound(x0, &g);
    let b = critical_time_bound(x0 * 2.0, &g);
    assert!((a / b - 2.0).abs() < 1e-12);
}

#[test]
fn critical_time_limit_is_inverse_radius() {
    let o = GeometryOverrides {
        omega_prime: Some(1e-9),
        omega: Some(2e-9),
        mu: Some(1.0 - 1e-9),
        delta: Some(1e-10),
        delta_prime: Some(5e-10),
        epsilon: Some(1e-10),
        ..Default::default()
    };
    let g =
        SectorGeometry::with_parameters(SectorSign::Plus, c(1.0, 0.0), c(2.0, 0.0), 0.5, 0.5, &o)
            .unwrap();
    let x0 = c(0.0, 0.03);
    assert!((critical_time_bound(x0, &g) * 0.03 - 1.0).abs() < 1e-6);
}

fn flow_to(t_end: f64) -> FlowOptions {
    FlowOptions {
        t_end,
        ..Default::default()
    }
}

#[test]
fn model_trajectory_matches_closed_form() {
    let f = model();
    let (lam, a1, a2) = (f.lambda(), f.a1(), f.a2());
    for sign in [SectorSign::Plus, SectorSign::Minus] {
        let g = geometry(&f, sign);
        let s = sign.factor();
        let x0 = c(0.0, 0.2 * s);
        let p0 = [lam * x0, c(0.1, 0.05), c(-0.02, 0.1)];
        let tr = integrate_flow(&f, p0, &g, &flow_to(80.0)).unwrap();
        assert!(tr.len() > 2);
        for (t, p) in tr.times.iter().zip(&tr.states) {
            let it = c(0.0, s * t);
            let den = c(1.0, 0.0) - it * x0;
            let x = x0 / den;
            let y1 = p0[1] * (-it).exp() * den.powc(-a1);
            let y2 = p0[2] * it.exp() * den.powc(-a2);
            assert!((p[0] / lam - x).norm() <= 1e-8 * x.norm(), "x at t = {t}");
            assert!((p[1] - y1).norm() <= 1e-8 * y1.norm(), "y1 at t = {t}");
            assert!((p[2] - y2).norm() <= 1e-8 * y2.norm(), "y2 at t = {t}");
        }
    }
}

#[test]
fn times_increase_and_states_stay_in_omega() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let p0 = g.omega_point([0.1, 0.6, 0.5, 0.5, 0.3, 0.7]);
    let tr = integrate_flow(&f, p0, &g, &flow_to(critical_time_bound(p0[0], &g))).unwrap();
    assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    assert!(tr.flags.iter().all(|m| m.in_omega));
    assert!(tr.sigma_entry().is_some());
}

#[test]
fn modulus_decreases_from_sigma_starts() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let p0 = f.unrotate([c(0.02, 0.2), c(0.1, 0.0), c(0.0, 0.1)]);
    let tr = integrate_flow(&f, p0, &g, &flow_to(500.0)).unwrap();
    assert!(tr
        .states
        .windows(2)
        .all(|w| w[1][0].norm() < w[0][0].norm()));
}

#[test]
fn decay_bounds_hold_along_trajectories() {
    let f = prepared(11, 2);
    let g = geometry(&f, SectorSign::Minus);
    for k in 0..6 {
        let u = [(k as f64 + 0.5) / 6.0, 0.7, 0.4, 0.6, 0.1 * k as f64, 0.2];
        let p0 = g.omega_point(u);
        let x0 = (p0[0] / f.lambda()).norm();
        let tr = integrate_flow(&f, p0, &g, &flow_to(100.0 / x0)).unwrap();
        let entry = tr.flags.iter().position(|m| m.in_sigma).unwrap();
        let ts = tr.times[entry];
        let xs = tr.rotated(entry)[0].norm();
        for i in 0..tr.len() {
            let t = tr.times[i];
            let x = tr.rotated(i)[0].norm();
            assert!(x >= x0 / (1.0 + (1.0 + g.delta) * x0 * t) * (1.0 - 1e-9));
            if i >= entry {
                assert!(x <= xs / (1.0 + (g.omega - g.delta) * xs * (t - ts)) * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn theta_starts_turn_monotonically_into_sigma() {
    let f = prepared(2, 1);
    let g = geometry(&f, SectorSign::Plus);
    for (u0, increasing) in [(0.02, true), (0.98, false)] {
        let p0 = g.omega_point([u0, 0.9, 0.5, 0.5, 0.0, 0.5]);
        let bound = critical_time_bound(p0[0], &g);
        let tr = integrate_flow(&f, p0, &g, &flow_to(bound)).unwrap();
        let entry = tr.sigma_entry().expect("no entry into Sigma");
        assert!(entry <= bound);
        let args: Vec<f64> = (0..tr.len())
            .take_while(|i| tr.times[*i] <= entry)
            .map(|i| {
                let t = tr.rotated(i)[0].arg();
                if t < -FRAC_PI_2 {
                    t + 2.0 * PI
                } else {
                    t
                }
            })
            .collect();
        for w in args.windows(2) {
            assert_eq!(w[1] >= w[0], increasing);
        }
    }
}

#[test]
fn starts_outside_omega_are_rejected() {
    let f = model();
    let g = geometry(&f, SectorSign::Plus);
    let p = f.unrotate([c(0.0, -0.1), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(matches!(
        integrate_flow(&f, p, &g, &flow_to(1.0)),
        Err(Error::Geometry(_))
    ));
}

#[test]
fn unbounded_runs_are_rejected() {
    let f = model();
    let g = geometry(&f, SectorSign::Plus);
    let p = f.unrotate([c(0.0, 0.1), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(matches!(
        integrate_flow(&f, p, &g, &FlowOptions::default()),
        Err(Error::Config(_))
    ));
}

#[test]
fn replay_reproduces_the_trajectory() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let p0 = f.unrotate([c(0.05, 0.1), c(0.1, 0.0), c(0.0, 0.1)]);
    let tr = integrate_flow(&f, p0, &g, &flow_to(300.0)).unwrap();
    let again = replay_flow(&f, p0, &g, &tr.times, &FlowOptions::default()).unwrap();
    assert_eq!(tr.states, again.states);
}

fn zero(_: C64, _: C64, _: C64) -> C64 {
    C64::default()
}

fn v(_: C64, y1: C64, y2: C64) -> C64 {
    y1 * y2
}

fn mixed(x: C64, y1: C64, y2: C64) -> C64 {
    y1 * y2 * c(0.3, -0.2) + x * y1 + y2 * y2 * y1
}

#[test]
fn finite_difference_lie_derivative_of_a_monomial() {
    let f = prepared(5, 2);
    let p = f.unrotate([c(0.02, 0.1), c(0.1, 0.05), c(-0.03, 0.08)]);
    let y = f.y(p);
    let exact = y[1] * p[2] + p[1] * y[2] + y[0] * p[1] * 2.0 * p[0] + p[0] * p[0] * y[1];
    let fd = lie_derivative_fd(&f, |q| Ok(q[1] * q[2] + q[0] * q[0] * q[1]), p, 1e-3).unwrap();
    assert!(
        (fd - exact).norm() < 1e-10 * exact.norm(),
        "{fd} vs {exact}"
    );
}

#[test]
fn residual_is_relative_at_small_x() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let o = PathOptions {
        tol_path: 1e-9,
        flow: FlowOptions {
            rtol: 1e-12,
            ..Default::default()
        },
        ..Default::default()
    };
    let p = f.unrotate([c(0.0, 0.002), c(0.05, 0.0), c(0.0, 0.05)]);
    let r = homological_residual(&f, &mixed, 2, p, &g, &o).unwrap();
    assert!(r < 1e-6, "residual {r:.3e}");
}

#[test]
fn maps_build_when_the_tangential_integrand_is_coupled() {
    let f = SectorialField::from_prepared(&normalize_p1(3, 5, 6).unwrap().field, 1).unwrap();
    for sign in [SectorSign::Plus, SectorSign::Minus] {
        let maps = build_sectorial_maps_shrinking(&f, &geometry(&f, sign), &PathOptions::default())
            .unwrap();
        assert!(maps.smallness().samples > 0);
    }
}

#[test]
fn zero_integrand_gives_zero() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let p = f.unrotate([c(0.0, 0.05), c(0.1, 0.0), c(0.0, 0.1)]);
    let a = homological_path_integral(&f, &zero, 1, p, &g, &PathOptions::default()).unwrap();
    assert_eq!(a.value, C64::default());
}

#[test]
fn path_integrals_are_linear() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let p = f.unrotate([c(0.01, 0.05), c(0.1, 0.0), c(0.0, 0.1)]);
    let o = PathOptions::default();
    let a = homological_path_integral(&f, &v, 2, p, &g, &o).unwrap();
    let b = homological_path_integral(&f, &mixed, 2, p, &g, &o).unwrap();
    let sum = |x: C64, y1: C64, y2: C64| v(x, y1, y2) + mixed(x, y1, y2);
    let s = drsn::sectorial::homological_path_integral_on_grid(&f, &sum, 2, p, &g, &a.grid, &o)
        .unwrap();
    let b_on =
        drsn::sectorial::homological_path_integral_on_grid(&f, &mixed, 2, p, &g, &a.grid, &o)
            .unwrap();
    assert!((s.value - a.value - b_on.value).norm() < 1e-10 * s.value.norm());
    assert!(b.tail_bound < 1e-9);
}

#[test]
fn model_solution_of_the_resonant_equation() {
    // L_{Y0}(x v) = (1 + a) x^2 v
    let f = model();
    let a = f.a();
    for sign in [SectorSign::Plus, SectorSign::Minus] {
        let g = geometry(&f, sign);
        for s in [0.1, 0.03] {
            let p = f.unrotate([c(0.0, s * sign.factor()), c(0.1, 0.05), c(-0.07, 0.1)]);
            let alpha =
                homological_path_integral(&f, &v, 1, p, &g, &PathOptions::default()).unwrap();
            let exact = p[0] * p[1] * p[2] / (a + 1.0);
            assert!(
                (alpha.value - exact).norm() < 1e-6 * exact.norm(),
                "s = {s}"
            );
            assert!(alpha.tail_bound < 1e-9);
        }
    }
}

#[test]
fn homological_residual_is_small() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let o = PathOptions {
        tol_path: 1e-13,
        ..Default::default()
    };
    for u in [
        [0.5, 0.3, 0.4, 0.4, 0.1, 0.6],
        [0.3, 0.5, 0.6, 0.2, 0.8, 0.1],
    ] {
        let p = g.omega_point(u);
        let r = homological_residual(&f, &mixed, 2, p, &g, &o).unwrap();
        assert!(r < 1e-6, "residual {r:.3e}");
    }
}

#[test]
fn order_zero_is_rejected() {
    let f = model();
    let g = geometry(&f, SectorSign::Plus);
    let p = f.unrotate([c(0.0, 0.05), c(0.1, 0.0), c(0.0, 0.1)]);
    let e = homological_path_integral(&f, &v, 0, p, &g, &PathOptions::default());
    assert!(matches!(e, Err(Error::Config(_))));
}

#[test]
fn normal_fields_give_identity_maps() {
    let f = model();
    let g = geometry(&f, SectorSign::Plus);
    let maps = build_sectorial_maps(&f, &g, &PathOptions::default()).unwrap();
    let p = f.unrotate([c(0.01, 0.05), c(0.1, 0.0), c(0.0, 0.1)]);
    assert_eq!(maps.composed(p).unwrap(), p);
    assert_eq!(maps.radial().apply(p).unwrap(), p);
    assert_eq!(maps.tangential().apply(p).unwrap(), p);
    assert_eq!(maps.smallness().sup_rho, 0.0);
}

#[test]
fn map_orders_follow_the_preparation() {
    let f = prepared(5, 2);
    let g = geometry(&f, SectorSign::Plus);
    let maps = build_sectorial_maps(&f, &g, &PathOptions::default()).unwrap();
    assert_eq!(maps.radial().order, 3);
    assert_eq!(maps.tangential().order, 2);
    assert!(maps.smallness().sup_rho.max(maps.smallness().sup_chi) * 2.0 <= 1.25f64.ln());
}

#[test]
fn tangential_after_radial_is_the_composition() {
    let f = prepared(5, 1);
    let g = geometry(&f, SectorSign::Plus);
    let maps = build_sectorial_maps(&f, &g, &PathOptions::default()).unwrap();
    let p = f.unrotate([c(0.02, 0.06), c(0.08, 0.0), c(0.0, 0.05)]);
    let z = maps.radial().apply(p).unwrap();
    let back = maps.invert_phi(z).unwrap();
    assert!((back[1] - p[1]).norm() < 1e-12 && (back[2] - p[2]).norm() < 1e-12);
    let two = maps.tangential().apply(z).unwrap();
    let one = maps.composed(p).unwrap();
    assert!((two[1] - one[1]).norm() < 1e-10 && (two[2] - one[2]).norm() < 1e-10);
}

#[test]
fn sectorial_map_has_the_formal_map_as_expansion() {
    let y = random_prepared_field(7, 1, 8, 8).unwrap();
    let f = SectorialField::from_prepared(&y, 1).unwrap();
    let g = geometry(&f, SectorSign::Plus);
    let maps = build_sectorial_maps(&f, &g, &PathOptions::default()).unwrap();
    let formal = normalize(&y, 4, 8, 8).unwrap().map;
    let mut errs = Vec::new();
    for s in [0.04, 0.02] {
        let p = f.unrotate([c(0.0, s), c(0.05, 0.0), c(0.0, 0.05)]);
        let q = maps.composed(p).unwrap();
        let e1 = (q[1] - formal.comp_y1.eval(p[0], p[1], p[2])).norm();
        let e2 = (q[2] - formal.comp_y2.eval(p[0], p[1], p[2])).norm();
        errs.push(e1.max(e2));
    }
    // agreement to order at least |x|^3
    assert!(errs[0] < 1e-7 && errs[1] < errs[0] / 8.0, "{errs:?}");
}

#[test]
fn cauchy_coefficients_of_a_polynomial() {
    let (rad, pts) = (0.3, 6);
    let nodes = torus_nodes(rad, pts);
    let vals: Vec<C64> = nodes
        .iter()
        .map(|(a, b)| c(2.0, 1.0) * a * a * b + c(0.0, -3.0) * a + b * b * b)
        .collect();
    assert!((cauchy_coefficient(&vals, 2, 1, rad, pts) - c(2.0, 1.0)).norm() < 1e-12);
    assert!((cauchy_coefficient(&vals, 1, 0, rad, pts) - c(0.0, -3.0)).norm() < 1e-12);
    assert!(cauchy_coefficient(&vals, 1, 1, rad, pts).norm() < 1e-12);
}

#[test]
fn normal_field_transition_is_trivial() {
    let f = model();
    let plus =
        build_sectorial_maps(&f, &geometry(&f, SectorSign::Plus), &PathOptions::default()).unwrap();
    let minus = build_sectorial_maps(
        &f,
        &geometry(&f, SectorSign::Minus),
        &PathOptions::default(),
    )
    .unwrap();
    let rep = transition_flatness(&plus, &minus, 0.5, 3).unwrap();
    assert_eq!(rep.max_difference, 0.0);
    assert!(rep.fit.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn omega_is_stable_under_the_flow(u in prop::array::uniform6(0.0f64..1.0), seed in 0u64..4) {
        let f = prepared(seed, 1);
        let g = geometry(&f, if seed % 2 == 0 { SectorSign::Plus } else { SectorSign::Minus });
        let p0 = g.omega_point(u);
        prop_assert!(domain_membership(p0, &g).in_omega);
        let x0 = (p0[0] / f.lambda()).norm();
        let tr = integrate_flow(&f, p0, &g, &flow_to(20.0 / x0)).unwrap();
        prop_assert!(tr.flags.iter().all(|m| m.in_omega));
    }
}
