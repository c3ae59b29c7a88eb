use drsn::maps::ConjugacyMap;
use drsn::normalization::NormalFormData;
use drsn::painleve::{
    boutroux_transform, check_symplectic_samples, check_transversally_hamiltonian,
    check_transversally_symplectic, p1_field, painleve_demo, zeta, Hamiltonian, IDEAL_TOLERANCE,
};
use drsn::saddle_node::{
    classify, diagonalize_constant_linear_part, restrict_to_x0, Classification, SaddleNodeField,
};
use drsn::series::{exp_flow_map, ExactRegion, MultiSeries, UniSeries};
use drsn::C64;

const K: usize = 6;
const D: usize = 8;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn p1_field_coefficients() {
    let f = p1_field(K, D);
    let z = zeta();
    assert_eq!(f.comp_y1.get(1, 0, 0), z * 0.4);
    assert_eq!(f.comp_y2.get(0, 2, 0), c(-4.8, 0.0));
    assert_eq!(f.comp_y1.get(0, 0, 1), c(-0.8, 0.0));
    assert_eq!(f.comp_y2.get(0, 1, 0), z * -9.6);
    assert_eq!(f.comp_y1.get(1, 1, 0), c(0.4, 0.0));
    assert_eq!(f.comp_y2.get(1, 0, 1), c(0.6, 0.0));
    assert_eq!(f.comp_y1.len() + f.comp_y2.len(), 6);
}

#[test]
fn translation_constant_cancels_the_quadratic() {
    let z = zeta();
    assert!((z * z * 6.0 + 1.0).norm() < 1e-15);
}

#[test]
fn chart_reproduces_the_compactified_field() {
    let f = boutroux_transform(&Hamiltonian::painleve_one(), zeta(), K, D).unwrap();
    let want = p1_field(K, D);
    assert!(f.checked_sub(&want).unwrap().max_abs() < 1e-12);
}

#[test]
fn zero_hamiltonian_leaves_chart_terms() {
    let f = boutroux_transform(&Hamiltonian::new(), C64::default(), K, D).unwrap();
    assert_eq!(f.comp_y1.len(), 1);
    assert_eq!(f.comp_y2.len(), 1);
    assert_eq!(f.comp_y1.get(1, 1, 0), c(0.4, 0.0));
    assert_eq!(f.comp_y2.get(1, 0, 1), c(0.6, 0.0));
}

#[test]
fn fractional_weights_are_rejected() {
    // dz2/dt = 1 picks up x^(4/5)
    let h = Hamiltonian::new().with_term(0, 1, 0, c(1.0, 0.0));
    assert!(matches!(
        boutroux_transform(&h, C64::default(), K, D),
        Err(drsn::Error::Shape(_))
    ));
}

#[test]
fn diagonalized_p1_has_unit_residue() {
    let (y, map) = diagonalize_constant_linear_part(&p1_field(K, D)).unwrap();
    // eigenvalues of [[0, b], [c, 0]] are +- sqrt(b c)
    let bc = c(-0.8, 0.0) * (zeta() * -9.6);
    assert!((y.lambda * y.lambda - bc).norm() < 1e-12);
    assert!((y.lambda * y.lambda - zeta() * (192.0 / 25.0)).norm() < 1e-12);
    assert!((y.residue - c(1.0, 0.0)).norm() < 1e-9);
    assert_eq!(classify(&y), Classification::StrictlyNonDegenerate);
    assert!((map.y_jacobian_det().unwrap().constant_term() - 1.0).norm() < 1e-12);
}

#[test]
fn p1_restriction() {
    let f = p1_field(K, D);
    let y = SaddleNodeField {
        field: f,
        lambda: c(1.0, 0.0),
        a1: c(0.4, 0.0),
        a2: c(0.6, 0.0),
        residue: c(1.0, 0.0),
    };
    let (r1, r2) = restrict_to_x0(&y);
    let z = zeta();
    assert_eq!(r1.len(), 1);
    assert_eq!(r1.get(0, 0, 1), c(-0.8, 0.0));
    assert_eq!(r2.len(), 2);
    assert_eq!(r2.get(0, 2, 0), c(-4.8, 0.0));
    assert_eq!(r2.get(0, 1, 0), z * -9.6);
}

#[test]
fn p1_is_transversally_hamiltonian() {
    let check = check_transversally_hamiltonian(&p1_field(K, D), IDEAL_TOLERANCE).unwrap();
    assert!(check.passed && check.dx_in_ideal);
    assert!(check.offending.is_empty());
}

fn normal_form(a1: f64, a2: f64, c_sum: f64) -> drsn::series::PolyVectorField {
    let c1 = UniSeries::from_real(D / 2 + 1, &[0.0, 0.4, -0.1]);
    let mut c2 = c1.scale(c(-1.0, 0.0));
    c2.set(1, c2.get(1) + c_sum);
    let data = NormalFormData {
        lambda: c(1.0, 0.5),
        a1: c(a1, 0.0),
        a2: c(a2, 0.0),
        c1,
        c2,
        d_n: UniSeries::zero(D / 2 + 1),
        condition_number: 0.0,
        stage_remainders: Vec::new(),
    };
    data.field(K, D).unwrap()
}

#[test]
fn normal_form_with_unit_residue_is_hamiltonian() {
    assert!(
        check_transversally_hamiltonian(&normal_form(0.3, 0.7, 0.0), IDEAL_TOLERANCE)
            .unwrap()
            .passed
    );
}

#[test]
fn residue_two_is_not_hamiltonian() {
    let check =
        check_transversally_hamiltonian(&normal_form(1.2, 0.8, 0.0), IDEAL_TOLERANCE).unwrap();
    assert!(!check.passed);
    // div_y - x = (a1 + a2 - 1) x + ...
    assert_eq!(check.offending.len(), 1);
    assert!((check.offending[0].1 - 1.0).norm() < 1e-12);
}

#[test]
fn unbalanced_resonant_terms_are_not_hamiltonian() {
    let check =
        check_transversally_hamiltonian(&normal_form(0.5, 0.5, 0.25), IDEAL_TOLERANCE).unwrap();
    assert!(!check.passed);
    // (c1 + c2) + v (c1 + c2)' = 0.5 v
    assert!((check.offending[0].1 - 0.5).norm() < 1e-12);
}

fn full_region() -> ExactRegion {
    ExactRegion::full(K, D)
}

#[test]
fn identity_is_symplectic() {
    let check =
        check_transversally_symplectic(&ConjugacyMap::identity(K, D), &full_region(), 1e-12)
            .unwrap();
    assert!(check.passed);
    assert_eq!(check.max_defect, 0.0);
}

#[test]
fn resonant_tangential_flow_is_symplectic() {
    let sigma = MultiSeries::resonant(K, D, 0, 1, c(0.7, 0.0))
        .checked_add(&MultiSeries::resonant(K, D, 1, 2, c(-0.2, 0.3)))
        .unwrap();
    let (p1, p2) = exp_flow_map(&sigma, (-1, 1)).unwrap();
    let map = ConjugacyMap::new(p1, p2, "tangential").unwrap();
    let check = check_transversally_symplectic(&map, &full_region(), 1e-12).unwrap();
    assert!(check.passed, "{}", check.max_defect);
}

#[test]
fn radial_flow_is_not_symplectic() {
    let tau = MultiSeries::resonant(K, D, 0, 1, c(1.0, 0.0));
    let (p1, p2) = exp_flow_map(&tau, (1, 1)).unwrap();
    let map = ConjugacyMap::new(p1.clone(), p2.clone(), "radial").unwrap();
    let check = check_transversally_symplectic(&map, &full_region(), 1e-8).unwrap();
    assert!(!check.passed);
    // det = e^{2 v} (1 + 2 v) = 1 + 4 v + 6 v^2 + ...
    let det = map.y_jacobian_det().unwrap();
    assert!((det.get(0, 1, 1) - 4.0).norm() < 1e-12);
    assert!((det.get(0, 2, 2) - 6.0).norm() < 1e-12);
    let eval = |x: C64, y1: C64, y2: C64| (p1.eval(x, y1, y2), p2.eval(x, y1, y2));
    let pts = [(c(0.01, 0.0), c(0.1, 0.05), c(-0.08, 0.02))];
    assert!(!check_symplectic_samples(eval, &pts, 1e-5, 1e-8).passed);
}

#[test]
fn sample_check_accepts_the_identity() {
    let pts = [
        (c(0.1, 0.1), c(0.2, 0.0), c(0.0, 0.3)),
        (c(0.05, 0.0), c(-0.1, 0.1), c(0.1, 0.0)),
    ];
    let check = check_symplectic_samples(|_, y1, y2| (y1, y2), &pts, 1e-5, 1e-8);
    assert!(check.passed);
}

#[test]
fn demo_report_matches_the_worked_example() {
    let r = painleve_demo(4, K, D).unwrap();
    assert!((r.residue - 1.0).norm() < 1e-9);
    assert!((r.a1 + r.a2 - 1.0).norm() < 1e-9);
    assert!(r.c_sum_max < 1e-8);
    assert!(r.conjugacy_residual < 1e-8);
    assert!(r.hamiltonian.passed);
    assert!(r.symplectic.passed, "{}", r.symplectic.max_defect);
    assert_eq!(
        r.provenance.first().map(String::as_str),
        Some("diagonalize")
    );
}
