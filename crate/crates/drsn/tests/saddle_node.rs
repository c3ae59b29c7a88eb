use drsn::random::{random_strict_field, random_tangent_map};
use drsn::saddle_node::{
    classify_residue, diagonalize_constant_linear_part, orbital_linearize_x0, residue,
    restrict_to_x0, Classification, SaddleNodeField,
};
use drsn::series::{exp_flow_map, MultiSeries, PolyVectorField};
use drsn::C64;
use proptest::prelude::*;

const K: usize = 6;
const D: usize = 6;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mono(m: usize, n1: usize, n2: usize, v: C64) -> MultiSeries {
    MultiSeries::monomial(K, D, m, n1, n2, v)
}

/// `y1 (-lambda + p x) d/dy1 + y2 (lambda + q x) d/dy2`.
fn linear_field(lambda: C64, p: C64, q: C64) -> SaddleNodeField {
    let f1 = mono(0, 1, 0, -lambda)
        .checked_add(&mono(1, 1, 0, p))
        .unwrap();
    let f2 = mono(0, 0, 1, lambda)
        .checked_add(&mono(1, 0, 1, q))
        .unwrap();
    SaddleNodeField::from_diagonal(PolyVectorField::saddle_node(f1, f2).unwrap()).unwrap()
}

#[test]
fn residue_reads_the_trace_coefficient() {
    let lambda = c(1.3, 0.2);
    assert_eq!(
        residue(&linear_field(lambda, c(3.0, 0.0), c(2.0, 0.0))),
        c(5.0, 0.0)
    );
    assert_eq!(
        residue(&linear_field(lambda, c(0.0, 0.0), c(0.0, 0.0))),
        c(0.0, 0.0)
    );
}

#[test]
fn classification_examples() {
    assert_eq!(
        classify_residue(c(1.0, 0.0)),
        Classification::StrictlyNonDegenerate
    );
    assert_eq!(classify_residue(c(-0.5, 0.0)), Classification::Degenerate);
    assert_eq!(classify_residue(c(0.0, 1.0)), Classification::NonDegenerate);
    assert_eq!(classify_residue(c(0.0, 0.0)), Classification::Degenerate);
    assert_eq!(
        classify_residue(c(-3.0 / 7.0, 0.0)),
        Classification::Degenerate
    );
    assert_eq!(
        classify_residue(c(-std::f64::consts::SQRT_2, 0.0)),
        Classification::NonDegenerate
    );
}

#[test]
fn rejects_non_x2_first_component() {
    let f1 = mono(0, 1, 0, c(-1.0, 0.0));
    let f2 = mono(0, 0, 1, c(1.0, 0.0));
    let field = PolyVectorField::new(mono(1, 0, 0, c(1.0, 0.0)), f1, f2).unwrap();
    assert!(SaddleNodeField::from_diagonal(field).is_err());
}

#[test]
fn diagonal_field_keeps_identity_map() {
    let y = linear_field(c(0.9, 0.1), c(0.4, 0.0), c(0.3, 0.0));
    let (out, map) = diagonalize_constant_linear_part(&y.field).unwrap();
    assert!(map.is_identity(0.0));
    assert_eq!(out.lambda, y.lambda);
}

#[test]
fn swapped_ordering_puts_minus_lambda_first() {
    let f1 = mono(0, 1, 0, c(2.0, 0.0))
        .checked_add(&mono(1, 1, 0, c(0.3, 0.0)))
        .unwrap();
    let f2 = mono(0, 0, 1, c(-2.0, 0.0));
    let (out, _) =
        diagonalize_constant_linear_part(&PolyVectorField::saddle_node(f1, f2).unwrap()).unwrap();
    assert_eq!(out.lambda, c(2.0, 0.0));
    assert_eq!(out.field.comp_y1.get(0, 1, 0), c(-2.0, 0.0));
    assert_eq!(out.a2, c(0.3, 0.0));
}

#[test]
fn non_opposite_eigenvalues_are_rejected() {
    let f1 = mono(0, 1, 0, c(1.0, 0.0));
    let f2 = mono(0, 0, 1, c(2.0, 0.0));
    assert!(
        diagonalize_constant_linear_part(&PolyVectorField::saddle_node(f1, f2).unwrap()).is_err()
    );
}

#[test]
fn general_linear_part_is_diagonalized_with_unit_determinant() {
    // [[1, 2], [3, -1]] has eigenvalues +-sqrt(7)
    let f1 = mono(0, 1, 0, c(1.0, 0.0))
        .checked_add(&mono(0, 0, 1, c(2.0, 0.0)))
        .unwrap();
    let f2 = mono(0, 1, 0, c(3.0, 0.0))
        .checked_add(&mono(0, 0, 1, c(-1.0, 0.0)))
        .unwrap();
    let (out, map) =
        diagonalize_constant_linear_part(&PolyVectorField::saddle_node(f1, f2).unwrap()).unwrap();
    assert!((out.lambda - c(7f64.sqrt(), 0.0)).norm() < 1e-12);
    let det = map.y_jacobian_det().unwrap();
    assert!((det.constant_term() - c(1.0, 0.0)).norm() < 1e-12);
}

fn restricted(h: &MultiSeries, lambda: C64) -> (MultiSeries, MultiSeries) {
    let unit = MultiSeries::constant(1, D, lambda).checked_add(h).unwrap();
    let f1 = unit.checked_mul(&MultiSeries::y1(1, D)).unwrap().neg();
    let f2 = unit.checked_mul(&MultiSeries::y2(1, D)).unwrap();
    (f1, f2)
}

#[test]
fn orbital_linearization_of_linear_restriction_is_trivial() {
    let (f1, f2) = restricted(&MultiSeries::zero(1, D), c(1.0, 0.0));
    let lin = orbital_linearize_x0(&f1, &f2, None).unwrap();
    assert!(lin.gamma.is_zero());
    assert!(lin.d.is_zero(0.0));
}

#[test]
fn resonant_unit_passes_through() {
    let h = MultiSeries::resonant(1, D, 0, 1, c(0.7, -0.2));
    let (f1, f2) = restricted(&h, c(1.0, 0.0));
    let lin = orbital_linearize_x0(&f1, &f2, None).unwrap();
    assert!(lin.gamma.max_abs() < 1e-15);
    assert!((lin.d.get(1) - c(0.7, -0.2)).norm() < 1e-15);
    assert!(lin.d.coeffs().iter().skip(2).all(|z| z.norm() < 1e-15));
}

#[test]
fn unit_y1_gives_minus_one_first_coefficient() {
    let (f1, f2) = restricted(&MultiSeries::y1(1, D), c(1.0, 0.0));
    let lin = orbital_linearize_x0(&f1, &f2, None).unwrap();
    assert!((lin.gamma.get(0, 1, 0) - c(-1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn orbital_linearization_leaves_resonant_unit() {
    let lambda = c(1.1, 0.3);
    let h = MultiSeries::from_terms(
        1,
        D,
        [
            (drsn::series::MultiIndex::new(0, 1, 0), c(0.4, 0.1)),
            (drsn::series::MultiIndex::new(0, 0, 2), c(-0.3, 0.2)),
            (drsn::series::MultiIndex::new(0, 1, 1), c(0.2, 0.0)),
            (drsn::series::MultiIndex::new(0, 3, 1), c(0.1, -0.1)),
        ],
    );
    let (f1, f2) = restricted(&h, lambda);
    let lin = orbital_linearize_x0(&f1, &f2, None).unwrap();
    assert!(lin.gamma.terms().all(|(i, _)| !i.is_resonant()));
    let (c1, c2) = exp_flow_map(&lin.gamma, (1, -1)).unwrap();
    let map = drsn::maps::ConjugacyMap::new(c1, c2, "test").unwrap();
    let field = PolyVectorField::new(MultiSeries::zero(1, D), f1, f2).unwrap();
    let pushed = map.push_forward(&field).unwrap();
    let u = drsn::series::from_v_series(&lin.d, 1, D)
        .checked_add(&MultiSeries::constant(1, D, lambda))
        .unwrap();
    let want1 = u.checked_mul(&MultiSeries::y1(1, D)).unwrap().neg();
    let want2 = u.checked_mul(&MultiSeries::y2(1, D)).unwrap();
    assert!(pushed.comp_y1.checked_sub(&want1).unwrap().max_abs() < 1e-8);
    assert!(pushed.comp_y2.checked_sub(&want2).unwrap().max_abs() < 1e-8);
}

#[test]
fn non_proportional_restriction_is_not_div_integrable() {
    let f1 = MultiSeries::y1(1, D)
        .neg()
        .checked_add(&MultiSeries::monomial(1, D, 0, 0, 2, c(1.0, 0.0)))
        .unwrap();
    let f2 = MultiSeries::y2(1, D);
    let err = orbital_linearize_x0(&f1, &f2, None).unwrap_err();
    assert!(matches!(err, drsn::Error::NotDivIntegrable { .. }));
}

#[test]
fn restriction_drops_x_divisible_terms() {
    let lambda = c(1.2, 0.0);
    let mut y = linear_field(lambda, c(0.5, 0.0), c(0.6, 0.0));
    y.field.comp_y1 = y
        .field
        .comp_y1
        .checked_add(&mono(2, 0, 3, c(1.0, 0.0)))
        .unwrap();
    let (r1, r2) = restrict_to_x0(&y);
    assert!(r1.approx_eq(&MultiSeries::y1(1, D).scale(-lambda), 0.0));
    assert!(r2.approx_eq(&MultiSeries::y2(1, D).scale(lambda), 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn residue_is_invariant_under_tangent_maps(seed in 0u64..10_000) {
        let y = random_strict_field(seed, K, D).unwrap();
        let map = random_tangent_map(seed.wrapping_add(77), K, D).unwrap();
        let pushed = map.push_forward(&y.field).unwrap();
        let conj = SaddleNodeField::from_diagonal(pushed).unwrap();
        prop_assert!((residue(&conj) - residue(&y)).norm() < 1e-8);
    }
}
