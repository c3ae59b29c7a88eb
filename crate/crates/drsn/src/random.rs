//! Seeded generators of test fields and maps.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::maps::ConjugacyMap;
use crate::saddle_node::SaddleNodeField;
use crate::series::{MultiIndex, MultiSeries, PolyVectorField};

fn coeff(rng: &mut ChaCha8Rng, size: f64) -> C64 {
    C64::new(rng.gen_range(-size..size), rng.gen_range(-size..size))
}

/// Random series with terms of total weight `m + n1 + n2 >= min_weight`
/// and y-degree `>= min_y`, damped by `2^{-weight}`.
fn random_series(
    rng: &mut ChaCha8Rng,
    k: usize,
    d: usize,
    min_y: usize,
    min_weight: usize,
    density: f64,
) -> MultiSeries {
    let mut terms = Vec::new();
    for m in 0..k {
        for deg in min_y..=d {
            for n1 in 0..=deg {
                let w = m + deg;
                if w < min_weight || !rng.gen_bool(density) {
                    continue;
                }
                terms.push((
                    MultiIndex::new(m, n1, deg - n1),
                    coeff(rng, 0.5) * 0.5f64.powi(w as i32),
                ));
            }
        }
    }
    MultiSeries::from_terms(k, d, terms)
}

/// Random diagonal saddle-node whose restriction to `{x = 0}` is
/// `lambda (1 + h(y)) C`, with `Re(a1 + a2) > 0`, and generic x-dependent
/// terms including a nonzero translation of the center manifold.
pub fn random_strict_field(seed: u64, x_order: usize, y_order: usize) -> Result<SaddleNodeField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, d) = (x_order, y_order);
    let lambda = C64::from_polar(rng.gen_range(0.8..1.5), rng.gen_range(-0.6..0.6));
    let a1 = C64::new(rng.gen_range(0.2..1.2), rng.gen_range(-0.5..0.5));
    let a2 = C64::new(rng.gen_range(0.2..1.2), rng.gen_range(-0.5..0.5));
    let h = random_series(&mut rng, 1, d.saturating_sub(1), 1, 1, 0.7).with_orders(k, d);
    let unit = MultiSeries::constant(k, d, lambda).checked_add(&h.scale(lambda))?;
    let y1 = MultiSeries::y1(k, d);
    let y2 = MultiSeries::y2(k, d);
    let g1 = random_series(&mut rng, k, d, 0, 2, 0.5).filter(|i| i.m >= 1);
    let g2 = random_series(&mut rng, k, d, 0, 2, 0.5).filter(|i| i.m >= 1);
    let x = MultiSeries::x(k, d);
    let f1 = unit
        .checked_mul(&y1)?
        .neg()
        .checked_add(&x.checked_mul(&y1)?.scale(a1))?
        .checked_add(&g1.filter(|i| !(i.m == 1 && i.n1 == 1 && i.n2 == 0)))?;
    let f2 = unit
        .checked_mul(&y2)?
        .checked_add(&x.checked_mul(&y2)?.scale(a2))?
        .checked_add(&g2.filter(|i| !(i.m == 1 && i.n1 == 0 && i.n2 == 1)))?;
    SaddleNodeField::from_diagonal(PolyVectorField::saddle_node(f1, f2)?)
}

/// Random fibered map tangent to the identity (terms of weight >= 2,
/// no y-constant part).
pub fn random_tangent_map(seed: u64, x_order: usize, y_order: usize) -> Result<ConjugacyMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p1 = random_series(&mut rng, x_order, y_order, 1, 2, 0.4);
    let p2 = random_series(&mut rng, x_order, y_order, 1, 2, 0.4);
    ConjugacyMap::new(
        MultiSeries::y1(x_order, y_order).checked_add(&p1)?,
        MultiSeries::y2(x_order, y_order).checked_add(&p2)?,
        "random",
    )
}

/// Random field prepared at order `n + 2`:
/// `Y0 + (lambda c(v) + x^{n+2} D') C + x^{n+2} R' R`, where `C = -y1 d/dy1 + y2 d/dy2`
/// and `R = y1 d/dy1 + y2 d/dy2`. The residues have `Re(a_j)` in `[1, 1.4]`,
/// so both `y_j` decay along asymptotic paths.
pub fn random_prepared_field(
    seed: u64,
    n: usize,
    x_order: usize,
    y_order: usize,
) -> Result<SaddleNodeField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (k, d) = (x_order, y_order);
    let lambda = C64::from_polar(rng.gen_range(0.8..1.5), rng.gen_range(-0.6..0.6));
    let base = C64::new(rng.gen_range(1.0..1.3), rng.gen_range(-0.3..0.3));
    let a1 = base + coeff(&mut rng, 0.1);
    let a2 = base + coeff(&mut rng, 0.1);
    let mut resonant = Vec::new();
    for j in 1..=d / 2 {
        resonant.push((
            MultiIndex::new(0, j, j),
            coeff(&mut rng, 0.5) * 0.25f64.powi(j as i32),
        ));
    }
    let c = MultiSeries::from_terms(k, d, resonant).scale(lambda);
    let shift = n + 2;
    let tail = |rng: &mut ChaCha8Rng| {
        random_series(rng, k.saturating_sub(shift), d, 0, 0, 0.5)
            .with_orders(k, d)
            .map_terms(|i, c| {
                (i.m + shift < k).then(|| (MultiIndex::new(i.m + shift, i.n1, i.n2), c))
            })
    };
    let dd = c.checked_add(&tail(&mut rng))?;
    let rr = tail(&mut rng);
    let x = MultiSeries::x(k, d);
    let one = MultiSeries::constant(k, d, C64::new(1.0, 0.0));
    let u1 = one
        .scale(-lambda)
        .checked_add(&x.scale(a1))?
        .checked_sub(&dd)?
        .checked_add(&rr)?;
    let u2 = one
        .scale(lambda)
        .checked_add(&x.scale(a2))?
        .checked_add(&dd)?
        .checked_add(&rr)?;
    let f1 = u1.checked_mul(&MultiSeries::y1(k, d))?;
    let f2 = u2.checked_mul(&MultiSeries::y2(k, d))?;
    SaddleNodeField::from_diagonal(PolyVectorField::saddle_node(f1, f2)?)
}
