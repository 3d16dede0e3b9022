//! Built-in joinings used by tests, the acceptance suite and the CLI.
//!
//! `fixture_a` matches `fixtures/fixture-a.toml`. Its second representation
//! is the first one conjugated by `z ↦ 1.2z`, so it is not Zariski dense;
//! `fixture_b` perturbs the second representation generically.

use num_complex::Complex64;

use crate::geometry::{Circle, MoebiusMap, Torus};
use crate::schottky::{JoiningSpec, SchottkyData};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Two pairs of disks of radius `r` centered at `±s` and `±s·i`.
pub fn cross_rep(r: f64, s: f64) -> SchottkyData<f64> {
    SchottkyData::from_disks(&[
        ((c(-s, 0.0), r), (c(s, 0.0), r)),
        ((c(0.0, -s), r), (c(0.0, s), r)),
    ])
    .expect("cross configuration is a valid Schottky group")
}

/// fixture-A: rep 1 has disks of radius 0.5 at ±2, ±2i; rep 2 radius 0.6 at ±2.4, ±2.4i.
pub fn fixture_a() -> JoiningSpec<f64> {
    JoiningSpec::new(vec![cross_rep(0.5, 2.0), cross_rep(0.6, 2.4)]).expect("same rank")
}

/// Unit circle in every factor.
pub fn unit_seed(d: usize) -> Torus<f64> {
    Torus::new(vec![Circle::new(c(0.0, 0.0), 1.0).expect("unit circle"); d]).expect("d >= 1")
}

pub fn fixture_a_seed() -> Torus<f64> {
    unit_seed(2)
}

/// Rep 1 of fixture-A alone (`d = 1`).
pub fn fixture_a_single() -> JoiningSpec<f64> {
    JoiningSpec::new(vec![cross_rep(0.5, 2.0)]).expect("one rep")
}

/// fixture-B: rep 1 as in fixture-A, rep 2 with unequal, shifted disks.
pub fn fixture_b() -> JoiningSpec<f64> {
    let rep2 = SchottkyData::from_disks(&[
        ((c(-2.3, 0.15), 0.55), (c(2.1, -0.1), 0.45)),
        ((c(0.1, -2.2), 0.5), (c(-0.2, 2.35), 0.6)),
    ])
    .expect("valid pairing");
    JoiningSpec::new(vec![cross_rep(0.5, 2.0), rep2]).expect("same rank")
}

/// `ρ₂ = ρ₁`: the diagonal joining of fixture-A's first representation.
pub fn diagonal() -> JoiningSpec<f64> {
    let rep = cross_rep(0.5, 2.0);
    JoiningSpec::new(vec![rep.clone(), rep]).expect("same rank")
}

/// `ρ₂ = h ρ₁ h⁻¹` for a fixed affine `h` with non-real multiplier.
pub fn conjugated() -> JoiningSpec<f64> {
    let rep = cross_rep(0.5, 2.0);
    let h = MoebiusMap::new(c(1.1, 0.2), c(0.1, -0.05), c(0.0, 0.0), c(1.0, 0.0))
        .expect("nonsingular");
    let conj = rep.conjugated(&h).expect("pole of h is ∞");
    JoiningSpec::new(vec![rep, conj]).expect("same rank")
}
