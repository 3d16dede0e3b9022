use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use toruspack::fixtures;
use toruspack::geometry::{CircleShape, ExtPoint, HalfSpacePoint};
use toruspack::orbit::{count_nr, enumerate_tori, EnumConfig, FactorCircle, PlanarBox, Region};
use toruspack::schottky::admissible_seed_check;
use toruspack::word::{ReducedWords, Word};
use toruspack::{Circle64, LinearForm, Moebius64};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_map(rng: &mut StdRng) -> Moebius64 {
    loop {
        let mut e = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (a, b, cc, d) = (e(), e(), e(), e());
        if (a * d - b * cc).norm() > 0.1 {
            return Moebius64::new(a, b, cc, d).unwrap();
        }
    }
}

#[test]
fn circle_images_match_mapped_points() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let m = random_map(&mut rng);
        let center = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let circle = Circle64::new(center, rng.gen_range(0.1..2.0)).unwrap();
        let (z0, r0) = circle.center_radius().unwrap();
        let image = circle.transformed(&m);
        for k in 0..64 {
            let theta = std::f64::consts::TAU * k as f64 / 64.0;
            let Some(w) = m.apply(ExtPoint::Finite(z0 + Complex64::from_polar(r0, theta))).as_finite() else {
                continue;
            };
            if w.norm() > 1e6 {
                continue;
            }
            let dev = match image.shape() {
                CircleShape::Round { center, radius } => ((w - center).norm() - radius).abs() / radius.max(1.0),
                CircleShape::Line { normal, offset } => ((normal.conj() * w).re - offset).abs(),
            };
            worst = worst.max(dev);
        }
    }
    assert!(worst < 1e-9, "worst deviation {worst:e}");
}

/// Point at distance `t` from `o` on the ray towards `xi`.
fn ray_point(xi: ExtPoint<f64>, t: f64) -> HalfSpacePoint<f64> {
    let top = HalfSpacePoint::new(c(0.0, 0.0), t.exp());
    match xi {
        ExtPoint::Infinity => top,
        ExtPoint::Finite(x) => {
            let n = (1.0 + x.norm_sqr()).sqrt();
            let (a, b) = (x / n, c(1.0 / n, 0.0));
            // unitary, so it fixes o and sends ∞ to a/b = xi
            Moebius64::new(a, -b.conj(), b, a.conj()).unwrap().apply_half_space(top)
        }
    }
}

#[test]
fn busemann_matches_ray_limit() {
    let mut rng = StdRng::seed_from_u64(12);
    let o = HalfSpacePoint::basepoint();
    for i in 0..200 {
        let m = random_map(&mut rng);
        let xi = if i % 10 == 0 {
            ExtPoint::Infinity
        } else {
            ExtPoint::Finite(c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
        };
        let p = ray_point(xi, 20.0);
        let oracle = m.apply_basepoint().distance(&p) - o.distance(&p);
        let closed = m.busemann(xi);
        assert!((oracle - closed).abs() < 1e-6, "{xi:?}: {oracle} vs {closed}");
    }
}

#[test]
fn diagonal_displacement_is_translation_length() {
    for t in [0.1, 1.0, 10.0] {
        let m = Moebius64::axis_translation(t);
        assert!((m.hyp_displacement() - t).abs() < 1e-12);
        assert!((m.translation_length() - t).abs() < 1e-12);
    }
}

fn torus_points(factors: &[FactorCircle], n: usize) -> impl Iterator<Item = Vec<Complex64>> + '_ {
    let circle = move |f: &FactorCircle, k: usize| f.center + Complex64::from_polar(f.radius, std::f64::consts::TAU * k as f64 / n as f64);
    (0..n * n).map(move |ij| vec![circle(&factors[0], ij / n), circle(&factors[1], ij % n)])
}

#[test]
fn ball_meets_agrees_with_sampling() {
    let spec = fixtures::fixture_a();
    let seed = admissible_seed_check(&spec, fixtures::fixture_a_seed(), 4, 0.01).unwrap();
    let e = enumerate_tori(&spec, &seed, &EnumConfig::exhaustive(3, LinearForm::sum_form(2))).unwrap();
    let mut rng = StdRng::seed_from_u64(13);
    let n = 256;
    let (mut hits, mut misses) = (0, 0);
    for rec in e.records.iter().step_by(3) {
        for _ in 0..4 {
            let center = vec![
                rec.factors[0].center + c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)),
                rec.factors[1].center + c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)),
            ];
            let radius = rng.gen_range(0.05..1.0);
            let ball = Region::Ball { center: center.clone(), radius };
            let nearest = torus_points(&rec.factors, n)
                .map(|p| p.iter().zip(&center).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min);
            let grid = rec.factors.iter().map(|f| f.radius * std::f64::consts::PI / n as f64).sum::<f64>();
            if ball.meets(&rec.factors) {
                hits += 1;
                assert!(nearest <= radius + grid, "{}: nearest {nearest} radius {radius}", rec.word);
            } else {
                misses += 1;
                assert!(nearest > radius, "{}: nearest {nearest} radius {radius}", rec.word);
            }
        }
    }
    assert!(hits > 20 && misses > 20, "{hits} hits, {misses} misses");
}

#[test]
fn counts_match_brute_force_recount() {
    let spec = fixtures::fixture_a();
    let seed = admissible_seed_check(&spec, fixtures::fixture_a_seed(), 4, 0.01).unwrap();
    let psi = LinearForm::new(vec![0.7, 1.3]);
    let depth = 6;
    let e = enumerate_tori(&spec, &seed, &EnumConfig::exhaustive(depth, psi.clone())).unwrap();
    let regions = [
        Region::cube(2, 4.0),
        Region::product(vec![PlanarBox::new([1.0, 3.0], [-1.0, 1.0]), PlanarBox::new([1.0, 3.5], [-1.0, 1.0])]),
        Region::Ball { center: vec![c(0.0, 2.0), c(0.0, 2.4)], radius: 0.8 },
    ];
    // images computed from scratch, word by word
    let brute: Vec<(Vec<FactorCircle>, f64)> = std::iter::once(Word::empty())
        .chain(ReducedWords::new(spec.rank(), depth))
        .map(|w| {
            let g = spec.evaluate_word(&w);
            let factors: Vec<FactorCircle> = seed
                .torus()
                .circles()
                .iter()
                .zip(g.factors())
                .map(|(circle, m)| {
                    let (center, radius) = circle.transformed(m).center_radius().unwrap();
                    FactorCircle { center, radius }
                })
                .collect();
            let v: Vec<f64> = factors.iter().map(|f| -f.radius.ln()).collect();
            (factors, psi.eval(&v))
        })
        .collect();
    assert_eq!(brute.len(), e.records.len());
    let r_max = e.stats.complete_below;
    for region in &regions {
        for r in [0.5 * r_max, 0.8 * r_max, r_max] {
            let fast = count_nr(&e.records, &psi, r, region, e.stats.complete_below).unwrap();
            let slow = brute.iter().filter(|(f, p)| *p < r && region.meets(f)).count() as u64;
            assert_eq!(fast, slow, "R = {r}");
        }
    }
}
