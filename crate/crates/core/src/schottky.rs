//! Classical Schottky groups and their self-joinings.
//!
//! Generator `j` maps the exterior of disk `D_j⁻` onto the interior of
//! `D_j⁺`; its inverse does the opposite. Every representation of a joining
//! shares the same abstract generators, which is the combinatorial
//! identification between the factors.

use std::fmt;

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Circle, GeometryError, GroupElement, MoebiusMap, Real, Torus};
use crate::word::{Letter, ReducedWords, Word};

/// `(center, radius)` of a closed disk.
pub type Disk<T> = (Complex<T>, T);

pub const DEFAULT_PING_PONG_MARGIN: f64 = 1e-3;
pub const DEFAULT_ADMISSIBILITY_MARGIN: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Minus,
    Plus,
}

/// One of the `2k` pairing disks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DiskLabel {
    /// Zero-based generator index.
    pub generator: usize,
    pub side: Side,
}

impl DiskLabel {
    /// The disk a letter maps into.
    pub fn target_of(l: Letter) -> Self {
        Self {
            generator: l.generator(),
            side: if l.is_inverse() { Side::Minus } else { Side::Plus },
        }
    }

    /// The disk whose exterior a letter maps inward.
    pub fn source_of(l: Letter) -> Self {
        Self::target_of(l.inverse())
    }

    fn index(self) -> usize {
        2 * self.generator + usize::from(self.side == Side::Minus)
    }

    fn from_index(i: usize) -> Self {
        Self {
            generator: i / 2,
            side: if i.is_multiple_of(2) { Side::Plus } else { Side::Minus },
        }
    }
}

impl fmt::Display for DiskLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::Minus => '-',
            Side::Plus => '+',
        };
        write!(f, "D{}{}", self.generator + 1, s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchottkyError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("pairing circles must be genuine circles, not lines")]
    LineNotAllowed,
    #[error("a Schottky group needs at least one generator")]
    NoGenerators,
    #[error("disks {first} and {second} are not separated by the margin (gap {gap:e})")]
    OverlappingDisks {
        first: DiskLabel,
        second: DiskLabel,
        gap: f64,
    },
    #[error("letter {letter} maps disk {disk} outside its target (gap {gap:e})")]
    NestingViolation { letter: i8, disk: DiskLabel, gap: f64 },
    #[error("a joining needs at least one representation")]
    EmptyJoining,
    #[error("representation {rep} has {got} generators, expected {expected}")]
    GeneratorCountMismatch {
        rep: usize,
        expected: usize,
        got: usize,
    },
    #[error("representation {rep}: {source}")]
    Representation {
        rep: usize,
        #[source]
        source: Box<SchottkyError>,
    },
    #[error("seed has {got} factors, joining has {expected}")]
    SeedDimension { expected: usize, got: usize },
    #[error("seed factor {factor} meets the nested disk of word [{word}] (gap {gap:e})")]
    SeedEntersDisk { factor: usize, word: Word, gap: f64 },
    #[error("factor {factor}: nested disks do not contract by depth {depth}")]
    NoContraction { factor: usize, depth: usize },
}

/// Pairing generator `z ↦ c₊ + r₊r₋/(z − c₋)`: maps `∂D⁻` onto `∂D⁺` and
/// the exterior of `D⁻` onto the interior of `D⁺`.
pub fn generator_from_circle_pair<T: Real>(
    minus: &Circle<T>,
    plus: &Circle<T>,
) -> Result<MoebiusMap<T>, SchottkyError> {
    let (cm, rm) = minus.center_radius().ok_or(SchottkyError::LineNotAllowed)?;
    let (cp, rp) = plus.center_radius().ok_or(SchottkyError::LineNotAllowed)?;
    let gap = (cp - cm).norm() - rm - rp;
    if !(gap > T::zero()) {
        return Err(SchottkyError::OverlappingDisks {
            first: DiskLabel {
                generator: 0,
                side: Side::Minus,
            },
            second: DiskLabel {
                generator: 0,
                side: Side::Plus,
            },
            gap: gap.to_f64().unwrap_or(f64::NAN),
        });
    }
    let one = Complex::new(T::one(), T::zero());
    let rr = Complex::new(rp * rm, T::zero());
    Ok(MoebiusMap::new(cp, rr - cp * cm, one, -cm)?)
}

/// Result of a successful ping-pong verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PingPongCertificate {
    /// Smallest disjointness or nesting gap observed.
    pub min_gap: f64,
}

/// A classical Schottky group given by `k` pairs of disjoint disks.
#[derive(Debug, Clone, PartialEq)]
pub struct SchottkyData<T> {
    pairs: Vec<(Circle<T>, Circle<T>)>,
    generators: Vec<MoebiusMap<T>>,
    /// Letter maps indexed by alphabet code.
    letters: Vec<MoebiusMap<T>>,
    /// `(center, radius)` indexed by [`DiskLabel::index`].
    disks: Vec<(Complex<T>, T)>,
}

impl<T: Real> SchottkyData<T> {
    /// Builds the group from `(D⁻, D⁺)` circle pairs. Checks only that each
    /// pair is disjoint; use [`verify_ping_pong`](Self::verify_ping_pong)
    /// for the full certificate.
    pub fn from_pairs(pairs: Vec<(Circle<T>, Circle<T>)>) -> Result<Self, SchottkyError> {
        if pairs.is_empty() {
            return Err(SchottkyError::NoGenerators);
        }
        let mut generators = Vec::with_capacity(pairs.len());
        let mut disks = Vec::with_capacity(2 * pairs.len());
        for (j, (minus, plus)) in pairs.iter().enumerate() {
            let g = generator_from_circle_pair(minus, plus).map_err(|e| match e {
                SchottkyError::OverlappingDisks { gap, .. } => SchottkyError::OverlappingDisks {
                    first: DiskLabel {
                        generator: j,
                        side: Side::Minus,
                    },
                    second: DiskLabel {
                        generator: j,
                        side: Side::Plus,
                    },
                    gap,
                },
                other => other,
            })?;
            generators.push(g);
            disks.push(plus.center_radius().expect("checked round"));
            disks.push(minus.center_radius().expect("checked round"));
        }
        let letters = generators
            .iter()
            .flat_map(|g| [*g, g.inverse()])
            .collect();
        Ok(Self {
            pairs,
            generators,
            letters,
            disks,
        })
    }

    /// Convenience constructor from `(center, radius)` pairs.
    pub fn from_disks(
        disks: &[(Disk<T>, Disk<T>)],
    ) -> Result<Self, SchottkyError> {
        let pairs = disks
            .iter()
            .map(|&((cm, rm), (cp, rp))| Ok((Circle::new(cm, rm)?, Circle::new(cp, rp)?)))
            .collect::<Result<Vec<_>, GeometryError>>()?;
        Self::from_pairs(pairs)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn pairs(&self) -> &[(Circle<T>, Circle<T>)] {
        &self.pairs
    }

    pub fn generators(&self) -> &[MoebiusMap<T>] {
        &self.generators
    }

    pub fn letter_map(&self, l: Letter) -> &MoebiusMap<T> {
        &self.letters[l.code()]
    }

    pub fn disk(&self, label: DiskLabel) -> (Complex<T>, T) {
        self.disks[label.index()]
    }

    /// All `2k` disks with their labels.
    pub fn disks(&self) -> impl Iterator<Item = (DiskLabel, Complex<T>, T)> + '_ {
        self.disks
            .iter()
            .enumerate()
            .map(|(i, &(c, r))| (DiskLabel::from_index(i), c, r))
    }

    /// Circle bounding the target disk of a letter.
    pub fn target_circle(&self, l: Letter) -> Circle<T> {
        let (c, r) = self.disk(DiskLabel::target_of(l));
        Circle::new(c, r).expect("stored disks are round")
    }

    /// True when `z` lies in the closed union of the `2k` disks.
    pub fn in_some_disk(&self, z: Complex<T>, slack: T) -> bool {
        self.disks.iter().any(|&(c, r)| (z - c).norm() <= r + slack)
    }

    /// Checks pairwise disjointness of the disks and that every letter maps
    /// every disk other than its source strictly inside its target, both
    /// with gap at least `margin`.
    pub fn verify_ping_pong(&self, margin: T) -> Result<PingPongCertificate, SchottkyError> {
        let mut min_gap = T::infinity();
        let labels: Vec<_> = self.disks().collect();
        for (i, &(li, ci, ri)) in labels.iter().enumerate() {
            for &(lj, cj, rj) in &labels[i + 1..] {
                let gap = (ci - cj).norm() - ri - rj;
                if !(gap >= margin) {
                    return Err(SchottkyError::OverlappingDisks {
                        first: li,
                        second: lj,
                        gap: gap.to_f64().unwrap_or(f64::NAN),
                    });
                }
                min_gap = min_gap.min(gap);
            }
        }
        for code in 0..2 * self.rank() {
            let l = Letter::from_code(code);
            let source = DiskLabel::source_of(l);
            let (ct, rt) = self.disk(DiskLabel::target_of(l));
            for &(label, c, r) in &labels {
                if label == source {
                    continue;
                }
                let img = Circle::new(c, r)?.transformed(self.letter_map(l));
                let gap = match img.center_radius() {
                    Some((ci, ri)) if img.orientation() > 0 => rt - (ci - ct).norm() - ri,
                    _ => T::neg_infinity(),
                };
                if !(gap >= margin) {
                    return Err(SchottkyError::NestingViolation {
                        letter: l.signed(),
                        disk: label,
                        gap: gap.to_f64().unwrap_or(f64::NAN),
                    });
                }
                min_gap = min_gap.min(gap);
            }
        }
        Ok(PingPongCertificate {
            min_gap: min_gap.to_f64().unwrap_or(f64::NAN),
        })
    }

    /// Product of the letter maps of `w`.
    pub fn evaluate(&self, w: &Word) -> MoebiusMap<T> {
        w.letters()
            .iter()
            .fold(MoebiusMap::identity(), |acc, &l| acc.compose(self.letter_map(l)))
    }

    /// Nested disk of a nonempty word `l₁⋯lₙ`: the image of the target disk
    /// of `lₙ` under `l₁⋯lₙ₋₁`. Depth-`n` disks are nested in depth-`n−1` ones.
    pub fn nested_disk(&self, w: &Word) -> Option<(Complex<T>, T)> {
        let last = w.last()?;
        let prefix = Word::from_letters(w.letters()[..w.len() - 1].to_vec()).ok()?;
        self.target_circle(last)
            .transformed(&self.evaluate(&prefix))
            .center_radius()
    }

    /// All nested disks of the given depth, in canonical word order.
    pub fn nested_disks(&self, depth: usize) -> Vec<(Word, Complex<T>, T)> {
        if depth == 0 {
            return Vec::new();
        }
        ReducedWords::with_prefix(self.rank(), depth, depth, &Word::empty())
            .filter_map(|w| self.nested_disk(&w).map(|(c, r)| (w, c, r)))
            .collect()
    }

    /// Limit-set sample: for each reduced word of length `depth`, the image
    /// under the word of the center of its last letter's target disk.
    pub fn limit_set_sample(&self, depth: usize) -> Vec<Complex<T>> {
        ReducedWords::with_prefix(self.rank(), depth.max(1), depth.max(1), &Word::empty())
            .filter_map(|w| {
                let (p, _) = self.disk(DiskLabel::target_of(w.last()?));
                self.evaluate(&w).apply_finite(p)
            })
            .collect()
    }

    /// The conjugate group `h Γ h⁻¹`, pairing the images of the disks under
    /// `h`. The pole of `h` must lie outside every disk.
    pub fn conjugated(&self, h: &MoebiusMap<T>) -> Result<Self, SchottkyError> {
        let pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|(m, p)| (m.transformed(h), p.transformed(h)))
            .collect();
        let mut disks = Vec::with_capacity(self.disks.len());
        for (m, p) in &pairs {
            for circle in [p, m] {
                if circle.orientation() < 0 {
                    return Err(SchottkyError::LineNotAllowed);
                }
                disks.push(circle.center_radius().ok_or(SchottkyError::LineNotAllowed)?);
            }
        }
        let hinv = h.inverse();
        let generators: Vec<_> = self
            .generators
            .iter()
            .map(|g| h.compose(g).compose(&hinv))
            .collect();
        let letters = generators
            .iter()
            .flat_map(|g| [*g, g.inverse()])
            .collect();
        Ok(Self {
            pairs,
            generators,
            letters,
            disks,
        })
    }

    /// The same group with generators permuted and optionally inverted:
    /// new generator `j` is old generator `perm[j]`, swapped sides if `flip[j]`.
    pub fn relabeled(&self, perm: &[usize], flip: &[bool]) -> Result<Self, SchottkyError> {
        let pairs = perm
            .iter()
            .zip(flip)
            .map(|(&j, &f)| {
                let (m, p) = self.pairs[j];
                if f {
                    (p, m)
                } else {
                    (m, p)
                }
            })
            .collect();
        Self::from_pairs(pairs)
    }
}

/// A `d`-tuple of Schottky representations of one free group.
#[derive(Debug, Clone, PartialEq)]
pub struct JoiningSpec<T> {
    reps: Vec<SchottkyData<T>>,
}

impl<T: Real> JoiningSpec<T> {
    pub fn new(reps: Vec<SchottkyData<T>>) -> Result<Self, SchottkyError> {
        let first = reps.first().ok_or(SchottkyError::EmptyJoining)?;
        let k = first.rank();
        for (i, r) in reps.iter().enumerate() {
            if r.rank() != k {
                return Err(SchottkyError::GeneratorCountMismatch {
                    rep: i,
                    expected: k,
                    got: r.rank(),
                });
            }
        }
        Ok(Self { reps })
    }

    /// Builds and ping-pong verifies every representation.
    pub fn verified(reps: Vec<SchottkyData<T>>, margin: T) -> Result<Self, SchottkyError> {
        let spec = Self::new(reps)?;
        spec.verify_ping_pong(margin)?;
        Ok(spec)
    }

    pub fn verify_ping_pong(&self, margin: T) -> Result<Vec<PingPongCertificate>, SchottkyError> {
        self.reps
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.verify_ping_pong(margin)
                    .map_err(|e| SchottkyError::Representation {
                        rep: i,
                        source: Box::new(e),
                    })
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn rank(&self) -> usize {
        self.reps[0].rank()
    }

    pub fn reps(&self) -> &[SchottkyData<T>] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &SchottkyData<T> {
        &self.reps[i]
    }

    /// `(ρ₁(w), …, ρ_d(w))`.
    pub fn evaluate_word(&self, w: &Word) -> GroupElement<T> {
        GroupElement::new(self.reps.iter().map(|r| r.evaluate(w)).collect(), w.clone())
    }

    /// The joining restricted to a subset of factors, in the given order.
    pub fn select(&self, factors: &[usize]) -> Result<Self, SchottkyError> {
        Self::new(factors.iter().map(|&i| self.reps[i].clone()).collect())
    }

    /// True when `o = (0, 1)` lies outside every hemisphere over a pairing
    /// disk; then `d(γo, o) >= −log r` for the nested disk of `γ`.
    pub fn basepoint_outside_domes(&self) -> bool {
        self.reps.iter().all(|rep| {
            rep.disks()
                .all(|(_, c, r)| c.norm_sqr() + T::one() > r * r)
        })
    }
}

/// Certificate attached to an admissible seed torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SliceCertificate {
    /// Every factor circle stays outside the nested disks, so each slice
    /// `C_i ∩ Λ_i` is empty and the boundary-map condition holds vacuously.
    EmptySlice {
        depth: usize,
        min_gap: f64,
        local_finiteness: Vec<LocalFiniteness>,
    },
    /// Accepted on the caller's word; nothing was checked.
    UserAsserted,
}

/// Empirical local-finiteness witness for one factor orbit `ρ_i(Γ)·C_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalFiniteness {
    pub factor: usize,
    /// Half-width of the square window `[−w, w]²` the bands are counted in.
    pub window: f64,
    /// `(b, n)`: `n` orbit circles of radius in `[2^{−b−1}, 2^{−b})` meet the window.
    pub bands: Vec<(i32, u64)>,
    /// Circles of word length beyond the enumeration depth have radius
    /// below this value, so every band above it is final.
    pub frontier_radius: f64,
}

/// A seed torus `T₀` together with its admissibility certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedTorus<T> {
    torus: Torus<T>,
    certificate: SliceCertificate,
}

impl<T: Real> SeedTorus<T> {
    /// Accepts a seed without checks (nonempty slices have no finite
    /// certificate). Logs a warning.
    pub fn user_asserted(torus: Torus<T>) -> Self {
        log::warn!("seed torus accepted on a user-asserted admissibility certificate");
        Self {
            torus,
            certificate: SliceCertificate::UserAsserted,
        }
    }

    pub fn torus(&self) -> &Torus<T> {
        &self.torus
    }

    pub fn certificate(&self) -> &SliceCertificate {
        &self.certificate
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.certificate, SliceCertificate::EmptySlice { .. })
    }
}

/// Certifies an empty-slice admissible seed: each factor circle keeps
/// distance `> margin` from every nested disk of depth `1..=depth` of its
/// representation. Also records a local-finiteness witness per factor.
pub fn admissible_seed_check<T: Real>(
    spec: &JoiningSpec<T>,
    seed: Torus<T>,
    depth: usize,
    margin: T,
) -> Result<SeedTorus<T>, SchottkyError> {
    if seed.dim() != spec.dim() {
        return Err(SchottkyError::SeedDimension {
            expected: spec.dim(),
            got: seed.dim(),
        });
    }
    let depth = depth.max(1);
    let mut min_gap = T::infinity();
    let mut witnesses = Vec::with_capacity(spec.dim());
    for (i, (rep, circle)) in spec.reps().iter().zip(seed.circles()).enumerate() {
        for w in ReducedWords::new(rep.rank(), depth) {
            let Some((c, r)) = rep.nested_disk(&w) else {
                continue;
            };
            let gap = circle.gap_to_disk(c, r);
            if !(gap > margin) {
                return Err(SchottkyError::SeedEntersDisk {
                    factor: i,
                    word: w,
                    gap: gap.to_f64().unwrap_or(f64::NAN),
                });
            }
            min_gap = min_gap.min(gap);
        }
        witnesses.push(local_finiteness(rep, circle, i, depth)?);
    }
    Ok(SeedTorus {
        torus: seed,
        certificate: SliceCertificate::EmptySlice {
            depth,
            min_gap: min_gap.to_f64().unwrap_or(f64::NAN),
            local_finiteness: witnesses,
        },
    })
}

fn local_finiteness<T: Real>(
    rep: &SchottkyData<T>,
    circle: &Circle<T>,
    factor: usize,
    depth: usize,
) -> Result<LocalFiniteness, SchottkyError> {
    let extent = rep
        .disks()
        .map(|(_, c, r)| c.re.abs().max(c.im.abs()) + r)
        .fold(T::zero(), T::max);
    let window = extent + T::one();
    let top_radius = rep.disks().map(|(_, _, r)| r).fold(T::zero(), T::max);
    let frontier = rep
        .nested_disks(depth)
        .into_iter()
        .map(|(_, _, r)| r)
        .fold(T::zero(), T::max);
    if depth > 1 && !(frontier < top_radius) {
        return Err(SchottkyError::NoContraction { factor, depth });
    }
    let mut bands = std::collections::BTreeMap::<i32, u64>::new();
    let words = std::iter::once(Word::empty()).chain(ReducedWords::new(rep.rank(), depth));
    for w in words {
        let img = circle.transformed(&rep.evaluate(&w));
        let Some((c, r)) = img.center_radius() else {
            continue;
        };
        if (c.re.abs() - r) > window || (c.im.abs() - r) > window {
            continue;
        }
        let band = (-r.log2()).floor().to_i32().unwrap_or(i32::MAX);
        *bands.entry(band).or_default() += 1;
    }
    Ok(LocalFiniteness {
        factor,
        window: window.to_f64().unwrap_or(f64::NAN),
        bands: bands.into_iter().collect(),
        frontier_radius: frontier.to_f64().unwrap_or(f64::NAN),
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn circle(re: f64, im: f64, r: f64) -> Circle<f64> {
        Circle::new(c(re, im), r).unwrap()
    }

    fn boundary_lands_on(minus: (f64, f64, f64), plus: (f64, f64, f64)) {
        let cm = circle(minus.0, minus.1, minus.2);
        let cp = circle(plus.0, plus.1, plus.2);
        let g = generator_from_circle_pair(&cm, &cp).unwrap();
        for j in 0..16 {
            let t = std::f64::consts::TAU * j as f64 / 16.0;
            let z = c(minus.0, minus.1) + Complex::from_polar(minus.2, t);
            let w = g.apply_finite(z).unwrap();
            assert!(((w - c(plus.0, plus.1)).norm() - plus.2).abs() < 1e-10);
        }
        // exterior goes inside
        let far = g.apply_finite(c(100.0, -50.0)).unwrap();
        assert!((far - c(plus.0, plus.1)).norm() < plus.2);
    }

    #[test]
    fn pairing_generators_map_boundaries() {
        boundary_lands_on((-2.0, 0.0, 0.5), (2.0, 0.0, 0.5));
        boundary_lands_on((0.0, 0.0, 1.0), (4.0, 0.0, 1.0));
        let g = generator_from_circle_pair(&circle(-2.0, 0.0, 0.5), &circle(2.0, 0.0, 0.5)).unwrap();
        let w = g.apply_finite(c(1.0, 0.0)).unwrap();
        assert!((w - c(2.0 + 0.25 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn intersecting_pair_rejected() {
        let err = generator_from_circle_pair(&circle(0.0, 0.0, 1.0), &circle(1.0, 0.0, 1.0));
        assert!(matches!(err, Err(SchottkyError::OverlappingDisks { .. })));
        let line = Circle::line(c(1.0, 0.0), 0.0).unwrap();
        assert!(matches!(
            generator_from_circle_pair(&line, &circle(3.0, 0.0, 1.0)),
            Err(SchottkyError::LineNotAllowed)
        ));
    }

    #[test]
    fn fixture_a_passes_ping_pong() {
        let spec = fixtures::fixture_a();
        let certs = spec.verify_ping_pong(DEFAULT_PING_PONG_MARGIN).unwrap();
        assert_eq!(certs.len(), 2);
        assert!(certs.iter().all(|c| c.min_gap >= 0.1), "{certs:?}");
    }

    #[test]
    fn overlapping_disks_name_the_pair() {
        let rep = SchottkyData::from_disks(&[
            ((c(-2.0, 0.0), 0.5), (c(2.0, 0.0), 0.5)),
            ((c(0.0, -2.0), 0.5), (c(1.8, 0.3), 0.5)),
        ])
        .unwrap();
        match rep.verify_ping_pong(1e-3) {
            Err(SchottkyError::OverlappingDisks { first, second, .. }) => {
                assert_eq!(first.to_string(), "D1+");
                assert_eq!(second.to_string(), "D2+");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cyclic_group_passes() {
        let rep = SchottkyData::from_disks(&[((c(-2.0, 0.0), 0.5), (c(2.0, 0.0), 0.5))]).unwrap();
        assert!(rep.verify_ping_pong(1e-3).is_ok());
    }

    #[test]
    fn nested_disks_shrink_and_nest() {
        let spec = fixtures::fixture_a();
        let rep = spec.rep(0);
        for depth in 1..6 {
            for (w, c0, r0) in rep.nested_disks(depth + 1) {
                let parent = Word::from_letters(w.letters()[..depth].to_vec()).unwrap();
                let (c1, r1) = rep.nested_disk(&parent).unwrap();
                assert!((c0 - c1).norm() + r0 < r1, "{w}");
            }
        }
    }

    #[test]
    fn limit_set_sample_is_nested() {
        let spec = fixtures::fixture_a();
        let rep = spec.rep(0);
        for p in rep.limit_set_sample(5) {
            assert!(rep.in_some_disk(p, 0.0));
        }
        let depth = 6;
        let words: Vec<Word> = ReducedWords::with_prefix(2, depth, depth, &Word::empty()).collect();
        let pts = rep.limit_set_sample(depth);
        for (w, p) in words.iter().zip(&pts) {
            let (c0, r0) = rep.nested_disk(w).unwrap();
            assert!((p - c0).norm() <= r0);
        }
        let diam = rep
            .nested_disks(10)
            .iter()
            .map(|(_, _, r)| 2.0 * r)
            .fold(0.0, f64::max);
        assert!(diam < 1e-3, "{diam}");
    }

    #[test]
    fn seed_checks() {
        let spec = fixtures::fixture_a();
        let seed = fixtures::fixture_a_seed();
        let cert = admissible_seed_check(&spec, seed, 8, 0.05).unwrap();
        match cert.certificate() {
            SliceCertificate::EmptySlice {
                min_gap,
                local_finiteness,
                ..
            } => {
                assert!((min_gap - 0.5).abs() < 1e-12, "{min_gap}");
                assert_eq!(local_finiteness.len(), 2);
                assert!(local_finiteness[0].frontier_radius < 1e-3);
            }
            other => panic!("{other:?}"),
        }

        let bad = Torus::new(vec![circle(2.0, 0.0, 0.4), circle(0.0, 0.0, 1.0)]).unwrap();
        match admissible_seed_check(&spec, bad, 8, 0.05) {
            Err(SchottkyError::SeedEntersDisk { factor, word, .. }) => {
                assert_eq!(factor, 0);
                assert_eq!(word.to_string(), "1");
            }
            other => panic!("{other:?}"),
        }

        let single = spec.select(&[0]).unwrap();
        let seed = Torus::new(vec![circle(0.3, -0.2, 0.7)]).unwrap();
        assert!(admissible_seed_check(&single, seed, 6, 0.01).is_ok());
    }

    #[test]
    fn evaluation_is_a_homomorphism() {
        let spec = fixtures::fixture_a();
        let words: Vec<Word> = ReducedWords::new(2, 3).collect();
        for u in words.iter().step_by(7) {
            let gu = spec.evaluate_word(u);
            if u.len() <= 2 {
                let inv = gu.compose(&spec.evaluate_word(&u.inverse()));
                for m in inv.factors() {
                    assert!(m.approx_eq(&MoebiusMap::identity(), 1e-12));
                }
            }
            for v in words.iter().step_by(5) {
                let uv = u.concat_reduced(v);
                let lhs = spec.evaluate_word(&uv);
                let gv = spec.evaluate_word(v);
                let rhs = gu.compose(&gv);
                let size = |m: &MoebiusMap<f64>| m.entries().iter().map(|e| e.norm()).fold(1.0, f64::max);
                for (i, (a, b)) in lhs.factors().iter().zip(rhs.factors()).enumerate() {
                    let scale = size(&gu.factors()[i]) * size(&gv.factors()[i]);
                    assert!(a.approx_eq(b, 1e-12 * scale), "{u} {v}");
                }
            }
        }
        let e = spec.evaluate_word(&Word::empty());
        assert!(e.factors().iter().all(|m| m.approx_eq(&MoebiusMap::identity(), 0.0)));
    }
}
