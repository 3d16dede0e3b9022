//! Orbit enumeration `γ ↦ γ·T₀`, threshold pruning and region counts.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontier::LowerBoundSet;
use crate::geometry::{AVector, Circle, GeometryError, LinearForm, Torus};
use crate::schottky::{JoiningSpec, SeedTorus};
use crate::traverse::{self, next_letters, Control, Node};
use crate::word::Word;

/// Radii below this abort the subtree.
pub const DEGENERATE_RADIUS: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("invalid enumeration config: {field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("seed has {seed} factors but the joining has {spec}")]
    DimensionMismatch { seed: usize, spec: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("records are complete only for psi < {complete}, but R = {requested} was requested")]
    Coverage { requested: f64, complete: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorCircle {
    pub center: Complex64,
    pub radius: f64,
}

/// One orbit torus `γ·T₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusRecord {
    pub word: Word,
    pub factors: Vec<FactorCircle>,
    pub v: AVector<f64>,
    pub psi_value: f64,
    pub cartan: AVector<f64>,
}

impl TorusRecord {
    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn volume(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| std::f64::consts::TAU * f.radius)
            .product()
    }
}

/// Axis-parallel rectangle in one factor of `ℂ^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarBox {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl PlanarBox {
    pub fn new(re: [f64; 2], im: [f64; 2]) -> Self {
        Self { re, im }
    }

    pub fn square(half: f64) -> Self {
        Self::new([-half, half], [-half, half])
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.re[0] <= z.re && z.re <= self.re[1] && self.im[0] <= z.im && z.im <= self.im[1]
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.re[1] < other.re[0]
            || other.re[1] < self.re[0]
            || self.im[1] < other.im[0]
            || other.im[1] < self.im[0]
    }

    /// Whether the circle (the curve, not the disk) meets the closed box:
    /// the nearest point of the box is within `r` of the center and the
    /// farthest corner is at least `r` away.
    pub fn meets_circle(&self, center: Complex64, r: f64) -> bool {
        let dx = (self.re[0] - center.re).max(0.0).max(center.re - self.re[1]);
        let dy = (self.im[0] - center.im).max(0.0).max(center.im - self.im[1]);
        let near = dx.hypot(dy);
        let fx = (center.re - self.re[0]).abs().max((self.re[1] - center.re).abs());
        let fy = (center.im - self.im[0]).abs().max((self.im[1] - center.im).abs());
        let far = fx.hypot(fy);
        near <= r && r <= far
    }
}

/// A bounded test region `E ⊂ ℂ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Region {
    /// Product of one planar box per factor.
    Boxes { boxes: Vec<PlanarBox> },
    /// Euclidean ball in `ℂ^d = ℝ^{2d}`.
    Ball { center: Vec<Complex64>, radius: f64 },
}

impl Region {
    pub fn product(boxes: Vec<PlanarBox>) -> Self {
        Self::Boxes { boxes }
    }

    pub fn cube(d: usize, half: f64) -> Self {
        Self::Boxes {
            boxes: vec![PlanarBox::square(half); d],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Boxes { boxes } => boxes.len(),
            Self::Ball { center, .. } => center.len(),
        }
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        match self {
            Self::Boxes { boxes } => boxes.iter().zip(z).all(|(b, &p)| b.contains(p)),
            Self::Ball { center, radius } => {
                let d2: f64 = center.iter().zip(z).map(|(c, p)| (p - c).norm_sqr()).sum();
                d2 <= radius * radius
            }
        }
    }

    /// `T ∩ E ≠ ∅`.
    pub fn meets(&self, factors: &[FactorCircle]) -> bool {
        match self {
            Self::Boxes { boxes } => boxes
                .iter()
                .zip(factors)
                .all(|(b, f)| b.meets_circle(f.center, f.radius)),
            Self::Ball { center, radius } => {
                let d2: f64 = center
                    .iter()
                    .zip(factors)
                    .map(|(p, f)| {
                        let t = (p - f.center).norm() - f.radius;
                        t * t
                    })
                    .sum();
                d2 <= radius * radius
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            Self::Boxes { boxes } => {
                for (i, b) in boxes.iter().enumerate() {
                    let ok = [b.re, b.im]
                        .iter()
                        .all(|iv| iv[0].is_finite() && iv[1].is_finite() && iv[0] <= iv[1]);
                    if !ok {
                        return Err(format!("box {i} is not a bounded interval pair"));
                    }
                }
                Ok(())
            }
            Self::Ball { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0)
                    || center.iter().any(|c| !c.re.is_finite() || !c.im.is_finite())
                {
                    Err("ball needs a finite center and positive radius".into())
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub fn torus_intersects_region(rec: &TorusRecord, e: &Region) -> bool {
    e.meets(&rec.factors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumMode {
    Exhaustive,
    Pruned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumConfig {
    pub max_depth: usize,
    pub psi: LinearForm<f64>,
    /// Threshold `R`; `∞` means none.
    pub r_threshold: f64,
    pub prune_slack: f64,
    pub mode: EnumMode,
    /// 0 uses every available core.
    pub threads: usize,
}

impl EnumConfig {
    pub fn exhaustive(max_depth: usize, psi: LinearForm<f64>) -> Self {
        Self {
            max_depth,
            psi,
            r_threshold: f64::INFINITY,
            prune_slack: 0.0,
            mode: EnumMode::Exhaustive,
            threads: 1,
        }
    }

    pub fn pruned(max_depth: usize, psi: LinearForm<f64>, r: f64, kappa: f64) -> Self {
        Self {
            max_depth,
            psi,
            r_threshold: r,
            prune_slack: kappa,
            mode: EnumMode::Pruned,
            threads: 1,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_threshold(mut self, r: f64) -> Self {
        self.r_threshold = r;
        self
    }

    pub fn validate(&self, d: usize) -> Result<(), OrbitError> {
        if self.psi.dim() != d {
            return Err(OrbitError::Config {
                field: "psi",
                reason: format!("expected {d} coefficients, got {}", self.psi.dim()),
            });
        }
        self.psi.check_positive()?;
        if self.mode == EnumMode::Pruned {
            if !(self.prune_slack > 0.0 && self.prune_slack.is_finite()) {
                return Err(OrbitError::Config {
                    field: "prune_slack",
                    reason: "pruned mode requires a finite slack > 0".into(),
                });
            }
            if !self.r_threshold.is_finite() {
                return Err(OrbitError::Config {
                    field: "r_threshold",
                    reason: "pruned mode requires a finite threshold".into(),
                });
            }
        }
        Ok(())
    }

    fn thread_count(&self) -> usize {
        if self.threads == 0 {
            traverse::default_threads()
        } else {
            self.threads
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthSummary {
    pub depth: usize,
    pub records: u64,
    pub min_psi: f64,
    pub max_psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumStats {
    pub records: u64,
    /// `n₀`: orbit tori with a line factor, not counted.
    pub excluded_lines: u64,
    pub degenerate_aborts: u64,
    pub pruned_subtrees: u64,
    pub coverage_warnings: u64,
    pub dedup_collisions: u64,
    /// Key matches the stabilizer test showed to be distinct tori.
    pub dedup_unresolved: u64,
    /// Smallest `ψ(v)` among records at `max_depth`.
    pub frontier_psi: f64,
    /// Certified: every orbit torus with `ψ(v) < complete_below` was visited.
    pub complete_below: f64,
    pub per_depth: Vec<DepthSummary>,
    /// Lower bounds for `v` over every unvisited subtree.
    #[serde(skip)]
    pub frontier: LowerBoundSet,
}

impl EnumStats {
    fn new() -> Self {
        Self {
            records: 0,
            excluded_lines: 0,
            degenerate_aborts: 0,
            pruned_subtrees: 0,
            coverage_warnings: 0,
            dedup_collisions: 0,
            dedup_unresolved: 0,
            frontier_psi: f64::INFINITY,
            complete_below: f64::INFINITY,
            per_depth: Vec::new(),
            frontier: LowerBoundSet::default(),
        }
    }

    /// Certified completeness bound for another positive form.
    pub fn complete_below_for(&self, psi: &LinearForm<f64>) -> f64 {
        self.frontier.floor(psi.coeffs())
    }

    fn note_record(&mut self, depth: usize, psi: f64) {
        self.records += 1;
        if self.per_depth.len() <= depth {
            self.per_depth.extend((self.per_depth.len()..=depth).map(|d| DepthSummary {
                depth: d,
                records: 0,
                min_psi: f64::INFINITY,
                max_psi: f64::NEG_INFINITY,
            }));
        }
        let s = &mut self.per_depth[depth];
        s.records += 1;
        s.min_psi = s.min_psi.min(psi);
        s.max_psi = s.max_psi.max(psi);
    }

    fn merge(mut self, other: Self) -> Self {
        self.records += other.records;
        self.excluded_lines += other.excluded_lines;
        self.degenerate_aborts += other.degenerate_aborts;
        self.pruned_subtrees += other.pruned_subtrees;
        self.coverage_warnings += other.coverage_warnings;
        self.dedup_collisions += other.dedup_collisions;
        self.dedup_unresolved += other.dedup_unresolved;
        self.frontier_psi = self.frontier_psi.min(other.frontier_psi);
        self.complete_below = self.complete_below.min(other.complete_below);
        self.frontier.merge(&other.frontier);
        for s in other.per_depth {
            if self.per_depth.len() <= s.depth {
                self.per_depth.push(s);
            } else {
                let t = &mut self.per_depth[s.depth];
                t.records += s.records;
                t.min_psi = t.min_psi.min(s.min_psi);
                t.max_psi = t.max_psi.max(s.max_psi);
            }
        }
        self
    }
}

/// Per-representation circles bounding every descendant of a node.
struct Bounds {
    /// `targets[i][code]`: target disk of the letter in rep `i`.
    targets: Vec<Vec<Circle<f64>>>,
}

impl Bounds {
    fn new(spec: &JoiningSpec<f64>) -> Self {
        let k = spec.rank();
        let targets = spec
            .reps()
            .iter()
            .map(|rep| {
                (0..2 * k)
                    .map(|c| rep.target_circle(crate::word::Letter::from_code(c)))
                    .collect()
            })
            .collect();
        Self { targets }
    }

    /// Lower bounds for `v` over all proper descendants of `node`, one per
    /// next letter `l`: each descendant lies, factor by factor, inside
    /// `g_w(D_l)`. Returns `min_l ψ(b_l)`, which is a floor for `ψ(v)`
    /// because `ψ` has positive coefficients.
    fn subtree_floor(&self, node: &Node<f64>, psi: &LinearForm<f64>, k: usize, out: &mut LowerBoundSet) -> f64 {
        let mut floor = f64::INFINITY;
        let mut b = vec![0.0; node.maps.len()];
        for l in next_letters(k, node.word.last()) {
            for (i, g) in node.maps.iter().enumerate() {
                let r = self.targets[i][l.code()].transformed(g).radius();
                let x = -r.ln();
                b[i] = x - 1e-9 * x.abs();
            }
            out.push(&b);
            floor = floor.min(psi.eval(&b));
        }
        floor
    }
}

fn record_of(node: &Node<f64>, seed: &SeedTorus<f64>, psi: &LinearForm<f64>) -> Option<TorusRecord> {
    let mut factors = Vec::with_capacity(node.maps.len());
    for (g, c) in node.maps.iter().zip(seed.torus().circles()) {
        let (center, radius) = c.transformed(g).center_radius()?;
        factors.push(FactorCircle { center, radius });
    }
    let v = AVector::new(factors.iter().map(|f| -f.radius.ln()).collect());
    let psi_value = psi.eval(v.as_slice());
    let cartan = AVector::new(node.maps.iter().map(|m| m.hyp_displacement()).collect());
    Some(TorusRecord {
        word: node.word.clone(),
        factors,
        v,
        psi_value,
        cartan,
    })
}

/// Runs the enumeration and folds every emitted record into per-subtree
/// accumulators, merged left to right in canonical subtree order.
pub fn enumerate_fold<A, F, S, M>(
    spec: &JoiningSpec<f64>,
    seed: &SeedTorus<f64>,
    cfg: &EnumConfig,
    make: F,
    sink: S,
    merge: M,
) -> Result<(A, EnumStats), OrbitError>
where
    A: Send,
    F: Fn() -> A + Sync,
    S: Fn(&TorusRecord, &mut A) + Sync,
    M: FnMut(A, A) -> A,
{
    let d = spec.dim();
    if seed.torus().dim() != d {
        return Err(OrbitError::DimensionMismatch {
            seed: seed.torus().dim(),
            spec: d,
        });
    }
    cfg.validate(d)?;
    let k = spec.rank();
    let bounds = Bounds::new(spec);
    let cut = cfg.r_threshold + cfg.prune_slack;

    let visit = |node: &Node<f64>, (acc, stats): &mut (A, EnumStats)| {
        let depth = node.word.len();
        let at_frontier = depth == cfg.max_depth;
        match record_of(node, seed, &cfg.psi) {
            None => stats.excluded_lines += 1,
            Some(rec) => {
                if rec.factors.iter().any(|f| !(f.radius >= DEGENERATE_RADIUS)) {
                    log::warn!("radius below {DEGENERATE_RADIUS:e} at word {}; subtree aborted", rec.word);
                    stats.degenerate_aborts += 1;
                    bounds.subtree_floor(node, &cfg.psi, k, &mut stats.frontier);
                    return Control::Skip;
                }
                stats.note_record(depth, rec.psi_value);
                if at_frontier {
                    stats.frontier_psi = stats.frontier_psi.min(rec.psi_value);
                    if rec.psi_value < cfg.r_threshold {
                        stats.coverage_warnings += 1;
                    }
                }
                sink(&rec, acc);
            }
        }
        if at_frontier {
            bounds.subtree_floor(node, &cfg.psi, k, &mut stats.frontier);
            return Control::Skip;
        }
        if cfg.mode == EnumMode::Pruned {
            let mut local = LowerBoundSet::new(d);
            if bounds.subtree_floor(node, &cfg.psi, k, &mut local) > cut {
                stats.pruned_subtrees += 1;
                stats.frontier.merge(&local);
                return Control::Skip;
            }
        }
        Control::Expand
    };

    let parts = traverse::traverse(
        spec,
        cfg.max_depth,
        cfg.thread_count(),
        || {
            let mut stats = EnumStats::new();
            stats.frontier = LowerBoundSet::new(d);
            (make(), stats)
        },
        visit,
    );
    let mut merge = merge;
    let (acc, mut stats) = parts
        .reduce(|(a, s), (b, t)| (merge(a, b), s.merge(t)))
        .expect("head part always exists");
    stats.frontier.compress();
    stats.complete_below = stats.complete_below_for(&cfg.psi);
    Ok((acc, stats))
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Canonical (length-lex) order.
    pub records: Vec<TorusRecord>,
    pub stats: EnumStats,
}

/// Collects the whole stream in canonical order and runs the dedup layer.
pub fn enumerate_tori(
    spec: &JoiningSpec<f64>,
    seed: &SeedTorus<f64>,
    cfg: &EnumConfig,
) -> Result<Enumeration, OrbitError> {
    let (mut records, mut stats) = enumerate_fold(
        spec,
        seed,
        cfg,
        Vec::new,
        |r, acc: &mut Vec<TorusRecord>| acc.push(r.clone()),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )?;
    records.sort_by(|a, b| a.word.cmp(&b.word));
    let dedup = dedup(spec, seed.torus(), &records);
    stats.dedup_collisions = dedup.collisions;
    stats.dedup_unresolved = dedup.unresolved;
    Ok(Enumeration { records, stats })
}

/// Nine significant digits, packed as `(decimal exponent, mantissa)`.
fn quantize(x: f64) -> i64 {
    if x == 0.0 || !x.is_finite() {
        return 0;
    }
    let e = x.abs().log10().floor() as i64;
    let m = (x / 10f64.powi(e as i32) * 1e8).round() as i64;
    (e << 40) ^ m
}

/// Center coordinate on a grid of step `1e−3·r`.
fn grid_coordinate(x: f64, r: f64) -> i64 {
    ((x / r * 1e3).round() + 0.0).to_bits() as i64
}

/// Canonical key of a record: per factor, the radius rounded at `1e−9`
/// relative and the center on a grid of step `1e−3` radii. Distinct orbit
/// circles are disjoint, so their centers are at least a radius apart.
pub fn canonical_key(rec: &TorusRecord) -> Vec<i64> {
    rec.factors
        .iter()
        .flat_map(|f| {
            [
                quantize(f.radius),
                grid_coordinate(f.center.re, f.radius),
                grid_coordinate(f.center.im, f.radius),
            ]
        })
        .collect()
}

/// Pairs `(first, later)` of records with equal canonical keys and different words.
pub fn key_matches(records: &[TorusRecord]) -> Vec<(usize, usize)> {
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::with_capacity(records.len());
    let mut out = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let key = canonical_key(r);
        match seen.get(&key) {
            Some(&j) if records[j].word != r.word => out.push((j, i)),
            Some(_) => {}
            None => {
                seen.insert(key, i);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DedupReport {
    pub collisions: u64,
    /// Matches whose tori are distinct but closer than the key resolves.
    pub unresolved: u64,
}

/// `h·T₀ = T₀` factor by factor, to `1e−9` relative.
fn fixes_seed(spec: &JoiningSpec<f64>, seed: &Torus<f64>, h: &Word) -> bool {
    let g = spec.evaluate_word(h);
    seed.circles().iter().zip(g.factors()).all(|(c, m)| {
        match (c.center_radius(), c.transformed(m).center_radius()) {
            (Some((z0, r0)), Some((z1, r1))) => {
                let scale = r0.max(z0.norm());
                (r1 - r0).abs() <= 1e-9 * r0 && (z1 - z0).norm() <= 1e-9 * scale
            }
            _ => false,
        }
    })
}

/// Key matches settled by `h = w⁻¹w′`: the two tori agree exactly when `h`
/// fixes the seed torus. `h` drops the common prefix, so the test is well
/// conditioned even where the records' own centers are not.
pub fn dedup(spec: &JoiningSpec<f64>, seed: &Torus<f64>, records: &[TorusRecord]) -> DedupReport {
    let mut report = DedupReport::default();
    for (j, i) in key_matches(records) {
        let h = records[j].word.inverse().concat_reduced(&records[i].word);
        if fixes_seed(spec, seed, &h) {
            report.collisions += 1;
        } else {
            log::debug!("key match {} / {} resolved by the stabilizer test", records[j].word, records[i].word);
            report.unresolved += 1;
        }
    }
    report
}

/// `N_R(P, ψ, E)` over a stream certified complete below `complete_below`.
pub fn count_nr<'a>(
    records: impl IntoIterator<Item = &'a TorusRecord>,
    psi: &LinearForm<f64>,
    r: f64,
    e: &Region,
    complete_below: f64,
) -> Result<u64, OrbitError> {
    if r > complete_below {
        return Err(OrbitError::Coverage {
            requested: r,
            complete: complete_below,
        });
    }
    Ok(records
        .into_iter()
        .filter(|rec| psi.eval(rec.v.as_slice()) < r && e.meets(&rec.factors))
        .count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schottky::admissible_seed_check;

    fn seed_a() -> SeedTorus<f64> {
        admissible_seed_check(&fixtures::fixture_a(), fixtures::fixture_a_seed(), 4, 0.01).unwrap()
    }

    fn sigma() -> LinearForm<f64> {
        LinearForm::sum_form(2)
    }

    #[test]
    fn depth_zero_is_the_seed() {
        let e = enumerate_tori(&fixtures::fixture_a(), &seed_a(), &EnumConfig::exhaustive(0, sigma())).unwrap();
        assert_eq!(e.records.len(), 1);
        assert!(e.records[0].word.is_empty());
        assert_eq!(e.records[0].v.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn exhaustive_count_matches_word_count() {
        let e = enumerate_tori(&fixtures::fixture_a(), &seed_a(), &EnumConfig::exhaustive(6, sigma())).unwrap();
        let expected = 1 + (1..=6).map(|j| 4 * 3u64.pow(j - 1)).sum::<u64>();
        assert_eq!(e.records.len() as u64, expected);
        assert_eq!(e.stats.records, expected);
        assert_eq!(e.stats.dedup_collisions, 0);
        assert_eq!(e.stats.excluded_lines, 0);
        assert!(e.records.windows(2).all(|w| w[0].word < w[1].word));
    }

    #[test]
    fn record_invariants() {
        let e = enumerate_tori(&fixtures::fixture_b(), &seed_a(), &EnumConfig::exhaustive(5, sigma())).unwrap();
        for r in &e.records {
            for (f, v) in r.factors.iter().zip(r.v.as_slice()) {
                assert!(f.radius > 0.0);
                assert!((v + f.radius.ln()).abs() < 1e-12);
            }
            let tau2 = std::f64::consts::TAU.powi(2);
            let rel = (r.volume() - tau2 * (-r.v.sum()).exp()) / r.volume();
            assert!(rel.abs() < 1e-10);
        }
    }

    #[test]
    fn pruned_agrees_with_exhaustive_below_threshold() {
        let (spec, seed) = (fixtures::fixture_a(), seed_a());
        let r = 16.0;
        let full = enumerate_tori(&spec, &seed, &EnumConfig::exhaustive(7, sigma())).unwrap();
        let pruned = enumerate_tori(&spec, &seed, &EnumConfig::pruned(7, sigma(), r, 2.0)).unwrap();
        assert!(pruned.stats.pruned_subtrees > 0);
        let below = |e: &Enumeration| -> Vec<Word> {
            e.records.iter().filter(|x| x.psi_value <= r).map(|x| x.word.clone()).collect()
        };
        assert_eq!(below(&full), below(&pruned));
    }

    #[test]
    fn complete_below_is_sound() {
        let (spec, seed) = (fixtures::fixture_b(), seed_a());
        let shallow = enumerate_tori(&spec, &seed, &EnumConfig::exhaustive(5, sigma())).unwrap();
        let deep = enumerate_tori(&spec, &seed, &EnumConfig::exhaustive(8, sigma())).unwrap();
        let cut = shallow.stats.complete_below;
        assert!(cut.is_finite() && cut > 0.0);
        let n = |e: &Enumeration| e.records.iter().filter(|r| r.psi_value < cut).count();
        assert_eq!(n(&shallow), n(&deep));
    }

    #[test]
    fn first_factor_radius_decreases_along_paths() {
        let e = enumerate_tori(&fixtures::fixture_a(), &seed_a(), &EnumConfig::exhaustive(6, sigma())).unwrap();
        let radius: HashMap<&Word, f64> = e.records.iter().map(|r| (&r.word, r.factors[0].radius)).collect();
        for r in e.records.iter().filter(|r| r.word.len() >= 2) {
            let mut parent = r.word.clone();
            parent.pop();
            assert!(r.factors[0].radius < radius[&parent]);
        }
    }

    #[test]
    fn box_tests() {
        let unit = FactorCircle { center: Complex64::new(0.0, 0.0), radius: 1.0 };
        let big = Region::cube(2, 10.0);
        assert!(big.meets(&[unit, unit]));
        let far = Region::product(vec![PlanarBox::new([2.0, 3.0], [0.0, 1.0]), PlanarBox::square(10.0)]);
        assert!(!far.meets(&[unit, unit]));
        // box strictly inside the disk misses the curve
        let inner = Region::product(vec![PlanarBox::square(0.5), PlanarBox::square(10.0)]);
        assert!(!inner.meets(&[unit, unit]));
        let edge = Region::product(vec![PlanarBox::new([0.9, 2.0], [-0.1, 0.1]), PlanarBox::square(10.0)]);
        assert!(edge.meets(&[unit, unit]));
    }

    #[test]
    fn count_is_monotone_and_checks_coverage() {
        let e = enumerate_tori(&fixtures::fixture_a(), &seed_a(), &EnumConfig::exhaustive(5, sigma())).unwrap();
        let cut = e.stats.complete_below;
        let small = Region::cube(2, 2.0);
        let large = Region::cube(2, 5.0);
        let n = |r, reg| count_nr(&e.records, &sigma(), r, reg, cut).unwrap();
        assert_eq!(n(-1.0, &large), 0);
        assert!(n(cut * 0.5, &small) <= n(cut * 0.5, &large));
        assert!(n(cut * 0.5, &large) <= n(cut, &large));
        assert!(matches!(
            count_nr(&e.records, &sigma(), cut + 1.0, &large, cut),
            Err(OrbitError::Coverage { .. })
        ));
    }

    #[test]
    fn dedup_sees_copies_but_not_mirror_images() {
        let e = enumerate_tori(&fixtures::fixture_a(), &seed_a(), &EnumConfig::exhaustive(9, sigma())).unwrap();
        assert_eq!((e.stats.dedup_collisions, e.stats.dedup_unresolved), (0, 0));
        let mut recs = e.records.clone();
        let mut copy = recs[recs.len() - 1].clone();
        copy.word = Word::empty();
        for f in &mut copy.factors {
            f.center += Complex64::new(f.radius * 1e-7, 0.0);
        }
        recs.push(copy);
        assert_eq!(key_matches(&recs), vec![(recs.len() - 2, recs.len() - 1)]);
    }

    #[test]
    fn stabilized_seed_collides() {
        // a circle through both fixed points of a hyperbolic generator is invariant
        let spec = fixtures::diagonal();
        let g = spec.rep(0).generators()[0];
        let [a, b, c, d] = g.entries();
        let root = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
        let (p, q) = ((a - d + root) / (2.0 * c), (a - d - root) / (2.0 * c));
        let circle = Circle::new((p + q) / 2.0, (p - q).norm() / 2.0).unwrap();
        let seed = Torus::new(vec![circle; 2]).unwrap();
        let record = |w: &str| {
            let word: Word = w.parse().unwrap();
            let factors = seed
                .circles()
                .iter()
                .zip(spec.evaluate_word(&word).factors())
                .map(|(c, m)| {
                    let (center, radius) = c.transformed(m).center_radius().unwrap();
                    FactorCircle { center, radius }
                })
                .collect::<Vec<_>>();
            let v = AVector::new(factors.iter().map(|f| -f.radius.ln()).collect());
            TorusRecord { word, factors, psi_value: v.sum(), cartan: AVector::zeros(2), v }
        };
        let recs = vec![record(""), record("1"), record("2")];
        assert_eq!(dedup(&spec, &seed, &recs), DedupReport { collisions: 1, unresolved: 0 });
    }

    #[test]
    fn pruned_requires_slack() {
        let cfg = EnumConfig::pruned(3, sigma(), 10.0, 0.0);
        assert!(matches!(
            enumerate_tori(&fixtures::fixture_a(), &seed_a(), &cfg),
            Err(OrbitError::Config { field: "prune_slack", .. })
        ));
    }
}
