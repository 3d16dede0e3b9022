//! End-to-end counting experiments: count tables over regions, slope fits,
//! the volume-threshold law and equidistribution ratios.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::{self, ExponentError, ExponentEstimate, SpectrumSample, MIN_WINDOW_COUNT};
use crate::geometry::LinearForm;
use crate::measures::{self, MeasureError};
use crate::orbit::{self, EnumConfig, EnumStats, OrbitError, PlanarBox, Region};
use crate::schottky::{DiskLabel, JoiningSpec, SeedTorus};
use crate::word::Letter;

/// Default tolerance for equidistribution ratios.
pub const EQUIDISTRIBUTION_TOLERANCE: f64 = 0.2;
/// Accepted band for the fitted slope relative to the expected one.
pub const SLOPE_BAND: (f64, f64) = (0.9, 1.1);
pub const MIN_R_SQUARED: f64 = 0.98;
pub const VOLUME_TOLERANCE: f64 = 0.1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("region {name}: {reason}")]
    Region { name: String, reason: String },
    #[error("at most 32 regions are supported, got {0}")]
    TooManyRegions(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionRole {
    Nested,
    Disjoint,
    Ball,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub name: String,
    pub role: RegionRole,
    pub region: Region,
}

/// Three nested boxes (everything, the first pairing disk, a quadrant of
/// it), two disjoint half-disk boxes and one ball, built from the pairing
/// disks of each factor.
pub fn default_regions(spec: &JoiningSpec<f64>) -> Vec<RegionSpec> {
    let extent = spec
        .reps()
        .iter()
        .flat_map(|rep| rep.disks().map(|(_, c, r)| c.norm() + r))
        .fold(1.0, f64::max);
    let disk = |l: usize| -> Vec<(num_complex::Complex64, f64)> {
        spec.reps()
            .iter()
            .map(|rep| rep.disk(DiskLabel::target_of(Letter::from_code(l))))
            .collect()
    };
    let around = |l: usize, scale: f64| {
        Region::product(
            disk(l)
                .into_iter()
                .map(|(c, r)| {
                    let h = scale * r;
                    PlanarBox::new([c.re - h, c.re + h], [c.im - h, c.im + h])
                })
                .collect(),
        )
    };
    let upper = Region::product(
        disk(0)
            .into_iter()
            .map(|(c, r)| PlanarBox::new([c.re - 1.2 * r, c.re + 1.2 * r], [c.im, c.im + 1.2 * r]))
            .collect(),
    );
    let quadrant = Region::product(
        disk(0)
            .into_iter()
            .map(|(c, r)| PlanarBox::new([c.re, c.re + 1.2 * r], [c.im - 1.2 * r, c.im]))
            .collect(),
    );
    let second = if spec.rank() > 1 { 2 } else { 1 };
    let lower = Region::product(
        disk(second)
            .into_iter()
            .map(|(c, r)| PlanarBox::new([c.re - 1.2 * r, c.re + 1.2 * r], [c.im - 1.2 * r, c.im]))
            .collect(),
    );
    let ball_disks = disk(0);
    let ball = Region::Ball {
        center: ball_disks.iter().map(|p| p.0).collect(),
        radius: ball_disks.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt(),
    };
    vec![
        RegionSpec {
            name: "all".into(),
            role: RegionRole::Nested,
            region: Region::cube(spec.dim(), extent + 0.1),
        },
        RegionSpec {
            name: "disk-1".into(),
            role: RegionRole::Nested,
            region: around(0, 1.2),
        },
        RegionSpec {
            name: "disk-1-quadrant".into(),
            role: RegionRole::Nested,
            region: quadrant,
        },
        RegionSpec {
            name: "disk-1-upper".into(),
            role: RegionRole::Disjoint,
            region: upper,
        },
        RegionSpec {
            name: "disk-2-lower".into(),
            role: RegionRole::Disjoint,
            region: lower,
        },
        RegionSpec {
            name: "ball-1".into(),
            role: RegionRole::Ball,
            region: ball,
        },
    ]
}

fn check_regions(regions: &[RegionSpec], d: usize) -> Result<(), HarnessError> {
    if regions.len() > 32 {
        return Err(HarnessError::TooManyRegions(regions.len()));
    }
    for r in regions {
        if r.region.dim() != d {
            return Err(HarnessError::Region {
                name: r.name.clone(),
                reason: format!("has {} factors, the joining has {d}", r.region.dim()),
            });
        }
        r.region.validate().map_err(|reason| HarnessError::Region {
            name: r.name.clone(),
            reason,
        })?;
    }
    Ok(())
}

/// Per-record data of an exhaustive enumeration: length vector, volume
/// and a bit mask of the regions the torus meets.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    d: usize,
    v: Vec<f64>,
    volumes: Vec<f64>,
    masks: Vec<u32>,
    pub stats: EnumStats,
    pub depth: usize,
}

#[derive(Default)]
struct TablePart {
    v: Vec<f64>,
    volumes: Vec<f64>,
    masks: Vec<u32>,
}

impl OrbitTable {
    pub fn build(
        spec: &JoiningSpec<f64>,
        seed: &SeedTorus<f64>,
        regions: &[RegionSpec],
        depth: usize,
        threads: usize,
    ) -> Result<Self, HarnessError> {
        let d = spec.dim();
        check_regions(regions, d)?;
        let cfg = EnumConfig::exhaustive(depth, LinearForm::sum_form(d)).with_threads(threads);
        let (part, stats) = orbit::enumerate_fold(
            spec,
            seed,
            &cfg,
            TablePart::default,
            |rec, acc: &mut TablePart| {
                acc.v.extend_from_slice(rec.v.as_slice());
                acc.volumes.push(rec.volume());
                let mask = regions
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.region.meets(&rec.factors))
                    .fold(0u32, |m, (i, _)| m | 1 << i);
                acc.masks.push(mask);
            },
            |mut a, mut b| {
                a.v.append(&mut b.v);
                a.volumes.append(&mut b.volumes);
                a.masks.append(&mut b.masks);
                a
            },
        )?;
        Ok(Self {
            d,
            v: part.v,
            volumes: part.volumes,
            masks: part.masks,
            stats,
            depth,
        })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn v(&self, i: usize) -> &[f64] {
        &self.v[i * self.d..(i + 1) * self.d]
    }

    pub fn volume(&self, i: usize) -> f64 {
        self.volumes[i]
    }

    pub fn meets(&self, i: usize, region: usize) -> bool {
        self.masks[i] & (1 << region) != 0
    }

    pub fn complete_below(&self, psi: &LinearForm<f64>) -> f64 {
        self.stats.complete_below_for(psi)
    }

    /// Ascending `ψ(v)` of the records meeting a region.
    pub fn sorted_values(&self, psi: &LinearForm<f64>, region: usize) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.len())
            .filter(|&i| self.meets(i, region))
            .map(|i| psi.eval(self.v(i)))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// `N_R(ψ, E)`, refusing thresholds above the certified bound.
    pub fn count(&self, psi: &LinearForm<f64>, r: f64, region: usize) -> Result<u64, OrbitError> {
        let complete = self.complete_below(psi);
        if r > complete {
            return Err(OrbitError::Coverage {
                requested: r,
                complete,
            });
        }
        Ok((0..self.len())
            .filter(|&i| self.meets(i, region) && psi.eval(self.v(i)) < r)
            .count() as u64)
    }

    /// `#{T : Vol(T) > s, T ∩ E ≠ ∅}`.
    pub fn count_volume(&self, s: f64, region: usize) -> u64 {
        (0..self.len())
            .filter(|&i| self.meets(i, region) && self.volumes[i] > s)
            .count() as u64
    }
}

/// A named pass/fail outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub criterion: String,
    pub passed: bool,
    pub detail: String,
}

impl Flag {
    fn new(criterion: &str, passed: bool, detail: String) -> Self {
        Self {
            criterion: criterion.into(),
            passed,
            detail,
        }
    }
}

/// A fitted slope together with the estimate it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub source: String,
    pub slope: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

impl SlopeFit {
    fn from_estimate(source: String, est: &ExponentEstimate) -> Self {
        Self {
            source,
            slope: est.delta,
            stderr: est.stderr,
            r_squared: est.r_squared,
            window: est.window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub shell_fit: f64,
    pub shell_fit_stderr: f64,
    pub shell_fit_window: (f64, f64),
    pub series_bracket: f64,
    pub series_bracket_stderr: f64,
    pub spectrum_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFit {
    pub name: String,
    pub role: RegionRole,
    pub records: u64,
    /// Fit of `log N_R` for `ψ₀`; `None` when the region has too few tori.
    pub fit: Option<SlopeFit>,
    pub note: Option<String>,
}

/// Counts on a common grid: `thresholds[j]` and `counts[region][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub variable: String,
    pub thresholds: Vec<f64>,
    pub region_names: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl CountTable {
    pub fn is_monotone(&self) -> bool {
        self.counts.iter().all(|row| row.windows(2).all(|w| w[0] <= w[1]))
    }

    /// Rows `R, ln N_R(E₁), …` with empty cells where `N_R = 0`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.variable.clone()];
        header.extend(self.region_names.iter().map(|n| format!("ln_n_{n}")));
        w.write_record(&header).expect("in-memory write");
        for (j, t) in self.thresholds.iter().enumerate() {
            let mut row = vec![t.to_string()];
            for c in &self.counts {
                row.push(if c[j] > 0 { (c[j] as f64).ln().to_string() } else { String::new() });
            }
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaRatio {
    pub numerator: String,
    pub denominator: String,
    pub threshold: f64,
    pub count_ratio: f64,
    pub omega_ratio: f64,
    pub relative_error: f64,
    pub atom_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeLaw {
    /// `(s, #{Vol > s}, N_R(σ) at R = d·log 2π − log s)` for the first region.
    pub table: Vec<(f64, u64, u64)>,
    pub identity_mismatches: u64,
    pub fit: SlopeFit,
    pub delta_l1: f64,
    pub delta_l1_stderr: f64,
    pub relative_error: f64,
    pub above_max_volume: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub fixture: String,
    pub experiment: String,
    pub depth: usize,
    pub records: u64,
    pub psi: Vec<f64>,
    pub psi0: Vec<f64>,
    pub delta: DeltaEstimate,
    pub complete_below_psi: f64,
    /// Fit of `log N_R(ψ)` over the first region.
    pub slope_psi: Option<SlopeFit>,
    /// Fit of `log N_R(ψ₀)` over the first region.
    pub slope_psi0: Option<SlopeFit>,
    pub regions: Vec<RegionSpec>,
    pub region_fits: Vec<RegionFit>,
    pub counts: Option<CountTable>,
    pub omega_ratios: Vec<OmegaRatio>,
    pub volume: Option<VolumeLaw>,
    pub flags: Vec<Flag>,
    /// Echo of the effective configuration, when run from a config file.
    pub config: Option<serde_json::Value>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} / {} (depth {}, {} tori)\n",
            self.fixture, self.experiment, self.depth, self.records
        );
        s += &format!(
            "delta_psi: shell fit {:.5} +- {:.5}, series bracket {:.5} +- {:.5}\n",
            self.delta.shell_fit, self.delta.shell_fit_stderr, self.delta.series_bracket, self.delta.series_bracket_stderr
        );
        for fit in [&self.slope_psi, &self.slope_psi0].into_iter().flatten() {
            s += &format!(
                "slope [{}]: {:.5} +- {:.5}, R^2 {:.5}, window [{:.3}, {:.3}]\n",
                fit.source, fit.slope, fit.stderr, fit.r_squared, fit.window.0, fit.window.1
            );
        }
        for r in &self.omega_ratios {
            s += &format!(
                "N({})/N({}) = {:.4} vs omega ratio {:.4} (error {:.3})\n",
                r.numerator, r.denominator, r.count_ratio, r.omega_ratio, r.relative_error
            );
        }
        if let Some(v) = &self.volume {
            s += &format!(
                "volume exponent {:.5} vs delta_L1 {:.5} (error {:.3}), identity mismatches {}\n",
                -v.fit.slope, v.delta_l1, v.relative_error, v.identity_mismatches
            );
        }
        for f in &self.flags {
            s += &format!("{} {}: {}\n", if f.passed { "PASS" } else { "FAIL" }, f.criterion, f.detail);
        }
        s
    }
}

/// Wall-clock timings, kept out of the report so it stays reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub threads: usize,
    pub enumerate_secs: f64,
    pub spectrum_secs: f64,
    pub atoms_secs: f64,
    pub total_secs: f64,
}

/// Shared inputs of the experiments; the orbit table and the Cartan sample
/// are computed once and reused.
pub struct Experiment<'a> {
    pub fixture: String,
    pub spec: &'a JoiningSpec<f64>,
    pub seed: &'a SeedTorus<f64>,
    pub regions: Vec<RegionSpec>,
    pub depth: usize,
    /// Word-length shell of the Patterson atoms.
    pub atom_depth: usize,
    pub threads: usize,
    pub tolerance: f64,
    table: Option<OrbitTable>,
    sample: Option<SpectrumSample>,
    pub runtime: RuntimeStats,
}

impl<'a> Experiment<'a> {
    pub fn new(
        fixture: impl Into<String>,
        spec: &'a JoiningSpec<f64>,
        seed: &'a SeedTorus<f64>,
        regions: Vec<RegionSpec>,
        depth: usize,
    ) -> Self {
        Self {
            fixture: fixture.into(),
            spec,
            seed,
            regions,
            depth,
            atom_depth: 8,
            threads: 1,
            tolerance: EQUIDISTRIBUTION_TOLERANCE,
            table: None,
            sample: None,
            runtime: RuntimeStats::default(),
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_atom_depth(mut self, depth: usize) -> Self {
        self.atom_depth = depth;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn table(&mut self) -> Result<&OrbitTable, HarnessError> {
        self.ensure_table()?;
        Ok(self.table.as_ref().expect("just built"))
    }

    fn ensure_table(&mut self) -> Result<(), HarnessError> {
        if self.table.is_none() {
            let t0 = Instant::now();
            let t = OrbitTable::build(self.spec, self.seed, &self.regions, self.depth, self.threads)?;
            self.runtime.enumerate_secs += t0.elapsed().as_secs_f64();
            self.table = Some(t);
        }
        Ok(())
    }

    pub fn sample(&mut self) -> &SpectrumSample {
        if self.sample.is_none() {
            let t0 = Instant::now();
            self.sample = Some(SpectrumSample::collect(self.spec, self.depth, self.threads));
            self.runtime.spectrum_secs += t0.elapsed().as_secs_f64();
        }
        self.sample.as_ref().expect("just collected")
    }

    fn delta(&mut self, psi: &LinearForm<f64>) -> Result<(DeltaEstimate, ExponentEstimate), HarnessError> {
        let depth = self.depth;
        let sample = self.sample();
        let shell = exponents::estimate_exponent(sample, psi)?;
        let bracket = exponents::series_bracket(sample, psi)?;
        Ok((
            DeltaEstimate {
                shell_fit: shell.delta,
                shell_fit_stderr: shell.stderr,
                shell_fit_window: shell.window,
                series_bracket: bracket.delta,
                series_bracket_stderr: bracket.stderr,
                spectrum_depth: depth,
            },
            bracket,
        ))
    }

    fn base_report(&mut self, experiment: &str, psi: &LinearForm<f64>) -> Result<(ExperimentReport, ExponentEstimate), HarnessError> {
        psi.check_positive().map_err(ExponentError::from)?;
        let (delta, bracket) = self.delta(psi)?;
        let psi0 = exponents::critical_form(psi, &bracket)?;
        self.ensure_table()?;
        let table = self.table.as_ref().expect("built");
        Ok((
            ExperimentReport {
                fixture: self.fixture.clone(),
                experiment: experiment.into(),
                depth: self.depth,
                records: table.len() as u64,
                psi: psi.coeffs().to_vec(),
                psi0: psi0.coeffs().to_vec(),
                delta,
                complete_below_psi: table.complete_below(psi),
                slope_psi: None,
                slope_psi0: None,
                regions: self.regions.clone(),
                region_fits: Vec::new(),
                counts: None,
                omega_ratios: Vec::new(),
                volume: None,
                flags: Vec::new(),
                config: None,
            },
            bracket,
        ))
    }

    /// Counting law for `ψ` and its critical multiple `ψ₀ = δ_ψ·ψ`, with
    /// `δ_ψ` from the series bracket of the Cartan sample.
    pub fn counting(&mut self, psi: &LinearForm<f64>) -> Result<ExperimentReport, HarnessError> {
        let start = Instant::now();
        let (mut report, bracket) = self.base_report("counting", psi)?;
        let psi0 = LinearForm::new(report.psi0.clone());
        let table = self.table.as_ref().expect("built");
        let complete = table.complete_below(psi);
        let complete0 = table.complete_below(&psi0);

        let mut region_fits = Vec::new();
        for (j, r) in self.regions.iter().enumerate() {
            let values0 = table.sorted_values(&psi0, j);
            let (fit, note) = match exponents::shell_fit(&values0, complete0) {
                Ok(est) => (Some(SlopeFit::from_estimate("tori count, psi0".into(), &est)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            region_fits.push(RegionFit {
                name: r.name.clone(),
                role: r.role,
                records: values0.len() as u64,
                fit,
                note,
            });
        }
        if let Ok(est) = exponents::shell_fit(&table.sorted_values(psi, 0), complete) {
            report.slope_psi = Some(SlopeFit::from_estimate("tori count, psi".into(), &est));
        }
        report.slope_psi0 = region_fits.first().and_then(|f| f.fit.clone());

        let values0 = table.sorted_values(&psi0, 0);
        if values0.len() > MIN_WINDOW_COUNT && values0[MIN_WINDOW_COUNT] < complete0 {
            let thresholds = exponents::grid(values0[MIN_WINDOW_COUNT], complete0.min(values0[values0.len() - 1]));
            let counts = (0..self.regions.len())
                .map(|j| {
                    let v = table.sorted_values(&psi0, j);
                    thresholds.iter().map(|&t| v.partition_point(|&x| x < t) as u64).collect()
                })
                .collect();
            report.counts = Some(CountTable {
                variable: "r_psi0".into(),
                thresholds,
                region_names: self.regions.iter().map(|r| r.name.clone()).collect(),
                counts,
            });
        }
        report.region_fits = region_fits;

        let mut flags = Vec::new();
        match &report.slope_psi0 {
            Some(fit) => {
                let ok = (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&fit.slope) && fit.r_squared >= MIN_R_SQUARED;
                flags.push(Flag::new(
                    "counting_law_fit",
                    ok,
                    format!("psi0 slope {:.5} (expected 1), R^2 {:.5}", fit.slope, fit.r_squared),
                ));
            }
            None => flags.push(Flag::new("counting_law_fit", false, "no complete window for psi0".into())),
        }
        if let Some(fit) = &report.slope_psi {
            let ratio = fit.slope / report.delta.shell_fit;
            flags.push(Flag::new(
                "slope_matches_exponent",
                (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&ratio),
                format!(
                    "psi slope {:.5} / Cartan shell-fit delta {:.5} = {:.4}",
                    fit.slope, report.delta.shell_fit, ratio
                ),
            ));
        }
        if let Some(c) = &report.counts {
            flags.push(Flag::new(
                "monotone_counts",
                c.is_monotone(),
                "count tables nondecreasing in R".into(),
            ));
        }

        let pairs = disjoint_pairs(&self.regions);
        if !pairs.is_empty() {
            let t0 = Instant::now();
            let atoms = measures::patterson_atoms(self.spec, &psi0, self.atom_depth, self.threads)?;
            self.runtime.atoms_secs += t0.elapsed().as_secs_f64();
            let top = complete0.min(values0.last().copied().unwrap_or(0.0));
            for (a, b) in pairs {
                let na = table.count(&psi0, top, a)? as f64;
                let nb = table.count(&psi0, top, b)? as f64;
                let wa = measures::omega_measure(&atoms, &self.regions[a].region);
                let wb = measures::omega_measure(&atoms, &self.regions[b].region);
                let count_ratio = na / nb;
                let omega_ratio = wa / wb;
                let relative_error = (count_ratio / omega_ratio - 1.0).abs();
                let in_band = (0.2..=5.0).contains(&omega_ratio);
                flags.push(Flag::new(
                    "equidistribution",
                    in_band && relative_error <= self.tolerance,
                    format!(
                        "N({})/N({}) = {na}/{nb} = {count_ratio:.4}, omega ratio {omega_ratio:.4} (ψ0 from series bracket, atom depth {}), error {relative_error:.3}",
                        self.regions[a].name, self.regions[b].name, self.atom_depth
                    ),
                ));
                report.omega_ratios.push(OmegaRatio {
                    numerator: self.regions[a].name.clone(),
                    denominator: self.regions[b].name.clone(),
                    threshold: top,
                    count_ratio,
                    omega_ratio,
                    relative_error,
                    atom_depth: self.atom_depth,
                });
            }
        }
        report.flags = flags;
        let _ = bracket;
        self.finish(start);
        Ok(report)
    }

    /// Volume-threshold counts, the substitution identity and the fitted
    /// volume exponent against `δ_σ`.
    pub fn volume(&mut self) -> Result<ExperimentReport, HarnessError> {
        let start = Instant::now();
        let d = self.spec.dim();
        let sigma = LinearForm::sum_form(d);
        let (mut report, _) = self.base_report("volume", &sigma)?;
        let table = self.table.as_ref().expect("built");
        let complete = table.complete_below(&sigma);
        let values = table.sorted_values(&sigma, 0);
        if values.len() <= MIN_WINDOW_COUNT + 1 {
            return Err(ExponentError::TooFewEntries {
                have: values.len(),
                need: MIN_WINDOW_COUNT + 2,
            }
            .into());
        }
        // midpoint, so no grid threshold sits on a data value
        let lo = 0.5 * (values[MIN_WINDOW_COUNT] + values[MIN_WINDOW_COUNT + 1]);
        let hi = complete.min(values[values.len() - 1]);
        if !(lo < hi) {
            return Err(ExponentError::IncompleteWindow { lo, hi }.into());
        }
        let log_scale = d as f64 * std::f64::consts::TAU.ln();
        let mut rows = Vec::new();
        let mut mismatches = 0;
        for r in exponents::grid(lo, hi) {
            let s = (log_scale - r).exp();
            let r_back = log_scale - s.ln();
            let by_volume = table.count_volume(s, 0);
            for j in 0..self.regions.len() {
                let vol = table.count_volume(s, j);
                let nr = (0..table.len())
                    .filter(|&i| table.meets(i, j) && sigma.eval(table.v(i)) < r_back)
                    .count() as u64;
                if vol != nr {
                    mismatches += 1;
                }
            }
            let nr0 = table.count(&sigma, r_back.min(complete), 0)?;
            rows.push((s, by_volume, nr0));
        }
        let pts: Vec<(f64, f64)> = rows.iter().map(|&(s, n, _)| (s.ln(), (n as f64).ln())).collect();
        let (slope, stderr, r_squared) = exponents::linear_fit(&pts);
        let max_volume = (0..table.len()).map(|i| table.volume(i)).fold(0.0, f64::max);
        let above_max_volume = table.count_volume(max_volume * 2.0, 0);
        let delta_l1 = report.delta.shell_fit;
        let relative_error = (-slope / delta_l1 - 1.0).abs();
        let fit = SlopeFit {
            source: "log #{Vol > s} vs log s".into(),
            slope,
            stderr,
            r_squared,
            window: (rows[rows.len() - 1].0.ln(), rows[0].0.ln()),
        };
        report.flags = vec![
            Flag::new(
                "volume_identity",
                mismatches == 0,
                format!("{mismatches} mismatches between volume and sigma counts over {} grid points", rows.len()),
            ),
            Flag::new(
                "volume_law",
                relative_error <= VOLUME_TOLERANCE,
                format!("volume exponent {:.5} vs Cartan shell-fit delta_L1 {delta_l1:.5}, error {relative_error:.4}", -slope),
            ),
            Flag::new(
                "volume_above_max",
                above_max_volume == 0,
                format!("{above_max_volume} tori above twice the largest volume"),
            ),
        ];
        report.slope_psi = Some(fit.clone());
        report.volume = Some(VolumeLaw {
            table: rows,
            identity_mismatches: mismatches,
            fit,
            delta_l1,
            delta_l1_stderr: report.delta.shell_fit_stderr,
            relative_error,
            above_max_volume,
        });
        self.finish(start);
        Ok(report)
    }

    fn finish(&mut self, start: Instant) {
        self.runtime.threads = self.threads;
        self.runtime.total_secs += start.elapsed().as_secs_f64();
    }
}

/// Index pairs of disjoint regions, in declaration order.
fn disjoint_pairs(regions: &[RegionSpec]) -> Vec<(usize, usize)> {
    let idx: Vec<usize> = (0..regions.len()).filter(|&i| regions[i].role == RegionRole::Disjoint).collect();
    let mut out = Vec::new();
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            out.push((i, j));
        }
    }
    out
}

pub fn run_counting_experiment(
    fixture: &str,
    spec: &JoiningSpec<f64>,
    seed: &SeedTorus<f64>,
    psi: &LinearForm<f64>,
    regions: Vec<RegionSpec>,
    depth: usize,
    threads: usize,
) -> Result<ExperimentReport, HarnessError> {
    Experiment::new(fixture, spec, seed, regions, depth)
        .with_threads(threads)
        .counting(psi)
}

pub fn run_volume_experiment(
    fixture: &str,
    spec: &JoiningSpec<f64>,
    seed: &SeedTorus<f64>,
    regions: Vec<RegionSpec>,
    depth: usize,
    threads: usize,
) -> Result<ExperimentReport, HarnessError> {
    Experiment::new(fixture, spec, seed, regions, depth)
        .with_threads(threads)
        .volume()
}
