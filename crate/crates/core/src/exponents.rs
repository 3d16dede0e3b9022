//! Cartan spectra, critical exponents, critical forms and limit cones.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontier::LowerBoundSet;
use crate::geometry::{AVector, GeometryError, LinearForm};
use crate::schottky::JoiningSpec;
use crate::traverse::{self, next_letters, Control, Node};
use crate::word::Letter;

/// Number of grid points of a shell fit.
pub const GRID_POINTS: usize = 40;
/// Smallest count admitted at the lower end of a fit window.
pub const MIN_WINDOW_COUNT: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error("fit window is empty: lower cutoff {lo} is not below the complete bound {hi}")]
    IncompleteWindow { lo: f64, hi: f64 },
    #[error("sample has {have} entries, fewer than the {need} needed for a window")]
    TooFewEntries { have: usize, need: usize },
    #[error("psi has {got} coefficients, sample has dimension {want}")]
    Dimension { got: usize, want: usize },
    #[error("series bracketing needs at least {0} word-length shells")]
    TooShallow(usize),
    #[error("no sign change of the shell ratio in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Cartan projections and translation lengths of every `γ` with
/// `|γ| <= depth`, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    d: usize,
    depth: usize,
    lengths: Vec<u8>,
    cartan: Vec<f64>,
    translation: Vec<f64>,
    /// Lower bounds for `μ` of words deeper than `depth`.
    frontier: LowerBoundSet,
}

#[derive(Default)]
struct Part {
    lengths: Vec<u8>,
    cartan: Vec<f64>,
    translation: Vec<f64>,
    frontier: LowerBoundSet,
}

/// Per-factor lower bound for `d(g·o, o)` over all `g` whose orbit point
/// lies in the half-ball over the disk `(c, r)`, with `o` outside it.
fn dome_distance(c: num_complex::Complex64, r: f64) -> f64 {
    ((c.norm_sqr() + 1.0 - r * r) / (2.0 * r)).asinh().max(0.0)
}

impl SpectrumSample {
    /// Walks all reduced words up to `depth`. The frontier bound uses the
    /// half-balls over the nested disks, so `spec.basepoint_outside_domes()`
    /// must hold for it to be certified.
    pub fn collect(spec: &JoiningSpec<f64>, depth: usize, threads: usize) -> Self {
        let d = spec.dim();
        let k = spec.rank();
        let threads = if threads == 0 { traverse::default_threads() } else { threads };
        let visit = |node: &Node<f64>, part: &mut Part| {
            part.lengths.push(node.word.len() as u8);
            for m in &node.maps {
                part.cartan.push(m.hyp_displacement());
                part.translation.push(m.translation_length());
            }
            if node.word.len() == depth {
                let mut b = vec![0.0; d];
                for l in next_letters(k, node.word.last()) {
                    for (i, (g, rep)) in node.maps.iter().zip(spec.reps()).enumerate() {
                        let disk = rep.target_circle(l).transformed(g);
                        b[i] = match disk.center_radius() {
                            Some((c, r)) => dome_distance(c, r) * (1.0 - 1e-12),
                            None => 0.0,
                        };
                    }
                    part.frontier.push(&b);
                }
            }
            Control::Expand
        };
        let make = || Part {
            frontier: LowerBoundSet::new(d),
            ..Part::default()
        };
        let parts = traverse::traverse(spec, depth, threads, make, visit);
        let mut out = Self {
            d,
            depth,
            lengths: Vec::new(),
            cartan: Vec::new(),
            translation: Vec::new(),
            frontier: LowerBoundSet::new(d),
        };
        for p in parts.parts {
            out.lengths.extend(p.lengths);
            out.cartan.extend(p.cartan);
            out.translation.extend(p.translation);
            out.frontier.merge(&p.frontier);
        }
        out
    }

    /// A sample from explicit entries `(word length, μ, ℓ)`, without a
    /// frontier: every window is treated as complete.
    pub fn from_entries(d: usize, entries: &[(usize, Vec<f64>, Vec<f64>)]) -> Self {
        let mut s = Self {
            d,
            depth: entries.iter().map(|e| e.0).max().unwrap_or(0),
            lengths: Vec::new(),
            cartan: Vec::new(),
            translation: Vec::new(),
            frontier: LowerBoundSet::new(d),
        };
        for (n, mu, ell) in entries {
            s.lengths.push(*n as u8);
            s.cartan.extend(mu);
            s.translation.extend(ell);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.lengths[i] as usize
    }

    pub fn cartan(&self, i: usize) -> &[f64] {
        &self.cartan[i * self.d..(i + 1) * self.d]
    }

    pub fn translation(&self, i: usize) -> &[f64] {
        &self.translation[i * self.d..(i + 1) * self.d]
    }

    /// Every `γ` with `ψ(μ(γ)) < complete_below(ψ)` is in the sample.
    pub fn complete_below(&self, psi: &LinearForm<f64>) -> f64 {
        self.frontier.floor(psi.coeffs())
    }

    /// `ψ(μ(γ))` for every entry, ascending.
    pub fn sorted_values(&self, psi: &LinearForm<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = self.cartan.chunks(self.d).map(|m| psi.eval(m)).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `Σ_γ e^{−s ψ(μ(γ))}` and its word-length shell subtotals.
pub fn poincare_partial(sample: &SpectrumSample, psi: &LinearForm<f64>, s: f64) -> (f64, Vec<f64>) {
    let mut shells = vec![0.0; if sample.is_empty() { 0 } else { sample.depth + 1 }];
    for i in 0..sample.len() {
        shells[sample.word_length(i)] += (-s * psi.eval(sample.cartan(i))).exp();
    }
    (shells.iter().sum(), shells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ShellFit,
    SeriesBracket,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub delta: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub method: Method,
    /// Coefficient of determination of the fit (1 for series bracketing).
    pub r_squared: f64,
    /// `(R, #{ψ < R})` on the fit grid, or `(s_n, n)` for bracketing.
    pub table: Vec<(f64, u64)>,
}

/// Least-squares line `y = a + b x`: `(b, stderr(b), R²)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    let stderr = if points.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (b, stderr, r2)
}

/// Evenly spaced grid of `GRID_POINTS` values from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64) -> Vec<f64> {
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS)
        .map(|j| if j + 1 == GRID_POINTS { hi } else { lo + step * j as f64 })
        .collect()
}

/// Fits `log #{x < R}` against `R` over the complete window of a sorted
/// value list. The window starts where the count reaches
/// [`MIN_WINDOW_COUNT`] and ends at `complete_below`.
pub fn shell_fit(sorted: &[f64], complete_below: f64) -> Result<ExponentEstimate, ExponentError> {
    if sorted.len() <= MIN_WINDOW_COUNT {
        return Err(ExponentError::TooFewEntries {
            have: sorted.len(),
            need: MIN_WINDOW_COUNT + 1,
        });
    }
    let lo = sorted[MIN_WINDOW_COUNT];
    let hi = complete_below.min(sorted[sorted.len() - 1]);
    if !(lo < hi) {
        return Err(ExponentError::IncompleteWindow { lo, hi });
    }
    let table: Vec<(f64, u64)> = grid(lo, hi)
        .into_iter()
        .map(|r| (r, sorted.partition_point(|&x| x < r) as u64))
        .collect();
    let pts: Vec<(f64, f64)> = table.iter().map(|&(r, n)| (r, (n as f64).ln())).collect();
    let (delta, stderr, r_squared) = linear_fit(&pts);
    Ok(ExponentEstimate {
        delta,
        stderr,
        window: (lo, hi),
        method: Method::ShellFit,
        r_squared,
        table,
    })
}

/// `δ_ψ` by the shell fit of `#{γ : ψ(μ(γ)) < R}`.
pub fn estimate_exponent(sample: &SpectrumSample, psi: &LinearForm<f64>) -> Result<ExponentEstimate, ExponentError> {
    check_dim(sample, psi)?;
    shell_fit(&sample.sorted_values(psi), sample.complete_below(psi))
}

fn check_dim(sample: &SpectrumSample, psi: &LinearForm<f64>) -> Result<(), ExponentError> {
    if psi.dim() != sample.dim() {
        return Err(ExponentError::Dimension {
            got: psi.dim(),
            want: sample.dim(),
        });
    }
    Ok(())
}

fn log_shell(values: &[f64], s: f64) -> f64 {
    let m = values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    m * -s + values.iter().map(|&x| (-s * (x - m)).exp()).sum::<f64>().ln()
}

/// `δ_ψ` by bracketing: the `s` at which the last two word-length shells
/// of the Poincaré series have equal mass. The stderr is the drift of the
/// same quantity one shell earlier.
pub fn series_bracket(sample: &SpectrumSample, psi: &LinearForm<f64>) -> Result<ExponentEstimate, ExponentError> {
    check_dim(sample, psi)?;
    let n = sample.depth;
    if n < 3 {
        return Err(ExponentError::TooShallow(3));
    }
    let mut shells: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    for i in 0..sample.len() {
        shells[sample.word_length(i)].push(psi.eval(sample.cartan(i)));
    }
    let crossing = |m: usize| -> Result<f64, ExponentError> {
        let f = |s: f64| log_shell(&shells[m], s) - log_shell(&shells[m - 1], s);
        let (mut lo, mut hi) = (1e-9, 1.0);
        while f(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(ExponentError::NoBracket { lo, hi });
            }
        }
        if f(lo) <= 0.0 {
            return Err(ExponentError::NoBracket { lo, hi });
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let last = crossing(n)?;
    let prev = crossing(n - 1)?;
    Ok(ExponentEstimate {
        delta: last,
        stderr: (last - prev).abs(),
        window: (n as f64 - 1.0, n as f64),
        method: Method::SeriesBracket,
        r_squared: 1.0,
        table: vec![(prev, (n - 1) as u64), (last, n as u64)],
    })
}

/// `ψ₀ = δ_ψ·ψ`, the critical multiple of `ψ`.
pub fn critical_form(psi: &LinearForm<f64>, est: &ExponentEstimate) -> Result<LinearForm<f64>, ExponentError> {
    psi.check_positive()?;
    Ok(psi.scaled(est.delta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeEstimate {
    pub directions: Vec<AVector<f64>>,
    /// Per coordinate `(min, max)` over all directions.
    pub coordinate_range: Vec<(f64, f64)>,
    /// For `d = 2`: `(min, max)` of `t₂/t₁`.
    pub slope_range: Option<(f64, f64)>,
    pub min_coordinate: f64,
}

/// Normalized `μ(γ)` for `|γ| >= min_len`, followed by normalized
/// translation-length vectors of the same elements.
pub fn limit_cone_estimate(sample: &SpectrumSample, min_len: usize) -> ConeEstimate {
    let d = sample.dim();
    let mut directions = Vec::new();
    let idx: Vec<usize> = (0..sample.len()).filter(|&i| sample.word_length(i) >= min_len).collect();
    for &i in &idx {
        if let Some(u) = AVector::new(sample.cartan(i).to_vec()).normalized() {
            directions.push(u);
        }
    }
    for &i in &idx {
        if let Some(u) = AVector::new(sample.translation(i).to_vec()).normalized() {
            directions.push(u);
        }
    }
    cone_from_directions(d, directions)
}

pub fn cone_from_directions(d: usize, directions: Vec<AVector<f64>>) -> ConeEstimate {
    let mut coordinate_range = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
    for u in &directions {
        for (r, &x) in coordinate_range.iter_mut().zip(u.as_slice()) {
            r.0 = r.0.min(x);
            r.1 = r.1.max(x);
        }
    }
    let slope_range = (d == 2 && !directions.is_empty()).then(|| {
        directions.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| {
            let s = u[1] / u[0];
            (lo.min(s), hi.max(s))
        })
    });
    let min_coordinate = coordinate_range.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    ConeEstimate {
        directions,
        coordinate_range,
        slope_range,
        min_coordinate,
    }
}

/// Largest distance from the diagonal `(1, …, 1)/√d` among normalized
/// Cartan projections of words of length exactly `len`.
pub fn diagonal_deviation(sample: &SpectrumSample, len: usize) -> f64 {
    let diag = (sample.dim() as f64).sqrt().recip();
    (0..sample.len())
        .filter(|&i| sample.word_length(i) == len)
        .filter_map(|i| AVector::new(sample.cartan(i).to_vec()).normalized())
        .map(|u| u.as_slice().iter().map(|x| (x - diag).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1BoundReport {
    pub delta: f64,
    pub stderr: f64,
    pub bound: f64,
    pub passes: bool,
}

/// `δ_{L¹} <= 2/√d`, allowing three standard errors.
pub fn check_l1_bound(est: &ExponentEstimate, d: usize) -> L1BoundReport {
    let bound = 2.0 / (d as f64).sqrt();
    L1BoundReport {
        delta: est.delta,
        stderr: est.stderr,
        bound,
        passes: est.delta <= bound + 3.0 * est.stderr,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub psi: Vec<f64>,
    pub delta: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub method: Method,
    pub r_squared: f64,
    pub shell_table: Vec<(f64, u64)>,
}

impl ExponentReport {
    pub fn new(psi: &LinearForm<f64>, est: &ExponentEstimate) -> Self {
        Self {
            psi: psi.coeffs().to_vec(),
            delta: est.delta,
            stderr: est.stderr,
            window: est.window,
            method: est.method,
            r_squared: est.r_squared,
            shell_table: est.table.clone(),
        }
    }
}

/// Directions of `μ(γⁿ)` for `n = 1..=max_power`, for the element of `word`.
pub fn power_directions(spec: &JoiningSpec<f64>, word: &[Letter], max_power: u32) -> Vec<AVector<f64>> {
    let w = crate::word::Word::from_letters(word.to_vec()).expect("reduced word");
    let g = spec.evaluate_word(&w);
    (1..=max_power)
        .filter_map(|n| {
            AVector::new(g.factors().iter().map(|m| m.power(n).hyp_displacement()).collect()).normalized()
        })
        .collect()
}
