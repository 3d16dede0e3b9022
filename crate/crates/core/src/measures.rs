//! Truncated Patterson approximations of `ν_ψ₀` and the measure `ω_ψ₀`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{busemann_density, ExtPoint, GeometryError, GroupElement, LinearForm};
use crate::orbit::Region;
use crate::schottky::JoiningSpec;
use crate::traverse::{self, Control, Node};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("psi0 has {got} coefficients, the joining has {want} factors")]
    Dimension { got: usize, want: usize },
    #[error("no base point outside every Schottky disk was found")]
    NoBasePoint,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Atoms `(ρ₁(γ)z_b, …, ρ_d(γ)z_b)` for `|γ| = depth` with weights
/// proportional to `e^{−ψ₀(μ(γ))}`, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAtomSet {
    d: usize,
    positions: Vec<Complex64>,
    weights: Vec<f64>,
    pub psi0: LinearForm<f64>,
    pub depth: usize,
    /// `log Σ_γ e^{−ψ₀(μ(γ))}` before normalization.
    pub log_normalization: f64,
    pub base_point: Complex64,
}

impl WeightedAtomSet {
    pub fn from_parts(
        d: usize,
        positions: Vec<Complex64>,
        weights: Vec<f64>,
        psi0: LinearForm<f64>,
        depth: usize,
        log_normalization: f64,
        base_point: Complex64,
    ) -> Self {
        assert_eq!(positions.len(), d * weights.len());
        Self {
            d,
            positions,
            weights,
            psi0,
            depth,
            log_normalization,
            base_point,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn position(&self, i: usize) -> &[Complex64] {
        &self.positions[i * self.d..(i + 1) * self.d]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Fraction of atoms whose every coordinate lies in a depth-1 disk of
    /// the matching representation.
    pub fn confinement(&self, spec: &JoiningSpec<f64>) -> f64 {
        if self.is_empty() {
            return 1.0;
        }
        let inside = (0..self.len())
            .filter(|&i| {
                self.position(i)
                    .iter()
                    .zip(spec.reps())
                    .all(|(&z, rep)| rep.in_some_disk(z, 1e-12))
            })
            .count();
        inside as f64 / self.len() as f64
    }
}

/// The point `z_b`: 0 when it lies outside every disk of every
/// representation, else the first grid point that does, keeping a margin.
pub fn select_base_point(spec: &JoiningSpec<f64>) -> Result<Complex64, MeasureError> {
    let outside = |z: Complex64| {
        spec.reps()
            .iter()
            .all(|rep| rep.disks().all(|(_, c, r)| (z - c).norm() > r + 0.05))
    };
    let candidates = std::iter::once(Complex64::new(0.0, 0.0)).chain((1..=40).flat_map(|ring| {
        let rad = 0.25 * ring as f64;
        (0..16).map(move |j| Complex64::from_polar(rad, std::f64::consts::TAU * j as f64 / 16.0))
    }));
    let mut candidates = candidates;
    candidates.find(|&z| outside(z)).ok_or(MeasureError::NoBasePoint)
}

/// Truncated Patterson sum on the word-length shell `|γ| = depth`.
pub fn patterson_atoms(
    spec: &JoiningSpec<f64>,
    psi0: &LinearForm<f64>,
    depth: usize,
    threads: usize,
) -> Result<WeightedAtomSet, MeasureError> {
    let d = spec.dim();
    if psi0.dim() != d {
        return Err(MeasureError::Dimension { got: psi0.dim(), want: d });
    }
    let zb = select_base_point(spec)?;
    let threads = if threads == 0 { traverse::default_threads() } else { threads };
    let visit = |node: &Node<f64>, acc: &mut (Vec<Complex64>, Vec<f64>)| {
        if node.word.len() < depth {
            return Control::Expand;
        }
        for m in &node.maps {
            acc.0.push(m.apply_finite(zb).expect("base point image is finite"));
        }
        let mu: Vec<f64> = node.maps.iter().map(|m| m.hyp_displacement()).collect();
        acc.1.push(-psi0.eval(&mu));
        Control::Skip
    };
    let parts = traverse::traverse(spec, depth, threads, || (Vec::new(), Vec::new()), visit);
    let (mut positions, mut logw) = (Vec::new(), Vec::new());
    for (p, w) in parts.parts {
        positions.extend(p);
        logw.extend(w);
    }
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = logw.iter().map(|&x| (x - top).exp()).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(WeightedAtomSet {
        d,
        positions,
        weights,
        psi0: psi0.clone(),
        depth,
        log_normalization: top + sum.ln(),
        base_point: zb,
    })
}

/// `ω_ψ₀(E) = Σ_{atoms in E} w · ∏(1+|z_i|²)^{ψ₀,i}`.
pub fn omega_measure(atoms: &WeightedAtomSet, e: &Region) -> f64 {
    (0..atoms.len())
        .filter(|&i| e.contains(atoms.position(i)))
        .map(|i| atoms.weight(i) * busemann_density(atoms.position(i), atoms.psi0.coeffs()))
        .sum()
}

/// `ν(E)`: plain atom mass in `E`.
pub fn nu_measure(atoms: &WeightedAtomSet, e: &Region) -> f64 {
    (0..atoms.len())
        .filter(|&i| e.contains(atoms.position(i)))
        .map(|i| atoms.weight(i))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalityRow {
    /// `γ_*ν(E) = ν(γ⁻¹E)`.
    pub pushforward: f64,
    /// `∫_E e^{−ψ₀(β_ξ(γo, o))} dν(ξ)`.
    pub density_integral: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalityReport {
    pub depth: usize,
    pub word: String,
    pub rows: Vec<ConformalityRow>,
    pub max_deviation: f64,
}

/// Compares both sides of `dγ_*ν/dν(ξ) = e^{−ψ₀(β_ξ(γo, o))}` on each box.
pub fn conformality_check(atoms: &WeightedAtomSet, gamma: &GroupElement<f64>, boxes: &[Region]) -> ConformalityReport {
    let n = atoms.len();
    let moved: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            atoms
                .position(i)
                .iter()
                .zip(gamma.factors())
                .map(|(&z, m)| m.apply_finite(z).unwrap_or(Complex64::new(f64::INFINITY, 0.0)))
                .collect()
        })
        .collect();
    let factor: Vec<f64> = (0..n)
        .map(|i| {
            let beta: Vec<f64> = atoms
                .position(i)
                .iter()
                .zip(gamma.factors())
                .map(|(&z, m)| m.busemann(ExtPoint::Finite(z)))
                .collect();
            (-atoms.psi0.eval(&beta)).exp()
        })
        .collect();
    let rows: Vec<ConformalityRow> = boxes
        .iter()
        .map(|e| {
            let pushforward: f64 = (0..n).filter(|&i| e.contains(&moved[i])).map(|i| atoms.weight(i)).sum();
            let density_integral: f64 = (0..n)
                .filter(|&i| e.contains(atoms.position(i)))
                .map(|i| atoms.weight(i) * factor[i])
                .sum();
            let relative_deviation = if pushforward == density_integral {
                0.0
            } else {
                (pushforward - density_integral).abs() / pushforward.max(density_integral)
            };
            ConformalityRow {
                pushforward,
                density_integral,
                relative_deviation,
            }
        })
        .collect();
    let max_deviation = rows.iter().map(|r| r.relative_deviation).fold(0.0, f64::max);
    ConformalityReport {
        depth: atoms.depth,
        word: gamma.word().to_string(),
        rows,
        max_deviation,
    }
}
