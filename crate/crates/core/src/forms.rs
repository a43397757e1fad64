//! Landau `(Γ, χ)`-automorphic functions built by Poincaré averaging of
//! Gaussians, the gauge transform `W f = e^{iφ} f`, and the residuals that
//! certify the two functional equations
//!
//! ```text
//! Landau:  F(z + γ) = χ(γ) j^B(γ, z) F(z)
//! mixed:   F(z + γ) = j^ν(γ, z) j^μ(ρ(γ), τ(z)) F(z)
//! ```

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphy::{big_j, check_integrality, j_exponent};
use crate::complex::{cis, ZERO};
use crate::equivariant::{AffineTau, Weights};
use crate::group::GroupElement;
use crate::lattice::{Lattice, LatticePoint};
use crate::phi::{CharacterTable, PhiSolution};
use crate::summation::ComplexCompensatedSum;
use crate::{Error, Result};

/// Below this `max |F|` on the fundamental cell a form counts as vanishing.
pub const VANISHING_THRESHOLD: f64 = 1e-8;
/// Grid used when testing a fresh series for vanishing.
pub const VANISHING_GRID: usize = 32;
/// Number of construction-time probes.
pub const CONSTRUCTION_PROBES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Seed,
    Landau,
    Mixed,
}

/// A complex function of the plane with the data it was built from.
#[derive(Clone)]
pub struct FormEvaluator {
    pub kind: FormKind,
    /// Weight `B` of the Landau factor.
    pub weight: f64,
    pub character: Option<CharacterTable>,
    pub truncation_radius: f64,
    pub seed_center: Complex64,
    /// Seed centers tried before a non-vanishing series was found.
    pub seed_attempts: usize,
    f: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for FormEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormEvaluator")
            .field("kind", &self.kind)
            .field("weight", &self.weight)
            .field("character", &self.character)
            .field("truncation_radius", &self.truncation_radius)
            .field("seed_center", &self.seed_center)
            .field("seed_attempts", &self.seed_attempts)
            .finish_non_exhaustive()
    }
}

/// Serializable summary of a [`FormEvaluator`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormMetadata {
    pub kind: FormKind,
    pub weight: f64,
    pub character: Option<[[f64; 2]; 2]>,
    pub truncation_radius: f64,
    pub seed_center: [f64; 2],
    pub seed_attempts: usize,
}

impl FormEvaluator {
    pub fn new<F>(kind: FormKind, weight: f64, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        FormEvaluator {
            kind,
            weight,
            character: None,
            truncation_radius: 0.0,
            seed_center: ZERO,
            seed_attempts: 0,
            f: Arc::new(f),
        }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    pub fn metadata(&self) -> FormMetadata {
        FormMetadata {
            kind: self.kind,
            weight: self.weight,
            character: self.character.map(|c| c.values.map(|v| [v.re, v.im])),
            truncation_radius: self.truncation_radius,
            seed_center: [self.seed_center.re, self.seed_center.im],
            seed_attempts: self.seed_attempts,
        }
    }
}

/// `z ↦ exp(−(B/2)|z − center|²)`.
pub fn gaussian_seed(b: f64, center: Complex64) -> Result<FormEvaluator> {
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::NonPositiveWeight(b));
    }
    let mut f = FormEvaluator::new(FormKind::Seed, b, move |z: Complex64| {
        Complex64::new((-0.5 * b * (z - center).norm_sqr()).exp(), 0.0)
    });
    f.seed_center = center;
    Ok(f)
}

/// Upper bound on `Σ_{|γ − c| > R} exp(−(B/2)|γ − c|²)`, uniform in `c`.
///
/// Each lattice point owns its centered cell of area `A` and radius `ρ`; the
/// sum is dominated by `(2π/A) ∫_{R−2ρ}^∞ (u + ρ) e^{−(B/2)u²} du`, and the
/// Gaussian tail integral is bounded by the Mills ratio. Needs `R > 2ρ`.
pub fn gaussian_tail_bound(lattice: &Lattice, b: f64, radius: f64) -> f64 {
    let rho = lattice.cell_radius();
    let u0 = radius - 2.0 * rho;
    if u0 <= 0.0 {
        return f64::INFINITY;
    }
    let area = lattice.cell_area();
    2.0 * std::f64::consts::PI / area * (-0.5 * b * u0 * u0).exp() / b * (1.0 + rho / u0)
}

/// Smallest radius on a 0.25 grid whose tail bound is below `tol`.
pub fn truncation_radius(lattice: &Lattice, b: f64, tol: f64, max_radius: f64) -> Result<f64> {
    let mut r = (2.0 * lattice.cell_radius() / 0.25).floor() * 0.25 + 0.25;
    loop {
        let bound = gaussian_tail_bound(lattice, b, r);
        if bound < tol {
            return Ok(r);
        }
        if r > max_radius {
            return Err(Error::SeriesTruncation {
                bound,
                tol,
                max_radius,
            });
        }
        r += 0.25;
    }
}

/// Series settings for [`poincare_landau`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub tol: f64,
    pub max_radius: f64,
    /// Seed of the construction-time probe generator.
    pub probe_seed: u64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            tol: 1e-10,
            max_radius: 50.0,
            probe_seed: 0x5eed,
        }
    }
}

/// `F(z) = Σ_γ conj(χ(γ) j^B(γ, z)) exp(−(B/2)|z + γ − center|²)`, truncated
/// to the lattice points with `|z + γ − center| ≤ R`. The window follows
/// `z`, so the truncation error is below the tail bound everywhere.
pub fn poincare_series(
    chi: &CharacterTable,
    lattice: &Lattice,
    center: Complex64,
    radius: f64,
) -> Result<FormEvaluator> {
    let b = chi.b;
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::NonPositiveWeight(b));
    }
    let lattice = *lattice;
    let chi = *chi;
    let offsets: Vec<LatticePoint> = lattice.enumerate_points(radius + lattice.cell_radius());
    let eval = move |z: Complex64| {
        let w = z - center;
        let base = lattice.round(-w);
        let mut acc = ComplexCompensatedSum::new();
        for off in &offsets {
            let (m, n) = (base.m + off.m, base.n + off.n);
            let gamma = lattice.point(m, n);
            let dist2 = (w + gamma).norm_sqr();
            if dist2 > radius * radius {
                continue;
            }
            let phase = chi.at(m, n).arg() + j_exponent(b, &GroupElement::translation(gamma), z);
            acc.add(cis(-phase) * (-0.5 * b * dist2).exp());
        }
        acc.value()
    };
    let mut f = FormEvaluator::new(FormKind::Landau, b, eval);
    f.character = Some(chi);
    f.truncation_radius = radius;
    f.seed_center = center;
    Ok(f)
}

/// `|F(z+γ) − χ(γ) j^B(γ, z) F(z)| / max(1, |F(z)|)`; infinite when `γ` is
/// not a lattice vector of `chi`.
pub fn landau_residual(
    f: &FormEvaluator,
    chi: &CharacterTable,
    b: f64,
    z: Complex64,
    gamma: Complex64,
) -> f64 {
    let Some(chi_gamma) = chi.value(gamma) else {
        return f64::INFINITY;
    };
    let fz = f.eval(z);
    let expected = chi_gamma * cis(j_exponent(b, &GroupElement::translation(gamma), z)) * fz;
    (f.eval(z + gamma) - expected).norm() / fz.norm().max(1.0)
}

/// `|F(z+γ) − J^{ν,μ}(γ, z) F(z)| / max(1, |F(z)|)`.
pub fn mixed_residual(
    f: &FormEvaluator,
    tau: &AffineTau,
    w: &Weights,
    z: Complex64,
    gamma: Complex64,
) -> f64 {
    let j = big_j(tau, w, &GroupElement::translation(gamma), z)
        .expect("translations are always equivariant");
    let fz = f.eval(z);
    (f.eval(z + gamma) - j * fz).norm() / fz.norm().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeDirection {
    /// `f ↦ e^{iφ} f`, mixed to Landau.
    Forward,
    /// `f ↦ e^{−iφ} f`, Landau to mixed.
    Inverse,
}

pub fn apply_gauge(
    phi: &PhiSolution,
    f: &FormEvaluator,
    direction: GaugeDirection,
) -> FormEvaluator {
    let sign = match direction {
        GaugeDirection::Forward => 1.0,
        GaugeDirection::Inverse => -1.0,
    };
    let phi_c = phi.clone();
    let inner = f.clone();
    let mut out = FormEvaluator::new(
        match direction {
            GaugeDirection::Forward => FormKind::Landau,
            GaugeDirection::Inverse => FormKind::Mixed,
        },
        f.weight,
        move |z| cis(sign * phi_c.eval(z)) * inner.eval(z),
    );
    out.character = f.character;
    out.truncation_radius = f.truncation_radius;
    out.seed_center = f.seed_center;
    out.seed_attempts = f.seed_attempts;
    out
}

/// Grid points `s ω₁ + t ω₂` with `s = i/grid`, `t = j/grid`, row-major in `(i, j)`.
pub fn cell_grid(lattice: &Lattice, nx: usize, ny: usize) -> Vec<Complex64> {
    (0..nx)
        .flat_map(|i| {
            (0..ny).map(move |j| {
                lattice.omega1() * (i as f64 / nx as f64)
                    + lattice.omega2() * (j as f64 / ny as f64)
            })
        })
        .collect()
}

/// `max |F|` over a `grid × grid` sampling of the fundamental cell.
pub fn nontriviality_scan(f: &FormEvaluator, lattice: &Lattice, grid: usize) -> f64 {
    cell_grid(lattice, grid, grid)
        .par_iter()
        .map(|&z| f.eval(z).norm())
        .reduce(|| 0.0, f64::max)
}

/// Deterministic probe pairs `(z, γ)` with `z` in `[-half_box, half_box]²`
/// and `γ = m ω₁ + n ω₂`, `|m|, |n| ≤ max_index`.
pub fn probe_pairs(
    lattice: &Lattice,
    seed: u64,
    count: usize,
    half_box: f64,
    max_index: i64,
) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z = Complex64::new(
                rng.gen_range(-half_box..=half_box),
                rng.gen_range(-half_box..=half_box),
            );
            let m = rng.gen_range(-max_index..=max_index);
            let n = rng.gen_range(-max_index..=max_index);
            (z, lattice.point(m, n))
        })
        .collect()
}

/// Builds a non-vanishing Landau form of weight `B` and multiplier `chi`.
///
/// Requires the phase cocycle of `(τ, ν, μ)` to be `π`-integral on `Γ`.
/// Seed centers `0, ω₁/3, ω₂/3, (ω₁+ω₂)/3` are tried in order until the
/// series does not vanish on the fundamental cell; the result is then probed
/// at [`CONSTRUCTION_PROBES`] points.
pub fn poincare_landau(
    tau: &AffineTau,
    w: &Weights,
    chi: &CharacterTable,
    lattice: &Lattice,
    cfg: &SeriesConfig,
) -> Result<FormEvaluator> {
    let integrality = check_integrality(tau, w, lattice);
    if !integrality.ok {
        return Err(Error::IntegralityViolated {
            table: integrality.table,
        });
    }
    if !chi.b.is_finite() || chi.b <= 0.0 {
        return Err(Error::NonPositiveWeight(chi.b));
    }
    let radius = truncation_radius(lattice, chi.b, cfg.tol, cfg.max_radius)?;
    let [w1, w2] = lattice.generators();
    let centers = [ZERO, w1 / 3.0, w2 / 3.0, (w1 + w2) / 3.0];

    let mut best = 0.0f64;
    for (attempt, &center) in centers.iter().enumerate() {
        let mut form = poincare_series(chi, lattice, center, radius)?;
        let max_abs = nontriviality_scan(&form, lattice, VANISHING_GRID);
        best = best.max(max_abs);
        if max_abs < VANISHING_THRESHOLD {
            continue;
        }
        form.seed_attempts = attempt + 1;
        let half_box = 2.0 * w1.norm().max(w2.norm());
        let limit = 10.0 * cfg.tol;
        for (z, gamma) in probe_pairs(lattice, cfg.probe_seed, CONSTRUCTION_PROBES, half_box, 3) {
            let residual = landau_residual(&form, chi, chi.b, z, gamma);
            if residual.is_nan() || residual > limit {
                return Err(Error::ResidualExceeded { residual, limit });
            }
        }
        return Ok(form);
    }
    Err(Error::NumericallyVanishing {
        max_abs: best,
        attempts: centers.len(),
    })
}
