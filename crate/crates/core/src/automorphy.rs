//! Automorphy factors `j^α(g, z) = e^{2iα Im⟨z, g⁻¹·0⟩}` and
//! `J^{ν,μ}(g, z) = j^ν(g, z) j^μ(ρ(g), τ(z))`, the phase cocycle
//! `φ^{ν,μ}_ρ`, and the operators `T_g f = conj(J(g, ·)) f(g·)`.
//!
//! Factors are formed by accumulating the real exponent first and taking a
//! single complex exponential, so `|J| = 1` up to one rounding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{cis, im_inner};
use crate::equivariant::{rho_of, AffineTau, Tau, Weights};
use crate::group::GroupElement;
use crate::lattice::Lattice;
use crate::Result;

/// Absolute tolerance on `φ/π` for the integrality test.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// Exponent of `j^α`: `2α Im⟨z, g⁻¹·0⟩`.
#[inline]
pub fn j_exponent(alpha: f64, g: &GroupElement, z: Complex64) -> f64 {
    2.0 * alpha * im_inner(z, g.inverse_orbit_of_origin())
}

pub fn j_alpha(alpha: f64, g: &GroupElement, z: Complex64) -> Complex64 {
    cis(j_exponent(alpha, g, z))
}

/// Exponent of `J^{ν,μ}(g, z)`.
pub fn big_j_exponent(tau: &AffineTau, w: &Weights, g: &GroupElement, z: Complex64) -> Result<f64> {
    let rho = rho_of(tau, g)?.as_element();
    Ok(j_exponent(w.nu, g, z) + j_exponent(w.mu, &rho, tau.eval(z)))
}

pub fn big_j(tau: &AffineTau, w: &Weights, g: &GroupElement, z: Complex64) -> Result<Complex64> {
    big_j_exponent(tau, w, g, z).map(cis)
}

/// `φ^{ν,μ}_ρ(g, h) = Im(ν⟨g⁻¹·0, h·0⟩ + μ⟨ρ(g⁻¹)·0, ρ(h)·0⟩)`.
pub fn phase_factor(
    tau: &AffineTau,
    w: &Weights,
    g: &GroupElement,
    h: &GroupElement,
) -> Result<f64> {
    let g_inv = g.inverse();
    let rho_g_inv = rho_of(tau, &g_inv)?.psi;
    let rho_h = rho_of(tau, h)?.psi;
    Ok(
        w.nu * im_inner(g_inv.act(Complex64::new(0.0, 0.0)), h.translation_part())
            + w.mu * im_inner(rho_g_inv, rho_h),
    )
}

/// `φ/π` on generator pairs and the integrality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralityReport {
    pub ok: bool,
    pub table: [[f64; 2]; 2],
}

impl IntegralityReport {
    /// Largest distance of a table entry from the nearest integer.
    pub fn max_defect(&self) -> f64 {
        self.table
            .iter()
            .flatten()
            .map(|v| (v - v.round()).abs())
            .fold(0.0, f64::max)
    }
}

/// Tests whether `φ^{ν,μ}_ρ/π` is integer-valued on `Γ × Γ`. On translations
/// `φ` is `ℤ`-bilinear, so the four generator pairs decide it.
pub fn check_integrality(tau: &AffineTau, w: &Weights, lattice: &Lattice) -> IntegralityReport {
    let gens = lattice.generators().map(GroupElement::translation);
    let mut table = [[0.0; 2]; 2];
    for (i, g) in gens.iter().enumerate() {
        for (j, h) in gens.iter().enumerate() {
            // translations always admit rho
            let phi = phase_factor(tau, w, g, h).expect("translations are always equivariant");
            table[i][j] = phi / std::f64::consts::PI;
        }
    }
    let mut report = IntegralityReport { ok: false, table };
    report.ok = report.max_defect() <= INTEGRALITY_TOLERANCE;
    report
}

/// `|J(gh, z) − e^{2iφ(g,h)} J(g, h·z) J(h, z)|`.
pub fn chain_rule_residual(
    tau: &AffineTau,
    w: &Weights,
    g: &GroupElement,
    h: &GroupElement,
    z: Complex64,
) -> Result<f64> {
    let lhs = big_j(tau, w, &g.compose(h), z)?;
    let rhs =
        cis(2.0 * phase_factor(tau, w, g, h)?) * big_j(tau, w, g, h.act(z))? * big_j(tau, w, h, z)?;
    Ok((lhs - rhs).norm())
}

/// `[T_g f](z) = conj(J(g, z)) · f(g·z)`.
pub fn projective_apply<F>(
    tau: &AffineTau,
    w: &Weights,
    g: &GroupElement,
    f: F,
    z: Complex64,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    Ok(big_j(tau, w, g, z)?.conj() * f(g.act(z)))
}

/// The scalar `c(g, h)` with `T_g ∘ T_h = c(g, h) · T_{hg}`, namely
/// `e^{2iφ(h, g)}`. On commuting translations this is `e^{−2iφ(g, h)}`.
pub fn projective_multiplier(
    tau: &AffineTau,
    w: &Weights,
    g: &GroupElement,
    h: &GroupElement,
) -> Result<Complex64> {
    Ok(cis(2.0 * phase_factor(tau, w, h, g)?))
}
