//! The gauge phase `φ^{ν,μ}_τ` and the pseudo-character `χ_τ`.
//!
//! `φ` is the real solution, normalized by `φ(0) = 0`, of
//!
//! ```text
//! ∂φ/∂z̄ = S(z) := −iμ((τ ∂τ̄/∂z̄ − τ̄ ∂τ/∂z̄) − (|∂τ/∂z|² − |∂τ/∂z̄|²) z)
//! ```
//!
//! with `∂φ/∂z = conj(S)`. Both Wirtinger derivatives are pinned, so the
//! solution is unique. For affine `τ(z) = c z + d z̄ + e` the right-hand side
//! is the constant `−iμκ` with `κ = c̄e − dē`, and `φ(z) = −2μ Im(κ̄ z)`.
//! Otherwise `φ(z)` is the line integral of the closed form `2 Re(S̄ dw)`,
//! computed by composite Gauss–Legendre quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{cis, im_inner, wirtinger, FD_STEP, ZERO};
use crate::equivariant::{rho_of_translation, AffineTau, SmoothTau, Tau, Weights};
use crate::lattice::Lattice;
use crate::quadrature::{polyline_integral, GaussLegendre};
use crate::{Error, Result};

/// Right-hand side `S(z) = ∂φ/∂z̄` of the gauge-phase equation.
pub fn phi_rhs(tau: &dyn Tau, w: &Weights, z: Complex64) -> Complex64 {
    let t = tau.eval(z);
    let dz = tau.d_dz(z);
    let dzb = tau.d_dzbar(z);
    // ∂τ̄/∂z̄ = conj(∂τ/∂z)
    let bracket = t * dz.conj() - t.conj() * dzb;
    let jac = dz.norm_sqr() - dzb.norm_sqr();
    Complex64::new(0.0, -w.mu) * (bracket - z * jac)
}

/// `κ = c̄ e − d ē`.
pub fn affine_kappa(tau: &AffineTau) -> Complex64 {
    tau.c.conj() * tau.e - tau.d * tau.e.conj()
}

/// Composite Gauss–Legendre settings for the quadrature solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Points of the Gauss–Legendre rule on each piece.
    pub order: usize,
    /// Pieces per unit path length; pieces are at most `1/segments_per_unit` long.
    pub segments_per_unit: usize,
    /// Allowed difference between the result and its node-doubled refinement,
    /// relative to `max(1, |φ|)`.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            order: 16,
            segments_per_unit: 2,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
enum Representation {
    Affine {
        kappa: Complex64,
    },
    Quadrature {
        tau: SmoothTau,
        cfg: QuadratureConfig,
    },
}

/// A solved gauge phase; evaluation is pure and `φ(0) = 0`.
#[derive(Debug, Clone)]
pub struct PhiSolution {
    weights: Weights,
    repr: Representation,
}

impl PhiSolution {
    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn mu(&self) -> f64 {
        self.weights.mu
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.repr, Representation::Affine { .. })
    }

    /// `κ` of the closed form, if any.
    pub fn kappa(&self) -> Option<Complex64> {
        match self.repr {
            Representation::Affine { kappa } => Some(kappa),
            Representation::Quadrature { .. } => None,
        }
    }

    pub fn quadrature_config(&self) -> Option<QuadratureConfig> {
        match &self.repr {
            Representation::Affine { .. } => None,
            Representation::Quadrature { cfg, .. } => Some(*cfg),
        }
    }

    /// `φ(z)`. In quadrature mode this is the refined estimate along the
    /// straight path from 0, without the convergence check of [`Self::try_eval`].
    pub fn eval(&self, z: Complex64) -> f64 {
        match &self.repr {
            Representation::Affine { kappa } => {
                // + 0.0 turns a signed zero into +0
                -2.0 * self.weights.mu * (kappa.conj() * z).im + 0.0
            }
            Representation::Quadrature { tau, cfg } => {
                match phi_quadrature(tau, &self.weights, z, &[ZERO, z], cfg) {
                    Ok(v) => v,
                    Err(_) => integrate_path(tau, &self.weights, &[ZERO, z], cfg, 2),
                }
            }
        }
    }

    pub fn try_eval(&self, z: Complex64) -> Result<f64> {
        match &self.repr {
            Representation::Affine { .. } => Ok(self.eval(z)),
            Representation::Quadrature { tau, cfg } => {
                phi_quadrature(tau, &self.weights, z, &[ZERO, z], cfg)
            }
        }
    }

    /// `e^{iφ(z)}`.
    pub fn gauge(&self, z: Complex64) -> Complex64 {
        cis(self.eval(z))
    }
}

/// Closed-form gauge phase for affine `τ`.
pub fn phi_affine(tau: &AffineTau, w: &Weights) -> PhiSolution {
    PhiSolution {
        weights: *w,
        repr: Representation::Affine {
            kappa: affine_kappa(tau),
        },
    }
}

/// Gauge phase of a general smooth `τ`, evaluated by quadrature.
pub fn phi_numeric(tau: SmoothTau, w: &Weights, cfg: QuadratureConfig) -> PhiSolution {
    PhiSolution {
        weights: *w,
        repr: Representation::Quadrature { tau, cfg },
    }
}

fn integrate_path(
    tau: &dyn Tau,
    w: &Weights,
    path: &[Complex64],
    cfg: &QuadratureConfig,
    refine: usize,
) -> f64 {
    let rule = GaussLegendre::new(cfg.order);
    let max_segment = 1.0 / (cfg.segments_per_unit * refine) as f64;
    polyline_integral(&rule, path, max_segment, |u| {
        2.0 * phi_rhs(tau, w, u).conj()
    })
}

/// `φ(z) = ∫_path 2 Re(S̄(w) dw)` along a polyline from 0 to `z`.
///
/// The integral is repeated with twice the number of nodes; the refined
/// value is returned if both agree within the configured tolerance.
pub fn phi_quadrature(
    tau: &dyn Tau,
    w: &Weights,
    z: Complex64,
    path: &[Complex64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    match (path.first(), path.last()) {
        (Some(&start), Some(&end)) if start == ZERO && end == z => {}
        _ => {
            return Err(Error::Validation {
                field: "path".into(),
                message: format!("must run from 0 to {z}"),
            })
        }
    }
    let coarse = integrate_path(tau, w, path, cfg, 1);
    let fine = integrate_path(tau, w, path, cfg, 2);
    let difference = (fine - coarse).abs();
    let tolerance = cfg.tolerance * fine.abs().max(1.0);
    if difference > tolerance {
        return Err(Error::QuadratureUnconverged {
            difference,
            tolerance,
        });
    }
    Ok(fine)
}

/// Largest `|∂φ/∂z̄ − S|` (central differences) over `samples`.
pub fn pde_residual(tau: &dyn Tau, phi: &PhiSolution, samples: &[Complex64]) -> f64 {
    samples
        .iter()
        .map(|&z| {
            let (_, dzb) = wirtinger(|u| Complex64::new(phi.eval(u), 0.0), z, FD_STEP);
            (dzb - phi_rhs(tau, phi.weights(), z)).norm()
        })
        .fold(0.0, f64::max)
}

/// Residual of the reduced system
///
/// ```text
/// ∂ψ/∂z̄ = τ̄ ∂τ/∂z̄,     ∂ψ/∂z = (ν − B) z̄ / μ + τ̄ ∂τ/∂z,
/// ψ = (φ − i([B − ν]|z|² − μ|τ|²)) / (2iμ),
/// ```
/// by central differences, maximized over `samples`.
pub fn psi_reduction_residual(
    tau: &dyn Tau,
    w: &Weights,
    phi: &PhiSolution,
    samples: &[Complex64],
) -> f64 {
    let mu = w.mu;
    let shift = w.b - w.nu;
    let psi = |z: Complex64| {
        let quad = Complex64::new(0.0, shift * z.norm_sqr() - mu * tau.eval(z).norm_sqr());
        (Complex64::new(phi.eval(z), 0.0) - quad) / Complex64::new(0.0, 2.0 * mu)
    };
    samples
        .iter()
        .map(|&z| {
            let (dz, dzb) = wirtinger(psi, z, FD_STEP);
            let t_bar = tau.eval(z).conj();
            let r1 = (dzb - t_bar * tau.d_dzbar(z)).norm();
            let r2 = (dz - (z.conj() * (-shift / mu) + t_bar * tau.d_dz(z))).norm();
            r1.max(r2)
        })
        .fold(0.0, f64::max)
}

/// `a_γ = ρ(γ)⁻¹·0`.
fn rho_inverse_origin(tau: &AffineTau, gamma: Complex64) -> Complex64 {
    rho_of_translation(tau, gamma)
        .as_element()
        .inverse_orbit_of_origin()
}

/// The Landau multiplier `χ_τ(γ) = exp(iφ(γ) + 2iμ Im⟨τ(0), ρ(γ)⁻¹·0⟩)`.
///
/// This is `χ̂(0; γ)`, the value that makes
/// `e^{iφ(z+γ)} J(γ, z) e^{−iφ(z)} = χ_τ(γ) j^B(γ, z)` hold.
pub fn chi_tau(tau: &AffineTau, w: &Weights, phi: &PhiSolution, gamma: Complex64) -> Complex64 {
    let a = rho_inverse_origin(tau, gamma);
    cis(phi.eval(gamma) + 2.0 * w.mu * im_inner(tau.e, a))
}

/// `χ̂(z; γ) = e^{i(φ(z+γ) − φ(z))} e^{2i([B − ν] Im⟨z, γ⟩ + μ Im⟨τ(z), ρ(γ)⁻¹·0⟩)}`.
pub fn chi_hat(
    tau: &AffineTau,
    w: &Weights,
    phi: &PhiSolution,
    z: Complex64,
    gamma: Complex64,
) -> Complex64 {
    let a = rho_inverse_origin(tau, gamma);
    let exponent = phi.eval(z + gamma) - phi.eval(z)
        + 2.0 * ((w.b - w.nu) * im_inner(z, gamma) + w.mu * im_inner(tau.eval(z), a));
    cis(exponent)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiHatCheck {
    /// `max_z |χ̂(z; γ) − χ̂(0; γ)|`.
    pub spread: f64,
    /// `|χ̂(0; γ) − χ_τ(γ)|`.
    pub anchor_mismatch: f64,
}

pub fn chi_hat_residual(
    tau: &AffineTau,
    w: &Weights,
    phi: &PhiSolution,
    gamma: Complex64,
    zs: &[Complex64],
) -> ChiHatCheck {
    let anchor = chi_hat(tau, w, phi, ZERO, gamma);
    let spread = zs
        .iter()
        .map(|&z| (chi_hat(tau, w, phi, z, gamma) - anchor).norm())
        .fold(0.0, f64::max);
    ChiHatCheck {
        spread,
        anchor_mismatch: (anchor - chi_tau(tau, w, phi, gamma)).norm(),
    }
}

/// Largest `|χ(γ+γ′) − e^{2iB Im⟨γ,γ′⟩} χ(γ) χ(γ′)|` over `γ, γ′` with
/// coordinates bounded by `range`.
pub fn pseudo_char_residual(
    tau: &AffineTau,
    w: &Weights,
    phi: &PhiSolution,
    lattice: &Lattice,
    range: i64,
) -> f64 {
    let points: Vec<Complex64> = (-range..=range)
        .flat_map(|m| (-range..=range).map(move |n| (m, n)))
        .map(|(m, n)| lattice.point(m, n))
        .collect();
    let values: Vec<Complex64> = points.iter().map(|&g| chi_tau(tau, w, phi, g)).collect();
    let mut worst = 0.0f64;
    for (g, cg) in points.iter().zip(&values) {
        for (h, ch) in points.iter().zip(&values) {
            let lhs = chi_tau(tau, w, phi, g + h);
            let rhs = cis(2.0 * w.b * im_inner(*g, *h)) * cg * ch;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// A pseudo-character on `Γ`, stored by its generator values and extended by
/// `χ(mω₁ + nω₂) = e^{2iB mn Im⟨ω₁,ω₂⟩} χ(ω₁)^m χ(ω₂)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterTable {
    pub lattice: Lattice,
    pub values: [Complex64; 2],
    pub b: f64,
}

impl CharacterTable {
    pub fn new(tau: &AffineTau, w: &Weights, phi: &PhiSolution, lattice: &Lattice) -> Self {
        CharacterTable {
            lattice: *lattice,
            values: lattice.generators().map(|g| chi_tau(tau, w, phi, g)),
            b: w.b,
        }
    }

    /// The trivial character of weight `b`.
    pub fn trivial(lattice: &Lattice, b: f64) -> Self {
        CharacterTable {
            lattice: *lattice,
            values: [Complex64::new(1.0, 0.0); 2],
            b,
        }
    }

    pub fn at(&self, m: i64, n: i64) -> Complex64 {
        let [w1, w2] = self.lattice.generators();
        let arg = m as f64 * self.values[0].arg()
            + n as f64 * self.values[1].arg()
            + 2.0 * self.b * (m as f64) * (n as f64) * im_inner(w1, w2);
        cis(arg)
    }

    /// `χ(γ)` for a lattice vector `γ`; `None` off the lattice.
    pub fn value(&self, gamma: Complex64) -> Option<Complex64> {
        self.lattice.index_of(gamma).map(|(m, n)| self.at(m, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{I, ONE};
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tau(c_: Complex64, d: Complex64, e: Complex64) -> AffineTau {
        AffineTau::new(c_, d, e).unwrap()
    }

    fn samples(n: usize, radius: f64) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let t = k as f64 + 0.5;
                Complex64::from_polar(radius * (t / n as f64).sqrt(), t * 2.399_963)
            })
            .collect()
    }

    #[test]
    fn rhs_examples() {
        let w = Weights::new(&AffineTau::identity(), 1.0, 1.0).unwrap();
        for z in samples(10, 3.0) {
            assert_eq!(phi_rhs(&AffineTau::identity(), &w, z), ZERO);
            assert!(phi_rhs(&AffineTau::conjugation(), &w, z).norm() < 1e-15);
        }
        let shifted = tau(ONE, ZERO, c(0.5, 0.0));
        let w = Weights::new(&shifted, 1.0, 1.0).unwrap();
        for z in samples(10, 3.0) {
            assert!((phi_rhs(&shifted, &w, z) - c(0.0, -0.5)).norm() < 1e-14);
        }
    }

    #[test]
    fn rhs_is_constant_for_affine() {
        let t = tau(c(1.3, -0.4), c(0.2, 0.9), c(-0.7, 1.1));
        let w = Weights::new(&t, 0.6, 1.7).unwrap();
        let expected = c(0.0, -w.mu) * affine_kappa(&t);
        for z in samples(50, 4.0) {
            assert!((phi_rhs(&t, &w, z) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn affine_phi_examples() {
        let w = Weights::new(&AffineTau::identity(), 1.0, 1.0).unwrap();
        let phi = phi_affine(&AffineTau::identity(), &w);
        for z in samples(20, 5.0) {
            assert_eq!(phi.eval(z).to_bits(), 0.0f64.to_bits());
        }

        let shifted = tau(ONE, ZERO, c(0.5, 0.0));
        let w = Weights::new(&shifted, 1.0, 1.0).unwrap();
        let phi = phi_affine(&shifted, &w);
        assert_eq!(phi.eval(I), -1.0);
        let q = phi_quadrature(&shifted, &w, I, &[ZERO, I], &QuadratureConfig::default()).unwrap();
        assert!((q + 1.0).abs() < 1e-14);

        // τ = z̄ + i, μ = 2: κ = i, φ(1) = 4; the line integral agrees.
        let t = tau(ZERO, ONE, I);
        let w = Weights::new(&t, 1.0, 2.0).unwrap();
        let phi = phi_affine(&t, &w);
        assert_eq!(affine_kappa(&t), I);
        assert_eq!(phi.eval(ONE), 4.0);
        let q = phi_quadrature(&t, &w, ONE, &[ZERO, ONE], &QuadratureConfig::default()).unwrap();
        assert!((q - 4.0).abs() < 1e-13);
    }

    #[test]
    fn quadrature_closes_on_loops() {
        let t = tau(c(2.0, 0.0), ONE, c(0.3, -1.0));
        let w = Weights::new(&t, 1.0, 1.0).unwrap();
        let path = [ZERO, c(1.0, 0.0), c(1.0, 1.0), c(-0.5, 2.0), ZERO];
        let q = phi_quadrature(&t, &w, ZERO, &path, &QuadratureConfig::default()).unwrap();
        assert!(q.abs() < 1e-14);
    }

    #[test]
    fn quadrature_rejects_bad_paths() {
        let t = AffineTau::identity();
        let w = Weights::new(&t, 1.0, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        assert!(phi_quadrature(&t, &w, ONE, &[I, ONE], &cfg).is_err());
        assert!(phi_quadrature(&t, &w, ONE, &[ZERO, I], &cfg).is_err());
        assert!(phi_quadrature(&t, &w, ONE, &[], &cfg).is_err());
    }

    #[test]
    fn quadrature_reports_unconverged() {
        // a rapidly oscillating shear has a rough integrand at this resolution
        let shear = SmoothTau::new("shear", |z: Complex64| {
            z + Complex64::new((40.0 * z.im).sin(), 0.0)
        });
        let w = Weights {
            nu: 1.0,
            mu: 1.0,
            b: 2.0,
        };
        let cfg = QuadratureConfig {
            order: 2,
            segments_per_unit: 1,
            tolerance: 1e-12,
        };
        let z = c(3.0, 3.0);
        assert!(matches!(
            phi_quadrature(&shear, &w, z, &[ZERO, z], &cfg),
            Err(Error::QuadratureUnconverged { .. })
        ));
    }

    #[test]
    fn psi_reduction_examples() {
        for (t, nu, mu) in [
            (AffineTau::identity(), 1.0, 1.0),
            (tau(ONE, ZERO, c(0.5, 0.0)), 1.0, 1.0),
            (tau(c(2.0, 0.0), ONE, ZERO), 1.0, 1.0),
            (tau(c(0.4, 0.3), c(-1.2, 0.5), c(0.1, -0.6)), 0.3, 2.2),
        ] {
            let w = Weights::new(&t, nu, mu).unwrap();
            let phi = phi_affine(&t, &w);
            assert!(psi_reduction_residual(&t, &w, &phi, &samples(50, 2.0)) <= 1e-6);
        }
    }

    #[test]
    fn chi_tau_examples() {
        let l = Lattice::gaussian_integers();
        let t = AffineTau::identity();
        let w = Weights::new(&t, 0.7, 1.9).unwrap();
        let phi = phi_affine(&t, &w);
        for m in -3..=3 {
            for n in -3..=3 {
                assert_eq!(chi_tau(&t, &w, &phi, l.point(m, n)), ONE);
            }
        }

        // τ = z + ½, ν = μ = π/2: φ(γ) = −(π/2) Im γ and the τ(0) term cancel it
        let t = tau(ONE, ZERO, c(0.5, 0.0));
        let w = Weights::new(&t, FRAC_PI_2, FRAC_PI_2).unwrap();
        let phi = phi_affine(&t, &w);
        assert!((chi_tau(&t, &w, &phi, ONE) - ONE).norm() < 1e-15);
        assert!((chi_tau(&t, &w, &phi, I) - ONE).norm() < 1e-15);

        // φ(γ) = 2μ Im⟨e, ψ(γ)⟩ cancels the τ(0) term for every affine τ
        let t = tau(ZERO, ONE, I);
        let w = Weights::new(&t, 1.0, 2.0).unwrap();
        let phi = phi_affine(&t, &w);
        assert_eq!(phi.eval(ONE), 4.0);
        assert!((chi_tau(&t, &w, &phi, ONE) - ONE).norm() < 1e-15);
        assert!((chi_tau(&t, &w, &phi, I) - ONE).norm() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn affine_multiplier_is_trivial(a in -2.0..2.0f64, b in -2.0..2.0f64, p in -2.0..2.0f64,
                                        q in -2.0..2.0f64, r in -2.0..2.0f64, s in -2.0..2.0f64,
                                        x in -6.0..6.0f64, y in -6.0..6.0f64) {
            let t = tau(c(a, b), c(p, q), c(r, s));
            let w = Weights::new(&t, 0.9, 1.4).unwrap();
            let phi = phi_affine(&t, &w);
            let gamma = c(x, y);
            proptest::prop_assert!((chi_tau(&t, &w, &phi, gamma) - ONE).norm() <= 1e-12);
            proptest::prop_assert!(psi_reduction_residual(&t, &w, &phi, &[c(y, x) * 0.3]) <= 1e-6);
        }
    }

    #[test]
    fn chi_hat_is_z_independent() {
        let l = Lattice::gaussian_integers();
        for (t, nu, mu) in [
            (AffineTau::identity(), FRAC_PI_2, FRAC_PI_2),
            (tau(ONE, ZERO, c(0.5, 0.0)), FRAC_PI_2, FRAC_PI_2),
            (
                tau(c(2.0, 0.0), ONE, ZERO),
                std::f64::consts::FRAC_PI_4,
                std::f64::consts::FRAC_PI_4,
            ),
        ] {
            let w = Weights::new(&t, nu, mu).unwrap();
            let phi = phi_affine(&t, &w);
            for gamma in [l.omega1(), l.omega2(), l.omega1() + l.omega2()] {
                let check = chi_hat_residual(&t, &w, &phi, gamma, &samples(100, 3.0));
                assert!(check.spread <= 1e-11, "{check:?}");
                assert!(check.anchor_mismatch <= 1e-12, "{check:?}");
            }
        }
    }

    #[test]
    fn pseudo_character_law() {
        let l = Lattice::gaussian_integers();
        let t = AffineTau::identity();
        let w = Weights::new(&t, FRAC_PI_2, FRAC_PI_2).unwrap();
        let phi = phi_affine(&t, &w);
        assert!(pseudo_char_residual(&t, &w, &phi, &l, 5) <= 1e-11);
        assert_eq!(pseudo_char_residual(&t, &w, &phi, &l, 0), 0.0);

        let w = Weights::new(&t, 1.0, 1.0).unwrap();
        let phi = phi_affine(&t, &w);
        assert!(pseudo_char_residual(&t, &w, &phi, &l, 2) > 0.1);
    }

    #[test]
    fn character_table_extension_matches_direct_values() {
        let l = Lattice::new(c(1.0, 0.0), c(0.5, 1.0)).unwrap();
        // B = ν + 3μ with area 1: B = π keeps integrality
        let t = tau(c(2.0, 0.0), ONE, c(0.25, -0.5));
        let w = Weights::new(&t, std::f64::consts::PI / 4.0, std::f64::consts::PI / 4.0).unwrap();
        let phi = phi_affine(&t, &w);
        let table = CharacterTable::new(&t, &w, &phi, &l);
        for m in -4..=4 {
            for n in -4..=4 {
                let direct = chi_tau(&t, &w, &phi, l.point(m, n));
                assert!((table.at(m, n) - direct).norm() < 1e-12, "({m},{n})");
            }
        }
        assert!(table.value(c(0.3, 0.3)).is_none());
    }
}
