//! Equivariant pairs `(ρ, τ)` with `τ(g·z) = ρ(g)·τ(z)`, and the weight
//! `B = ν + μ(|∂τ/∂z|² − |∂τ/∂z̄|²)`.
//!
//! The first-class family is affine, `τ(z) = c z + d z̄ + e`; these are
//! exactly the maps equivariant under every translation. Other smooth maps
//! enter through [`SmoothTau`], whose derivatives are central differences and
//! which is only used by verification routines.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{is_finite, wirtinger, FD_STEP, ONE, ZERO};
use crate::group::GroupElement;
use crate::{Error, Result};

/// Tolerance for recognizing a rotation part as `±1`.
const SIGN_TOLERANCE: f64 = 1e-14;

/// A smooth map of the plane together with its Wirtinger derivatives.
pub trait Tau: Send + Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    fn d_dz(&self, z: Complex64) -> Complex64 {
        wirtinger(|w| self.eval(w), z, FD_STEP).0
    }

    fn d_dzbar(&self, z: Complex64) -> Complex64 {
        wirtinger(|w| self.eval(w), z, FD_STEP).1
    }
}

/// `τ(z) = c z + d z̄ + e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineTau {
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
}

impl AffineTau {
    pub fn new(c: Complex64, d: Complex64, e: Complex64) -> Result<Self> {
        if !(is_finite(c) && is_finite(d) && is_finite(e)) {
            return Err(Error::Validation {
                field: "tau".into(),
                message: "coefficients must be finite".into(),
            });
        }
        Ok(AffineTau { c, d, e })
    }

    /// `τ(z) = z`; paired with `ρ = id`.
    pub fn identity() -> Self {
        AffineTau {
            c: ONE,
            d: ZERO,
            e: ZERO,
        }
    }

    /// `τ(z) = z̄`.
    pub fn conjugation() -> Self {
        AffineTau {
            c: ZERO,
            d: ONE,
            e: ZERO,
        }
    }

    /// `|∂τ/∂z|² − |∂τ/∂z̄|²`, the Jacobian determinant of `τ`.
    pub fn jacobian(&self) -> f64 {
        self.c.norm_sqr() - self.d.norm_sqr()
    }

    /// Whether some `χ ∈ T` makes `τ(a z + b) = χ τ(z) + ψ` hold identically.
    pub fn admits_rotation(&self, a: Complex64) -> bool {
        self.c == ZERO || self.d == ZERO || is_sign(a)
    }
}

fn is_sign(a: Complex64) -> bool {
    (a - ONE).norm() <= SIGN_TOLERANCE || (a + ONE).norm() <= SIGN_TOLERANCE
}

impl Tau for AffineTau {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.c * z + self.d * z.conj() + self.e
    }

    fn d_dz(&self, _z: Complex64) -> Complex64 {
        self.c
    }

    fn d_dzbar(&self, _z: Complex64) -> Complex64 {
        self.d
    }
}

type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A general smooth `τ` given as a closure; derivatives by central
/// differences unless supplied with [`SmoothTau::with_derivatives`].
#[derive(Clone)]
pub struct SmoothTau {
    name: String,
    f: ComplexFn,
    derivatives: Option<(ComplexFn, ComplexFn)>,
}

impl SmoothTau {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        SmoothTau {
            name: name.into(),
            f: Arc::new(f),
            derivatives: None,
        }
    }

    /// Supplies `∂τ/∂z` and `∂τ/∂z̄` analytically.
    pub fn with_derivatives<D, E>(mut self, d_dz: D, d_dzbar: E) -> Self
    where
        D: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        E: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.derivatives = Some((Arc::new(d_dz), Arc::new(d_dzbar)));
        self
    }

    /// Wraps an affine map so that it is differentiated numerically.
    pub fn from_affine(tau: AffineTau) -> Self {
        SmoothTau::new("affine", move |z| tau.eval(z))
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for SmoothTau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothTau")
            .field("name", &self.name)
            .finish()
    }
}

impl Tau for SmoothTau {
    fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    fn d_dz(&self, z: Complex64) -> Complex64 {
        match &self.derivatives {
            Some((dz, _)) => dz(z),
            None => wirtinger(|w| self.eval(w), z, FD_STEP).0,
        }
    }

    fn d_dzbar(&self, z: Complex64) -> Complex64 {
        match &self.derivatives {
            Some((_, dzb)) => dzb(z),
            None => wirtinger(|w| self.eval(w), z, FD_STEP).1,
        }
    }
}

/// `ρ(g) = [χ(g), ψ(g)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoImage {
    pub chi: Complex64,
    pub psi: Complex64,
}

impl RhoImage {
    pub fn as_element(&self) -> GroupElement {
        GroupElement::from_parts_normalized(self.chi, self.psi)
    }
}

/// `ρ` on the translation `z ↦ z + t`: `(1, c t + d t̄)`.
pub fn rho_of_translation(tau: &AffineTau, t: Complex64) -> RhoImage {
    RhoImage {
        chi: ONE,
        psi: tau.c * t + tau.d * t.conj(),
    }
}

/// `ρ(g)` for a general element, when `τ` is compatible with its rotation part.
pub fn rho_of(tau: &AffineTau, g: &GroupElement) -> Result<RhoImage> {
    let a = g.rotation_part();
    let b = g.translation_part();
    if g.is_translation() {
        return Ok(rho_of_translation(tau, b));
    }
    let chi = if tau.d == ZERO || is_sign(a) {
        a
    } else if tau.c == ZERO {
        a.conj()
    } else {
        return Err(Error::NotEquivariant {
            rotation: a.to_string(),
            c: tau.c.to_string(),
            d: tau.d.to_string(),
        });
    };
    Ok(RhoImage {
        chi,
        psi: tau.c * b + tau.d * b.conj() + tau.e * (ONE - chi),
    })
}

/// Largest `|τ(g·z) − (χ(g) τ(z) + ψ(g))|` over all elements and samples.
pub fn check_equivariance(
    tau: &AffineTau,
    elements: &[GroupElement],
    samples: &[Complex64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in elements {
        let rho = rho_of(tau, g)?;
        for &z in samples {
            let r = (tau.eval(g.act(z)) - (rho.chi * tau.eval(z) + rho.psi)).norm();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Equivariance defect of a general `τ` under the translation by `t`: the
/// best constant `ψ` (least squares over `samples`) is fitted to
/// `τ(z + t) − τ(z)` and the largest deviation from it is returned.
pub fn translation_defect(tau: &dyn Tau, t: Complex64, samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let diffs: Vec<Complex64> = samples
        .iter()
        .map(|&z| tau.eval(z + t) - tau.eval(z))
        .collect();
    let psi = diffs.iter().sum::<Complex64>() / diffs.len() as f64;
    diffs.iter().map(|d| (d - psi).norm()).fold(0.0, f64::max)
}

/// Type weights `ν, μ > 0` and the derived constant weight `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub nu: f64,
    pub mu: f64,
    pub b: f64,
}

impl Weights {
    pub fn new(tau: &AffineTau, nu: f64, mu: f64) -> Result<Self> {
        validate_positive("nu", nu)?;
        validate_positive("mu", mu)?;
        Ok(Weights {
            nu,
            mu,
            b: nu + mu * tau.jacobian(),
        })
    }
}

fn validate_positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeights(format!(
            "{field} must be a finite positive real, got {v}"
        )))
    }
}

/// `B(z)` recomputed from finite-difference derivatives of `τ` at `z`.
pub fn weight_at(tau: &dyn Tau, nu: f64, mu: f64, z: Complex64) -> f64 {
    let (dz, dzb) = wirtinger(|w| tau.eval(w), z, FD_STEP);
    nu + mu * (dz.norm_sqr() - dzb.norm_sqr())
}

/// Closed-form weight plus a sampled constancy certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub weights: Weights,
    /// `max |B(z) − B|` over the samples, `B(z)` by central differences.
    pub constancy: f64,
}

pub fn compute_b(tau: &AffineTau, nu: f64, mu: f64, samples: &[Complex64]) -> Result<WeightReport> {
    let weights = Weights::new(tau, nu, mu)?;
    let constancy = samples
        .iter()
        .map(|&z| (weight_at(tau, nu, mu, z) - weights.b).abs())
        .fold(0.0, f64::max);
    Ok(WeightReport { weights, constancy })
}
