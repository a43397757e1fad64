//! Small helpers on top of `num_complex::Complex64`.

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hermitian product `⟨z, w⟩ = z·w̄`.
#[inline]
pub fn inner(z: Complex64, w: Complex64) -> Complex64 {
    z * w.conj()
}

/// `Im⟨z, w⟩`, the symplectic form on the plane.
#[inline]
pub fn im_inner(z: Complex64, w: Complex64) -> f64 {
    z.im * w.re - z.re * w.im
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

#[inline]
pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Parses a `[re, im]` pair.
pub fn from_pair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Central-difference step used by every finite-difference adapter.
pub const FD_STEP: f64 = 1e-5;

/// Wirtinger derivatives `(∂f/∂z, ∂f/∂z̄)` by central differences with step `h`.
pub fn wirtinger<F: Fn(Complex64) -> Complex64>(
    f: F,
    z: Complex64,
    h: f64,
) -> (Complex64, Complex64) {
    let fx = (f(z + Complex64::new(h, 0.0)) - f(z - Complex64::new(h, 0.0))) / (2.0 * h);
    let fy = (f(z + Complex64::new(0.0, h)) - f(z - Complex64::new(0.0, h))) / (2.0 * h);
    ((fx - I * fy) * 0.5, (fx + I * fy) * 0.5)
}
