//! Uniform lattices `Γ = ℤω₁ + ℤω₂` in the plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{im_inner, is_finite};
use crate::{Error, Result};

/// Minimum `|Im(ω̄₁ω₂)|` accepted as non-degenerate.
pub const MIN_CELL_AREA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    omega1: Complex64,
    omega2: Complex64,
}

/// A lattice point `γ = m ω₁ + n ω₂` with its coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub gamma: Complex64,
    pub m: i64,
    pub n: i64,
}

impl Lattice {
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        if !is_finite(omega1) || !is_finite(omega2) {
            return Err(Error::DegenerateLattice(
                omega1.to_string(),
                omega2.to_string(),
            ));
        }
        let l = Lattice { omega1, omega2 };
        if l.signed_area().abs() <= MIN_CELL_AREA {
            return Err(Error::DegenerateLattice(
                omega1.to_string(),
                omega2.to_string(),
            ));
        }
        Ok(l)
    }

    /// The square lattice `ℤ + ℤi`.
    pub fn gaussian_integers() -> Self {
        Lattice {
            omega1: Complex64::new(1.0, 0.0),
            omega2: Complex64::new(0.0, 1.0),
        }
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn generators(&self) -> [Complex64; 2] {
        [self.omega1, self.omega2]
    }

    /// `Im(ω̄₁ω₂)`; positive when the basis is positively oriented.
    fn signed_area(&self) -> f64 {
        -im_inner(self.omega1, self.omega2)
    }

    pub fn cell_area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn point(&self, m: i64, n: i64) -> Complex64 {
        self.omega1 * m as f64 + self.omega2 * n as f64
    }

    /// Real coordinates `(s, t)` with `z = s ω₁ + t ω₂`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let area = self.signed_area();
        // Im(z̄ ω₂) = s·Im(ω̄₁ω₂), Im(ω̄₁ z) = t·Im(ω̄₁ω₂)
        let s = -im_inner(z, self.omega2) / area;
        let t = -im_inner(self.omega1, z) / area;
        (s, t)
    }

    /// The lattice point whose coordinates are the rounded coordinates of `z`.
    /// `z` minus this point lies in the centered fundamental parallelogram.
    pub fn round(&self, z: Complex64) -> LatticePoint {
        let (s, t) = self.coordinates(z);
        let (m, n) = (s.round() as i64, t.round() as i64);
        LatticePoint {
            gamma: self.point(m, n),
            m,
            n,
        }
    }

    /// Coordinates of a lattice point, or `None` when `gamma` is farther than
    /// `1e-9` (relative) from the lattice.
    pub fn index_of(&self, gamma: Complex64) -> Option<(i64, i64)> {
        let p = self.round(gamma);
        let scale = 1.0 + gamma.norm();
        ((p.gamma - gamma).norm() <= 1e-9 * scale).then_some((p.m, p.n))
    }

    /// Radius of the smallest disk around 0 containing the centered cell
    /// `{s ω₁ + t ω₂ : |s|, |t| ≤ ½}`.
    pub fn cell_radius(&self) -> f64 {
        0.5 * (self.omega1 + self.omega2)
            .norm()
            .max((self.omega1 - self.omega2).norm())
    }

    /// Every `γ = m ω₁ + n ω₂` with `|γ| ≤ radius`, lexicographic in `(m, n)`.
    pub fn enumerate_points(&self, radius: f64) -> Vec<LatticePoint> {
        self.enumerate_around(Complex64::new(0.0, 0.0), radius)
    }

    /// Every lattice point `γ` with `|γ − center| ≤ radius`, lexicographic in `(m, n)`.
    pub fn enumerate_around(&self, center: Complex64, radius: f64) -> Vec<LatticePoint> {
        if radius.is_nan() || radius < 0.0 {
            return Vec::new();
        }
        let area = self.cell_area();
        let (s0, t0) = self.coordinates(center);
        // |s − s0| ≤ radius·|ω₂|/area and |t − t0| ≤ radius·|ω₁|/area
        let ds = radius * self.omega2.norm() / area;
        let dt = radius * self.omega1.norm() / area;
        let (m_lo, m_hi) = ((s0 - ds).floor() as i64, (s0 + ds).ceil() as i64);
        let (n_lo, n_hi) = ((t0 - dt).floor() as i64, (t0 + dt).ceil() as i64);

        let mut out = Vec::new();
        for m in m_lo..=m_hi {
            for n in n_lo..=n_hi {
                let gamma = self.point(m, n);
                if (gamma - center).norm() <= radius {
                    out.push(LatticePoint { gamma, m, n });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cell_area_examples() {
        assert_eq!(
            Lattice::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap().cell_area(),
            1.0
        );
        assert_eq!(
            Lattice::new(c(1.0, 0.0), c(0.0, 2.0)).unwrap().cell_area(),
            2.0
        );
        assert_eq!(
            Lattice::new(c(1.0, 0.0), c(1.0, 1.0)).unwrap().cell_area(),
            1.0
        );
    }

    #[test]
    fn rejects_collinear() {
        assert!(matches!(
            Lattice::new(c(1.0, 0.0), c(2.0, 0.0)),
            Err(Error::DegenerateLattice(..))
        ));
        assert!(Lattice::new(c(1.0, 1.0), c(-3.0, -3.0)).is_err());
    }

    #[test]
    fn enumerate_small_radii() {
        let l = Lattice::gaussian_integers();
        let pts = l.enumerate_points(0.0);
        assert_eq!(
            pts,
            vec![LatticePoint {
                gamma: c(0.0, 0.0),
                m: 0,
                n: 0
            }]
        );

        let pts = l.enumerate_points(1.5);
        assert_eq!(pts.len(), 9);
        let coords: Vec<_> = pts.iter().map(|p| (p.m, p.n)).collect();
        let mut sorted = coords.clone();
        sorted.sort();
        assert_eq!(coords, sorted);
    }

    #[test]
    fn count_follows_area_law() {
        for l in [
            Lattice::gaussian_integers(),
            Lattice::new(c(1.0, 0.0), c(0.5, 3f64.sqrt() / 2.0)).unwrap(),
            Lattice::new(c(1.0, 0.0), c(7.3, 0.4)).unwrap(),
        ] {
            let r = 20.0;
            let expected = std::f64::consts::PI * r * r / l.cell_area();
            let got = l.enumerate_points(r).len() as f64;
            assert!(
                (got - expected).abs() / expected < 0.05,
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let l = Lattice::new(c(1.3, 0.2), c(-0.4, 2.1)).unwrap();
        let (s, t) = l.coordinates(l.point(3, -2));
        assert!((s - 3.0).abs() < 1e-12 && (t + 2.0).abs() < 1e-12);
        assert_eq!(l.index_of(l.point(-5, 7)), Some((-5, 7)));
        assert_eq!(l.index_of(c(0.5, 0.0)), None);
    }

    #[test]
    fn rounded_remainder_is_in_centered_cell() {
        let l = Lattice::new(c(1.0, 0.0), c(0.9, 0.3)).unwrap();
        for k in 0..200 {
            let z = c(
                (k as f64 * 0.731).sin() * 9.0,
                (k as f64 * 1.37).cos() * 9.0,
            );
            let p = l.round(z);
            assert!((z - p.gamma).norm() <= l.cell_radius() + 1e-12);
        }
    }

    fn skew_lattice() -> impl Strategy<Value = Lattice> {
        (0.3..2.0f64, -1.0..1.0f64, 0.2..2.0f64)
            .prop_map(|(a, b, h)| Lattice::new(c(a, 0.0), c(b, h)).unwrap())
    }

    proptest! {
        #[test]
        fn enumeration_is_exact_and_symmetric(l in skew_lattice(), r in 0.0..4.0f64) {
            let pts = l.enumerate_points(r);
            for p in &pts {
                prop_assert!(p.gamma.norm() <= r);
                prop_assert!(pts.iter().any(|q| q.m == -p.m && q.n == -p.n));
            }
            // brute force over a box that certainly contains the disk
            let min_len = l.omega1().norm().min(l.omega2().norm());
            let k = (r / min_len).ceil() as i64 + 1;
            let k = k.max((r * l.omega1().norm().max(l.omega2().norm()) / l.cell_area()).ceil() as i64 + 1);
            let mut brute = 0usize;
            for m in -k..=k {
                for n in -k..=k {
                    if l.point(m, n).norm() <= r {
                        brute += 1;
                        prop_assert!(pts.iter().any(|q| q.m == m && q.n == n));
                    }
                }
            }
            prop_assert_eq!(brute, pts.len());
        }
    }
}
