//! The motion group `G = T ⋉ ℂ` acting on the plane by `g·z = a z + b`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{is_finite, ONE, ZERO};
use crate::{Error, Result};

/// Admissible deviation of `|a|` from 1.
pub const UNIT_TOLERANCE: f64 = 1e-14;

/// An element `(a, b)` of `T ⋉ ℂ`, with `|a| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    a: Complex64,
    b: Complex64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: ONE, b: ZERO };

    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        if !is_finite(a) || !is_finite(b) {
            return Err(Error::InvalidElement(format!(
                "non-finite component ({a}, {b})"
            )));
        }
        if (a.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidElement(format!(
                "rotation part {a} has modulus {}",
                a.norm()
            )));
        }
        Ok(GroupElement { a, b })
    }

    /// Pure translation `z ↦ z + b`.
    pub fn translation(b: Complex64) -> Self {
        GroupElement { a: ONE, b }
    }

    /// Rotation by angle `theta` about the origin.
    pub fn rotation(theta: f64) -> Self {
        GroupElement {
            a: crate::complex::cis(theta),
            b: ZERO,
        }
    }

    /// Builds an element whose rotation part is only known to be unit up to
    /// rounding; `a` is renormalized.
    pub(crate) fn from_parts_normalized(a: Complex64, b: Complex64) -> Self {
        GroupElement { a: a / a.norm(), b }
    }

    pub fn rotation_part(&self) -> Complex64 {
        self.a
    }

    pub fn translation_part(&self) -> Complex64 {
        self.b
    }

    pub fn is_translation(&self) -> bool {
        self.a == ONE
    }

    /// Group law: `(a, b)(a', b') = (a a', a b' + b)`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let a = self.a * other.a;
        GroupElement {
            a: a / a.norm(),
            b: self.a * other.b + self.b,
        }
    }

    /// `(ā, −ā b)`.
    pub fn inverse(&self) -> GroupElement {
        let ac = self.a.conj();
        GroupElement {
            a: ac,
            b: -(ac * self.b),
        }
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    /// `g⁻¹·0 = −ā b`, the point the automorphy factor pairs against.
    pub fn inverse_orbit_of_origin(&self) -> Complex64 {
        -(self.a.conj() * self.b)
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.compose(&rhs)
    }
}
