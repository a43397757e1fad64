//! Planar mixed automorphic forms over the motion group `T ⋉ ℂ`.
//!
//! The crate evaluates the automorphy factors `j^α` and `J^{ν,μ}`, the
//! phase cocycle and its integrality test, the constant weight `B`, the
//! gauge phase `φ` that intertwines mixed and Landau automorphic functions,
//! the pseudo-character `χ_τ`, and builds Landau forms by Gaussian
//! Poincaré averaging so the whole correspondence can be checked at
//! machine precision.
//!
//! ```
//! use autoforma::{AffineTau, Lattice, Weights, automorphy};
//! use num_complex::Complex64;
//! use std::f64::consts::FRAC_PI_2;
//!
//! let tau = AffineTau::identity();
//! let w = Weights::new(&tau, FRAC_PI_2, FRAC_PI_2).unwrap();
//! let lattice = Lattice::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
//! assert!(automorphy::check_integrality(&tau, &w, &lattice).ok);
//! ```

pub mod automorphy;
pub mod complex;
pub mod equivariant;
mod error;
pub mod experiment;
pub mod forms;
pub mod group;
pub mod lattice;
pub mod phi;
pub mod quadrature;
pub mod summation;

pub use equivariant::{AffineTau, RhoImage, SmoothTau, Tau, Weights};
pub use error::{Error, Result};
pub use forms::{FormEvaluator, FormKind};
pub use group::GroupElement;
pub use lattice::{Lattice, LatticePoint};
pub use phi::{CharacterTable, PhiSolution};
