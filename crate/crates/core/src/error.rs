use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("degenerate lattice: generators {0} and {1} are collinear")]
    DegenerateLattice(String, String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("rotation part {rotation} admits no equivariant rho for tau with c={c}, d={d}")]
    NotEquivariant {
        rotation: String,
        c: String,
        d: String,
    },

    #[error("non-positive weight B={0}: no decaying seed exists")]
    NonPositiveWeight(f64),

    #[error("phase cocycle is not pi-integral on the lattice (table {table:?})")]
    IntegralityViolated { table: [[f64; 2]; 2] },

    #[error("constructed form vanishes numerically (max |F| = {max_abs:e} after {attempts} seed centers)")]
    NumericallyVanishing { max_abs: f64, attempts: usize },

    #[error("quadrature did not converge: refinements differ by {difference:e} (tolerance {tolerance:e})")]
    QuadratureUnconverged { difference: f64, tolerance: f64 },

    #[error(
        "series tail bound {bound:e} still above tolerance {tol:e} at max radius {max_radius}"
    )]
    SeriesTruncation {
        bound: f64,
        tol: f64,
        max_radius: f64,
    },

    #[error("landau residual {residual:e} exceeds {limit:e} at construction probe")]
    ResidualExceeded { residual: f64, limit: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
