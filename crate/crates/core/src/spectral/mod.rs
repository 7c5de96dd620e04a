//! Uniform periodic grids, scalar fields and Fourier-diagonal elliptic solves.
//!
//! Every spatial discretization decision lives here. The Laplacian is the exact
//! spectral one: a mode with integer wavenumbers `(kx, ky)` is multiplied by
//! `-(2π/L)² (kx² + ky²)`. There is deliberately no finite-difference variant.
//!
//! Fields are sampled at cell centers `((i + ½)h, (j + ½)h)`, stored row-major
//! with `i` running along `x`.

mod field;
mod io;
mod transform;

pub use field::{make_field, GridSpec, ScalarField};
pub use io::{read_binary, write_binary, write_csv, FieldFormatError, FIELD_MAGIC};
pub use transform::{HelmholtzOperator, SpectralPlan, Spectrum};

use thiserror::Error;

/// Relative residual every linear solve in the crate must meet.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value {value} at cell ({i}, {j})")]
    NonFinite { i: usize, j: usize, value: f64 },
    #[error("field has {got} values but the grid expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid Helmholtz coefficients a = {a}, b = {b}")]
    InvalidOperator { a: f64, b: f64 },
    #[error("singular system: a = 0 but the right-hand side has mean {mean:e}")]
    Singular { mean: f64 },
    #[error("norm exponent p = {0} must be at least 1")]
    InvalidExponent(f64),
}

/// Spectral Laplacian of `u`.
pub fn laplacian(u: &ScalarField) -> ScalarField {
    SpectralPlan::new(u.grid()).laplacian(u)
}

/// Solves `(a - bΔ) u = rhs` with the operator's precomputed symbol.
pub fn helmholtz_solve(
    op: &HelmholtzOperator,
    rhs: &ScalarField,
) -> Result<ScalarField, FieldError> {
    op.solve(rhs)
}

/// Discrete `L^p` norm `(h² Σ |u|^p)^{1/p}`; `p = ∞` gives the max norm.
pub fn lp_norm(u: &ScalarField, p: f64) -> Result<f64, FieldError> {
    if !(p >= 1.0) {
        return Err(FieldError::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(u.max_abs());
    }
    let h2 = u.grid().cell_area();
    let sum: f64 = if p == 2.0 {
        u.values().iter().map(|v| v * v).sum()
    } else if p == 1.0 {
        u.values().iter().map(|v| v.abs()).sum()
    } else {
        u.values().iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok((h2 * sum).powf(1.0 / p))
}

/// `h² Σ u_ij v_ij`.
pub fn l2_inner(u: &ScalarField, v: &ScalarField) -> Result<f64, FieldError> {
    if u.grid() != v.grid() {
        return Err(FieldError::GridMismatch);
    }
    let h2 = u.grid().cell_area();
    Ok(h2
        * u.values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| a * b)
            .sum::<f64>())
}

/// `[u]_{H¹}` computed in Fourier space with the same normalization as [`lp_norm`] at `p = 2`.
pub fn h1_seminorm(u: &ScalarField) -> f64 {
    SpectralPlan::new(u.grid()).h1_seminorm(u)
}
