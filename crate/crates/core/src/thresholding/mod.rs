//! The thresholding iteration hidden in the `τ = ∞` quadratic step, its monotone energy and the
//! whole-space kernel identities behind its time scale.

mod kernel;

pub use kernel::{kernel, kernel_moments, kernel_velocity, KernelMoments, KERNEL_CUTOFF};

use crate::potentials::sign;
use crate::quadrature::QuadratureError;
use crate::spectral::{FieldError, GridSpec, HelmholtzOperator, ScalarField};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThresholdingError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("field leaves the box [-1, 1] by {excess:e}")]
    BoxViolation { excess: f64 },
}

/// A relaxed field together with its thresholded sign field.
#[derive(Debug, Clone, PartialEq)]
pub struct MboState {
    pub u: ScalarField,
    /// `sign(u)` with `sign(0) = +1`.
    pub u_tilde: ScalarField,
}

impl MboState {
    pub fn new(u: ScalarField) -> Self {
        let u_tilde = u.map(sign);
        Self { u, u_tilde }
    }
}

/// The iteration `u⁺ = (1 − (ε²/2)Δ)⁻¹ sign(u)` with a cached solver.
#[derive(Debug, Clone)]
pub struct MboScheme {
    eps: f64,
    smoother: HelmholtzOperator,
}

impl MboScheme {
    pub fn new(grid: GridSpec, eps: f64) -> Result<Self, ThresholdingError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ThresholdingError::InvalidParameter(format!(
                "eps must be positive and finite, got {eps}"
            )));
        }
        let smoother = HelmholtzOperator::new(grid, 1.0, 0.5 * eps * eps)?;
        Ok(Self { eps, smoother })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// The time step `ε²/2` of the equivalent thresholding scheme.
    pub fn tau(&self) -> f64 {
        0.5 * self.eps * self.eps
    }

    pub fn step(&self, state: &MboState) -> Result<MboState, ThresholdingError> {
        if state.u.grid() != self.smoother.grid() {
            return Err(FieldError::GridMismatch.into());
        }
        let u = self.smoother.solve(&state.u_tilde)?;
        Ok(MboState::new(u))
    }
}

/// One thresholding step; builds the solver on every call.
pub fn mbo_step(state: &MboState, eps: f64) -> Result<MboState, ThresholdingError> {
    MboScheme::new(state.u.grid(), eps)?.step(state)
}

/// `F_τ(u) = (1/2τ)∫(1 − u) G_τ(1 + u)` with `G_τ = (1 − τΔ)⁻¹`.
pub fn eo_energy(u: &ScalarField, tau: f64) -> Result<f64, ThresholdingError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ThresholdingError::InvalidParameter(format!(
            "tau must be positive and finite, got {tau}"
        )));
    }
    let excess = u.max_abs() - 1.0;
    if excess > crate::diagnostics::BOX_TOLERANCE {
        return Err(ThresholdingError::BoxViolation { excess });
    }
    let smoothed = HelmholtzOperator::new(u.grid(), 1.0, tau)?.solve(&u.map(|v| 1.0 + v))?;
    let sum: f64 = u
        .values()
        .iter()
        .zip(smoothed.values())
        .map(|(v, g)| (1.0 - v) * g)
        .sum();
    Ok(sum * u.grid().cell_area() / (2.0 * tau))
}

#[cfg(test)]
mod tests;
