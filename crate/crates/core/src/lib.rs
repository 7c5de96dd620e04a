//! Convex-concave splitting for the Allen-Cahn equation on periodic grids.
//!
//! The crate is organized bottom-up:
//!
//! - [`spectral`]: periodic grid fields, spectral Laplacian and screened-Poisson solves.
//! - [`quadrature`]: adaptive Gauss-Kronrod integration used by the closed-form checks.
//! - [`potentials`]: double-well potentials, their convex/concave splits and optimal profiles.
//! - [`diagnostics`]: Modica-Mortola energy, dissipation and drift checks, radius fits.
//! - [`stepper`]: the splitting time step for each potential family and the run loop.
//! - [`thresholding`]: the thresholding iteration, its monotone energy and kernel checks.
//! - [`radial`]: closed-form radial double-obstacle steps.

pub mod diagnostics;
pub mod potentials;
pub mod quadrature;
pub mod radial;
pub mod spectral;
pub mod stepper;
mod tau;
pub mod thresholding;

pub use potentials::{PotentialKind, PotentialSpec};
pub use spectral::{
    h1_seminorm, helmholtz_solve, l2_inner, laplacian, lp_norm, make_field, FieldError, GridSpec,
    HelmholtzOperator, ScalarField, SpectralPlan,
};
pub use tau::Tau;
