//! Energies, the descent inequalities as executable checks, interface radii and step fits.

mod trace;

pub use trace::{EnergyTrace, TraceMetadata, TraceRecord, TRACE_FORMAT_VERSION, TRACE_HEADER};

use std::f64::consts::PI;

use crate::potentials::{CurvaturePair, PotentialSpec};
use crate::spectral::{lp_norm, FieldError, ScalarField, SpectralPlan};
use crate::tau::Tau;

/// How far a barrier field may leave `[−1, 1]` before its energy is rejected.
pub const BOX_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field leaves the box [-1, 1] by {excess:e}")]
    BoxViolation { excess: f64 },
    #[error("potential {0} has no curvature constants")]
    NoCurvature(String),
    #[error("fit needs at least {need} usable radius samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("fitted effective step {0} is not positive")]
    NonPositiveFit(f64),
}

/// Evaluates the Modica-Mortola energy `(ε/2)[u]²_{H¹} + (1/ε)∫W(u)` with a cached plan.
#[derive(Debug, Clone)]
pub struct EnergyFunctional {
    plan: SpectralPlan,
    eps: f64,
    spec: PotentialSpec,
}

impl EnergyFunctional {
    pub fn new(plan: SpectralPlan, eps: f64, spec: PotentialSpec) -> Self {
        assert!(eps > 0.0, "eps must be positive");
        Self { plan, eps, spec }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn spec(&self) -> PotentialSpec {
        self.spec
    }

    pub fn plan(&self) -> &SpectralPlan {
        &self.plan
    }

    /// For barrier kinds the field is clipped to `[−1, 1]` first; larger excursions are errors.
    pub fn energy(&self, u: &ScalarField) -> Result<f64, DiagnosticsError> {
        if u.grid() != self.plan.grid() {
            return Err(FieldError::GridMismatch.into());
        }
        let clipped;
        let u = if self.spec.is_barrier() {
            let excess = u.max_abs() - 1.0;
            if excess > BOX_TOLERANCE {
                return Err(DiagnosticsError::BoxViolation { excess });
            }
            clipped = u.clamp(-1.0, 1.0);
            &clipped
        } else {
            u
        };
        let h1 = self.plan.h1_seminorm(u);
        let potential: f64 = u.values().iter().map(|&v| self.spec.w(v)).sum();
        let h2 = u.grid().cell_area();
        Ok(0.5 * self.eps * h1 * h1 + h2 * potential / self.eps)
    }
}

/// `E_ε(u)`; builds a fresh FFT plan, so prefer [`EnergyFunctional`] in loops.
pub fn mm_energy(u: &ScalarField, eps: f64, spec: &PotentialSpec) -> Result<f64, DiagnosticsError> {
    EnergyFunctional::new(SpectralPlan::new(u.grid()), eps, *spec).energy(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Slack allowed in the energy-descent inequality.
pub const DISSIPATION_SLACK: f64 = 1e-6;

/// `(ε/2)[δ]²_{H¹} + (ε/τ)‖δ‖²₂ + (c̄/ε)‖δ‖_p^p ≤ E(u₀) − E(u₁)` for an explicit curvature pair.
pub fn dissipation_check_with(
    energy: &EnergyFunctional,
    u0: &ScalarField,
    u1: &ScalarField,
    tau: Tau,
    pair: CurvaturePair,
) -> Result<DissipationCheck, DiagnosticsError> {
    let delta = u1.sub(u0)?;
    let eps = energy.eps();
    let h1 = energy.plan().h1_seminorm(&delta);
    let l2 = lp_norm(&delta, 2.0)?;
    let lp = lp_norm(&delta, pair.p)?;
    let lhs = 0.5 * eps * h1 * h1 + eps * tau.recip() * l2 * l2 + pair.cbar / eps * lp.powf(pair.p);
    let rhs = energy.energy(u0)? - energy.energy(u1)?;
    Ok(DissipationCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + DISSIPATION_SLACK,
    })
}

/// [`dissipation_check_with`] using the potential's primary curvature pair.
pub fn dissipation_check(
    u0: &ScalarField,
    u1: &ScalarField,
    eps: f64,
    tau: Tau,
    spec: &PotentialSpec,
) -> Result<DissipationCheck, DiagnosticsError> {
    let pair = spec
        .curvature()
        .ok_or_else(|| DiagnosticsError::NoCurvature(spec.to_string()))?;
    let energy = EnergyFunctional::new(SpectralPlan::new(u0.grid()), eps, *spec);
    dissipation_check_with(&energy, u0, u1, tau, pair)
}

/// `E₀^{1/p}(Nε^{1/(p−1)})^{1−1/p}`, the slow-motion bound on `‖u_N − u₀‖_p`.
pub fn drift_bound(e0: f64, n_steps: usize, eps: f64, p: f64) -> f64 {
    assert!(
        e0 >= 0.0 && eps > 0.0 && p > 1.0,
        "need e0 ≥ 0, eps > 0, p > 1"
    );
    let n = n_steps as f64;
    e0.powf(1.0 / p) * (n * eps.powf(1.0 / (p - 1.0))).powf(1.0 - 1.0 / p)
}

/// `√(2NεE₀)`, the simple `L²` form of the slow-motion bound.
pub fn drift_bound_l2(e0: f64, n_steps: usize, eps: f64) -> f64 {
    assert!(e0 >= 0.0 && eps > 0.0, "need e0 ≥ 0 and eps > 0");
    (2.0 * n_steps as f64 * eps * e0).sqrt()
}

/// Radius of the disc with the same area as `{u > 0}`; `None` when that set is empty.
pub fn interface_radius(u: &ScalarField) -> Option<f64> {
    let count = u.values().iter().filter(|&&v| v > 0.0).count();
    if count == 0 {
        return None;
    }
    Some((count as f64 * u.grid().cell_area() / PI).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Effective time per step in units of `ε²`.
    pub c_eff: f64,
    /// Root-mean-square residual of the `r²` fit.
    pub residual: f64,
    pub n_points: usize,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares fit of `r_k² = A − 2c_eff ε² k` over samples with `r_k ≥ 5h`.
///
/// The circle law `r² = r₀² − 2t` turns the slope into an effective time step `c_eff ε²`.
pub fn fit_effective_step(
    trace: &EnergyTrace,
    eps: f64,
    h: f64,
) -> Result<FitResult, DiagnosticsError> {
    let samples: Vec<(f64, f64)> = trace
        .records()
        .iter()
        .filter_map(|r| r.radius.map(|rad| (r.step as f64, rad)))
        .filter(|&(_, rad)| rad >= 5.0 * h)
        .map(|(k, rad)| (k, rad * rad))
        .collect();
    fit_samples(&samples, eps)
}

fn fit_samples(samples: &[(f64, f64)], eps: f64) -> Result<FitResult, DiagnosticsError> {
    let n = samples.len();
    if n < MIN_FIT_SAMPLES {
        return Err(DiagnosticsError::TooFewSamples {
            got: n,
            need: MIN_FIT_SAMPLES,
        });
    }
    let nf = n as f64;
    let mean_k = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(k, y) in samples {
        sxy += (k - mean_k) * (y - mean_y);
        sxx += (k - mean_k) * (k - mean_k);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_k;
    let c_eff = -slope / (2.0 * eps * eps);
    if !(c_eff > 0.0) {
        return Err(DiagnosticsError::NonPositiveFit(c_eff));
    }
    let sse: f64 = samples
        .iter()
        .map(|&(k, y)| (y - intercept - slope * k).powi(2))
        .sum();
    Ok(FitResult {
        c_eff,
        residual: (sse / nf).sqrt(),
        n_points: n,
    })
}
