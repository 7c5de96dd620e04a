use super::{StepError, StepperConfig};
use crate::potentials::{sign, PotentialKind};
use crate::spectral::{HelmholtzOperator, ScalarField, SpectralPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmConfig {
    /// Initial penalty parameter; adapted during the solve when `adaptive_rho` is set.
    pub rho: f64,
    pub sigma: f64,
    /// Over-relaxation factor in `(0, 2)`.
    pub alpha: f64,
    pub max_iter: usize,
    /// Absolute tolerance on `‖x − z‖_∞`.
    pub primal_tol: f64,
    /// Tolerance on `‖Px + q + y‖_∞`, relative to `1 + max(‖Px‖_∞, ‖q‖_∞, ‖y‖_∞)`.
    pub dual_tol: f64,
    pub adaptive_rho: bool,
    /// Residuals are evaluated every this many iterations.
    pub check_every: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.6,
            max_iter: 20_000,
            primal_tol: 1e-6,
            dual_tol: 1e-6,
            adaptive_rho: true,
            check_every: 10,
        }
    }
}

impl AdmmConfig {
    pub(crate) fn validate(&self) -> Result<(), String> {
        if !(self.rho > 0.0 && self.sigma > 0.0 && self.primal_tol > 0.0 && self.dual_tol > 0.0) {
            return Err("ADMM rho, sigma and tolerances must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(format!(
                "ADMM relaxation alpha must lie in (0, 2), got {}",
                self.alpha
            ));
        }
        if self.max_iter == 0 || self.check_every == 0 {
            return Err("ADMM iteration counts must be positive".into());
        }
        Ok(())
    }
}

/// Dual variable and penalty carried from one step to the next.
#[derive(Debug, Clone)]
pub(super) struct WarmStart {
    y: Option<ScalarField>,
    rho: f64,
}

impl WarmStart {
    pub(super) fn new(rho: f64) -> Self {
        Self { y: None, rho }
    }
}

const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;
const RHO_ADAPT_EVERY: usize = 50;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `½⟨(1/τ − Δ)v, v⟩ + ⟨q, v⟩ + g(v)` with `q = W′_conc(u)/ε² − u/τ`, where `g` is the
/// indicator of `[−1, 1]` or, for the `ℓ¹` kind, the exact penalty `(α+1)/ε²·max(|v| − 1, 0)`.
///
/// Operator splitting with `x = z`: the `x` update is one spectral solve of
/// `(1/τ + σ + ρ − Δ)x̃ = σx − q + ρz − y`, the `z` update is a pointwise proximal map.
pub(super) fn solve(
    cfg: &StepperConfig,
    plan: &SpectralPlan,
    warm: &mut WarmStart,
    u: &ScalarField,
) -> Result<(ScalarField, usize, f64), StepError> {
    let excess = u.max_abs() - 1.0;
    if excess > crate::diagnostics::BOX_TOLERANCE {
        return Err(StepError::BoxViolation { excess });
    }
    let grid = u.grid();
    let len = grid.len();
    let opts = cfg.admm;
    let inv_tau = cfg.tau.recip();
    let inv_eps2 = 1.0 / (cfg.eps * cfg.eps);
    let spec = cfg.potential;
    let penalty = match spec.kind() {
        PotentialKind::EllOne { alpha } => Some((alpha + 1.0) * inv_eps2),
        _ => None,
    };

    let u = u.clamp(-1.0, 1.0);
    let q: Vec<f64> = u
        .values()
        .iter()
        .map(|&v| spec.w_conc_prime(v) * inv_eps2 - v * inv_tau)
        .collect();
    let q_norm = max_abs(&q);
    let mut x = u.values().to_vec();
    let mut z = x.clone();
    let mut y = match &warm.y {
        Some(prev) if prev.grid() == grid => prev.values().to_vec(),
        _ => vec![0.0; len],
    };
    let mut rho = warm.rho.clamp(RHO_MIN, RHO_MAX);
    let base = inv_tau + opts.sigma;
    let mut op = HelmholtzOperator::with_plan(plan.clone(), base + rho, 1.0)?;

    let (a, sigma) = (opts.alpha, opts.sigma);
    let mut rhs = vec![0.0; len];
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    for it in 1..=opts.max_iter {
        for i in 0..len {
            rhs[i] = sigma * x[i] - q[i] + rho * z[i] - y[i];
        }
        let x_tilde = op
            .solve(&ScalarField::from_raw(grid, rhs.clone()))?
            .into_values();
        for i in 0..len {
            let relaxed = a * x_tilde[i] + (1.0 - a) * z[i];
            let w = relaxed + y[i] / rho;
            let z_next = match penalty {
                None => w.clamp(-1.0, 1.0),
                Some(c) => {
                    let excess = w.abs() - 1.0;
                    if excess <= 0.0 {
                        w
                    } else if excess <= c / rho {
                        sign(w)
                    } else {
                        w - c / rho * sign(w)
                    }
                }
            };
            y[i] += rho * (relaxed - z_next);
            x[i] = a * x_tilde[i] + (1.0 - a) * x[i];
            z[i] = z_next;
        }

        if it % opts.check_every != 0 && it != opts.max_iter {
            continue;
        }
        let x_field = ScalarField::from_raw(grid, x.clone());
        let px = plan
            .apply_multiplier(&x_field, |k2| inv_tau + k2)
            .into_values();
        primal = x
            .iter()
            .zip(&z)
            .fold(0.0, |m, (xi, zi)| m.max((xi - zi).abs()));
        dual = (0..len).fold(0.0, |m, i| m.max((px[i] + q[i] + y[i]).abs()));
        let dual_scale = max_abs(&px).max(q_norm).max(max_abs(&y));
        let primal_scale = max_abs(&x).max(max_abs(&z));
        if primal <= opts.primal_tol && dual <= opts.dual_tol * (1.0 + dual_scale) {
            warm.y = Some(ScalarField::from_raw(grid, y));
            warm.rho = rho;
            let z = ScalarField::from_values(grid, z)?;
            return Ok((z, it, primal.max(dual / (1.0 + dual_scale))));
        }
        if opts.adaptive_rho && it % RHO_ADAPT_EVERY == 0 {
            let p_rel = primal / primal_scale.max(1e-30);
            let d_rel = dual / dual_scale.max(1e-30);
            if p_rel > 0.0 && d_rel > 0.0 {
                let candidate = (rho * (p_rel / d_rel).sqrt()).clamp(RHO_MIN, RHO_MAX);
                if candidate > 5.0 * rho || candidate < 0.2 * rho {
                    rho = candidate;
                    op = HelmholtzOperator::with_plan(plan.clone(), base + rho, 1.0)?;
                }
            }
        }
    }
    warm.y = None;
    warm.rho = opts.rho;
    Err(StepError::AdmmNoConvergence {
        iterations: opts.max_iter,
        primal,
        dual,
    })
}
