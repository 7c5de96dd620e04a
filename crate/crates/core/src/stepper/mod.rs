//! The convex-concave splitting step
//!
//! ```text
//! (1 − τΔ)u⁺ + (τ/ε²) W′_vex(u⁺) = u − (τ/ε²) W′_conc(u)
//! ```
//!
//! for every potential family, and the loop that drives it. All solves are written in the
//! `τ`-divided form `(1/τ − Δ)u⁺ + W′_vex(u⁺)/ε² = u/τ − W′_conc(u)/ε²`, so `τ = ∞` simply drops
//! the `1/τ` terms.

mod admm;
mod newton;

pub use admm::AdmmConfig;
pub use newton::NewtonConfig;

use std::time::Instant;

use crate::diagnostics::{
    interface_radius, DiagnosticsError, EnergyFunctional, EnergyTrace, TraceMetadata, TraceRecord,
};
use crate::potentials::{ConvexPart, PotentialKind, PotentialSpec};
use crate::spectral::{
    lp_norm, FieldError, GridSpec, HelmholtzOperator, ScalarField, SpectralPlan,
};
use crate::tau::Tau;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepError {
    #[error("invalid stepper configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(
        "Newton iteration did not converge in {iterations} iterations (residual {residual:e})"
    )]
    NewtonNoConvergence { iterations: usize, residual: f64 },
    #[error("ADMM did not converge in {iterations} iterations (primal {primal:e}, dual {dual:e})")]
    AdmmNoConvergence {
        iterations: usize,
        primal: f64,
        dual: f64,
    },
    #[error("input leaves the box [-1, 1] by {excess:e}")]
    BoxViolation { excess: f64 },
    #[error("{step} cannot be used with potential {potential}")]
    WrongKind {
        step: &'static str,
        potential: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    pub grid: GridSpec,
    pub potential: PotentialSpec,
    pub eps: f64,
    pub tau: Tau,
    pub newton: NewtonConfig,
    pub admm: AdmmConfig,
}

impl StepperConfig {
    /// A validated configuration with default inner-solver settings.
    pub fn new(
        grid: GridSpec,
        potential: PotentialSpec,
        eps: f64,
        tau: Tau,
    ) -> Result<Self, StepError> {
        let cfg = Self {
            grid,
            potential,
            eps,
            tau,
            newton: NewtonConfig::default(),
            admm: AdmmConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), StepError> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(StepError::Config(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if let Tau::Finite(t) = self.tau {
            if !(t.is_finite() && t > 0.0) {
                return Err(StepError::Config(format!("tau must be positive, got {t}")));
            }
        }
        if self.potential.convex_part() == ConvexPart::Quartic && self.tau.is_infinite() {
            return Err(StepError::Config(
                "the standard potential requires a finite tau".into(),
            ));
        }
        self.newton.validate().map_err(StepError::Config)?;
        self.admm.validate().map_err(StepError::Config)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub inner_iterations: usize,
    pub residual: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    pub l2_move: f64,
    pub lp_move: f64,
    pub h1_move: f64,
}

/// Relative slack in the discrete energy-descent guarantee.
pub const ENERGY_SLACK: f64 = 1e-8;

impl StepReport {
    pub fn energy_decreased(&self) -> bool {
        self.energy_after <= self.energy_before + ENERGY_SLACK * (1.0 + self.energy_before.abs())
    }
}

/// Exponent used for the `lp_move` column: the largest curvature exponent of the potential.
pub fn move_exponent(spec: &PotentialSpec) -> f64 {
    spec.curvature_pairs()
        .iter()
        .map(|c| c.p)
        .fold(2.0, f64::max)
}

/// A reusable stepper holding FFT plans and, for the barrier kinds, the ADMM warm start.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: StepperConfig,
    energy: EnergyFunctional,
    quadratic: Option<HelmholtzOperator>,
    admm: admm::WarmStart,
}

impl Stepper {
    pub fn new(cfg: StepperConfig) -> Result<Self, StepError> {
        cfg.validate()?;
        let plan = SpectralPlan::new(cfg.grid);
        let quadratic = match cfg.potential.convex_part() {
            ConvexPart::Quadratic => Some(HelmholtzOperator::with_plan(
                plan.clone(),
                cfg.tau.recip() + 2.0 / (cfg.eps * cfg.eps),
                1.0,
            )?),
            _ => None,
        };
        let energy = EnergyFunctional::new(plan, cfg.eps, cfg.potential);
        let admm = admm::WarmStart::new(cfg.admm.rho);
        Ok(Self {
            cfg,
            energy,
            quadratic,
            admm,
        })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn energy_functional(&self) -> &EnergyFunctional {
        &self.energy
    }

    pub fn energy(&self, u: &ScalarField) -> Result<f64, StepError> {
        Ok(self.energy.energy(u)?)
    }

    /// Forgets the ADMM dual warm start.
    pub fn reset(&mut self) {
        self.admm = admm::WarmStart::new(self.cfg.admm.rho);
    }

    /// One step with the kind-appropriate inner solver.
    pub fn step(&mut self, u: &ScalarField) -> Result<(ScalarField, StepReport), StepError> {
        if u.grid() != self.cfg.grid {
            return Err(FieldError::GridMismatch.into());
        }
        if self.cfg.potential.convex_part() == ConvexPart::Box {
            let excess = u.max_abs() - 1.0;
            if excess > crate::diagnostics::BOX_TOLERANCE {
                return Err(StepError::BoxViolation { excess });
            }
        }
        let energy_before = self.energy.energy(u)?;
        let (next, iterations, residual) = match self.cfg.potential.convex_part() {
            ConvexPart::Quadratic => self.solve_quadratic(u)?,
            ConvexPart::Quartic => newton::solve(&self.cfg, self.energy.plan(), u)?,
            ConvexPart::Box => admm::solve(&self.cfg, self.energy.plan(), &mut self.admm, u)?,
        };
        let energy_after = self.energy.energy(&next)?;
        let delta = next.sub(u)?;
        let report = StepReport {
            inner_iterations: iterations,
            residual,
            energy_before,
            energy_after,
            l2_move: lp_norm(&delta, 2.0)?,
            lp_move: lp_norm(&delta, move_exponent(&self.cfg.potential))?,
            h1_move: self.energy.plan().h1_seminorm(&delta),
        };
        Ok((next, report))
    }

    fn solve_quadratic(&self, u: &ScalarField) -> Result<(ScalarField, usize, f64), StepError> {
        let op = self
            .quadratic
            .as_ref()
            .expect("quadratic operator built for this kind");
        let rhs = quadratic_rhs(&self.cfg, u);
        let next = op.solve(&rhs)?;
        let residual = op.apply(&next).max_abs_diff(&rhs)? / rhs.max_abs().max(f64::MIN_POSITIVE);
        Ok((next, 1, residual))
    }
}

fn quadratic_rhs(cfg: &StepperConfig, u: &ScalarField) -> ScalarField {
    let inv_tau = cfg.tau.recip();
    let inv_eps2 = 1.0 / (cfg.eps * cfg.eps);
    let spec = cfg.potential;
    u.map(|v| inv_tau * v - inv_eps2 * spec.w_conc_prime(v))
}

fn require(cfg: &StepperConfig, part: ConvexPart, step: &'static str) -> Result<(), StepError> {
    if cfg.potential.convex_part() != part {
        return Err(StepError::WrongKind {
            step,
            potential: cfg.potential.to_string(),
        });
    }
    Ok(())
}

/// One step for a potential with convex part `u²`: a single screened-Poisson solve.
pub fn step_quadratic(
    u: &ScalarField,
    cfg: &StepperConfig,
) -> Result<(ScalarField, StepReport), StepError> {
    require(cfg, ConvexPart::Quadratic, "step_quadratic")?;
    Stepper::new(cfg.clone())?.step(u)
}

/// One step for the standard potential: Newton iteration with a spectrally preconditioned CG.
pub fn step_quartic(
    u: &ScalarField,
    cfg: &StepperConfig,
) -> Result<(ScalarField, StepReport), StepError> {
    require(cfg, ConvexPart::Quartic, "step_quartic")?;
    Stepper::new(cfg.clone())?.step(u)
}

/// One step for a barrier or `ℓ¹` potential: a box-constrained QP solved by ADMM.
pub fn step_barrier(
    u: &ScalarField,
    cfg: &StepperConfig,
) -> Result<(ScalarField, StepReport), StepError> {
    require(cfg, ConvexPart::Box, "step_barrier")?;
    Stepper::new(cfg.clone())?.step(u)
}

/// Returned by hooks to continue or stop a run early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Observer called after every completed step.
pub trait StepHook {
    fn after_step(&mut self, step: usize, u: &ScalarField, report: &StepReport) -> Control;
}

impl<F> StepHook for F
where
    F: FnMut(usize, &ScalarField, &StepReport) -> Control,
{
    fn after_step(&mut self, step: usize, u: &ScalarField, report: &StepReport) -> Control {
        self(step, u, report)
    }
}

/// A hook that never interrupts.
pub struct NoHook;

impl StepHook for NoHook {
    fn after_step(&mut self, _: usize, _: &ScalarField, _: &StepReport) -> Control {
        Control::Continue
    }
}

/// Result of [`run`]: the trace (possibly tagged failed) and the last successfully computed field.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: EnergyTrace,
    pub field: ScalarField,
    pub error: Option<(usize, StepError)>,
}

/// Applies `n_steps` steps from `u0`.
///
/// The trace holds one record for the initial field (step 0) and one per completed step; with
/// `n_steps = 0` it is empty. A step error stops the run and tags the trace as failed.
pub fn run(
    u0: &ScalarField,
    cfg: &StepperConfig,
    n_steps: usize,
    hook: &mut dyn StepHook,
) -> Result<RunOutcome, StepError> {
    let start = Instant::now();
    let mut stepper = Stepper::new(cfg.clone())?;
    let meta = TraceMetadata {
        eps: cfg.eps,
        tau: cfg.tau,
        potential: cfg.potential.to_string(),
        n: cfg.grid.n(),
        length: cfg.grid.length(),
        wall_time_s: None,
        extra: Vec::new(),
    };
    let mut trace = EnergyTrace::new(meta);
    let mut u = u0.clone();
    let mut error = None;
    if n_steps > 0 {
        trace.push(TraceRecord {
            step: 0,
            energy: stepper.energy(&u)?,
            radius: interface_radius(&u),
            l2_move: 0.0,
            lp_move: 0.0,
            h1_move: 0.0,
            inner_iterations: 0,
        });
    }
    for step in 1..=n_steps {
        match stepper.step(&u) {
            Ok((next, report)) => {
                u = next;
                trace.push(TraceRecord {
                    step,
                    energy: report.energy_after,
                    radius: interface_radius(&u),
                    l2_move: report.l2_move,
                    lp_move: report.lp_move,
                    h1_move: report.h1_move,
                    inner_iterations: report.inner_iterations,
                });
                if hook.after_step(step, &u, &report) == Control::Stop {
                    break;
                }
            }
            Err(e) => {
                trace.mark_failed(format!("step {step}: {e}"));
                error = Some((step, e));
                break;
            }
        }
    }
    trace.meta_mut().wall_time_s = Some(start.elapsed().as_secs_f64());
    Ok(RunOutcome {
        trace,
        field: u,
        error,
    })
}

/// Whether `spec` is one of the potentials with convex part exactly `u²`.
pub fn is_quadratic_kind(spec: &PotentialSpec) -> bool {
    matches!(
        spec.kind(),
        PotentialKind::QuadraticWR { .. } | PotentialKind::QuadraticAbs
    )
}
