use super::{StepError, StepperConfig};
use crate::spectral::{HelmholtzOperator, ScalarField, SpectralPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Stop when `‖F(v)‖_∞ ≤ tol·(1 + ‖rhs‖_∞)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative Euclidean residual reduction requested from each inner CG solve.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            cg_tol: 1e-8,
            cg_max_iter: 500,
        }
    }
}

impl NewtonConfig {
    pub(crate) fn validate(&self) -> Result<(), String> {
        if !(self.tol > 0.0 && self.cg_tol > 0.0) {
            return Err("Newton tolerances must be positive".into());
        }
        if self.max_iter == 0 || self.cg_max_iter == 0 {
            return Err("Newton iteration limits must be positive".into());
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// The Jacobian `1/τ − Δ + 3κ diag(v²)` of the quartic step.
struct Jacobian<'a> {
    plan: &'a SpectralPlan,
    inv_tau: f64,
    diag: Vec<f64>,
}

impl Jacobian<'_> {
    fn apply(&self, d: &ScalarField) -> ScalarField {
        let inv_tau = self.inv_tau;
        let mut out = self
            .plan
            .apply_multiplier(d, |k2| inv_tau + k2)
            .into_values();
        for ((o, di), x) in out.iter_mut().zip(&self.diag).zip(d.values()) {
            *o += di * x;
        }
        ScalarField::from_raw(d.grid(), out)
    }
}

/// Preconditioned conjugate gradients for `J δ = b`. Returns the iterate and iteration count.
fn pcg(
    jac: &Jacobian<'_>,
    precond: &HelmholtzOperator,
    b: &ScalarField,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(ScalarField, usize), StepError> {
    let grid = b.grid();
    let b_norm = dot(b.values(), b.values()).sqrt();
    let mut x = vec![0.0; grid.len()];
    if b_norm == 0.0 {
        return Ok((ScalarField::from_raw(grid, x), 0));
    }
    let mut r = b.values().to_vec();
    let mut z = precond.solve(b)?.into_values();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let p_field = ScalarField::from_raw(grid, p.clone());
        let ap = jac.apply(&p_field);
        let alpha = rz / dot(&p, ap.values());
        axpy(alpha, &p, &mut x);
        axpy(-alpha, ap.values(), &mut r);
        if dot(&r, &r).sqrt() <= rel_tol * b_norm {
            return Ok((ScalarField::from_raw(grid, x), it));
        }
        z = precond
            .solve(&ScalarField::from_raw(grid, r.clone()))?
            .into_values();
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Ok((ScalarField::from_raw(grid, x), max_iter))
}

/// Solves `(1/τ − Δ)v + κv³ = u/τ + κu` with `κ = 4/ε²`, warm-started at `v = u`.
///
/// Returns the solution, the number of Newton iterations and the final relative residual.
pub(super) fn solve(
    cfg: &StepperConfig,
    plan: &SpectralPlan,
    u: &ScalarField,
) -> Result<(ScalarField, usize, f64), StepError> {
    let inv_tau = cfg.tau.recip();
    let kappa = 4.0 / (cfg.eps * cfg.eps);
    let rhs = u.map(|v| (inv_tau + kappa) * v);
    let threshold = cfg.newton.tol * (1.0 + rhs.max_abs());
    let mut v = u.clone();
    let mut residual = f64::INFINITY;
    for it in 0..=cfg.newton.max_iter {
        let lin = plan.apply_multiplier(&v, |k2| inv_tau + k2);
        let f: Vec<f64> = lin
            .values()
            .iter()
            .zip(v.values())
            .zip(rhs.values())
            .map(|((l, x), b)| l + kappa * x * x * x - b)
            .collect();
        residual = f.iter().fold(0.0, |m, x: &f64| m.max(x.abs()));
        if residual <= threshold {
            return Ok((v, it, residual / (1.0 + rhs.max_abs())));
        }
        if it == cfg.newton.max_iter {
            break;
        }
        let diag: Vec<f64> = v.values().iter().map(|x| 3.0 * kappa * x * x).collect();
        let mean_diag = diag.iter().sum::<f64>() / diag.len() as f64;
        let precond = HelmholtzOperator::with_plan(plan.clone(), inv_tau + mean_diag, 1.0)?;
        let jac = Jacobian {
            plan,
            inv_tau,
            diag,
        };
        let neg_f = ScalarField::from_values(v.grid(), f.iter().map(|x| -x).collect())?;
        let (delta, _) = pcg(
            &jac,
            &precond,
            &neg_f,
            cfg.newton.cg_tol,
            cfg.newton.cg_max_iter,
        )?;
        v = v.zip_map(&delta, |a, b| a + b)?;
    }
    Err(StepError::NewtonNoConvergence {
        iterations: cfg.newton.max_iter,
        residual,
    })
}
