use super::PotentialError;

fn objective(p: f64, z: f64) -> f64 {
    ((z - 1.0).powf(p) + p * z - 1.0) / z.powf(p)
}

// Up to the positive factor p/z^{p+1}, the derivative of the objective.
fn stationarity(p: f64, z: f64) -> f64 {
    (z - 1.0).powf(p - 1.0) - (p - 1.0) * z + 1.0
}

const GRID_POINTS: usize = 4000;

/// Minimizes `((z − 1)^p + pz − 1)/z^p` over `z ∈ [1, z_max]`.
///
/// Returns `(β(p), argmin)`. A uniform grid locates the basin, golden-section search narrows it to
/// `tol`, and a final bisection on the stationarity condition pins the minimizer when it is
/// isolated. The result is checked against the bracket `[2^{−p}, p·2^{1−p}]`.
pub fn beta_minimizer(p: f64, z_max: f64, tol: f64) -> Result<(f64, f64), PotentialError> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(PotentialError::InvalidParameter(format!(
            "p = {p} must be at least 2"
        )));
    }
    if !(z_max > 1.0 && z_max.is_finite() && tol > 0.0) {
        return Err(PotentialError::InvalidParameter(format!(
            "need z_max > 1 and tol > 0, got z_max = {z_max}, tol = {tol}"
        )));
    }
    let dz = (z_max - 1.0) / GRID_POINTS as f64;
    let (best, _) = (0..=GRID_POINTS)
        .map(|k| (k, objective(p, 1.0 + k as f64 * dz)))
        .fold(
            (0, f64::INFINITY),
            |acc, (k, v)| if v < acc.1 { (k, v) } else { acc },
        );
    let basin = (
        1.0 + best.saturating_sub(1) as f64 * dz,
        (1.0 + (best + 1) as f64 * dz).min(z_max),
    );
    let (mut lo, mut hi) = basin;

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = objective(p, x1);
    let mut f2 = objective(p, x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(p, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(p, x2);
        }
    }
    let mut z = 0.5 * (lo + hi);

    let (mut a, mut b) = basin;
    let (sa, sb) = (stationarity(p, a), stationarity(p, b));
    if sa < 0.0 && sb > 0.0 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if stationarity(p, m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        z = 0.5 * (a + b);
    }

    let value = objective(p, z);
    let lo_bound = 2f64.powf(-p);
    let hi_bound = p * 2f64.powf(1.0 - p);
    let slack = 1e-12;
    if value < lo_bound - slack || value > hi_bound + slack {
        return Err(PotentialError::BracketViolation {
            p,
            value,
            lo: lo_bound,
            hi: hi_bound,
        });
    }
    Ok((value, z))
}

/// `β(p)`; see [`beta_minimizer`].
pub fn beta_min(p: f64, z_max: f64, tol: f64) -> Result<f64, PotentialError> {
    beta_minimizer(p, z_max, tol).map(|(v, _)| v)
}

/// The inequality `|u + w|^p ≥ |u|^p + p|u|^{p−2}uw + β|w|^p` with a cached `β(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    p: f64,
    beta: f64,
}

impl PowerLaw {
    pub const BETA_SLACK: f64 = 1e-9;

    pub fn new(p: f64) -> Result<Self, PotentialError> {
        Ok(Self {
            p,
            beta: beta_min(p, 50.0, 1e-10)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `lhs − rhs` of the inequality evaluated with `β − 1e-9`.
    pub fn margin(&self, u: f64, w: f64) -> f64 {
        let p = self.p;
        let au = u.abs();
        let lhs = (u + w).abs().powf(p);
        let rhs = au.powf(p)
            + p * au.powf(p - 2.0) * u * w
            + (self.beta - Self::BETA_SLACK) * w.abs().powf(p);
        lhs - rhs
    }

    /// Whether the inequality holds, allowing for rounding in the three power evaluations.
    pub fn holds(&self, u: f64, w: f64) -> bool {
        let scale = (u.abs() + w.abs()).powf(self.p);
        self.margin(u, w) >= -8.0 * f64::EPSILON * scale
    }
}

/// One-shot form of [`PowerLaw::holds`].
pub fn check_power_law(p: f64, u: f64, w: f64) -> Result<bool, PotentialError> {
    Ok(PowerLaw::new(p)?.holds(u, w))
}
