//! Closed-form radial solution of one barrier time step from a sharp ball indicator in `d ≥ 3`.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::potentials::{optimal_profile, PotentialSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadialError {
    #[error("dimension {0} is unsupported; the radial formulas need d >= 3")]
    UnsupportedDimension(u32),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("xi is undefined at s = {s}: square-root argument {arg:e} is negative")]
    Domain { s: f64, arg: f64 },
    #[error("xi does not change sign on [0, r]: xi(0) = {at_zero:e}, xi(r) = {at_r:e}")]
    Bracket { at_zero: f64, at_r: f64 },
}

/// A ball of radius `r` in `ℝ^d` stepped once with interface width `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    r: f64,
    eps: f64,
    d: u32,
}

impl RadialProblem {
    pub fn new(r: f64, eps: f64, d: u32) -> Result<Self, RadialError> {
        if d < 3 {
            return Err(RadialError::UnsupportedDimension(d));
        }
        if !(r > 0.0 && r.is_finite() && eps > 0.0 && eps.is_finite()) {
            return Err(RadialError::InvalidParameter(format!(
                "need r > 0 and eps > 0, got r = {r}, eps = {eps}"
            )));
        }
        let floor = 2.0 * eps * f64::from(d - 2).sqrt();
        if r <= floor {
            return Err(RadialError::InvalidParameter(format!(
                "need r > 2 eps sqrt(d - 2) = {floor}, got r = {r}"
            )));
        }
        Ok(Self { r, eps, d })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    fn dim(&self) -> f64 {
        f64::from(self.d)
    }

    /// `2r² − 4(d−2)ε²`, the value of `r_i² + r_o²`.
    fn sum_of_squares(&self) -> f64 {
        2.0 * self.r * self.r - 4.0 * (self.dim() - 2.0) * self.eps * self.eps
    }

    /// `2r^d`, the value of `r_i^d + r_o^d`.
    fn sum_of_powers(&self) -> f64 {
        2.0 * self.r.powi(self.d as i32)
    }
}

/// Volume `π^{d/2}/Γ(d/2 + 1)` of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    // ω_0 = 1, ω_1 = 2, ω_d = 2π/d · ω_{d−2}.
    let mut omega = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = 2 + d % 2;
    while k <= d {
        omega *= 2.0 * PI / f64::from(k);
        k += 2;
    }
    omega
}

/// `ξ_ε(s) = √(2r² − 4(d−2)ε² − s²) − (2r^d − s^d)^{1/d}`, whose root on `(0, r)` is `r_i`.
pub fn xi(s: f64, prob: &RadialProblem) -> Result<f64, RadialError> {
    if !(0.0..=prob.r).contains(&s) {
        return Err(RadialError::InvalidParameter(format!(
            "s = {s} lies outside [0, {}]",
            prob.r
        )));
    }
    let arg = prob.sum_of_squares() - s * s;
    if arg < 0.0 {
        return Err(RadialError::Domain { s, arg });
    }
    let outer = (prob.sum_of_powers() - s.powi(prob.d as i32)).powf(1.0 / prob.dim());
    Ok(arg.sqrt() - outer)
}

/// Relative width at which the bisections stop.
const BISECTION_TOL: f64 = 1e-12;

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let f_lo_positive = f(lo) > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == f_lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inner and outer coincidence radii `(r_i, r_o)`.
pub fn solve_radii(prob: &RadialProblem) -> Result<(f64, f64), RadialError> {
    let at_zero = xi(0.0, prob)?;
    let at_r = xi(prob.r, prob)?;
    if !(at_zero > 0.0 && at_r < 0.0) {
        return Err(RadialError::Bracket { at_zero, at_r });
    }
    let xi_unchecked = |s: f64| {
        (prob.sum_of_squares() - s * s).sqrt()
            - (prob.sum_of_powers() - s.powi(prob.d as i32)).powf(1.0 / prob.dim())
    };
    let r_i = bisect(xi_unchecked, 0.0, prob.r, BISECTION_TOL * prob.r);
    let r_o = (prob.sum_of_powers() - r_i.powi(prob.d as i32)).powf(1.0 / prob.dim());
    Ok((r_i, r_o))
}

/// The radial minimizer: `1` inside `r_i`, `−1` outside `r_o`, and
/// `a + b G_d(s) ∓ s²/(2dε²)` on `(r_i, r)` and `(r, r_o)` with `G_d(s) = −s^{2−d}/(d(d−2)ω_d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSolution {
    pub problem: RadialProblem,
    pub r_i: f64,
    pub r_o: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
    pub r_new: f64,
}

pub fn radial_solution(prob: &RadialProblem) -> Result<RadialSolution, RadialError> {
    let (r_i, r_o) = solve_radii(prob)?;
    let (eps2, d) = (prob.eps * prob.eps, prob.dim());
    let omega = unit_ball_volume(prob.d);
    let mut sol = RadialSolution {
        problem: *prob,
        r_i,
        r_o,
        a: 1.0 + r_i * r_i / (2.0 * (d - 2.0) * eps2),
        b: omega * r_i.powi(prob.d as i32) / eps2,
        c: -(1.0 + r_o * r_o / (2.0 * (d - 2.0) * eps2)),
        e: -omega * r_o.powi(prob.d as i32) / eps2,
        r_new: f64::NAN,
    };
    sol.r_new = bisect(|s| sol.u(s), r_i, r_o, BISECTION_TOL * prob.r);
    Ok(sol)
}

impl RadialSolution {
    /// `u(s)`, evaluated by integrating `u′` from the nearer coincidence radius to avoid
    /// cancelling the `O(r²/ε²)` coefficients.
    pub fn u(&self, s: f64) -> f64 {
        let p = &self.problem;
        let (d, k) = (p.dim(), 1.0 / (p.dim() * p.eps * p.eps));
        if s <= self.r_i {
            1.0
        } else if s < p.r {
            let ri2 = self.r_i * self.r_i;
            1.0 - k * (0.5 * (s * s - ri2) + ri2 * ((self.r_i / s).powf(d - 2.0) - 1.0) / (d - 2.0))
        } else if s < self.r_o {
            let ro2 = self.r_o * self.r_o;
            -1.0 + k
                * (ro2 * ((self.r_o / s).powf(d - 2.0) - 1.0) / (d - 2.0) - 0.5 * (ro2 - s * s))
        } else {
            -1.0
        }
    }

    /// `u′(s) = (1/(dε²))((r_i/s)^d − 1)s` inside `r` and `(1/(dε²))(1 − (r_o/s)^d)s` outside.
    pub fn u_prime(&self, s: f64) -> f64 {
        let p = &self.problem;
        let k = 1.0 / (p.dim() * p.eps * p.eps);
        if s <= self.r_i || s >= self.r_o {
            0.0
        } else {
            let rho = if s < p.r { self.r_i } else { self.r_o };
            let ratio = (rho / s).powi(p.d as i32);
            if s < p.r {
                k * (ratio - 1.0) * s
            } else {
                k * (1.0 - ratio) * s
            }
        }
    }

    /// `u(s)` from the coefficient form `a + b G_d(s) − s²/(2dε²)` and its outer counterpart.
    pub fn u_from_coefficients(&self, s: f64) -> f64 {
        let p = &self.problem;
        let d = p.dim();
        let green = -s.powf(2.0 - d) / (d * (d - 2.0) * unit_ball_volume(p.d));
        let quad = s * s / (2.0 * d * p.eps * p.eps);
        if s <= self.r_i {
            1.0
        } else if s < p.r {
            self.a + self.b * green - quad
        } else if s < self.r_o {
            self.c + self.e * green + quad
        } else {
            -1.0
        }
    }
}

/// The zero crossing `u⁻¹(0)`, which lies in `(r_i, r)`.
pub fn new_radius(sol: &RadialSolution) -> f64 {
    sol.r_new
}

/// Largest deviation of `u` from the barrier optimal profile `φ((r_new − s)/ε)` on the layer
/// `|s − r_new| ≤ 2√2ε`.
pub fn profile_comparison(sol: &RadialSolution) -> f64 {
    const SAMPLES: usize = 2001;
    let eps = sol.problem.eps;
    let half = 2.0 * 2f64.sqrt() * eps;
    let spec = PotentialSpec::barrier_abs();
    (0..SAMPLES)
        .map(|k| sol.r_new - half + 2.0 * half * k as f64 / (SAMPLES - 1) as f64)
        .filter(|&s| s >= 0.0)
        .map(|s| (sol.u(s) - optimal_profile(&spec, (sol.r_new - s) / eps)).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub eps: f64,
    pub r_minus_ri: f64,
    pub ro_minus_r: f64,
    pub r_minus_rnew: f64,
}

/// Least-squares log-log slopes of the three gap columns against `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSlopes {
    pub r_minus_ri: f64,
    pub ro_minus_r: f64,
    pub r_minus_rnew: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub r: f64,
    pub d: u32,
    pub rows: Vec<ScalingRow>,
    /// Values of `ε` whose problem was rejected, with the reason.
    pub skipped: Vec<(f64, RadialError)>,
}

pub const SCALING_HEADER: &str = "eps,r_minus_ri,ro_minus_r,r_minus_rnew";

pub fn scaling_study(r: f64, d: u32, eps_list: &[f64]) -> ScalingStudy {
    let mut rows = Vec::with_capacity(eps_list.len());
    let mut skipped = Vec::new();
    for &eps in eps_list {
        match RadialProblem::new(r, eps, d).and_then(|p| radial_solution(&p)) {
            Ok(sol) => rows.push(ScalingRow {
                eps,
                r_minus_ri: r - sol.r_i,
                ro_minus_r: sol.r_o - r,
                r_minus_rnew: r - sol.r_new,
            }),
            Err(e) => skipped.push((eps, e)),
        }
    }
    ScalingStudy {
        r,
        d,
        rows,
        skipped,
    }
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than two usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

impl ScalingStudy {
    pub fn slopes(&self) -> Option<ScalingSlopes> {
        let eps: Vec<f64> = self.rows.iter().map(|r| r.eps).collect();
        let column = |f: fn(&ScalingRow) -> f64| {
            let ys: Vec<f64> = self.rows.iter().map(f).collect();
            loglog_slope(&eps, &ys)
        };
        Some(ScalingSlopes {
            r_minus_ri: column(|r| r.r_minus_ri)?,
            ro_minus_r: column(|r| r.ro_minus_r)?,
            r_minus_rnew: column(|r| r.r_minus_rnew)?,
        })
    }

    /// Header row plus one row per `ε`, all values to 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SCALING_HEADER}")?;
        for row in &self.rows {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                row.eps, row.r_minus_ri, row.ro_minus_r, row.r_minus_rnew
            )?;
        }
        Ok(())
    }
}
