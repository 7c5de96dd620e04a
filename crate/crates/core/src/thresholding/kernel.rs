use std::cell::Cell;
use std::f64::consts::PI;

use super::ThresholdingError;
use crate::quadrature::integrate;

/// Radial truncation of the whole-space integrals; the neglected tail is `O(50³e⁻⁵⁰)`.
pub const KERNEL_CUTOFF: f64 = 50.0;

const QUAD_TOL: f64 = 1e-8;

/// The screened Poisson kernel `K(x) = e^{−|x|}/(4π|x|)` on `ℝ³` as a function of `|x|`.
pub fn kernel(r: f64) -> f64 {
    (-r).exp() / (4.0 * PI * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMoments {
    /// `∫_{ℝ³} K`.
    pub mass: f64,
    /// `∫_{ℝ³} K|x|²`.
    pub second: f64,
    /// `∫_{ℝ²} K(ξ, 0)(1 + |ξ|²) dξ`.
    pub plane: f64,
}

pub fn kernel_moments() -> Result<KernelMoments, ThresholdingError> {
    // The Jacobians cancel the singularity of K at the origin.
    let shell = |r: f64| (-r).exp() * r;
    let mass = integrate(shell, 0.0, KERNEL_CUTOFF, QUAD_TOL)?;
    let second = integrate(|r| shell(r) * r * r, 0.0, KERNEL_CUTOFF, QUAD_TOL)?;
    let plane = integrate(
        |r| 0.5 * (-r).exp() * (1.0 + r * r),
        0.0,
        KERNEL_CUTOFF,
        QUAD_TOL,
    )?;
    Ok(KernelMoments {
        mass,
        second,
        plane,
    })
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn mat_vec(s: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [dot(&s[0], v), dot(&s[1], v), dot(&s[2], v)]
}

/// An orthonormal basis of the plane orthogonal to the unit vector `n`.
fn perp_frame(n: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = (0..3)
        .min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()))
        .unwrap_or(0);
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let proj = dot(&a, n);
    let mut e1 = [a[0] - proj * n[0], a[1] - proj * n[1], a[2] - proj * n[2]];
    let norm = dot(&e1, &e1).sqrt();
    e1.iter_mut().for_each(|x| *x /= norm);
    let e2 = cross(n, &e1);
    (e1, e2)
}

/// Normal velocity `−∫_{n⊥} ξᵀSξ K(ξ) dξ` by polar quadrature over the plane orthogonal to `n`.
pub fn kernel_velocity(s: &[[f64; 3]; 3], n: &[f64; 3]) -> Result<f64, ThresholdingError> {
    if !s.iter().flatten().chain(n).all(|x| x.is_finite()) {
        return Err(ThresholdingError::InvalidParameter(
            "non-finite input".into(),
        ));
    }
    if (dot(n, n).sqrt() - 1.0).abs() > 1e-12 {
        return Err(ThresholdingError::InvalidParameter(format!(
            "normal must be a unit vector, got length {}",
            dot(n, n).sqrt()
        )));
    }
    let scale = s.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..3 {
        for j in 0..i {
            if (s[i][j] - s[j][i]).abs() > 1e-12 * scale.max(1.0) {
                return Err(ThresholdingError::InvalidParameter(
                    "matrix is not symmetric".into(),
                ));
            }
        }
    }
    let (e1, e2) = perp_frame(n);
    let (s1, s2) = (mat_vec(s, &e1), mat_vec(s, &e2));
    let (a, b, c) = (dot(&e1, &s1), dot(&e1, &s2), dot(&e2, &s2));
    let angular = |theta: f64| {
        let (sn, cs) = theta.sin_cos();
        a * cs * cs + 2.0 * b * sn * cs + c * sn * sn
    };
    let tol = QUAD_TOL * (1.0 + scale);
    let inner_error = Cell::new(None);
    let total = integrate(
        |theta| {
            let w = angular(theta);
            // The polar Jacobian ρ cancels the singularity of K at the origin.
            integrate(|r| w * r * r * r * kernel(r), 0.0, KERNEL_CUTOFF, tol).unwrap_or_else(|e| {
                inner_error.set(Some(e));
                0.0
            })
        },
        0.0,
        2.0 * PI,
        tol,
    )?;
    if let Some(e) = inner_error.take() {
        return Err(e.into());
    }
    Ok(-total)
}
