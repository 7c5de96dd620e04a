use std::f64::consts::{FRAC_PI_2, SQRT_2};

use super::{sign, PotentialKind, PotentialSpec};
use crate::quadrature;
use crate::tau::Tau;

/// `φ̄(x) = sign(x)(1 − e^{−√2|x|})`, the optimal profile of `(|u| − 1)²`.
pub fn wbar_profile(x: f64) -> f64 {
    sign(x) * -(-SQRT_2 * x.abs()).exp_m1()
}

/// The heteroclinic `φ` with `φ(0) = 0` and `φ′ = √(2W(φ))` for one potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalProfile {
    spec: PotentialSpec,
}

impl OptimalProfile {
    pub fn new(spec: PotentialSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> PotentialSpec {
        self.spec
    }

    /// Half-width of the transition layer for the barrier kinds, which reach `±1` in finite distance.
    pub fn half_width(&self) -> Option<f64> {
        match self.spec.kind() {
            PotentialKind::BarrierAbs | PotentialKind::EllOne { .. } => Some(SQRT_2),
            PotentialKind::BarrierQuadratic => Some(FRAC_PI_2 / SQRT_2),
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.spec.kind() {
            PotentialKind::QuadraticAbs => wbar_profile(x),
            PotentialKind::Standard => (SQRT_2 * x).tanh(),
            PotentialKind::BarrierAbs | PotentialKind::EllOne { .. } => {
                if x.abs() <= SQRT_2 {
                    (SQRT_2 * x - sign(x) * x * x / 2.0).clamp(-1.0, 1.0)
                } else {
                    sign(x)
                }
            }
            PotentialKind::BarrierQuadratic => {
                if x.abs() <= FRAC_PI_2 / SQRT_2 {
                    (SQRT_2 * x).sin()
                } else {
                    sign(x)
                }
            }
            PotentialKind::QuadraticWR { .. } => sign(x) * self.invert_distance(x.abs()),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.spec.kind() {
            PotentialKind::QuadraticAbs => SQRT_2 * (-SQRT_2 * x.abs()).exp(),
            PotentialKind::Standard => {
                let t = (SQRT_2 * x).tanh();
                SQRT_2 * (1.0 - t * t)
            }
            PotentialKind::BarrierAbs | PotentialKind::EllOne { .. } => (SQRT_2 - x.abs()).max(0.0),
            PotentialKind::BarrierQuadratic => {
                if x.abs() <= FRAC_PI_2 / SQRT_2 {
                    SQRT_2 * (SQRT_2 * x).cos()
                } else {
                    0.0
                }
            }
            PotentialKind::QuadraticWR { .. } => (2.0 * self.spec.w(self.value(x))).sqrt(),
        }
    }

    /// Distance `∫_a^b dz/√(2W(z))` travelled by the profile between levels `a < b < 1`.
    fn travel(&self, a: f64, b: f64) -> f64 {
        let spec = self.spec;
        let (lo, hi, s) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        s * quadrature::integrate(|z| 1.0 / (2.0 * spec.w(z)).sqrt(), lo, hi, 1e-14)
            .expect("integrand is smooth and finite below the well")
    }

    /// Solves `∫_0^φ dz/√(2W(z)) = x` for `φ ∈ [0, 1)` by safeguarded Newton iteration.
    fn invert_distance(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut phi = wbar_profile(x).min(1.0 - 1e-12);
        let mut at = self.travel(0.0, phi);
        for _ in 0..200 {
            let residual = at - x;
            if residual.abs() <= 1e-15 * x.max(1.0) {
                break;
            }
            if residual > 0.0 {
                hi = phi;
            } else {
                lo = phi;
            }
            let slope = (2.0 * self.spec.w(phi)).sqrt();
            let mut next = phi - residual * slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if next == phi || hi - lo <= f64::EPSILON * hi {
                break;
            }
            at += self.travel(phi, next);
            phi = next;
        }
        phi
    }
}

/// Profile value for `spec` at `x`; see [`OptimalProfile::value`].
pub fn optimal_profile(spec: &PotentialSpec, x: f64) -> f64 {
    OptimalProfile::new(*spec).value(x)
}

/// The exact first step from a sharp 1D interface: `φ̄(√(1 + ε²/(2τ)) x/ε)`.
///
/// # Panics
/// If `eps` is not positive.
pub fn one_d_first_step(x: f64, eps: f64, tau: Tau) -> f64 {
    assert!(eps > 0.0, "eps must be positive");
    let stretch = (1.0 + eps * eps * tau.recip() / 2.0).sqrt();
    wbar_profile(stretch * x / eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn kinds() -> Vec<PotentialSpec> {
        vec![
            PotentialSpec::wr(1.0).unwrap(),
            PotentialSpec::wr(100.0).unwrap(),
            PotentialSpec::wbar(),
            PotentialSpec::standard(),
            PotentialSpec::barrier_abs(),
            PotentialSpec::barrier_quadratic(),
            PotentialSpec::ell_one(2.0).unwrap(),
        ]
    }

    #[test]
    fn centered_odd_monotone() {
        for spec in kinds() {
            let p = spec.profile();
            assert_eq!(p.value(0.0), 0.0, "{spec}");
            let mut prev = -1.0;
            for k in -300..=300 {
                let x = k as f64 / 50.0;
                let v = p.value(x);
                assert!((v + p.value(-x)).abs() < 1e-14, "{spec} odd at {x}");
                assert!(v >= prev - 1e-15, "{spec} monotone at {x}");
                assert!(v.abs() <= 1.0);
                prev = v;
            }
        }
    }

    #[test]
    fn closed_form_values() {
        assert!((wbar_profile(1.0 / SQRT_2) - (1.0 - 1.0 / E)).abs() < 1e-14);
        assert!((wbar_profile(1.0 / SQRT_2) - 0.632121).abs() < 1e-6);
        assert_eq!(PotentialSpec::barrier_abs().profile().value(SQRT_2), 1.0);
        assert_eq!(PotentialSpec::barrier_abs().profile().value(3.0), 1.0);
        assert!(
            (PotentialSpec::standard().profile().value(0.3) - (0.3 * SQRT_2).tanh()).abs() < 1e-16
        );
    }

    #[test]
    fn ode_residual_closed_forms() {
        for spec in kinds() {
            if matches!(spec.kind(), PotentialKind::QuadraticWR { .. }) {
                continue;
            }
            let p = spec.profile();
            let reach = p.half_width().unwrap_or(6.0);
            for k in 1..1000 {
                let x = -reach + 2.0 * reach * k as f64 / 1000.0;
                let residual = p.derivative(x) - (2.0 * spec.w(p.value(x))).sqrt();
                assert!(residual.abs() < 1e-8, "{spec} at {x}: {residual}");
            }
        }
    }

    #[test]
    fn wr_profile_satisfies_ode_by_finite_differences() {
        for r in [1.0, 100.0] {
            let spec = PotentialSpec::wr(r).unwrap();
            let p = spec.profile();
            let h = 1e-3;
            for k in 1..40 {
                let x = -4.0 + 8.0 * k as f64 / 40.0;
                let fd = (p.value(x - 2.0 * h) - 8.0 * p.value(x - h) + 8.0 * p.value(x + h)
                    - p.value(x + 2.0 * h))
                    / (12.0 * h);
                let residual = fd - (2.0 * spec.w(p.value(x))).sqrt();
                assert!(residual.abs() < 1e-8, "R={r} at {x}: {residual}");
            }
        }
    }

    #[test]
    fn wr_profile_approaches_wbar_for_large_r() {
        let p = PotentialSpec::wr(1e6).unwrap().profile();
        for x in [0.2, 0.7, 1.5, 3.0] {
            assert!((p.value(x) - wbar_profile(x)).abs() < 5e-3);
        }
    }

    #[test]
    fn first_step_examples() {
        assert_eq!(one_d_first_step(0.0, 0.1, Tau::Finite(1.0)), 0.0);
        let v = one_d_first_step(0.1 / SQRT_2, 0.1, Tau::Infinite);
        assert!((v - (1.0 - 1.0 / E)).abs() < 1e-14);
        let max_diff = (0..200)
            .map(|k| {
                let x = -0.5 + k as f64 / 200.0;
                (one_d_first_step(x, 0.1, Tau::Finite(1.0))
                    - one_d_first_step(x, 0.1, Tau::Infinite))
                .abs()
            })
            .fold(0.0, f64::max);
        assert!(max_diff < 2e-3, "{max_diff}");
        assert!(max_diff > 1e-4);
    }
}
