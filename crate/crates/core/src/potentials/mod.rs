//! Double-well potentials with their convex/concave splits.
//!
//! Every potential vanishes at `±1` and is even. The convex part is treated implicitly by the
//! stepper and the concave part explicitly. For the barrier kinds the convex part is the box
//! constraint `|u| ≤ 1` itself, so they have no convex derivative.

mod curvature;
mod profile;

pub use curvature::{beta_min, beta_minimizer, check_power_law, PowerLaw};
pub use profile::{one_d_first_step, optimal_profile, wbar_profile, OptimalProfile};

use std::fmt;
use std::str::FromStr;

use crate::quadrature::{self, QuadratureError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("invalid potential parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown potential id '{0}'")]
    UnknownId(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("beta({p}) = {value} lies outside [{lo}, {hi}]")]
    BracketViolation {
        p: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },
}

/// `sign` with the global convention `sign(0) = +1`.
pub fn sign(u: f64) -> f64 {
    if u >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    /// `u² + β − γ√(Ru² + 1)`, a smoothing of `(|u| − 1)²`.
    QuadraticWR { r: f64 },
    /// `(|u| − 1)²`, the `R → ∞` limit of `QuadraticWR`.
    QuadraticAbs,
    /// `(u² − 1)²`.
    Standard,
    /// `1 − |u|` on `[−1, 1]`, `+∞` outside.
    BarrierAbs,
    /// `1 − u²` on `[−1, 1]`, `+∞` outside.
    BarrierQuadratic,
    /// `1 − |u|` on `[−1, 1]`, `α(|u| − 1)` outside.
    EllOne { alpha: f64 },
}

/// A pair `(p, c̄)` such that the splitting defect of the potential is at least `c̄|δ|^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePair {
    pub p: f64,
    pub cbar: f64,
}

/// How the stepper must treat the convex part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvexPart {
    /// `u²`: one screened-Poisson solve per step.
    Quadratic,
    /// `u⁴`: Newton iteration.
    Quartic,
    /// Box constraint, possibly with an exact penalty outside the box.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind) -> Result<Self, PotentialError> {
        match kind {
            PotentialKind::QuadraticWR { r } if !(r.is_finite() && r > 0.0) => Err(
                PotentialError::InvalidParameter(format!("R must be positive and finite, got {r}")),
            ),
            PotentialKind::EllOne { alpha } if !(alpha.is_finite() && alpha >= 0.0) => Err(
                PotentialError::InvalidParameter(format!("alpha must be nonnegative, got {alpha}")),
            ),
            _ => Ok(Self { kind }),
        }
    }

    pub fn wr(r: f64) -> Result<Self, PotentialError> {
        Self::new(PotentialKind::QuadraticWR { r })
    }

    pub fn wbar() -> Self {
        Self {
            kind: PotentialKind::QuadraticAbs,
        }
    }

    pub fn standard() -> Self {
        Self {
            kind: PotentialKind::Standard,
        }
    }

    pub fn barrier_abs() -> Self {
        Self {
            kind: PotentialKind::BarrierAbs,
        }
    }

    pub fn barrier_quadratic() -> Self {
        Self {
            kind: PotentialKind::BarrierQuadratic,
        }
    }

    pub fn ell_one(alpha: f64) -> Result<Self, PotentialError> {
        Self::new(PotentialKind::EllOne { alpha })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn convex_part(&self) -> ConvexPart {
        match self.kind {
            PotentialKind::QuadraticWR { .. } | PotentialKind::QuadraticAbs => {
                ConvexPart::Quadratic
            }
            PotentialKind::Standard => ConvexPart::Quartic,
            PotentialKind::BarrierAbs
            | PotentialKind::BarrierQuadratic
            | PotentialKind::EllOne { .. } => ConvexPart::Box,
        }
    }

    /// True when the admissible set is `[−1, 1]` (energies are evaluated on clipped fields).
    pub fn is_barrier(&self) -> bool {
        self.convex_part() == ConvexPart::Box
    }

    /// The primary curvature pair used by the dissipation check, if the potential has one.
    pub fn curvature(&self) -> Option<CurvaturePair> {
        self.curvature_pairs().first().copied()
    }

    /// Every curvature pair recorded for the potential.
    pub fn curvature_pairs(&self) -> &'static [CurvaturePair] {
        const ONE: [CurvaturePair; 1] = [CurvaturePair { p: 2.0, cbar: 1.0 }];
        const STANDARD: [CurvaturePair; 2] = [
            CurvaturePair { p: 2.0, cbar: 2.0 },
            CurvaturePair {
                p: 4.0,
                cbar: 1.0 / 3.0,
            },
        ];
        match self.kind {
            PotentialKind::QuadraticWR { .. }
            | PotentialKind::QuadraticAbs
            | PotentialKind::BarrierQuadratic => &ONE,
            PotentialKind::Standard => &STANDARD,
            PotentialKind::BarrierAbs | PotentialKind::EllOne { .. } => &[],
        }
    }

    /// `W(u)`; barrier kinds return `+∞` outside `[−1, 1]`.
    pub fn w(&self, u: f64) -> f64 {
        let a = u.abs();
        match self.kind {
            PotentialKind::QuadraticWR { r } => {
                // Algebraically equal to u² + β − γ√(Ru² + 1), without cancellation near the wells.
                let q = (u - 1.0) * (u + 1.0);
                let d = (r * u * u + 1.0).sqrt() + (r + 1.0).sqrt();
                r * q * q / (d * d)
            }
            PotentialKind::QuadraticAbs => (a - 1.0) * (a - 1.0),
            PotentialKind::Standard => {
                let q = (u - 1.0) * (u + 1.0);
                q * q
            }
            PotentialKind::BarrierAbs if a <= 1.0 => 1.0 - a,
            PotentialKind::BarrierQuadratic if a <= 1.0 => 1.0 - u * u,
            PotentialKind::BarrierAbs | PotentialKind::BarrierQuadratic => f64::INFINITY,
            PotentialKind::EllOne { alpha } => {
                if a <= 1.0 {
                    1.0 - a
                } else {
                    alpha * (a - 1.0)
                }
            }
        }
    }

    /// The convex part `W_vex(u)`; `+∞` outside the box for the barrier kinds.
    pub fn w_vex(&self, u: f64) -> f64 {
        let a = u.abs();
        match self.kind {
            PotentialKind::QuadraticWR { .. } | PotentialKind::QuadraticAbs => u * u,
            PotentialKind::Standard => u.powi(4),
            PotentialKind::BarrierAbs | PotentialKind::BarrierQuadratic => {
                if a <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PotentialKind::EllOne { alpha } => (alpha + 1.0) * (a - 1.0).max(0.0),
        }
    }

    /// The concave part `W_conc(u)`.
    pub fn w_conc(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::QuadraticWR { r } => {
                let (beta, gamma) = wr_coefficients_unchecked(r);
                beta - gamma * (r * u * u + 1.0).sqrt()
            }
            PotentialKind::QuadraticAbs => 1.0 - 2.0 * u.abs(),
            PotentialKind::Standard => 1.0 - 2.0 * u * u,
            PotentialKind::BarrierAbs | PotentialKind::EllOne { .. } => 1.0 - u.abs(),
            PotentialKind::BarrierQuadratic => 1.0 - u * u,
        }
    }

    /// Derivative of the convex part; `None` for the pure barrier kinds.
    ///
    /// For the `ℓ¹` kind this is the subgradient choice `(α + 1) sign(u)` strictly outside the box.
    pub fn w_vex_prime(&self, u: f64) -> Option<f64> {
        match self.kind {
            PotentialKind::QuadraticWR { .. } | PotentialKind::QuadraticAbs => Some(2.0 * u),
            PotentialKind::Standard => Some(4.0 * u * u * u),
            PotentialKind::BarrierAbs | PotentialKind::BarrierQuadratic => None,
            PotentialKind::EllOne { alpha } => Some(if u.abs() > 1.0 {
                (alpha + 1.0) * sign(u)
            } else {
                0.0
            }),
        }
    }

    /// Derivative of the concave part, with `sign(0) = +1` at kinks.
    pub fn w_conc_prime(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::QuadraticWR { r } => {
                let (_, gamma) = wr_coefficients_unchecked(r);
                -gamma * r * u / (r * u * u + 1.0).sqrt()
            }
            PotentialKind::QuadraticAbs => -2.0 * sign(u),
            PotentialKind::Standard => -4.0 * u,
            PotentialKind::BarrierAbs | PotentialKind::EllOne { .. } => -sign(u),
            PotentialKind::BarrierQuadratic => -2.0 * u,
        }
    }

    /// `W″(u)` for the smooth kinds.
    pub fn w_second_derivative(&self, u: f64) -> Option<f64> {
        match self.kind {
            PotentialKind::QuadraticWR { r } => {
                let (_, gamma) = wr_coefficients_unchecked(r);
                Some(2.0 - gamma * r / (r * u * u + 1.0).powf(1.5))
            }
            PotentialKind::Standard => Some(12.0 * u * u - 4.0),
            _ => None,
        }
    }

    /// `c_W = ∫_{−1}^{1} √(2W(z)) dz` by adaptive quadrature to absolute tolerance `1e-10`.
    pub fn normalization_constant(&self) -> Result<f64, PotentialError> {
        normalization_constant(self)
    }

    pub fn profile(&self) -> OptimalProfile {
        OptimalProfile::new(*self)
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PotentialKind::QuadraticWR { r } => write!(f, "wr:R={r}"),
            PotentialKind::QuadraticAbs => f.write_str("wbar"),
            PotentialKind::Standard => f.write_str("standard"),
            PotentialKind::BarrierAbs => f.write_str("barrier_abs"),
            PotentialKind::BarrierQuadratic => f.write_str("barrier_quad"),
            PotentialKind::EllOne { alpha } => write!(f, "elloneg:alpha={alpha}"),
        }
    }
}

fn parse_param(id: &str, rest: &str, key: &str) -> Result<f64, PotentialError> {
    let value = rest
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| PotentialError::UnknownId(id.to_string()))?;
    value
        .parse()
        .map_err(|_| PotentialError::InvalidParameter(format!("cannot parse '{value}' in '{id}'")))
}

impl FromStr for PotentialSpec {
    type Err = PotentialError;

    /// Accepts `wr:R=100`, `wbar`, `standard`, `barrier_abs`, `barrier_quad`, `elloneg:alpha=0.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let id = s.trim();
        match id {
            "wbar" => return Ok(Self::wbar()),
            "standard" => return Ok(Self::standard()),
            "barrier_abs" => return Ok(Self::barrier_abs()),
            "barrier_quad" => return Ok(Self::barrier_quadratic()),
            _ => {}
        }
        if let Some(rest) = id.strip_prefix("wr:") {
            return Self::wr(parse_param(id, rest, "R")?);
        }
        if let Some(rest) = id.strip_prefix("elloneg:") {
            return Self::ell_one(parse_param(id, rest, "alpha")?);
        }
        Err(PotentialError::UnknownId(id.to_string()))
    }
}

/// `(β, γ) = (1 + 2/R, 2√(R + 1)/R)`, the coefficients that put the wells of `W_R` at `±1`.
pub fn wr_coefficients(r: f64) -> Result<(f64, f64), PotentialError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(PotentialError::InvalidParameter(format!(
            "R must be positive and finite, got {r}"
        )));
    }
    Ok(wr_coefficients_unchecked(r))
}

fn wr_coefficients_unchecked(r: f64) -> (f64, f64) {
    (1.0 + 2.0 / r, 2.0 * (r + 1.0).sqrt() / r)
}

pub fn w(spec: &PotentialSpec, u: f64) -> f64 {
    spec.w(u)
}

pub fn w_vex_prime(spec: &PotentialSpec, u: f64) -> Option<f64> {
    spec.w_vex_prime(u)
}

pub fn w_conc_prime(spec: &PotentialSpec, u: f64) -> f64 {
    spec.w_conc_prime(u)
}

pub fn normalization_constant(spec: &PotentialSpec) -> Result<f64, PotentialError> {
    let s = *spec;
    Ok(quadrature::integrate(
        move |z| (2.0 * s.w(z).max(0.0)).sqrt(),
        -1.0,
        1.0,
        1e-10,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn all_kinds() -> Vec<PotentialSpec> {
        vec![
            PotentialSpec::wr(1.0).unwrap(),
            PotentialSpec::wr(100.0).unwrap(),
            PotentialSpec::wbar(),
            PotentialSpec::standard(),
            PotentialSpec::barrier_abs(),
            PotentialSpec::barrier_quadratic(),
            PotentialSpec::ell_one(0.5).unwrap(),
        ]
    }

    #[test]
    fn standard_values() {
        let s = PotentialSpec::standard();
        assert_eq!(s.w(1.0), 0.0);
        assert_eq!(s.w(0.0), 1.0);
        assert_eq!(s.w_vex_prime(0.5), Some(0.5));
        assert_eq!(s.w_conc_prime(0.5), -2.0);
    }

    #[test]
    fn wr_values() {
        let (b, g) = wr_coefficients(1.0).unwrap();
        assert!((b - 3.0).abs() < 1e-15 && (g - 2.0 * SQRT_2).abs() < 1e-15);
        assert!(PotentialSpec::wr(1.0).unwrap().w(1.0).abs() < 1e-15);
        let w0 = PotentialSpec::wr(100.0).unwrap().w(0.0);
        let (beta, gamma) = wr_coefficients(100.0).unwrap();
        assert!((w0 - (beta - gamma)).abs() < 1e-14);
        let exact = (101f64.sqrt() - 1.0).powi(2) / 100.0;
        assert!((w0 - exact).abs() < 1e-14);
        assert!((w0 - 0.8190).abs() < 1e-4);
        assert!(wr_coefficients(0.0).is_err());
        assert!(wr_coefficients(-2.0).is_err());
    }

    #[test]
    fn wr_second_derivative_at_well() {
        for r in [1.0, 10.0, 100.0] {
            let s = PotentialSpec::wr(r).unwrap();
            let exact = 2.0 * r / (r + 1.0);
            assert!((s.w_second_derivative(1.0).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn wr_large_r_limit() {
        let (beta, _) = wr_coefficients(1e12).unwrap();
        assert!((beta - 1.0).abs() < 1e-11);
        let s = PotentialSpec::wr(1e8).unwrap();
        for u in [-1.7, -0.6, 0.2, 0.9, 1.4] {
            let limit: f64 = u * u + 1.0 - 2.0 * f64::abs(u);
            assert!((s.w(u) - limit).abs() < 1e-3);
        }
    }

    #[test]
    fn wells_and_positivity() {
        for s in all_kinds() {
            assert!(s.w(1.0).abs() < 1e-14, "{s}");
            assert!(s.w(-1.0).abs() < 1e-14, "{s}");
            for k in 1..200 {
                let z = -1.0 + k as f64 / 100.0;
                if (z.abs() - 1.0).abs() > 1e-12 {
                    assert!(s.w(z) > 0.0, "{s} at {z}");
                }
            }
        }
    }

    #[test]
    fn barrier_is_infinite_outside_box() {
        assert_eq!(PotentialSpec::barrier_abs().w(1.5), f64::INFINITY);
        assert_eq!(PotentialSpec::barrier_quadratic().w(-1.01), f64::INFINITY);
        assert_eq!(PotentialSpec::barrier_abs().w_vex_prime(0.3), None);
        assert_eq!(PotentialSpec::barrier_abs().w_conc_prime(0.0), -1.0);
        assert!((PotentialSpec::ell_one(0.5).unwrap().w(2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn normalization_constants() {
        let c = PotentialSpec::wbar().normalization_constant().unwrap();
        assert!((c - SQRT_2).abs() < 1e-9);
        let c = PotentialSpec::standard().normalization_constant().unwrap();
        assert!((c - 4.0 * SQRT_2 / 3.0).abs() < 1e-9);
        let c = PotentialSpec::barrier_abs()
            .normalization_constant()
            .unwrap();
        assert!((c - 4.0 * SQRT_2 / 3.0).abs() < 1e-9);
        let c = PotentialSpec::barrier_quadratic()
            .normalization_constant()
            .unwrap();
        assert!((c - SQRT_2 * std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn ids_round_trip() {
        for s in all_kinds() {
            let back: PotentialSpec = s.to_string().parse().unwrap();
            assert_eq!(back, s);
        }
        assert_eq!(
            "wr:R=100".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::wr(100.0).unwrap()
        );
        assert!("wr:R=-1".parse::<PotentialSpec>().is_err());
        assert!("wr:Q=1".parse::<PotentialSpec>().is_err());
        assert!("quartic".parse::<PotentialSpec>().is_err());
        assert!("elloneg:alpha=x".parse::<PotentialSpec>().is_err());
    }

    #[test]
    fn curvature_pairs_recorded() {
        assert_eq!(PotentialSpec::standard().curvature_pairs().len(), 2);
        assert_eq!(
            PotentialSpec::wr(100.0).unwrap().curvature(),
            Some(CurvaturePair { p: 2.0, cbar: 1.0 })
        );
        assert_eq!(PotentialSpec::barrier_abs().curvature(), None);
    }

    #[test]
    fn standard_concave_defect_is_exactly_quadratic() {
        let g = |u: f64| 1.0 - 2.0 * u * u;
        let dg = |u: f64| -4.0 * u;
        for (u, v) in [(0.3, -1.2), (2.0, 0.5), (-0.7, -0.1)] {
            let defect = g(u) + dg(u) * (v - u) - g(v);
            assert!((defect - 2.0 * (u - v) * (u - v)).abs() < 1e-13);
        }
    }
}
