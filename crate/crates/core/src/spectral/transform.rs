use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{FieldError, GridSpec, ScalarField};

/// Half spectrum of a real field, laid out as `[ky][kx]` with `ky ∈ 0..=n/2`, `kx ∈ 0..n`.
///
/// Coefficients are unnormalized DFT values, so the zero mode equals the sum of the samples.
#[derive(Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    data: Vec<Complex<f64>>,
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectrum")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl Spectrum {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coefficients(&self) -> &[Complex<f64>] {
        &self.data
    }

    /// Multiplies each mode by `f(|k|²)` where `|k|² = (2π/L)² (kx² + ky²)`.
    fn scale_by<F: Fn(f64) -> f64>(&mut self, k_sq: &[f64], f: F) {
        for (c, &k2) in self.data.iter_mut().zip(k_sq) {
            *c *= f(k2);
        }
    }
}

/// Cached FFT plans and squared wavenumbers for one grid.
///
/// Cloning is cheap; the plans are shared and each transform allocates its own scratch.
#[derive(Clone)]
pub struct SpectralPlan {
    grid: GridSpec,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k_sq: Arc<[f64]>,
}

impl fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralPlan")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

fn signed_index(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

impl SpectralPlan {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let mut real_planner = RealFftPlanner::<f64>::new();
        let mut planner = FftPlanner::<f64>::new();
        let base = 2.0 * PI / grid.length();
        let half = n / 2 + 1;
        let mut k_sq = Vec::with_capacity(half * n);
        for ky in 0..half {
            let y = base * ky as f64;
            for kx in 0..n {
                let x = base * signed_index(kx, n);
                k_sq.push(x * x + y * y);
            }
        }
        Self {
            grid,
            r2c: real_planner.plan_fft_forward(n),
            c2r: real_planner.plan_fft_inverse(n),
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            k_sq: k_sq.into(),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Squared wavenumbers in [`Spectrum`] layout.
    pub fn wavenumbers_sq(&self) -> &[f64] {
        &self.k_sq
    }

    pub fn forward(&self, u: &ScalarField) -> Spectrum {
        assert_eq!(u.grid(), self.grid, "field and plan grids differ");
        let n = self.grid.n();
        let half = n / 2 + 1;
        let mut row = self.r2c.make_input_vec();
        let mut row_hat = self.r2c.make_output_vec();
        let mut data = vec![Complex::new(0.0, 0.0); half * n];
        for (i, chunk) in u.values().chunks_exact(n).enumerate() {
            row.copy_from_slice(chunk);
            self.r2c
                .process(&mut row, &mut row_hat)
                .expect("buffer lengths come from the plan");
            for (ky, c) in row_hat.iter().enumerate() {
                data[ky * n + i] = *c;
            }
        }
        self.fwd.process(&mut data);
        Spectrum {
            grid: self.grid,
            data,
        }
    }

    pub fn inverse(&self, mut spec: Spectrum) -> ScalarField {
        assert_eq!(spec.grid, self.grid, "spectrum and plan grids differ");
        let n = self.grid.n();
        let half = n / 2 + 1;
        self.inv.process(&mut spec.data);
        let scale = 1.0 / (n * n) as f64;
        let mut row_hat = self.c2r.make_input_vec();
        let mut row = self.c2r.make_output_vec();
        let mut values = vec![0.0; n * n];
        for (i, out) in values.chunks_exact_mut(n).enumerate() {
            for (ky, c) in row_hat.iter_mut().enumerate() {
                *c = spec.data[ky * n + i];
            }
            row_hat[0].im = 0.0;
            row_hat[half - 1].im = 0.0;
            self.c2r
                .process(&mut row_hat, &mut row)
                .expect("buffer lengths come from the plan");
            for (o, r) in out.iter_mut().zip(&row) {
                *o = r * scale;
            }
        }
        ScalarField::from_raw(self.grid, values)
    }

    /// Applies the Fourier multiplier `f(|k|²)`.
    pub fn apply_multiplier<F: Fn(f64) -> f64>(&self, u: &ScalarField, f: F) -> ScalarField {
        let mut s = self.forward(u);
        s.scale_by(&self.k_sq, f);
        self.inverse(s)
    }

    pub fn laplacian(&self, u: &ScalarField) -> ScalarField {
        self.apply_multiplier(u, |k2| -k2)
    }

    pub fn h1_seminorm(&self, u: &ScalarField) -> f64 {
        let s = self.forward(u);
        let n = self.grid.n();
        let half = n / 2 + 1;
        let mut sum = 0.0;
        for ky in 0..half {
            let weight = if ky == 0 || ky == half - 1 { 1.0 } else { 2.0 };
            let row = ky * n..(ky + 1) * n;
            let part: f64 = s.data[row.clone()]
                .iter()
                .zip(&self.k_sq[row])
                .map(|(c, k2)| k2 * c.norm_sqr())
                .sum();
            sum += weight * part;
        }
        let l = self.grid.length();
        let n2 = (n * n) as f64;
        (sum * l * l / (n2 * n2)).sqrt()
    }
}

/// The operator `a − bΔ` with its spectral symbol `a + b|k|²`.
#[derive(Debug, Clone)]
pub struct HelmholtzOperator {
    plan: SpectralPlan,
    a: f64,
    b: f64,
}

impl HelmholtzOperator {
    pub fn new(grid: GridSpec, a: f64, b: f64) -> Result<Self, FieldError> {
        Self::with_plan(SpectralPlan::new(grid), a, b)
    }

    /// Reuses the FFT plans of an existing [`SpectralPlan`].
    pub fn with_plan(plan: SpectralPlan, a: f64, b: f64) -> Result<Self, FieldError> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 && a + b > 0.0) {
            return Err(FieldError::InvalidOperator { a, b });
        }
        Ok(Self { plan, a, b })
    }

    pub fn grid(&self) -> GridSpec {
        self.plan.grid
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn plan(&self) -> &SpectralPlan {
        &self.plan
    }

    /// `(a − bΔ) u`.
    pub fn apply(&self, u: &ScalarField) -> ScalarField {
        let (a, b) = (self.a, self.b);
        self.plan.apply_multiplier(u, |k2| a + b * k2)
    }

    /// Solves `(a − bΔ) u = rhs`. With `a = 0` the zero mode of `u` is set to 0.
    pub fn solve(&self, rhs: &ScalarField) -> Result<ScalarField, FieldError> {
        if rhs.grid() != self.plan.grid {
            return Err(FieldError::GridMismatch);
        }
        let mut s = self.plan.forward(rhs);
        if self.a == 0.0 {
            let mean = rhs.mean();
            if mean.abs() > 1e-14 * rhs.max_abs().max(f64::MIN_POSITIVE) {
                return Err(FieldError::Singular { mean });
            }
            s.data[0] = Complex::new(0.0, 0.0);
        }
        let (a, b) = (self.a, self.b);
        s.scale_by(&self.plan.k_sq, |k2| {
            let symbol = a + b * k2;
            if symbol > 0.0 {
                1.0 / symbol
            } else {
                0.0
            }
        });
        Ok(self.plan.inverse(s))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{l2_inner, lp_norm, make_field};
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::unit(n).unwrap()
    }

    fn max_err(u: &ScalarField, f: impl Fn(f64, f64) -> f64) -> f64 {
        let g = u.grid();
        let exact = make_field(g, f).unwrap();
        u.max_abs_diff(&exact).unwrap()
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let u = ScalarField::constant(grid(16), 3.5);
        assert!(SpectralPlan::new(grid(16)).laplacian(&u).max_abs() < 1e-13);
    }

    #[test]
    fn laplacian_single_modes() {
        let g = grid(32);
        let plan = SpectralPlan::new(g);
        let u = make_field(g, |x, _| (2.0 * PI * x).sin()).unwrap();
        let lap = plan.laplacian(&u);
        assert!(max_err(&lap, |x, _| -4.0 * PI * PI * (2.0 * PI * x).sin()) < 1e-11);

        let v = make_field(g, |x, y| (2.0 * PI * x).sin() + (4.0 * PI * y).cos()).unwrap();
        let lap = plan.laplacian(&v);
        let err = max_err(&lap, |x, y| {
            -4.0 * PI * PI * (2.0 * PI * x).sin() - 16.0 * PI * PI * (4.0 * PI * y).cos()
        });
        assert!(err < 1e-10);
        assert!(lap.mean().abs() < 1e-12);
    }

    #[test]
    fn laplacian_respects_side_length() {
        let g = GridSpec::new(32, 2.0).unwrap();
        let u = make_field(g, |x, y| (PI * x).cos() * (PI * y).sin()).unwrap();
        let lap = SpectralPlan::new(g).laplacian(&u);
        assert!(
            max_err(&lap, |x, y| -2.0
                * PI
                * PI
                * (PI * x).cos()
                * (PI * y).sin())
                < 1e-11
        );
    }

    #[test]
    fn nyquist_mode_is_real() {
        let g = grid(8);
        let u = make_field(g, |x, y| (8.0 * PI * x).sin() + (8.0 * PI * y).cos()).unwrap();
        let lap = SpectralPlan::new(g).laplacian(&u);
        let k2 = 64.0 * PI * PI;
        let err = max_err(&lap, |x, y| {
            -k2 * ((8.0 * PI * x).sin() + (8.0 * PI * y).cos())
        });
        assert!(err < 1e-9);
    }

    #[test]
    fn helmholtz_examples() {
        let g = grid(32);
        let rhs = make_field(g, |x, y| (x * 7.0).sin() * y).unwrap();
        let id = HelmholtzOperator::new(g, 1.0, 0.0).unwrap();
        assert!(id.solve(&rhs).unwrap().max_abs_diff(&rhs).unwrap() < 1e-14);

        let op = HelmholtzOperator::new(g, 2.0, 1.0).unwrap();
        let u = op.solve(&ScalarField::constant(g, 3.0)).unwrap();
        assert!(u.values().iter().all(|v| (v - 1.5).abs() < 1e-14));

        let op = HelmholtzOperator::new(g, 1.0, 1.0).unwrap();
        let s = make_field(g, |x, _| (2.0 * PI * x).sin()).unwrap();
        let u = op.solve(&s).unwrap();
        let scale = 1.0 / (1.0 + 4.0 * PI * PI);
        assert!(max_err(&u, |x, _| scale * (2.0 * PI * x).sin()) < 1e-14);
    }

    #[test]
    fn helmholtz_rejects_bad_coefficients() {
        let g = grid(16);
        assert!(HelmholtzOperator::new(g, 0.0, 0.0).is_err());
        assert!(HelmholtzOperator::new(g, -1.0, 1.0).is_err());
        assert!(HelmholtzOperator::new(g, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn pure_laplacian_solve_needs_zero_mean() {
        let g = grid(16);
        let op = HelmholtzOperator::new(g, 0.0, 1.0).unwrap();
        let err = op.solve(&ScalarField::constant(g, 1.0)).unwrap_err();
        assert!(matches!(err, FieldError::Singular { .. }));
        let rhs = make_field(g, |x, y| (2.0 * PI * x).cos() + (2.0 * PI * y).sin()).unwrap();
        let u = op.solve(&rhs).unwrap();
        let back = op.apply(&u);
        assert!(back.max_abs_diff(&rhs).unwrap() < 1e-12);
        assert!(u.mean().abs() < 1e-15);
    }

    #[test]
    fn norms_of_sine() {
        let g = grid(64);
        let u = make_field(g, |x, _| (2.0 * PI * x).sin()).unwrap();
        assert!((lp_norm(&u, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        let h1 = SpectralPlan::new(g).h1_seminorm(&u);
        assert!((h1 - 2.0 * PI / 2.0f64.sqrt()).abs() < 1e-12);
        let one = ScalarField::constant(g, 1.0);
        assert!((lp_norm(&one, 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(SpectralPlan::new(g).h1_seminorm(&one) < 1e-14);
        assert!(lp_norm(&one, 0.5).is_err());
    }

    #[test]
    fn h1_matches_inner_product_with_laplacian() {
        let g = grid(16);
        let u = make_field(g, |x, y| (x * 11.0).sin() * (y * 3.0 - x).cos() + x * y).unwrap();
        let plan = SpectralPlan::new(g);
        let h1_sq = plan.h1_seminorm(&u).powi(2);
        let via_inner = -l2_inner(&plan.laplacian(&u), &u).unwrap();
        assert!((h1_sq - via_inner).abs() < 1e-10 * h1_sq);
    }
}
