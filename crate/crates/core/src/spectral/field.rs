use super::FieldError;

/// A uniform periodic `n × n` grid on `[0, length)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self, FieldError> {
        if n < 8 {
            return Err(FieldError::InvalidGrid(format!(
                "n = {n} is below the minimum of 8"
            )));
        }
        if n % 2 != 0 {
            return Err(FieldError::InvalidGrid(format!("n = {n} must be even")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(FieldError::InvalidGrid(format!(
                "side length {length} must be positive"
            )));
        }
        Ok(Self { n, length })
    }

    /// The unit square with `n` points per side.
    pub fn unit(n: usize) -> Result<Self, FieldError> {
        Self::new(n, 1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Cell size `h = length / n`.
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.h();
        h * h
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    /// Coordinate of cell center `i` along either axis.
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }
}

/// Real values on the cell centers of a [`GridSpec`]; always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

/// Samples `f` at every cell center.
pub fn make_field<F>(grid: GridSpec, f: F) -> Result<ScalarField, FieldError>
where
    F: Fn(f64, f64) -> f64,
{
    let n = grid.n();
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..n {
        let x = grid.center(i);
        for j in 0..n {
            let value = f(x, grid.center(j));
            if !value.is_finite() {
                return Err(FieldError::NonFinite { i, j, value });
            }
            values.push(value);
        }
    }
    Ok(ScalarField { grid, values })
}

impl ScalarField {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            let n = grid.n();
            return Err(FieldError::NonFinite {
                i: idx / n,
                j: idx % n,
                value: values[idx],
            });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        assert!(c.is_finite(), "constant field value must be finite");
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Internal constructor for values produced by finite arithmetic on finite inputs.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n() + j]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise map. Panics if `f` produces a non-finite value.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> ScalarField {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "map produced a non-finite value"
        );
        Self::from_raw(self.grid, values)
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map<F: Fn(f64, f64) -> f64>(
        &self,
        other: &ScalarField,
        f: F,
    ) -> Result<ScalarField, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField::from_values(self.grid, values)
    }

    /// `self - other`.
    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField, FieldError> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Clamps every value to `[lo, hi]`.
    pub fn clamp(&self, lo: f64, hi: f64) -> ScalarField {
        self.map(|v| v.clamp(lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_invariants() {
        assert!(GridSpec::unit(6).is_err());
        assert!(GridSpec::unit(9).is_err());
        assert!(GridSpec::new(16, 0.0).is_err());
        assert!(GridSpec::new(16, f64::NAN).is_err());
        let g = GridSpec::new(16, 2.0).unwrap();
        assert_eq!(g.h(), 0.125);
        assert_eq!(g.center(0), 0.0625);
    }

    #[test]
    fn constant_function_samples_to_constant() {
        let u = make_field(GridSpec::unit(16).unwrap(), |_, _| 1.0).unwrap();
        assert!(u.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn sampling_uses_cell_centers() {
        let grid = GridSpec::unit(64).unwrap();
        let u = make_field(grid, |x, _| (2.0 * PI * x).sin()).unwrap();
        // The largest sample sits half a cell away from the peak at x = 1/4.
        let expected = (PI / 64.0).cos();
        assert!((u.max_abs() - expected).abs() < 1e-14);
        assert!((u.get(3, 0) - (2.0 * PI * 3.5 / 64.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn circle_indicator_has_disc_area() {
        let grid = GridSpec::unit(512).unwrap();
        let u = make_field(grid, |x, y| {
            if (x - 0.5).powi(2) + (y - 0.5).powi(2) < 0.16 {
                1.0
            } else {
                -1.0
            }
        })
        .unwrap();
        let area = u.values().iter().filter(|&&v| v > 0.0).count() as f64 * grid.cell_area();
        assert!((area - PI * 0.16).abs() < 2.0 * PI * 0.4 * grid.h());
    }

    #[test]
    fn non_finite_samples_are_rejected() {
        let grid = GridSpec::unit(8).unwrap();
        let err = make_field(grid, |x, _| if x > 0.5 { f64::NAN } else { 0.0 }).unwrap_err();
        assert!(matches!(err, FieldError::NonFinite { i: 4, j: 0, .. }));
        assert!(ScalarField::from_values(grid, vec![0.0; 10]).is_err());
    }
}
