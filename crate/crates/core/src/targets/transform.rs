use super::TargetDistribution;
use crate::error::{Error, Result};

/// Distribution of `R x + b` when `x` follows `inner`, for orthogonal `R`.
///
/// `log f'(y) = log f(Rᵀ(y - b))` and `∇ log f'(y) = R ∇ log f(Rᵀ(y - b))`.
/// Used to check that samplers commute with rotations and translations.
#[derive(Debug, Clone)]
pub struct OrthogonalImage<T> {
    inner: T,
    rotation: Vec<Vec<f64>>,
    shift: Vec<f64>,
    name: String,
}

impl<T: TargetDistribution> OrthogonalImage<T> {
    /// `rotation` is row-major and must be square of the inner dimension.
    /// Orthogonality is the caller's responsibility.
    pub fn new(inner: T, rotation: Vec<Vec<f64>>, shift: Vec<f64>) -> Result<Self> {
        let p = inner.dim();
        if rotation.len() != p || rotation.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidParameter(format!("rotation must be {p}x{p}")));
        }
        if shift.len() != p {
            return Err(Error::DimensionMismatch { expected: p, found: shift.len() });
        }
        let name = format!("orthogonal-image({})", inner.name());
        Ok(Self { inner, rotation, shift, name })
    }

    pub fn translation(inner: T, shift: Vec<f64>) -> Result<Self> {
        let p = inner.dim();
        let identity = (0..p).map(|i| (0..p).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        Self::new(inner, identity, shift)
    }

    /// `R x + b`.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.rotation
            .iter()
            .zip(&self.shift)
            .map(|(row, b)| row.iter().zip(x).map(|(r, v)| r * v).sum::<f64>() + b)
            .collect()
    }

    /// `Rᵀ (y - b)`.
    pub fn inverse(&self, y: &[f64]) -> Vec<f64> {
        let p = self.shift.len();
        let mut out = vec![0.0; p];
        for (i, row) in self.rotation.iter().enumerate() {
            let d = y[i] - self.shift[i];
            for (o, r) in out.iter_mut().zip(row) {
                *o += r * d;
            }
        }
        out
    }
}

impl<T: TargetDistribution> TargetDistribution for OrthogonalImage<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn log_density(&self, y: &[f64]) -> f64 {
        self.inner.log_density(&self.inverse(y))
    }

    fn grad_log_density(&self, y: &[f64]) -> Vec<f64> {
        let g = self.inner.grad_log_density(&self.inverse(y));
        self.rotation.iter().map(|row| row.iter().zip(&g).map(|(r, v)| r * v).sum()).collect()
    }

    fn initial_point(&self) -> Vec<f64> {
        self.forward(&self.inner.initial_point())
    }
}
