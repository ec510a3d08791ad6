//! Orthonormal nullspace bases for the shrinking-rank sampler.
//!
//! An [`OrthoBasis`] holds the directions that crumbs and proposals are
//! *not* allowed to move in. [`OrthoBasis::project`] maps a vector onto the
//! orthogonal complement of those directions, which is the subspace the
//! sampler draws from.

use crate::error::{Error, Result};

/// Default cosine threshold for the adaptation test (cos 60°).
pub const DEFAULT_COS_THRESHOLD: f64 = 0.5;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A list of orthonormal columns in `R^p`, at most `p - 1` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    dim: usize,
    columns: Vec<Vec<f64>>,
}

impl OrthoBasis {
    /// An empty basis in `R^dim`.
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        Ok(Self { dim, columns: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Whether another column may be appended without reducing the
    /// nullspace to a single dimension or less.
    pub fn can_grow(&self) -> bool {
        self.columns.len() + 2 <= self.dim
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(())
    }

    /// `v - J Jᵀ v`, or `v` itself when the basis is empty.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        let mut out = v.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    /// In-place projection; the caller guarantees `v.len() == self.dim()`.
    pub(crate) fn project_in_place(&self, v: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        for col in &self.columns {
            let c = dot(col, v);
            for (vi, ci) in v.iter_mut().zip(col) {
                *vi -= c * ci;
            }
        }
    }

    /// Adaptation test: project `g` into the nullspace and accept when the
    /// projection stays within the angle whose cosine is `cos_threshold`
    /// of the original, and the basis still has room to grow.
    ///
    /// Zero or non-finite gradients never pass.
    pub fn angle_accepts(&self, g: &[f64], cos_threshold: f64) -> Result<bool> {
        Ok(self.adaptation_direction(g, cos_threshold)?.is_some())
    }

    /// Same test as [`angle_accepts`](Self::angle_accepts), returning the
    /// projected gradient when it passes.
    pub fn adaptation_direction(&self, g: &[f64], cos_threshold: f64) -> Result<Option<Vec<f64>>> {
        self.check_len(g)?;
        if !self.can_grow() || g.iter().any(|v| !v.is_finite()) {
            return Ok(None);
        }
        let g_norm = norm(g);
        let g_star = self.project(g)?;
        let star_norm = norm(&g_star);
        if g_norm == 0.0 || star_norm == 0.0 || !star_norm.is_finite() {
            return Ok(None);
        }
        if dot(&g_star, g) > cos_threshold * star_norm * g_norm {
            Ok(Some(g_star))
        } else {
            Ok(None)
        }
    }

    /// Append `g_star / ‖g_star‖`, after one more Gram–Schmidt pass
    /// against the existing columns.
    pub fn extend(&mut self, g_star: &[f64]) -> Result<()> {
        self.check_len(g_star)?;
        if !self.can_grow() {
            return Err(Error::BasisFull { columns: self.columns.len(), dim: self.dim });
        }
        let mut col = g_star.to_vec();
        self.project_in_place(&mut col);
        let n = norm(&col);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        col.iter_mut().for_each(|c| *c /= n);
        self.columns.push(col);
        Ok(())
    }

    /// Consuming form of [`extend`](Self::extend).
    pub fn extended(mut self, g_star: &[f64]) -> Result<Self> {
        self.extend(g_star)?;
        Ok(self)
    }

    /// Largest deviation of `JᵀJ` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.columns.iter().enumerate() {
            for (j, b) in self.columns.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}
