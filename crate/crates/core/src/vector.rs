use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Dense vector of finite `f64` components.
///
/// Construction through [`Vector::new`] rejects NaN and infinite entries.
/// Arithmetic between vectors of different dimension panics, the same way
/// slice indexing does; use [`Vector::check_dim`] at API boundaries.
#[derive(Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("vector", "dimension must be at least 1"));
        }
        if let Some(i) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("vector component {i}"),
            });
        }
        Ok(Vector(components))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be at least 1");
        Vector(vec![0.0; dim])
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        assert!(dim >= 1, "vector dimension must be at least 1");
        Vector((0..dim).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Indices of the non-finite components.
    pub fn non_finite_components(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_finite())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                actual: self.dim(),
            })
        }
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self += scale * other`
    pub fn axpy(&mut self, scale: f64, other: &Vector) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += scale * b;
        }
    }

    pub fn scaled(&self, scale: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * scale).collect())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scaled(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|c| -c).collect())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(components: Vec<f64>) -> Result<Self> {
        Vector::new(components)
    }
}

impl From<f64> for Vector {
    fn from(value: f64) -> Self {
        assert!(value.is_finite());
        Vector(vec![value])
    }
}
