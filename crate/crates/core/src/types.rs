//! Validated domain types: the ball configuration and phase points on the unit sphere.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Tolerance applied when a [`SphereState`] is constructed from raw data.
pub const SPHERE_TOL: f64 = 1e-12;

/// Dimension, diagonal inertia parameters `a` and geometry ratio `epsilon` of the rolling ball.
///
/// `epsilon = sigma / (sigma +- rho)` carries the rolling geometry: `1/2` for equal radii,
/// `1` in the plane limit and negative values for a shell rolling over an inner sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BallConfig {
    a: DVector<f64>,
    a_inv: DVector<f64>,
    a_sqrt: DVector<f64>,
    epsilon: f64,
}

impl BallConfig {
    pub fn new(n: usize, a: &[f64], epsilon: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.len() });
        }
        if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::NonPositiveInertia { index, value });
        }
        if epsilon == 0.0 || !epsilon.is_finite() {
            return Err(Error::InvalidEpsilon);
        }
        let a = DVector::from_column_slice(a);
        Ok(Self { a_inv: a.map(|v| 1.0 / v), a_sqrt: a.map(f64::sqrt), a, epsilon })
    }

    /// Same inertia, different geometry ratio.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.n(), self.a.as_slice(), epsilon)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn a_inv(&self) -> &DVector<f64> {
        &self.a_inv
    }

    pub fn a_sqrt(&self) -> &DVector<f64> {
        &self.a_sqrt
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `A v` for the diagonal matrix `A`.
    pub fn apply_a(&self, v: &DVector<f64>) -> DVector<f64> {
        self.a.component_mul(v)
    }

    pub fn apply_a_inv(&self, v: &DVector<f64>) -> DVector<f64> {
        self.a_inv.component_mul(v)
    }

    /// `(A v, v)`.
    pub fn a_norm2(&self, v: &DVector<f64>) -> f64 {
        v.iter().zip(self.a.iter()).map(|(x, a)| a * x * x).sum()
    }

    /// `(A^{-1} v, v)`.
    pub fn a_inv_norm2(&self, v: &DVector<f64>) -> f64 {
        v.iter().zip(self.a_inv.iter()).map(|(x, a)| a * x * x).sum()
    }

    pub(crate) fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: v.len() });
        }
        Ok(())
    }
}

/// Maps the rolling geometry to the ratio `epsilon`.
///
/// Case `i` uses `sigma / (sigma + rho)`, cases `ii` and `iii` use `sigma / (sigma - rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RollingCase {
    I,
    Ii,
    Iii,
}

pub fn epsilon_from_radii(sigma: f64, rho: f64, case: RollingCase) -> Result<f64> {
    let denom = match case {
        RollingCase::I => sigma + rho,
        RollingCase::Ii | RollingCase::Iii => sigma - rho,
    };
    if denom == 0.0 || sigma == 0.0 || !sigma.is_finite() || !rho.is_finite() {
        return Err(Error::InvalidEpsilon);
    }
    Ok(sigma / denom)
}

/// A point on the unit sphere together with a tangent velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereState {
    gamma: DVector<f64>,
    gamma_dot: DVector<f64>,
}

impl SphereState {
    /// Validates `(g,g) = 1` and `(g,v) = 0` to [`SPHERE_TOL`].
    pub fn new(gamma: DVector<f64>, gamma_dot: DVector<f64>) -> Result<Self> {
        Self::with_tolerance(gamma, gamma_dot, SPHERE_TOL)
    }

    pub fn with_tolerance(gamma: DVector<f64>, gamma_dot: DVector<f64>, tol: f64) -> Result<Self> {
        if gamma.len() != gamma_dot.len() {
            return Err(Error::DimensionMismatch { expected: gamma.len(), got: gamma_dot.len() });
        }
        let norm_err = (gamma.norm_squared() - 1.0).abs();
        if !(norm_err <= tol) {
            return Err(Error::OffSphere(norm_err));
        }
        let tangency = gamma.dot(&gamma_dot).abs();
        if !(tangency <= tol) {
            return Err(Error::NotTangent(tangency));
        }
        Ok(Self { gamma, gamma_dot })
    }

    pub(crate) fn new_unchecked(gamma: DVector<f64>, gamma_dot: DVector<f64>) -> Self {
        Self { gamma, gamma_dot }
    }

    pub fn from_slices(gamma: &[f64], gamma_dot: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(gamma), DVector::from_column_slice(gamma_dot))
    }

    pub fn gamma(&self) -> &DVector<f64> {
        &self.gamma
    }

    pub fn gamma_dot(&self) -> &DVector<f64> {
        &self.gamma_dot
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn into_parts(self) -> (DVector<f64>, DVector<f64>) {
        (self.gamma, self.gamma_dot)
    }

    /// Same position, velocity multiplied by `factor`.
    pub fn scaled_velocity(&self, factor: f64) -> Self {
        Self { gamma: self.gamma.clone(), gamma_dot: &self.gamma_dot * factor }
    }
}

/// Normalizes the position and removes the normal component of the velocity.
pub fn project_state(gamma_raw: &DVector<f64>, gamma_dot_raw: &DVector<f64>) -> Result<SphereState> {
    if gamma_raw.len() != gamma_dot_raw.len() {
        return Err(Error::DimensionMismatch { expected: gamma_raw.len(), got: gamma_dot_raw.len() });
    }
    let norm = gamma_raw.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroPosition);
    }
    let gamma = gamma_raw / norm;
    let normal = gamma_dot_raw.dot(&gamma);
    let gamma_dot = gamma_dot_raw - &gamma * normal;
    Ok(SphereState { gamma, gamma_dot })
}
