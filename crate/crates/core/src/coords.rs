//! Sphero-conical coordinates on the unit sphere, their image under the inverse sphere map, and the
//! three-dimensional quasi-sphero-conical coordinates with `J = (a2 a3, a1 a3, a1 a2)`.
//!
//! All formulas determine squared coordinates only; [`signed_from_squares`] restores signs from a
//! reference point. Inertia parameters must be strictly decreasing, so that
//! `1/a_1 < u_1 < 1/a_2 < ... < u_{n-1} < 1/a_n`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::types::BallConfig;

const BISECTION_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SpheroConical {
    u: Vec<f64>,
}

impl SpheroConical {
    /// Validates strict interlacing against the poles `1/a_i`.
    pub fn new(cfg: &BallConfig, u: Vec<f64>) -> Result<Self> {
        let poles = poles(cfg)?;
        if u.len() + 1 != poles.len() {
            return Err(Error::DimensionMismatch { expected: poles.len() - 1, got: u.len() });
        }
        for (i, ui) in u.iter().enumerate() {
            if !(poles[i] < *ui && *ui < poles[i + 1]) {
                return Err(Error::Interlacing(i));
            }
        }
        Ok(Self { u })
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }
}

/// Poles `1/a_i`, increasing. Errors unless `a` is strictly decreasing.
fn poles(cfg: &BallConfig) -> Result<Vec<f64>> {
    if cfg.a().as_slice().windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::NotStrictlyDecreasing);
    }
    Ok(cfg.a_inv().iter().copied().collect())
}

/// Reorders `a` decreasingly; returns the sorted configuration and `perm` with `sorted[k] = a[perm[k]]`.
pub fn sort_decreasing(cfg: &BallConfig) -> Result<(BallConfig, Vec<usize>)> {
    let mut perm: Vec<usize> = (0..cfg.n()).collect();
    perm.sort_by(|&i, &j| cfg.a()[j].total_cmp(&cfg.a()[i]));
    let a: Vec<f64> = perm.iter().map(|&i| cfg.a()[i]).collect();
    Ok((BallConfig::new(cfg.n(), &a, cfg.epsilon())?, perm))
}

/// Roots of `sum x_i^2 / (z - 1/a_i) = 0`, one in each gap between consecutive poles.
pub fn u_from_x(cfg: &BallConfig, x: &DVector<f64>) -> Result<SpheroConical> {
    let p = poles(cfg)?;
    cfg.check_dim(x)?;
    if let Some(i) = x.iter().position(|v| *v == 0.0) {
        return Err(Error::NonGeneric(i));
    }
    let phi = |z: f64| x.iter().zip(&p).map(|(xi, pi)| xi * xi / (z - pi)).sum::<f64>();
    let u = p
        .windows(2)
        .map(|w| {
            // phi decreases from +inf to -inf on (w[0], w[1])
            let (mut lo, mut hi) = (w[0], w[1]);
            for _ in 0..BISECTION_ITERATIONS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if phi(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    SpheroConical::new(cfg, u)
}

/// `x_i^2 = prod_k (1/a_i - u_k) / prod_{j != i} (1/a_i - 1/a_j)`.
pub fn x_from_u(cfg: &BallConfig, u: &SpheroConical) -> Result<DVector<f64>> {
    let p = poles(cfg)?;
    check_len(&p, u)?;
    Ok(DVector::from_fn(p.len(), |i, _| {
        let num: f64 = u.values().iter().map(|uk| p[i] - uk).product();
        let den: f64 = p.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, pj)| p[i] - pj).product();
        num / den
    }))
}

/// `g_i^2 = x_i^2 / (a_i nu^2)` with `nu^2 = sum 1/a_i - sum u_k`.
pub fn gamma_from_u(cfg: &BallConfig, u: &SpheroConical) -> Result<DVector<f64>> {
    let x2 = x_from_u(cfg, u)?;
    let nu2 = nu_squared(cfg, u);
    Ok(DVector::from_fn(cfg.n(), |i, _| x2[i] / (cfg.a()[i] * nu2)))
}

/// `nu^2 = (A^{-1} x, x) = sum_i 1/a_i - sum_k u_k`.
pub fn nu_squared(cfg: &BallConfig, u: &SpheroConical) -> f64 {
    cfg.a_inv().sum() - u.values().iter().sum::<f64>()
}

fn check_len(p: &[f64], u: &SpheroConical) -> Result<()> {
    if u.values().len() + 1 != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len() - 1, got: u.values().len() });
    }
    Ok(())
}

/// Signed coordinates from their squares, with signs copied from `reference`.
pub fn signed_from_squares(squares: &DVector<f64>, reference: &DVector<f64>) -> DVector<f64> {
    squares.zip_map(reference, |s, r| s.max(0.0).sqrt().copysign(r))
}

/// `J = (a2 a3, a1 a3, a1 a2)`.
pub fn bm_params(cfg: &BallConfig) -> Result<[f64; 3]> {
    if cfg.n() != 3 {
        return Err(Error::RequiresThreeDimensions(cfg.n()));
    }
    let a = cfg.a();
    Ok([a[1] * a[2], a[0] * a[2], a[0] * a[1]])
}

/// Squared coordinates from the quasi-sphero-conical formulas with `u_bm = a1 a2 a3 u1`,
/// `v_bm = a1 a2 a3 u2` and `eta^2 = (J1 + J2 + J3 - u_bm - v_bm)^{-1}`.
pub fn bm_gamma_squared(cfg: &BallConfig, u: &SpheroConical) -> Result<DVector<f64>> {
    let j = bm_params(cfg)?;
    poles(cfg)?;
    let det = cfg.a().product();
    let (ub, vb) = (det * u.values()[0], det * u.values()[1]);
    let eta2 = 1.0 / (j.iter().sum::<f64>() - ub - vb);
    Ok(DVector::from_fn(3, |i, _| {
        let others: f64 = (0..3).filter(|&k| k != i).map(|k| j[i] - j[k]).product();
        eta2 * j[i] * (j[i] - ub) * (j[i] - vb) / others
    }))
}

/// Largest disagreement between the two squared-coordinate formulas, together with the residual of
/// `eta^2 a1 a2 a3 nu^2 = 1`.
pub fn bm_correspondence_check(cfg: &BallConfig, u: &SpheroConical) -> Result<f64> {
    let bm = bm_gamma_squared(cfg, u)?;
    let sc = gamma_from_u(cfg, u)?;
    let j = bm_params(cfg)?;
    let det = cfg.a().product();
    let eta2 = 1.0 / (j.iter().sum::<f64>() - det * u.values().iter().sum::<f64>());
    let identity = (eta2 * det * nu_squared(cfg, u) - 1.0).abs();
    Ok((bm - sc).amax().max(identity))
}

/// `a1 g1^2 / (a2 a3 - z) + a2 g2^2 / (a1 a3 - z) + a3 g3^2 / (a1 a2 - z)`.
pub fn conic_residual(cfg: &BallConfig, gamma: &DVector<f64>, z: f64) -> Result<f64> {
    let j = bm_params(cfg)?;
    cfg.check_dim(gamma)?;
    if j.contains(&z) {
        return Err(Error::PoleHit(z));
    }
    Ok((0..3).map(|i| cfg.a()[i] * gamma[i] * gamma[i] / (j[i] - z)).sum())
}
