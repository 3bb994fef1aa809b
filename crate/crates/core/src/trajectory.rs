//! Time-stamped samples of a second-order flow with quintic Hermite dense output.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::types::SphereState;

/// Constraint tolerance for states stored in a sphere trajectory.
pub const STORED_STATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    positions: Vec<DVector<f64>>,
    velocities: Vec<DVector<f64>>,
    accelerations: Vec<DVector<f64>>,
    on_sphere: bool,
}

impl Trajectory {
    /// Builds a trajectory from node data. Times must be strictly monotone (either direction).
    pub fn from_nodes(
        times: Vec<f64>,
        positions: Vec<DVector<f64>>,
        velocities: Vec<DVector<f64>>,
        accelerations: Vec<DVector<f64>>,
        on_sphere: bool,
    ) -> Result<Self> {
        let len = times.len();
        if len < 2 {
            return Err(Error::TooShort);
        }
        for other in [positions.len(), velocities.len(), accelerations.len()] {
            if other != len {
                return Err(Error::DimensionMismatch { expected: len, got: other });
            }
        }
        let n = positions[0].len();
        for v in positions.iter().chain(&velocities).chain(&accelerations) {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let increasing = times[1] > times[0];
        if times.windows(2).any(|w| if increasing { !(w[1] > w[0]) } else { !(w[1] < w[0]) }) {
            return Err(Error::Invalid("trajectory times must be strictly monotone".into()));
        }
        if on_sphere {
            for (q, v) in positions.iter().zip(&velocities) {
                SphereState::with_tolerance(q.clone(), v.clone(), STORED_STATE_TOL)?;
            }
        }
        Ok(Self { times, positions, velocities, accelerations, on_sphere })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    pub fn on_sphere(&self) -> bool {
        self.on_sphere
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[DVector<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[DVector<f64>] {
        &self.velocities
    }

    pub fn accelerations(&self) -> &[DVector<f64>] {
        &self.accelerations
    }

    pub fn start_time(&self) -> f64 {
        self.times[0]
    }

    pub fn end_time(&self) -> f64 {
        self.times[self.len() - 1]
    }

    fn increasing(&self) -> bool {
        self.times[1] > self.times[0]
    }

    pub fn time_range(&self) -> (f64, f64) {
        let (a, b) = (self.start_time(), self.end_time());
        (a.min(b), a.max(b))
    }

    /// Node `i` as a sphere state (only meaningful for sphere trajectories).
    pub fn state(&self, i: usize) -> SphereState {
        SphereState::new_unchecked(self.positions[i].clone(), self.velocities[i].clone())
    }

    pub fn states(&self) -> impl Iterator<Item = SphereState> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.time_range();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { value: t, lo, hi });
        }
        let idx = if self.increasing() {
            self.times.partition_point(|&x| x <= t)
        } else {
            self.times.partition_point(|&x| x >= t)
        };
        Ok(idx.saturating_sub(1).min(self.len() - 2))
    }

    /// Position, velocity and acceleration of the dense output at `t`.
    pub fn eval_full(&self, t: f64) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        let k = self.locate(t)?;
        if t == self.times[k] {
            return Ok((self.positions[k].clone(), self.velocities[k].clone(), self.accelerations[k].clone()));
        }
        if t == self.times[k + 1] {
            let j = k + 1;
            return Ok((self.positions[j].clone(), self.velocities[j].clone(), self.accelerations[j].clone()));
        }
        let h = self.times[k + 1] - self.times[k];
        let s = (t - self.times[k]) / h;
        let [w, dw, ddw] = quintic_hermite_weights(s);
        let node = [
            &self.positions[k],
            &self.velocities[k],
            &self.accelerations[k],
            &self.positions[k + 1],
            &self.velocities[k + 1],
            &self.accelerations[k + 1],
        ];
        let scale = [1.0, h, h * h, 1.0, h, h * h];
        let combine = |weights: &[f64; 6], factor: f64| {
            let mut out = DVector::zeros(self.dim());
            for i in 0..6 {
                out.axpy(weights[i] * scale[i] * factor, node[i], 1.0);
            }
            out
        };
        Ok((combine(&w, 1.0), combine(&dw, 1.0 / h), combine(&ddw, 1.0 / (h * h))))
    }

    pub fn eval(&self, t: f64) -> Result<(DVector<f64>, DVector<f64>)> {
        self.eval_full(t).map(|(q, v, _)| (q, v))
    }

    pub fn eval_position(&self, t: f64) -> Result<DVector<f64>> {
        self.eval_full(t).map(|(q, _, _)| q)
    }

    /// Largest `||q| - 1|` and `|(q, q')|` over stored nodes.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        self.positions
            .iter()
            .zip(&self.velocities)
            .fold((0.0f64, 0.0f64), |(a, b), (q, v)| (a.max((q.norm() - 1.0).abs()), b.max(q.dot(v).abs())))
    }
}

/// Quintic Hermite basis on `[0, 1]` for `(p0, v0, a0, p1, v1, a1)` and its first two derivatives.
pub(crate) fn quintic_hermite_weights(s: f64) -> [[f64; 6]; 3] {
    let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));
    let w = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        0.5 * s3 - s4 + 0.5 * s5,
    ];
    let dw = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        1.5 * s2 - 4.0 * s3 + 2.5 * s4,
    ];
    let ddw = [
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
        1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3,
        60.0 * s - 180.0 * s2 + 120.0 * s3,
        -24.0 * s + 84.0 * s2 - 60.0 * s3,
        3.0 * s - 12.0 * s2 + 10.0 * s3,
    ];
    [w, dw, ddw]
}

/// Scalar quintic Hermite value and slope on `[t0, t1]`.
pub(crate) fn quintic_scalar(t0: f64, t1: f64, p: [f64; 6], t: f64) -> (f64, f64) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let [w, dw, _] = quintic_hermite_weights(s);
    let scale = [1.0, h, h * h, 1.0, h, h * h];
    let mut value = 0.0;
    let mut slope = 0.0;
    for i in 0..6 {
        value += w[i] * scale[i] * p[i];
        slope += dw[i] * scale[i] * p[i] / h;
    }
    (value, slope)
}
