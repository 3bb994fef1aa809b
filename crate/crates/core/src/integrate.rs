//! Adaptive Dormand–Prince 5(4) integration with projection onto the sphere.

use nalgebra::DVector;

use crate::dynamics::Flow;
use crate::error::{Error, Result};
use crate::trajectory::Trajectory;
use crate::types::{project_state, SphereState};

/// Largest per-step renormalization accepted before a step is retried with a smaller size.
pub const MAX_STEP_RENORMALIZATION: f64 = 1e-8;
/// Renormalization that still persists at the smallest step size is reported as a bug in the flow.
pub const MAX_CONSTRAINT_VIOLATION: f64 = 1e-6;

const MIN_TOL: f64 = 1e-13;
const MAX_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-10, max_step: None, max_steps: 1_000_000 }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        for tol in [self.rel_tol, self.abs_tol] {
            if !(MIN_TOL..=MAX_TOL).contains(&tol) {
                return Err(Error::InvalidTolerance(tol));
            }
        }
        Ok(())
    }
}

// Dormand–Prince tableau; the flows are autonomous so the nodes c_i are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// First-order form `y = (q, v)`, `y' = (v, a(q, v))`.
fn first_order(flow: &Flow, y: &DVector<f64>) -> Result<DVector<f64>> {
    let n = flow.dim();
    let q = y.rows(0, n).into_owned();
    let v = y.rows(n, n).into_owned();
    let a = flow.acceleration(&q, &v)?;
    let mut out = DVector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(&v);
    out.rows_mut(n, n).copy_from(&a);
    Ok(out)
}

fn stack(q: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = q.len();
    let mut y = DVector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(q);
    y.rows_mut(n, n).copy_from(v);
    y
}

fn split(y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let n = y.len() / 2;
    (y.rows(0, n).into_owned(), y.rows(n, n).into_owned())
}

fn error_norm(err: &DVector<f64>, y0: &DVector<f64>, y1: &DVector<f64>, opts: &IntegratorOptions) -> f64 {
    let sum: f64 = (0..err.len())
        .map(|i| {
            let sc = opts.abs_tol + opts.rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

/// Integrates a sphere flow from `state0` over `t_span` (which may run backwards).
pub fn integrate(
    flow: &Flow,
    state0: &SphereState,
    t_span: (f64, f64),
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory> {
    integrate_with(
        flow,
        state0.gamma(),
        state0.gamma_dot(),
        t_span,
        &IntegratorOptions::with_tolerances(rel_tol, abs_tol),
    )
}

pub fn integrate_with(
    flow: &Flow,
    q0: &DVector<f64>,
    v0: &DVector<f64>,
    t_span: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let n = flow.dim();
    for v in [q0, v0] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
    }
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::Invalid("time span must be finite and nonempty".into()));
    }
    let dir = (t1 - t0).signum();
    let sphere = flow.on_sphere();

    let (q0, v0) = if sphere {
        let s = SphereState::with_tolerance(q0.clone(), v0.clone(), crate::trajectory::STORED_STATE_TOL)?;
        s.into_parts()
    } else {
        (q0.clone(), v0.clone())
    };

    let mut t = t0;
    let mut y = stack(&q0, &v0);
    let mut k1 = first_order(flow, &y)?;

    let mut times = vec![t0];
    let mut positions = vec![q0];
    let mut velocities = vec![v0];
    let mut accelerations = vec![k1.rows(n, n).into_owned()];

    let span = (t1 - t0).abs();
    let max_step = opts.max_step.unwrap_or(span).min(span);
    let mut h = initial_step(&y, &k1, opts).min(max_step);
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;
    let mut steps = 0usize;

    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::StepUnderflow(t));
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow(t));
        }
        let hs = h * dir;

        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        k.push(k1.clone());
        let mut y_new = y.clone();
        for (stage, row) in A.iter().enumerate().skip(1) {
            let mut ys = y.clone();
            for (kj, aij) in k.iter().zip(row) {
                if *aij != 0.0 {
                    ys.axpy(hs * aij, kj, 1.0);
                }
            }
            if stage == 6 {
                y_new = ys.clone();
            }
            k.push(first_order(flow, &ys)?);
        }
        let mut err = DVector::zeros(2 * n);
        for (i, ki) in k.iter().enumerate() {
            if E[i] != 0.0 {
                err.axpy(hs * E[i], ki, 1.0);
            }
        }
        let err_norm = error_norm(&err, &y, &y_new, opts);

        if !(err_norm <= 1.0) {
            let fac = if err_norm.is_finite() { (0.9 * err_norm.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= fac;
            rejected_last = true;
            continue;
        }

        let mut k_next = k.pop().expect("seven stages");
        if sphere {
            let (q, v) = split(&y_new);
            let drift = renormalization(&q, &v);
            if drift > MAX_STEP_RENORMALIZATION {
                h *= 0.5;
                rejected_last = true;
                if h <= 1e-14 * t.abs().max(1.0) && drift > MAX_CONSTRAINT_VIOLATION {
                    return Err(Error::ConstraintViolation { t, residual: drift });
                }
                continue;
            }
            let projected = project_state(&q, &v)?;
            y_new = stack(projected.gamma(), projected.gamma_dot());
            k_next = first_order(flow, &y_new)?;
        }

        t = if last { t1 } else { t + hs };
        y = y_new;
        k1 = k_next;
        let (q, v) = split(&y);
        times.push(t);
        positions.push(q);
        velocities.push(v);
        accelerations.push(k1.rows(n, n).into_owned());

        // PI controller
        let e = err_norm.max(1e-10);
        let mut fac = 0.9 * e.powf(-0.7 / 5.0) * err_old.powf(0.4 / 5.0);
        fac = fac.clamp(0.2, 5.0);
        if rejected_last {
            fac = fac.min(1.0);
        }
        h = (h * fac).min(max_step);
        err_old = e.max(1e-4);
        rejected_last = false;
    }

    Trajectory::from_nodes(times, positions, velocities, accelerations, sphere)
}

fn renormalization(q: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let norm = q.norm();
    let normal = (q.dot(v) / norm).abs() / v.norm().max(1.0);
    (norm - 1.0).abs().max(normal)
}

fn initial_step(y: &DVector<f64>, f: &DVector<f64>, opts: &IntegratorOptions) -> f64 {
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y[i].abs();
    let rms = |v: &DVector<f64>| ((0..v.len()).map(|i| (v[i] / scale(i)).powi(2)).sum::<f64>() / v.len() as f64).sqrt();
    let (d0, d1) = (rms(y), rms(f));
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        (0.01 * d0 / d1).max(1e-6)
    }
}
