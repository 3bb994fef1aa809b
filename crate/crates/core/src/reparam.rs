//! Time substitutions `d tau = nu(q) dt`: multipliers, monotone time maps and resampling.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fields::FlatFieldConfig;
use crate::trajectory::{quintic_scalar, Trajectory};
use crate::types::{project_state, BallConfig};

/// A state-dependent rate `nu(q)` of a time substitution.
#[derive(Debug, Clone, PartialEq)]
pub enum Multiplier {
    Constant(f64),
    /// `coeff * (W q, q)^exponent` with diagonal `W`.
    QuadraticPower {
        weights: DVector<f64>,
        coeff: f64,
        exponent: f64,
    },
    /// The multiplier `nu` of a flat field configuration.
    FlatNu(FlatFieldConfig),
    /// Maupertuis rate `h - V(q)`.
    Maupertuis {
        fields: FlatFieldConfig,
        energy: f64,
    },
}

impl Multiplier {
    /// Chaplygin reducing multiplier `eps (A g, g)^{1/(2 eps) - 1}`.
    pub fn chaplygin(cfg: &BallConfig) -> Self {
        let eps = cfg.epsilon();
        Self::QuadraticPower { weights: cfg.a().clone(), coeff: eps, exponent: 0.5 / eps - 1.0 }
    }

    /// Rate `ds/dt = eps (A g, g)^{-1 - 1/(2 eps)}` carrying reduced trajectories to the natural system.
    pub fn sphere_to_natural(cfg: &BallConfig) -> Self {
        let eps = cfg.epsilon();
        Self::QuadraticPower { weights: cfg.a().clone(), coeff: eps, exponent: -1.0 - 0.5 / eps }
    }

    /// Chaplygin multiplier written on the image of the sphere map: `eps (A^{-1} x, x)^{1 - 1/(2 eps)}`.
    pub fn chaplygin_x(cfg: &BallConfig) -> Self {
        let eps = cfg.epsilon();
        Self::QuadraticPower { weights: cfg.a_inv().clone(), coeff: eps, exponent: 1.0 - 0.5 / eps }
    }

    /// `ds/dt = eps (A^{-1} x, x)^{1 + 1/(2 eps)}` written on the image of the sphere map.
    pub fn natural_time_x(cfg: &BallConfig) -> Self {
        let eps = cfg.epsilon();
        Self::QuadraticPower { weights: cfg.a_inv().clone(), coeff: eps, exponent: 1.0 + 0.5 / eps }
    }

    /// Maupertuis rate `d tau / ds = (A^{-1} x, x)^{-1/eps}` of the zero-energy natural system.
    pub fn natural_maupertuis(cfg: &BallConfig) -> Self {
        Self::QuadraticPower { weights: cfg.a_inv().clone(), coeff: 1.0, exponent: -1.0 / cfg.epsilon() }
    }

    /// Inverse of [`Multiplier::natural_maupertuis`]: `ds / d tau = (A^{-1} x, x)^{1/eps}`.
    pub fn natural_maupertuis_inverse(cfg: &BallConfig) -> Self {
        Self::QuadraticPower { weights: cfg.a_inv().clone(), coeff: 1.0, exponent: 1.0 / cfg.epsilon() }
    }

    pub fn rate(&self, q: &DVector<f64>) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::QuadraticPower { weights, coeff, exponent } => coeff * quad(weights, q).powf(*exponent),
            Self::FlatNu(fields) => fields.nu(q),
            Self::Maupertuis { fields, energy } => energy - fields.potential(q),
        }
    }

    pub fn rate_gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Constant(_) => DVector::zeros(q.len()),
            Self::QuadraticPower { weights, coeff, exponent } => {
                let base = quad(weights, q);
                weights.component_mul(q) * (2.0 * coeff * exponent * base.powf(exponent - 1.0))
            }
            Self::FlatNu(fields) => fields.grad_ln_nu(q) * fields.nu(q),
            Self::Maupertuis { fields, .. } => -fields.potential_gradient(q),
        }
    }
}

fn quad(w: &DVector<f64>, q: &DVector<f64>) -> f64 {
    q.iter().zip(w.iter()).map(|(x, w)| w * x * x).sum()
}

/// Monotone map `t -> tau` with quintic Hermite interpolation between quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReparamMap {
    t_nodes: Vec<f64>,
    tau_nodes: Vec<f64>,
    rates: Vec<f64>,
    rate_slopes: Vec<f64>,
    multiplier_sign: f64,
}

impl ReparamMap {
    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn tau_nodes(&self) -> &[f64] {
        &self.tau_nodes
    }

    /// `+1` when `tau` increases with `t`, `-1` otherwise.
    pub fn multiplier_sign(&self) -> f64 {
        self.multiplier_sign
    }

    pub fn tau_range(&self) -> (f64, f64) {
        let (a, b) = (self.tau_nodes[0], *self.tau_nodes.last().expect("nonempty"));
        (a.min(b), a.max(b))
    }

    fn segment(&self, k: usize) -> [f64; 6] {
        [
            self.tau_nodes[k],
            self.rates[k],
            self.rate_slopes[k],
            self.tau_nodes[k + 1],
            self.rates[k + 1],
            self.rate_slopes[k + 1],
        ]
    }

    fn t_increasing(&self) -> bool {
        self.t_nodes[1] > self.t_nodes[0]
    }

    pub fn forward(&self, t: f64) -> Result<f64> {
        let (lo, hi) = {
            let (a, b) = (self.t_nodes[0], *self.t_nodes.last().expect("nonempty"));
            (a.min(b), a.max(b))
        };
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { value: t, lo, hi });
        }
        let k = bracket(&self.t_nodes, t, self.t_increasing());
        if t == self.t_nodes[k] {
            return Ok(self.tau_nodes[k]);
        }
        if t == self.t_nodes[k + 1] {
            return Ok(self.tau_nodes[k + 1]);
        }
        Ok(quintic_scalar(self.t_nodes[k], self.t_nodes[k + 1], self.segment(k), t).0)
    }

    /// Solves `forward(t) = tau` by safeguarded Newton iteration inside the bracketing step.
    pub fn inverse(&self, tau: f64) -> Result<f64> {
        let (lo, hi) = self.tau_range();
        if !(tau >= lo && tau <= hi) {
            return Err(Error::OutOfRange { value: tau, lo, hi });
        }
        let tau_increasing = self.tau_nodes[1] > self.tau_nodes[0];
        let k = bracket(&self.tau_nodes, tau, tau_increasing);
        if tau == self.tau_nodes[k] {
            return Ok(self.t_nodes[k]);
        }
        if tau == self.tau_nodes[k + 1] {
            return Ok(self.t_nodes[k + 1]);
        }
        let (ta, tb) = (self.t_nodes[k], self.t_nodes[k + 1]);
        let seg = self.segment(k);
        let (mut a, mut b) = (ta, tb);
        let g = |t: f64| quintic_scalar(ta, tb, seg, t);
        let fa = g(a).0 - tau;
        let frac = (tau - seg[0]) / (seg[3] - seg[0]);
        let mut t = ta + frac * (tb - ta);
        for _ in 0..100 {
            let (value, slope) = g(t);
            let r = value - tau;
            if r == 0.0 {
                break;
            }
            if (r > 0.0) == (fa > 0.0) {
                a = t;
            } else {
                b = t;
            }
            let newton = t - r / slope;
            let inside = (newton - a) * (newton - b) <= 0.0;
            let next = if inside && slope != 0.0 { newton } else { 0.5 * (a + b) };
            if (next - t).abs() <= 1e-15 * t.abs().max(1.0) {
                t = next;
                break;
            }
            t = next;
        }
        Ok(t)
    }
}

/// Index `k` of the step `[nodes[k], nodes[k+1]]` containing `x`.
fn bracket(nodes: &[f64], x: f64, increasing: bool) -> usize {
    let idx = if increasing { nodes.partition_point(|&v| v <= x) } else { nodes.partition_point(|&v| v >= x) };
    idx.saturating_sub(1).min(nodes.len() - 2)
}

// Five-point Gauss–Legendre rule on [0, 1].
const GL_NODES: [f64; 5] =
    [0.046_910_077_030_668_004, 0.230_765_344_947_158_45, 0.5, 0.769_234_655_052_841_6, 0.953_089_922_969_332];
const GL_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

fn gauss_legendre(traj: &Trajectory, multiplier: &Multiplier, ta: f64, tb: f64, sign: f64) -> Result<f64> {
    let h = tb - ta;
    let mut sum = 0.0;
    for (c, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        let t = ta + c * h;
        let rate = multiplier.rate(&traj.eval_position(t)?);
        if !(rate * sign > 0.0) {
            return Err(Error::MultiplierSignChange(t));
        }
        sum += w * rate;
    }
    Ok(sum * h)
}

fn rate_and_slope(multiplier: &Multiplier, q: &DVector<f64>, v: &DVector<f64>) -> (f64, f64) {
    (multiplier.rate(q), multiplier.rate_gradient(q).dot(v))
}

/// `tau(t) = int nu(q(s)) ds` from the trajectory start, by per-step Gauss–Legendre quadrature.
pub fn time_map(traj: &Trajectory, multiplier: &Multiplier) -> Result<ReparamMap> {
    let first = multiplier.rate(&traj.positions()[0]);
    if !(first != 0.0 && first.is_finite()) {
        return Err(Error::MultiplierSignChange(traj.start_time()));
    }
    let sign = first.signum();
    let mut tau_nodes = Vec::with_capacity(traj.len());
    let mut rates = Vec::with_capacity(traj.len());
    let mut rate_slopes = Vec::with_capacity(traj.len());
    let mut tau = 0.0;
    for k in 0..traj.len() {
        let (rate, slope) = rate_and_slope(multiplier, &traj.positions()[k], &traj.velocities()[k]);
        if !(rate * sign > 0.0) {
            return Err(Error::MultiplierSignChange(traj.times()[k]));
        }
        if k > 0 {
            tau += gauss_legendre(traj, multiplier, traj.times()[k - 1], traj.times()[k], sign)?;
        }
        tau_nodes.push(tau);
        rates.push(rate);
        rate_slopes.push(slope);
    }
    let t_sign = (traj.end_time() - traj.start_time()).signum();
    Ok(ReparamMap { t_nodes: traj.times().to_vec(), tau_nodes, rates, rate_slopes, multiplier_sign: sign * t_sign })
}

/// Largest difference between the one-rule and the two-half-rule quadrature of a step, per unit time.
pub fn quadrature_error_estimate(traj: &Trajectory, multiplier: &Multiplier) -> Result<f64> {
    let sign = multiplier.rate(&traj.positions()[0]).signum();
    let mut worst: f64 = 0.0;
    for w in traj.times().windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let whole = gauss_legendre(traj, multiplier, a, b, sign)?;
        let halves = gauss_legendre(traj, multiplier, a, mid, sign)? + gauss_legendre(traj, multiplier, mid, b, sign)?;
        worst = worst.max((whole - halves).abs() / (b - a).abs());
    }
    Ok(worst)
}

/// Samples `traj` uniformly in the new time over the image of `map`, with `q' = q_dot / nu` and
/// `q'' = (q_ddot - (nu_dot / nu) q_dot) / nu^2`. Output times increase.
pub fn resample(traj: &Trajectory, map: &ReparamMap, multiplier: &Multiplier, samples: usize) -> Result<Trajectory> {
    if samples < 2 {
        return Err(Error::TooShort);
    }
    if map.t_nodes.first() != traj.times().first() || map.t_nodes.last() != traj.times().last() {
        return Err(Error::Invalid("time map was not built from this trajectory".into()));
    }
    let (lo, hi) = map.tau_range();
    let mut times = Vec::with_capacity(samples);
    let mut positions = Vec::with_capacity(samples);
    let mut velocities = Vec::with_capacity(samples);
    let mut accelerations = Vec::with_capacity(samples);
    for i in 0..samples {
        let tau = if i + 1 == samples { hi } else { lo + (hi - lo) * i as f64 / (samples - 1) as f64 };
        let t = map.inverse(tau)?;
        let (q, q_dot, q_ddot) = traj.eval_full(t)?;
        let (nu, nu_dot) = rate_and_slope(multiplier, &q, &q_dot);
        let v = &q_dot / nu;
        let a = (&q_ddot - &q_dot * (nu_dot / nu)) / (nu * nu);
        let (q, v) = if traj.on_sphere() { project_state(&q, &v)?.into_parts() } else { (q, v) };
        times.push(tau);
        positions.push(q);
        velocities.push(v);
        accelerations.push(a);
    }
    Trajectory::from_nodes(times, positions, velocities, accelerations, traj.on_sphere())
}
