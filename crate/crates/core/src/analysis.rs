//! Conserved quantities, drift reports and the trajectory chain from the reduced rolling flow to
//! the zero-energy natural system on the sphere.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{natural_rhs_raw, Flow};
use crate::error::{Error, Result};
use crate::fields::FlatFieldConfig;
use crate::geometry::{gamma_to_x, inner, sphere_map_differential, sphere_map_second_differential, MetricKind};
use crate::integrate::{integrate_with, IntegratorOptions};
use crate::reparam::{resample, time_map, Multiplier};
use crate::trajectory::Trajectory;
use crate::types::{BallConfig, SphereState};

/// Tolerance on the unit kinetic energy required by the chain.
pub const UNIT_ENERGY_TOL: f64 = 1e-9;

/// Deviation of a scalar quantity from a reference value along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub quantity: String,
    pub initial: f64,
    pub max_abs_dev: f64,
    pub rel_dev: f64,
}

impl DriftReport {
    /// Drift measured from the first value.
    pub fn from_values(quantity: &str, values: impl IntoIterator<Item = f64>) -> Self {
        let mut iter = values.into_iter().peekable();
        let initial = iter.peek().copied().unwrap_or(0.0);
        Self::against(quantity, initial, iter)
    }

    /// Deviation measured from a fixed reference (for example zero for an equation residual).
    pub fn against(quantity: &str, reference: f64, values: impl IntoIterator<Item = f64>) -> Self {
        let max_abs_dev = values.into_iter().map(|v| (v - reference).abs()).fold(0.0, f64::max);
        let rel_dev = if reference != 0.0 { max_abs_dev / reference.abs() } else { max_abs_dev };
        Self { quantity: quantity.to_string(), initial: reference, max_abs_dev, rel_dev }
    }
}

/// `1/2 <g', g'>_0` through the reduced metric.
pub fn energy_g0(cfg: &BallConfig, state: &SphereState) -> Result<f64> {
    Ok(0.5 * inner(MetricKind::ReducedG0, cfg, state.gamma(), state.gamma_dot(), state.gamma_dot())?)
}

/// Reduced Lagrangian `(1/2 eps^2)((A g', g')(A g, g) - (A g, g')^2)`.
pub fn reduced_lagrangian(cfg: &BallConfig, state: &SphereState) -> f64 {
    let (g, v) = (state.gamma(), state.gamma_dot());
    let eps = cfg.epsilon();
    let ag_v = cfg.apply_a(g).dot(v);
    (cfg.a_norm2(v) * cfg.a_norm2(g) - ag_v * ag_v) / (2.0 * eps * eps)
}

/// `1/2 <g', g'>_*` for a state whose velocity is taken in the reparametrized time.
pub fn energy_gstar(cfg: &BallConfig, state: &SphereState) -> Result<f64> {
    Ok(0.5 * inner(MetricKind::ChaplyginGStar, cfg, state.gamma(), state.gamma_dot(), state.gamma_dot())?)
}

/// `1/2 (x', x') - (A^{-1} x, x)^{-1/eps}`; zero on the invariant surface of the chain image.
pub fn natural_energy(cfg: &BallConfig, state: &SphereState) -> f64 {
    0.5 * state.gamma_dot().norm_squared() - cfg.a_inv_norm2(state.gamma()).powf(-1.0 / cfg.epsilon())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoetherValue {
    pub value: f64,
    /// `false` when `a_i != a_j`, so the value is not expected to be conserved.
    pub conserved: bool,
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i >= n || j >= n || i == j {
        return Err(Error::IndexOutOfRange { i, j, n });
    }
    Ok(())
}

/// `phi_ij = (a_i / eps)(A g, g)^{1/(2 eps)} (g_i g'_j - g_j g'_i)` in the original time.
pub fn noether_phi(cfg: &BallConfig, i: usize, j: usize, state: &SphereState) -> Result<NoetherValue> {
    check_pair(cfg.n(), i, j)?;
    let (g, v) = (state.gamma(), state.gamma_dot());
    let eps = cfg.epsilon();
    let value = cfg.a()[i] / eps * cfg.a_norm2(g).powf(0.5 / eps) * (g[i] * v[j] - g[j] * v[i]);
    Ok(NoetherValue { value, conserved: cfg.a()[i] == cfg.a()[j] })
}

/// `Phi_ij = g_i dL*/dg'_j - g_j dL*/dg'_i` for a state in the reparametrized time.
pub fn noether_phi_star(cfg: &BallConfig, i: usize, j: usize, state: &SphereState) -> Result<NoetherValue> {
    check_pair(cfg.n(), i, j)?;
    let (g, v) = (state.gamma(), state.gamma_dot());
    let ag = cfg.apply_a(g);
    let ag_g = ag.dot(g);
    let momentum = (cfg.apply_a(v) * ag_g - &ag * ag.dot(v)) * ag_g.powf(1.0 / cfg.epsilon() - 2.0);
    let value = g[i] * momentum[j] - g[j] * momentum[i];
    Ok(NoetherValue { value, conserved: cfg.a()[i] == cfg.a()[j] })
}

/// `x_i x'_j - x_j x'_i` of the natural system.
pub fn noether_phi_natural(i: usize, j: usize, state: &SphereState) -> Result<f64> {
    check_pair(state.n(), i, j)?;
    let (x, v) = (state.gamma(), state.gamma_dot());
    Ok(x[i] * v[j] - x[j] * v[i])
}

/// `f^2 / (2 nu^2) (q', q')`.
pub fn quad_integral(fields: &FlatFieldConfig, q: &DVector<f64>, q_dot: &DVector<f64>) -> Result<f64> {
    let nu = fields.nu(q);
    if !(nu != 0.0 && nu.is_finite()) {
        return Err(Error::FieldVanishes(q.as_slice().to_vec()));
    }
    let f = fields.f(q);
    Ok(f * f / (2.0 * nu * nu) * q_dot.norm_squared())
}

/// Rescales the velocity so that `1/2 <g', g'>_0 = 1`.
pub fn normalize_unit_energy(cfg: &BallConfig, state: &SphereState) -> Result<SphereState> {
    let e = energy_g0(cfg, state)?;
    if !(e > 0.0) {
        return Err(Error::ZeroVelocity);
    }
    Ok(state.scaled_velocity(e.sqrt().recip()))
}

/// Pushes a sphere trajectory through `x = A^{1/2} g / sqrt((A g, g))`, keeping the time variable.
pub fn sphere_map_trajectory(cfg: &BallConfig, traj: &Trajectory) -> Result<Trajectory> {
    let mut positions = Vec::with_capacity(traj.len());
    let mut velocities = Vec::with_capacity(traj.len());
    let mut accelerations = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let (g, v, a) = (&traj.positions()[k], &traj.velocities()[k], &traj.accelerations()[k]);
        positions.push(gamma_to_x(cfg, g));
        velocities.push(sphere_map_differential(cfg, g, v));
        accelerations.push(sphere_map_second_differential(cfg, g, v) + sphere_map_differential(cfg, g, a));
    }
    Trajectory::from_nodes(traj.times().to_vec(), positions, velocities, accelerations, true)
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    /// Image trajectory `x(s)` with increasing `s`.
    pub natural: Trajectory,
    pub reports: Vec<DriftReport>,
}

/// Largest `|x'' - natural_rhs(x, x')|` along `traj`, with `x''` from central differences of the
/// interpolated velocity at nodes and step midpoints.
pub fn natural_equation_residual(cfg: &BallConfig, traj: &Trajectory) -> Result<DriftReport> {
    let (lo, hi) = traj.time_range();
    let delta = f64::EPSILON.cbrt() * (hi - lo).max(1.0);
    let mut probes: Vec<f64> = traj.times().to_vec();
    probes.extend(traj.times().windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let mut residuals = Vec::with_capacity(probes.len());
    for s in probes {
        if s - delta < lo || s + delta > hi {
            continue;
        }
        let (_, v_plus) = traj.eval(s + delta)?;
        let (_, v_minus) = traj.eval(s - delta)?;
        let (x, v) = traj.eval(s)?;
        let fd = (v_plus - v_minus) / (2.0 * delta);
        let rhs = natural_rhs_raw(cfg, &x, &v)?.acceleration;
        residuals.push((fd - rhs).amax());
    }
    Ok(DriftReport::against("natural_rhs_residual", 0.0, residuals))
}

/// Reduced trajectory with unit `g0` energy to the zero-energy natural system:
/// sphere map, then `ds = eps (A^{-1} x, x)^{1 + 1/(2 eps)} dt`.
pub fn chaplygin_chain(cfg: &BallConfig, reduced_traj: &Trajectory) -> Result<ChainOutput> {
    chaplygin_chain_with(cfg, reduced_traj, 2 * reduced_traj.len())
}

pub fn chaplygin_chain_with(cfg: &BallConfig, reduced_traj: &Trajectory, samples: usize) -> Result<ChainOutput> {
    let e = energy_g0(cfg, &reduced_traj.state(0))?;
    if !((e - 1.0).abs() <= UNIT_ENERGY_TOL) {
        return Err(Error::EnergyMismatch { expected: 1.0, got: e });
    }
    let x_traj = sphere_map_trajectory(cfg, reduced_traj)?;
    let mult = Multiplier::natural_time_x(cfg);
    let map = time_map(&x_traj, &mult)?;
    let natural = resample(&x_traj, &map, &mult, samples)?;
    let energy = DriftReport::against("natural_energy", 0.0, natural.states().map(|s| natural_energy(cfg, &s)));
    let residual = natural_equation_residual(cfg, &natural)?;
    Ok(ChainOutput { natural, reports: vec![energy, residual] })
}

/// Integrates the natural system independently from the first state of `natural` and returns the
/// largest position deviation at the sample parameters of `natural`.
pub fn compare_with_natural_flow(cfg: &BallConfig, natural: &Trajectory) -> Result<f64> {
    let opts = IntegratorOptions::with_tolerances(1e-12, 1e-12);
    let independent = integrate_with(
        &Flow::Natural(cfg.clone()),
        &natural.positions()[0],
        &natural.velocities()[0],
        (natural.start_time(), natural.end_time()),
        &opts,
    )?;
    let mut worst: f64 = 0.0;
    for (s, x) in natural.times().iter().zip(natural.positions()) {
        worst = worst.max((independent.eval_position(*s)? - x).norm());
    }
    Ok(worst)
}

/// Runs [`chaplygin_chain`] and [`compare_with_natural_flow`].
pub fn cross_check_chain(cfg: &BallConfig, reduced_traj: &Trajectory) -> Result<f64> {
    let chain = chaplygin_chain(cfg, reduced_traj)?;
    compare_with_natural_flow(cfg, &chain.natural)
}

/// Reparametrizes a trajectory of energy `h` by `d tau = (h - V) dt`.
pub fn maupertuis_map(fields: &FlatFieldConfig, traj: &Trajectory, h: f64) -> Result<Trajectory> {
    maupertuis_map_with(fields, traj, h, 2 * traj.len())
}

pub fn maupertuis_map_with(fields: &FlatFieldConfig, traj: &Trajectory, h: f64, samples: usize) -> Result<Trajectory> {
    for (q, v) in traj.positions().iter().zip(traj.velocities()) {
        let total = 0.5 * v.norm_squared() + fields.potential(q);
        if !((total - h).abs() <= 1e-8) {
            return Err(Error::EnergyMismatch { expected: h, got: total });
        }
        if !(h - fields.potential(q) > 0.0) {
            return Err(Error::FieldVanishes(q.as_slice().to_vec()));
        }
    }
    let mult = Multiplier::Maupertuis { fields: fields.clone(), energy: h };
    let map = time_map(traj, &mult)?;
    resample(traj, &map, &mult, samples)
}

/// `1/2 (h - V)(q', q')`, equal to one along Maupertuis-reparametrized trajectories.
pub fn jacobi_energy(fields: &FlatFieldConfig, h: f64, q: &DVector<f64>, q_prime: &DVector<f64>) -> f64 {
    0.5 * (h - fields.potential(q)) * q_prime.norm_squared()
}

/// Largest distance of the samples from the plane spanned by the initial position and velocity.
pub fn great_circle_deviation(traj: &Trajectory) -> Result<f64> {
    let q0 = &traj.positions()[0];
    let v0 = &traj.velocities()[0];
    let e1 = q0.normalize();
    let w = v0 - &e1 * e1.dot(v0);
    if !(q0.norm() > 0.0) || w.norm() <= 1e-12 * v0.norm().max(1e-300) || w.norm() == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let e2 = w.normalize();
    Ok(traj.positions().iter().map(|q| (q - &e1 * e1.dot(q) - &e2 * e2.dot(q)).norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone)]
pub struct FlatTestbedOutput {
    /// Solution of `q_ddot = F` in the original time.
    pub newton: Trajectory,
    /// `newton` resampled uniformly in `tau` with `d tau = nu dt`.
    pub reparametrized: Trajectory,
    /// Geodesic of `f^2` times the Euclidean metric from the first reparametrized state.
    pub geodesic: Trajectory,
    /// `geodesic_position_deviation`, `geodesic_equation_residual` and `quad_integral`.
    pub reports: Vec<DriftReport>,
}

/// Integrates the flat Newton flow, reparametrizes it by `nu` and compares with an independently
/// integrated conformal geodesic.
pub fn flat_testbed(
    fields: &FlatFieldConfig,
    q0: &DVector<f64>,
    v0: &DVector<f64>,
    t_span: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<FlatTestbedOutput> {
    let newton = integrate_with(&Flow::FlatNewton(fields.clone()), q0, v0, t_span, opts)?;
    let mult = Multiplier::FlatNu(fields.clone());
    let map = time_map(&newton, &mult)?;
    let reparametrized = resample(&newton, &map, &mult, 2 * newton.len())?;
    let geodesic = integrate_with(
        &Flow::ConformalGeodesic(fields.clone()),
        &reparametrized.positions()[0],
        &reparametrized.velocities()[0],
        (reparametrized.start_time(), reparametrized.end_time()),
        opts,
    )?;

    let mut deviations = Vec::with_capacity(reparametrized.len());
    let mut residuals = Vec::with_capacity(reparametrized.len());
    for k in 0..reparametrized.len() {
        let (tau, q) = (reparametrized.times()[k], &reparametrized.positions()[k]);
        let (v, a) = (&reparametrized.velocities()[k], &reparametrized.accelerations()[k]);
        deviations.push((geodesic.eval_position(tau)? - q).norm());
        residuals.push((a - crate::dynamics::conformal_geodesic_rhs(fields, q, v)?).amax());
    }
    let quad = newton
        .positions()
        .iter()
        .zip(newton.velocities())
        .map(|(q, v)| quad_integral(fields, q, v))
        .collect::<Result<Vec<_>>>()?;
    let reports = vec![
        DriftReport::against("geodesic_position_deviation", 0.0, deviations),
        DriftReport::against("geodesic_equation_residual", 0.0, residuals),
        DriftReport::from_values("quad_integral", quad),
    ];
    Ok(FlatTestbedOutput { newton, reparametrized, geodesic, reports })
}

/// Maupertuis reparametrization of a flat trajectory of energy `h` and the drift of the Jacobi
/// energy from one.
pub fn jacobi_energy_report(fields: &FlatFieldConfig, traj: &Trajectory, h: f64) -> Result<(Trajectory, DriftReport)> {
    let jacobi = maupertuis_map(fields, traj, h)?;
    let values: Vec<f64> =
        jacobi.positions().iter().zip(jacobi.velocities()).map(|(q, v)| jacobi_energy(fields, h, q, v)).collect();
    Ok((jacobi, DriftReport::against("jacobi_energy", 1.0, values)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate;
    use crate::types::project_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> SphereState {
        loop {
            let g = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let v = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
            if g.norm() > 0.1 && v.norm() > 0.1 {
                return project_state(&g, &v).unwrap();
            }
        }
    }

    #[test]
    fn energy_examples() {
        let cfg = BallConfig::new(3, &[1.0, 1.0, 1.0], 1.0).unwrap();
        let s = SphereState::from_slices(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((energy_g0(&cfg, &s).unwrap() - 0.5).abs() < 1e-15);
        let s = SphereState::from_slices(&[1.0, 0.0, 0.0], &[0.0, 2.0f64.sqrt(), 0.0]).unwrap();
        assert!(natural_energy(&cfg, &s).abs() < 1e-15);
    }

    #[test]
    fn energy_matches_reduced_lagrangian() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let n = rng.gen_range(2..6);
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
            let cfg = BallConfig::new(n, &a, [-1.0, 0.5, 1.0, 2.0][rng.gen_range(0..4)]).unwrap();
            let s = random_state(&mut rng, n);
            let (e, l) = (energy_g0(&cfg, &s).unwrap(), reduced_lagrangian(&cfg, &s));
            assert!((e - l).abs() <= 1e-13 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn normalize_unit_energy_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let cfg = BallConfig::new(4, &[1.0, 2.0, 3.0, 4.0], -1.0).unwrap();
        for _ in 0..200 {
            let s = random_state(&mut rng, 4);
            let u = normalize_unit_energy(&cfg, &s).unwrap();
            assert!((energy_g0(&cfg, &u).unwrap() - 1.0).abs() <= 1e-13);
            let again = normalize_unit_energy(&cfg, &u).unwrap();
            assert!((again.gamma_dot() - u.gamma_dot()).amax() <= 1e-15);
            let doubled = normalize_unit_energy(&cfg, &u.scaled_velocity(2.0)).unwrap();
            assert!((doubled.gamma_dot() - u.gamma_dot()).amax() <= 1e-15);
        }
        let still = SphereState::from_slices(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4]).unwrap();
        assert_eq!(normalize_unit_energy(&cfg, &still), Err(Error::ZeroVelocity));
    }

    #[test]
    fn noether_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for eps in [-1.0, 0.7, 2.0] {
            let cfg = BallConfig::new(4, &[2.0, 2.0, 5.0, 5.0], eps).unwrap();
            for _ in 0..100 {
                let s = random_state(&mut rng, 4);
                let phi = noether_phi(&cfg, 0, 1, &s).unwrap();
                assert!(phi.conserved);
                let nu = Multiplier::chaplygin(&cfg).rate(s.gamma());
                let star = noether_phi_star(&cfg, 0, 1, &s.scaled_velocity(1.0 / nu)).unwrap();
                assert!((phi.value - star.value).abs() <= 1e-12 * (1.0 + phi.value.abs()));

                // x-side form with dx/ds = dPhi(g') / (ds/dt)
                let x = gamma_to_x(&cfg, s.gamma());
                let rate = Multiplier::sphere_to_natural(&cfg).rate(s.gamma());
                let xs = sphere_map_differential(&cfg, s.gamma(), s.gamma_dot()) / rate;
                let nat = noether_phi_natural(0, 1, &SphereState::new_unchecked(x, xs)).unwrap();
                assert!((phi.value - nat).abs() <= 1e-12 * (1.0 + phi.value.abs()));
            }
        }
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], 1.0).unwrap();
        let s = SphereState::from_slices(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!(!noether_phi(&cfg, 0, 1, &s).unwrap().conserved);
        assert!(noether_phi(&cfg, 0, 3, &s).is_err());
    }

    #[test]
    fn noether_phi_of_unit_circle() {
        let cfg = BallConfig::new(3, &[1.0, 1.0, 1.0], 1.0).unwrap();
        let s = SphereState::from_slices(&[0.6, 0.8, 0.0], &[-0.8, 0.6, 0.0]).unwrap();
        assert!((noether_phi(&cfg, 0, 1, &s).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quad_integral_examples() {
        let fields = FlatFieldConfig::new(
            crate::fields::AffinePower::new(2.0, &[0.1, 0.2], 0.5),
            crate::fields::NuField::PowerOfF(1.0),
            None,
            &[-1.0, -1.0],
            &[1.0, 1.0],
        )
        .unwrap();
        let v = dv(&[1.0, 2.0]);
        assert!((quad_integral(&fields, &dv(&[0.3, 0.1]), &v).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn chain_requires_unit_energy() {
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], -1.0).unwrap();
        let s = SphereState::from_slices(&[0.6, 0.0, 0.8], &[0.0, 1.0, 0.0]).unwrap();
        let traj = integrate(&Flow::Reduced(cfg.clone()), &s, (0.0, 1.0), 1e-10, 1e-10).unwrap();
        assert!(matches!(chaplygin_chain(&cfg, &traj), Err(Error::EnergyMismatch { .. })));
    }

    #[test]
    fn symmetric_inertia_chain_is_great_circle() {
        for eps in [-1.0, 0.7, 1.0] {
            let cfg = BallConfig::new(3, &[2.0, 2.0, 2.0], eps).unwrap();
            let s = project_state(&dv(&[0.3, -0.5, 0.8]), &dv(&[1.0, 0.4, -0.2])).unwrap();
            let s = normalize_unit_energy(&cfg, &s).unwrap();
            let traj = integrate(&Flow::Reduced(cfg.clone()), &s, (0.0, 4.0), 1e-10, 1e-10).unwrap();
            let chain = chaplygin_chain(&cfg, &traj).unwrap();
            assert!(great_circle_deviation(&chain.natural).unwrap() <= 1e-8);
            assert!(compare_with_natural_flow(&cfg, &chain.natural).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn great_circle_deviation_examples() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let circle = |t: f64| dv(&[t.cos(), t.sin() * 0.6, t.sin() * 0.8]);
        let dcircle = |t: f64| dv(&[-t.sin(), t.cos() * 0.6, t.cos() * 0.8]);
        let traj = Trajectory::from_nodes(
            times.clone(),
            times.iter().map(|&t| circle(t)).collect(),
            times.iter().map(|&t| dcircle(t)).collect(),
            times.iter().map(|&t| -circle(t)).collect(),
            true,
        )
        .unwrap();
        assert!(great_circle_deviation(&traj).unwrap() <= 1e-12);

        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], 1.0).unwrap();
        let s = project_state(&dv(&[0.3, -0.5, 0.8]), &dv(&[1.0, 0.4, -0.2])).unwrap();
        let traj = integrate(&Flow::Reduced(cfg), &s, (0.0, 10.0), 1e-10, 1e-10).unwrap();
        assert!(great_circle_deviation(&traj).unwrap() > 1e-2);

        let still = Trajectory::from_nodes(
            vec![0.0, 1.0],
            vec![dv(&[1.0, 0.0]); 2],
            vec![dv(&[0.0, 0.0]); 2],
            vec![dv(&[0.0, 0.0]); 2],
            true,
        )
        .unwrap();
        assert_eq!(great_circle_deviation(&still), Err(Error::DegenerateFrame));
    }

    #[test]
    fn drift_report_values() {
        let r = DriftReport::from_values("e", [2.0, 2.5, 1.0]);
        assert_eq!((r.initial, r.max_abs_dev, r.rel_dev), (2.0, 1.0, 0.5));
        let r = DriftReport::against("res", 0.0, [1e-3, -2e-3]);
        assert_eq!((r.max_abs_dev, r.rel_dev), (2e-3, 2e-3));
    }
}
