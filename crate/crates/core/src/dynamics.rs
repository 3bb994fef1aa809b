//! Right-hand sides of the flows: the reduced rolling equation, the natural system on the sphere
//! with potential `-(A^{-1} x, x)^{-1/eps}`, and the flat Newton / conformal geodesic testbed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fields::FlatFieldConfig;
use crate::geometry::{inertia_wedge_apply, tangent_basis};
use crate::types::{BallConfig, SphereState};

#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub acceleration: DVector<f64>,
    /// Multiplier of the sphere constraint; zero for flat flows.
    pub lagrange_multiplier: f64,
}

/// Acceleration and multiplier of the reduced rolling equation.
///
/// Expanding the time derivative gives, together with `(g'', g) = -(g', g')`, the linear system
///
/// ```text
/// eps [(A g, g'') A g - (A g, g) A g''] - lambda g
///     = (eps - 1)[(A g', g') A g - (A g, g') A g'] - eps [(A g', g') A g - (A g, g') A g']
/// ```
///
/// which is assembled and solved densely.
pub fn reduced_rhs(cfg: &BallConfig, state: &SphereState) -> Result<Derivative> {
    reduced_rhs_raw(cfg, state.gamma(), state.gamma_dot())
}

pub(crate) fn reduced_rhs_raw(cfg: &BallConfig, gamma: &DVector<f64>, gamma_dot: &DVector<f64>) -> Result<Derivative> {
    cfg.check_dim(gamma)?;
    cfg.check_dim(gamma_dot)?;
    let n = cfg.n();
    let eps = cfg.epsilon();
    let ag = cfg.apply_a(gamma);
    let agd = cfg.apply_a(gamma_dot);
    let ag_g = ag.dot(gamma);
    let ag_gd = ag.dot(gamma_dot);
    let agd_gd = agd.dot(gamma_dot);

    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = eps * ag[i] * ag[j];
        }
        m[(i, i)] -= eps * ag_g * cfg.a()[i];
        m[(i, n)] = -gamma[i];
        m[(n, i)] = gamma[i];
    }
    let bracket = &ag * agd_gd - &agd * ag_gd;
    let rhs_top = &bracket * (eps - 1.0) - &bracket * eps;
    let mut rhs = DVector::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from(&rhs_top);
    rhs[n] = -gamma_dot.norm_squared();

    let sol = m.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(Derivative { acceleration: sol.rows(0, n).into_owned(), lagrange_multiplier: sol[n] })
}

/// Largest tangential component of `eps d/dt[I(g ^ g') g] + (1 - eps) I(g ^ g') g'` with the time
/// derivative expanded by the product rule using the supplied acceleration.
pub fn weak_form_residual(cfg: &BallConfig, state: &SphereState, derivative: &Derivative) -> f64 {
    let (g, gd, gdd) = (state.gamma(), state.gamma_dot(), &derivative.acceleration);
    let eps = cfg.epsilon();
    let d_dt =
        inertia_wedge_apply(cfg, gd, gd, g) + inertia_wedge_apply(cfg, g, gdd, g) + inertia_wedge_apply(cfg, g, gd, gd);
    let term = d_dt * eps + inertia_wedge_apply(cfg, g, gd, gd) * (1.0 - eps);
    tangent_basis(g).iter().map(|xi| term.dot(xi).abs()).fold(0.0, f64::max)
}

/// Natural system `x'' = -(2/eps)(A^{-1}x, x)^{-1/eps - 1} A^{-1} x + lambda x` with
/// `lambda = (2/eps)(A^{-1}x, x)^{-1/eps} - (x', x')`.
pub fn natural_rhs(cfg: &BallConfig, state: &SphereState) -> Result<Derivative> {
    natural_rhs_raw(cfg, state.gamma(), state.gamma_dot())
}

pub(crate) fn natural_rhs_raw(cfg: &BallConfig, x: &DVector<f64>, x_dot: &DVector<f64>) -> Result<Derivative> {
    cfg.check_dim(x)?;
    cfg.check_dim(x_dot)?;
    let eps = cfg.epsilon();
    let w = cfg.a_inv_norm2(x);
    let lambda = 2.0 / eps * w.powf(-1.0 / eps) - x_dot.norm_squared();
    let acceleration = cfg.apply_a_inv(x) * (-2.0 / eps * w.powf(-1.0 / eps - 1.0)) + x * lambda;
    Ok(Derivative { acceleration, lagrange_multiplier: lambda })
}

/// `q'' = F(q', q)` with `F = <grad ln nu, q'> q' - 2 <grad ln f, q'> q' + <q', q'> grad ln f`.
pub fn flat_newton_rhs(fields: &FlatFieldConfig, q: &DVector<f64>, q_dot: &DVector<f64>) -> Result<DVector<f64>> {
    fields.check_point(q)?;
    check_len(fields, q_dot)?;
    let gf = fields.grad_ln_f(q);
    let gnu = fields.grad_ln_nu(q);
    Ok(q_dot * (gnu.dot(q_dot) - 2.0 * gf.dot(q_dot)) + gf * q_dot.norm_squared())
}

/// Christoffel symbols `G[k][i][j]` of `f^2 (dq, dq)` on flat space:
/// `(1/f)(d_kj df/dq^i + d_ki df/dq^j - d_ij df/dq^k)`.
pub fn conformal_christoffel(fields: &FlatFieldConfig, q: &DVector<f64>) -> Result<Vec<DMatrix<f64>>> {
    fields.check_point(q)?;
    let n = fields.n();
    let f = fields.f(q);
    let df = fields.grad_f(q);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Ok((0..n)
        .map(|k| DMatrix::from_fn(n, n, |i, j| (delta(k, j) * df[i] + delta(k, i) * df[j] - delta(i, j) * df[k]) / f))
        .collect())
}

/// Geodesic acceleration `q''^k = -G*^k_ij q'^i q'^j` of the metric `f^2` times the Euclidean one.
pub fn conformal_geodesic_rhs(
    fields: &FlatFieldConfig,
    q: &DVector<f64>,
    q_prime: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_len(fields, q_prime)?;
    let gamma = conformal_christoffel(fields, q)?;
    Ok(DVector::from_iterator(fields.n(), gamma.iter().map(|g| -(q_prime.transpose() * g * q_prime)[(0, 0)])))
}

fn check_len(fields: &FlatFieldConfig, v: &DVector<f64>) -> Result<()> {
    if v.len() != fields.n() {
        return Err(Error::DimensionMismatch { expected: fields.n(), got: v.len() });
    }
    Ok(())
}

/// A second-order flow that the integrator can advance.
#[derive(Debug, Clone, PartialEq)]
pub enum Flow {
    Reduced(BallConfig),
    Natural(BallConfig),
    FlatNewton(FlatFieldConfig),
    ConformalGeodesic(FlatFieldConfig),
}

impl Flow {
    pub fn dim(&self) -> usize {
        match self {
            Flow::Reduced(c) | Flow::Natural(c) => c.n(),
            Flow::FlatNewton(f) | Flow::ConformalGeodesic(f) => f.n(),
        }
    }

    /// Whether states are constrained to the unit sphere.
    pub fn on_sphere(&self) -> bool {
        matches!(self, Flow::Reduced(_) | Flow::Natural(_))
    }

    pub fn acceleration(&self, q: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Flow::Reduced(c) => reduced_rhs_raw(c, q, v).map(|d| d.acceleration),
            Flow::Natural(c) => natural_rhs_raw(c, q, v).map(|d| d.acceleration),
            Flow::FlatNewton(f) => flat_newton_rhs(f, q, v),
            Flow::ConformalGeodesic(f) => conformal_geodesic_rhs(f, q, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{AffinePower, NuField};
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
            if g.norm() > 0.1 {
                return project_state(&g, &v).unwrap();
            }
        }
    }

    fn random_cfg(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> BallConfig {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
        BallConfig::new(n, &a, eps).unwrap()
    }

    #[test]
    fn identity_inertia_gives_great_circle_acceleration() {
        for eps in [-1.0, 0.5, 1.0, 2.0] {
            let cfg = BallConfig::new(3, &[1.0, 1.0, 1.0], eps).unwrap();
            let s = SphereState::from_slices(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
            let d = reduced_rhs(&cfg, &s).unwrap();
            assert!((&d.acceleration - dv(&[-1.0, 0.0, 0.0])).amax() < 1e-14);
            assert!((d.lagrange_multiplier - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn reduced_rhs_solves_weak_form_and_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let n = rng.gen_range(2..7);
            let eps = [-1.0, -0.4, 0.5, 0.7, 1.0, 2.0][rng.gen_range(0..6)];
            let cfg = random_cfg(&mut rng, n, eps);
            let s = random_state(&mut rng, n);
            let d = reduced_rhs(&cfg, &s).unwrap();
            assert!(weak_form_residual(&cfg, &s, &d) <= 1e-9);
            let c = d.acceleration.dot(s.gamma()) + s.gamma_dot().norm_squared();
            assert!(c.abs() <= 1e-10);
        }
    }

    #[test]
    fn weak_form_detects_perturbed_acceleration() {
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], 0.5).unwrap();
        let s = SphereState::from_slices(&[0.6, 0.0, 0.8], &[0.0, 1.0, 0.0]).unwrap();
        let mut d = reduced_rhs(&cfg, &s).unwrap();
        assert!(weak_form_residual(&cfg, &s, &d) <= 1e-9);
        d.acceleration[1] += 0.1;
        assert!(weak_form_residual(&cfg, &s, &d) > 1e-3);
    }

    #[test]
    fn natural_rhs_identity_inertia_is_great_circle() {
        let cfg = BallConfig::new(3, &[1.0, 1.0, 1.0], -1.0).unwrap();
        let s = SphereState::from_slices(&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.5]).unwrap();
        let d = natural_rhs(&cfg, &s).unwrap();
        assert!((&d.acceleration - dv(&[0.0, -2.25, 0.0])).amax() < 1e-14);
    }

    #[test]
    fn natural_rhs_respects_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..500 {
            let n = rng.gen_range(2..7);
            let eps = [-1.0, 0.5, 1.0, 2.0][rng.gen_range(0..4)];
            let cfg = random_cfg(&mut rng, n, eps);
            let s = random_state(&mut rng, n);
            let d = natural_rhs(&cfg, &s).unwrap();
            let c = d.acceleration.dot(s.gamma()) + s.gamma_dot().norm_squared();
            assert!(c.abs() <= 1e-12 * (1.0 + d.acceleration.amax()));
        }
    }

    fn sample_fields() -> FlatFieldConfig {
        FlatFieldConfig::new(
            AffinePower::new(2.0, &[0.3, -0.2, 0.5], 0.7),
            NuField::Independent(AffinePower::new(1.5, &[0.1, 0.4, -0.2], -1.3)),
            None,
            &[-1.0, -1.0, -1.0],
            &[1.0, 1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn constant_fields_give_free_motion() {
        let fields = FlatFieldConfig::new(
            AffinePower::constant(2, 1.0),
            NuField::Independent(AffinePower::constant(2, 1.0)),
            None,
            &[-1.0, -1.0],
            &[1.0, 1.0],
        )
        .unwrap();
        let (q, v) = (dv(&[0.2, 0.1]), dv(&[1.0, -3.0]));
        assert_eq!(flat_newton_rhs(&fields, &q, &v).unwrap().amax(), 0.0);
        assert_eq!(conformal_geodesic_rhs(&fields, &q, &v).unwrap().amax(), 0.0);
    }

    #[test]
    fn jacobi_fields_give_potential_force_on_energy_level() {
        let h = 2.0;
        let fields = FlatFieldConfig::jacobi(h, &[1.0, 3.0], &[-0.8, -0.8], &[0.8, 0.8]).unwrap();
        let q = dv(&[0.3, -0.4]);
        let dir = dv(&[0.6, 0.8]);
        let speed = (2.0 * (h - fields.potential(&q))).sqrt();
        let v = dir * speed;
        let force = flat_newton_rhs(&fields, &q, &v).unwrap();
        assert!((force + fields.potential_gradient(&q)).amax() < 1e-13);
    }

    #[test]
    fn newton_force_matches_finite_difference_oracle() {
        let fields = sample_fields();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let ln_f = |q: &DVector<f64>| fields.f(q).ln();
        let ln_nu = |q: &DVector<f64>| fields.nu(q).ln();
        for _ in 0..100 {
            let q = DVector::from_fn(3, |_, _| rng.gen_range(-0.9..0.9));
            let v = DVector::from_fn(3, |_, _| rng.gen_range(-2.0..2.0));
            let h = 1e-5;
            let fd = |g: &dyn Fn(&DVector<f64>) -> f64| {
                DVector::from_fn(3, |i, _| {
                    let mut e = DVector::zeros(3);
                    e[i] = h;
                    (g(&(&q + &e)) - g(&(&q - &e))) / (2.0 * h)
                })
            };
            let (gf, gnu) = (fd(&ln_f), fd(&ln_nu));
            let oracle = &v * gnu.dot(&v) - &v * (2.0 * gf.dot(&v)) + gf * v.norm_squared();
            assert!((flat_newton_rhs(&fields, &q, &v).unwrap() - oracle).amax() <= 1e-7);
        }
    }

    #[test]
    fn geodesic_and_newton_forms_are_linked_by_the_reparametrization_identity() {
        let fields = sample_fields();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..200 {
            let q = DVector::from_fn(3, |_, _| rng.gen_range(-0.9..0.9));
            let q_dot = DVector::from_fn(3, |_, _| rng.gen_range(-2.0..2.0));
            let q_ddot = DVector::from_fn(3, |_, _| rng.gen_range(-2.0..2.0));
            let nu = fields.nu(&q);
            let nu_dot = nu * fields.grad_ln_nu(&q).dot(&q_dot);
            let q_prime = &q_dot / nu;
            let q_second = (&q_ddot - &q_dot * (nu_dot / nu)) / (nu * nu);
            let lhs = q_second - conformal_geodesic_rhs(&fields, &q, &q_prime).unwrap();
            let rhs = (&q_ddot - flat_newton_rhs(&fields, &q, &q_dot).unwrap()) / (nu * nu);
            assert!((lhs - rhs).amax() <= 1e-7);
        }
    }

    #[test]
    fn flat_rhs_rejects_domain_exit() {
        let fields = sample_fields();
        let err = flat_newton_rhs(&fields, &dv(&[1.5, 0.0, 0.0]), &dv(&[1.0, 0.0, 0.0]));
        assert!(matches!(err, Err(Error::DomainExit(_))));
    }
}
