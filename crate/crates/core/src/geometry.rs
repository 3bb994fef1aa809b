//! Metrics on the sphere, the sphere map `x = A^{1/2} g / sqrt((A g, g))` and the reduction
//! tensors of the rolling ball with inertia operator `I(X ^ Y) = A X ^ A Y`.
//!
//! Bivectors act on vectors by `(a ^ b) c = a (b, c) - b (a, c)`, with no factor one half.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::types::BallConfig;

/// Tolerance for base points and tangent vectors passed to metric evaluations.
pub const TANGENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Reduced kinetic metric `g0 = (1/eps^2) ((A X, Y)(A g, g) - (A g, X)(A g, Y))`.
    ReducedG0,
    /// Conformally rescaled metric `g* = (g, A g)^{1/eps - 2} ((A X, Y)(A g, g) - (A g, X)(A g, Y))`.
    ChaplyginGStar,
    /// Image of `g*` under the sphere map: `(x, A^{-1} x)^{-1/eps} (X, Y)`.
    ConformalX,
    /// Round metric `(X, Y)`.
    Standard,
}

fn check_base(base: &DVector<f64>) -> Result<()> {
    let err = (base.norm_squared() - 1.0).abs();
    if !(err <= TANGENT_TOL) {
        return Err(Error::OffSphere(err));
    }
    Ok(())
}

fn check_tangent(base: &DVector<f64>, v: &DVector<f64>) -> Result<()> {
    if v.len() != base.len() {
        return Err(Error::DimensionMismatch { expected: base.len(), got: v.len() });
    }
    let dot = base.dot(v).abs();
    if !(dot <= TANGENT_TOL * (1.0 + v.norm())) {
        return Err(Error::NotTangent(dot));
    }
    Ok(())
}

/// `(A X, Y)(A g, g) - (A g, X)(A g, Y)`, the bracket shared by `g0` and `g*`.
pub(crate) fn inertia_bracket(cfg: &BallConfig, gamma: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let ag = cfg.apply_a(gamma);
    cfg.apply_a(x).dot(y) * ag.dot(gamma) - ag.dot(x) * ag.dot(y)
}

pub fn inner(
    metric: MetricKind,
    cfg: &BallConfig,
    base: &DVector<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    cfg.check_dim(base)?;
    check_base(base)?;
    check_tangent(base, x)?;
    check_tangent(base, y)?;
    let eps = cfg.epsilon();
    Ok(match metric {
        MetricKind::ReducedG0 => inertia_bracket(cfg, base, x, y) / (eps * eps),
        MetricKind::ChaplyginGStar => cfg.a_norm2(base).powf(1.0 / eps - 2.0) * inertia_bracket(cfg, base, x, y),
        MetricKind::ConformalX => cfg.a_inv_norm2(base).powf(-1.0 / eps) * x.dot(y),
        MetricKind::Standard => x.dot(y),
    })
}

/// Gram matrix of `metric` in the given tangent basis.
pub fn gram_matrix(
    metric: MetricKind,
    cfg: &BallConfig,
    base: &DVector<f64>,
    basis: &[DVector<f64>],
) -> Result<DMatrix<f64>> {
    let k = basis.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = inner(metric, cfg, base, &basis[i], &basis[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Orthonormal basis of the tangent space at `gamma`, taken from the columns of the Householder
/// reflection that sends `e_1` to `-sign(g_1) g`.
pub fn tangent_basis(gamma: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = gamma.len();
    let s = if gamma[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut u = gamma.clone();
    u[0] += s * gamma.norm();
    let u_norm2 = u.norm_squared();
    (1..n)
        .map(|k| {
            let mut e = DVector::zeros(n);
            e[k] = 1.0;
            let coeff = 2.0 * u[k] / u_norm2;
            e - &u * coeff
        })
        .collect()
}

pub fn gamma_to_x(cfg: &BallConfig, gamma: &DVector<f64>) -> DVector<f64> {
    cfg.a_sqrt().component_mul(gamma) / cfg.a_norm2(gamma).sqrt()
}

pub fn x_to_gamma(cfg: &BallConfig, x: &DVector<f64>) -> DVector<f64> {
    cfg.a_sqrt().map(|s| 1.0 / s).component_mul(x) / cfg.a_inv_norm2(x).sqrt()
}

/// Differential of [`gamma_to_x`] at `gamma` applied to `v`.
pub fn sphere_map_differential(cfg: &BallConfig, gamma: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let q = cfg.a_norm2(gamma);
    let r = q.powf(-0.5);
    let dr = -cfg.apply_a(gamma).dot(v) * q.powf(-1.5);
    cfg.a_sqrt().component_mul(&(v * r + gamma * dr))
}

/// Second differential `d^2 Phi(v, v)` of [`gamma_to_x`].
pub fn sphere_map_second_differential(cfg: &BallConfig, gamma: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let q = cfg.a_norm2(gamma);
    let agv = cfg.apply_a(gamma).dot(v);
    let dr = -agv * q.powf(-1.5);
    let ddr = -cfg.a_norm2(v) * q.powf(-1.5) + 3.0 * agv * agv * q.powf(-2.5);
    cfg.a_sqrt().component_mul(&(v * (2.0 * dr) + gamma * ddr))
}

/// `(a ^ b) c = a (b, c) - b (a, c)`.
pub fn wedge_apply(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
    a * b.dot(c) - b * a.dot(c)
}

/// `I(a ^ b) c = (A a ^ A b) c`.
pub fn inertia_wedge_apply(cfg: &BallConfig, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
    wedge_apply(&cfg.apply_a(a), &cfg.apply_a(b), c)
}

/// The (0,3) tensor `((2 eps - 1) / eps^3) (I(g ^ X) Y, Z)`.
pub fn sigma(
    cfg: &BallConfig,
    gamma: &DVector<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<f64> {
    cfg.check_dim(gamma)?;
    check_base(gamma)?;
    for v in [x, y, z] {
        check_tangent(gamma, v)?;
    }
    let eps = cfg.epsilon();
    let coeff = (2.0 * eps - 1.0) / eps.powi(3);
    Ok(coeff * inertia_wedge_apply(cfg, gamma, x, y).dot(z))
}

fn solve_in_basis(
    cfg: &BallConfig,
    gamma: &DVector<f64>,
    rhs: impl Fn(&DVector<f64>) -> Result<f64>,
) -> Result<DVector<f64>> {
    let basis = tangent_basis(gamma);
    let gram = gram_matrix(MetricKind::ReducedG0, cfg, gamma, &basis)?;
    let b = DVector::from_iterator(basis.len(), basis.iter().map(rhs).collect::<Result<Vec<_>>>()?);
    let coeffs = gram.cholesky().ok_or(Error::SingularSystem)?.solve(&b);
    Ok(basis.iter().zip(coeffs.iter()).fold(DVector::zeros(gamma.len()), |acc, (e, c)| acc + e * *c))
}

/// Tangent vector `B(X, Y)` defined by `<B(X, Y), Z>_0 = Sigma(X, Y, Z)`.
pub fn b_tensor(cfg: &BallConfig, gamma: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    solve_in_basis(cfg, gamma, |e| sigma(cfg, gamma, x, y, e))
}

/// Tangent vector `C(Y, Z)` defined by `<X, C(Y, Z)>_0 = Sigma(X, Y, Z)`.
pub fn c_tensor(cfg: &BallConfig, gamma: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    solve_in_basis(cfg, gamma, |e| sigma(cfg, gamma, e, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    fn e(n: usize, k: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        v
    }

    fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        loop {
            let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            if v.norm() > 0.1 {
                return v.normalize();
            }
        }
    }

    fn random_tangent(rng: &mut ChaCha8Rng, gamma: &DVector<f64>) -> DVector<f64> {
        let v = DVector::from_fn(gamma.len(), |_, _| rng.gen_range(-1.0..1.0));
        &v - gamma * gamma.dot(&v)
    }

    fn random_cfg(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> BallConfig {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
        BallConfig::new(n, &a, eps).unwrap()
    }

    /// Bivector `a ^ b` as the matrix `a b^T - b a^T`.
    fn wedge_matrix(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
        a * b.transpose() - b * a.transpose()
    }

    #[test]
    fn g0_examples() {
        let cfg = BallConfig::new(3, &[1.0, 1.0, 1.0], 1.0).unwrap();
        let v = inner(MetricKind::ReducedG0, &cfg, &e(3, 0), &e(3, 1), &e(3, 1)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], 1.0).unwrap();
        let v = inner(MetricKind::ReducedG0, &cfg, &e(3, 0), &e(3, 1), &e(3, 2)).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(inner(MetricKind::ReducedG0, &cfg, &e(3, 0), &e(3, 0), &e(3, 1)), Err(Error::NotTangent(_))));
    }

    #[test]
    fn g0_matches_trace_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let eps = [-1.0, 0.5, 0.7, 1.0, 2.0][rng.gen_range(0..5)];
            let cfg = random_cfg(&mut rng, n, eps);
            let g = random_unit(&mut rng, n);
            let x = random_tangent(&mut rng, &g);
            let y = random_tangent(&mut rng, &g);
            let ag = cfg.apply_a(&g);
            let m = wedge_matrix(&ag, &cfg.apply_a(&x)) * wedge_matrix(&g, &y);
            let oracle = -m.trace() / (2.0 * eps * eps);
            let value = inner(MetricKind::ReducedG0, &cfg, &g, &x, &y).unwrap();
            assert!((value - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()), "{value} vs {oracle}");
        }
    }

    #[test]
    fn metrics_symmetric_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for eps in [-1.0, -0.3, 0.5, 1.0, 2.0] {
            for _ in 0..50 {
                let n = rng.gen_range(2..7);
                let cfg = random_cfg(&mut rng, n, eps);
                let g = random_unit(&mut rng, n);
                let x = random_tangent(&mut rng, &g);
                let y = random_tangent(&mut rng, &g);
                let basis = tangent_basis(&g);
                for kind in [MetricKind::ReducedG0, MetricKind::ChaplyginGStar] {
                    let xy = inner(kind, &cfg, &g, &x, &y).unwrap();
                    let yx = inner(kind, &cfg, &g, &y, &x).unwrap();
                    assert!((xy - yx).abs() <= 1e-13 * (1.0 + xy.abs()));
                    assert!(gram_matrix(kind, &cfg, &g, &basis).unwrap().cholesky().is_some());
                }
            }
        }
    }

    #[test]
    fn tangent_basis_is_orthonormal_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let n = rng.gen_range(2..8);
            let g = random_unit(&mut rng, n);
            let basis = tangent_basis(&g);
            assert_eq!(basis.len(), n - 1);
            for (i, u) in basis.iter().enumerate() {
                assert!(u.dot(&g).abs() < 1e-14);
                for (j, w) in basis.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((u.dot(w) - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sphere_map_examples() {
        let id = BallConfig::new(3, &[1.0, 1.0, 1.0], 1.0).unwrap();
        let g = dv(&[0.6, 0.0, 0.8]);
        assert!((gamma_to_x(&id, &g) - &g).amax() < 1e-15);
        assert!((x_to_gamma(&id, &g) - &g).amax() < 1e-15);

        let cfg = BallConfig::new(2, &[4.0, 1.0], 1.0).unwrap();
        assert!((gamma_to_x(&cfg, &dv(&[1.0, 0.0])) - dv(&[1.0, 0.0])).amax() < 1e-15);
        let h = 0.5f64.sqrt();
        // (2h, h) / sqrt(4 h^2 + h^2) = (2, 1) / sqrt(5)
        let x = gamma_to_x(&cfg, &dv(&[h, h]));
        let expected = dv(&[2.0, 1.0]) / 5.0f64.sqrt();
        assert!((&x - &expected).amax() < 1e-15);
        assert!((x_to_gamma(&cfg, &expected) - dv(&[h, h])).amax() < 1e-15);
    }

    #[test]
    fn sphere_map_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let p = random_unit(&mut rng, 3);
            let x = gamma_to_x(&cfg, &p);
            assert!((x.norm_squared() - 1.0).abs() < 1e-15);
            worst = worst.max((gamma_to_x(&cfg, &x_to_gamma(&cfg, &p)) - &p).amax());
            worst = worst.max((x_to_gamma(&cfg, &x) - &p).amax());
        }
        assert!(worst <= 1e-13, "{worst}");
    }

    #[test]
    fn sphere_map_differentials_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..50 {
            let n = rng.gen_range(2..6);
            let cfg = random_cfg(&mut rng, n, 1.0);
            let g = random_unit(&mut rng, n);
            let v = random_tangent(&mut rng, &g);
            let h = 1e-5;
            let fd1 = (gamma_to_x(&cfg, &(&g + &v * h)) - gamma_to_x(&cfg, &(&g - &v * h))) / (2.0 * h);
            assert!((sphere_map_differential(&cfg, &g, &v) - fd1).amax() < 1e-8);
            let fd2 = (gamma_to_x(&cfg, &(&g + &v * h)) - gamma_to_x(&cfg, &g) * 2.0
                + gamma_to_x(&cfg, &(&g - &v * h)))
                / (h * h);
            assert!((sphere_map_second_differential(&cfg, &g, &v) - fd2).amax() < 1e-4);
        }
    }

    #[test]
    fn gstar_pulls_back_from_conformal_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for eps in [-1.0, 0.7, 1.0, 2.0] {
            for _ in 0..50 {
                let n = rng.gen_range(2..6);
                let cfg = random_cfg(&mut rng, n, eps);
                let g = random_unit(&mut rng, n);
                let x = random_tangent(&mut rng, &g);
                let y = random_tangent(&mut rng, &g);
                let h = 1e-6;
                let jac =
                    |v: &DVector<f64>| (gamma_to_x(&cfg, &(&g + v * h)) - gamma_to_x(&cfg, &(&g - v * h))) / (2.0 * h);
                let base = gamma_to_x(&cfg, &g);
                let (dx, dy) = (jac(&x), jac(&y));
                let lhs = inner(MetricKind::ChaplyginGStar, &cfg, &g, &x, &y).unwrap();
                let rhs = inner(MetricKind::ConformalX, &cfg, &base, &dx, &dy).unwrap();
                assert!((lhs - rhs).abs() <= 1e-6, "eps={eps}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn wedge_examples() {
        let (e1, e2) = (e(3, 0), e(3, 1));
        assert_eq!(wedge_apply(&e1, &e2, &e2), e1);
        let a = dv(&[0.3, -1.2, 2.0]);
        assert_eq!(wedge_apply(&a, &a, &dv(&[1.0, 2.0, 3.0])).amax(), 0.0);

        let cfg = BallConfig::new(2, &[1.0, 2.0], 1.0).unwrap();
        let v = inertia_wedge_apply(&cfg, &e(2, 0), &e(2, 1), &e(2, 1));
        assert!((v - dv(&[2.0, 0.0])).amax() < 1e-15);

        let id = BallConfig::new(3, &[1.0, 1.0, 1.0], 1.0).unwrap();
        let (b, c) = (dv(&[1.0, 0.5, 0.0]), dv(&[0.1, 0.2, 0.3]));
        assert_eq!(inertia_wedge_apply(&id, &a, &b, &c), wedge_apply(&a, &b, &c));
    }

    #[test]
    fn wedge_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cfg = random_cfg(&mut rng, 4, 1.0);
        for _ in 0..100 {
            let [a, b, c]: [DVector<f64>; 3] =
                std::array::from_fn(|_| DVector::from_fn(4, |_, _| rng.gen_range(-2.0..2.0)));
            assert!((wedge_apply(&a, &b, &c) + wedge_apply(&b, &a, &c)).amax() < 1e-14);
            assert!((inertia_wedge_apply(&cfg, &a, &b, &c) + inertia_wedge_apply(&cfg, &b, &a, &c)).amax() < 1e-13);
        }
    }

    #[test]
    fn sigma_matches_trace_formula_and_vanishes_at_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let eps = [-1.0, 0.7, 1.0, 2.0][rng.gen_range(0..4)];
            let cfg = random_cfg(&mut rng, n, eps);
            let g = random_unit(&mut rng, n);
            let [x, y, z]: [DVector<f64>; 3] = std::array::from_fn(|_| random_tangent(&mut rng, &g));
            let m = wedge_matrix(&cfg.apply_a(&g), &cfg.apply_a(&x)) * wedge_matrix(&y, &z);
            let oracle = (2.0 * eps - 1.0) / (2.0 * eps.powi(3)) * m.trace();
            let value = sigma(&cfg, &g, &x, &y, &z).unwrap();
            assert!((value - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
            assert!(sigma(&cfg, &g, &x, &y, &y).unwrap().abs() <= 1e-14);

            let half = cfg.with_epsilon(0.5).unwrap();
            assert_eq!(sigma(&half, &g, &x, &y, &z).unwrap(), 0.0);
        }
    }

    #[test]
    fn sigma_nonzero_away_from_half() {
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], 1.0).unwrap();
        let g = dv(&[0.6, 0.0, 0.8]);
        let (x, y, z) = (dv(&[0.0, 1.0, 0.0]), dv(&[0.4, 1.0, -0.3]), dv(&[-0.8, 0.3, 0.6]));
        assert!(sigma(&cfg, &g, &x, &y, &z).unwrap().abs() > 1e-3);
    }

    #[test]
    fn b_and_c_tensors_satisfy_defining_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let n = rng.gen_range(2..6);
            let eps = [-1.0, 0.7, 1.0, 2.0][rng.gen_range(0..4)];
            let cfg = random_cfg(&mut rng, n, eps);
            let g = random_unit(&mut rng, n);
            let [x, y, z]: [DVector<f64>; 3] = std::array::from_fn(|_| random_tangent(&mut rng, &g));
            let b = b_tensor(&cfg, &g, &x, &y).unwrap();
            let residual =
                inner(MetricKind::ReducedG0, &cfg, &g, &b, &z).unwrap() - sigma(&cfg, &g, &x, &y, &z).unwrap();
            assert!(residual.abs() <= 1e-10);
            let c = c_tensor(&cfg, &g, &y, &z).unwrap();
            let residual =
                inner(MetricKind::ReducedG0, &cfg, &g, &x, &c).unwrap() - sigma(&cfg, &g, &x, &y, &z).unwrap();
            assert!(residual.abs() <= 1e-10);
            let c_swapped = c_tensor(&cfg, &g, &z, &y).unwrap();
            assert!((&c + &c_swapped).amax() <= 1e-12 * (1.0 + c.amax()));

            let half = cfg.with_epsilon(0.5).unwrap();
            assert_eq!(b_tensor(&half, &g, &x, &y).unwrap().amax(), 0.0);
            assert_eq!(c_tensor(&half, &g, &y, &z).unwrap().amax(), 0.0);
        }
    }
}
