//! Scalar fields on a Euclidean chart for the flat time-reparametrization testbed.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// `(c + (q, M q))^p` with diagonal `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePower {
    pub c: f64,
    pub m: DVector<f64>,
    pub p: f64,
}

impl AffinePower {
    pub fn new(c: f64, m: &[f64], p: f64) -> Self {
        Self { c, m: DVector::from_column_slice(m), p }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self { c: value, m: DVector::zeros(n), p: 1.0 }
    }

    fn base(&self, q: &DVector<f64>) -> f64 {
        self.c + q.iter().zip(self.m.iter()).map(|(x, m)| m * x * x).sum::<f64>()
    }

    pub fn value(&self, q: &DVector<f64>) -> f64 {
        self.base(q).powf(self.p)
    }

    /// Gradient of `ln` of the field.
    pub fn ln_gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.m.component_mul(q) * (2.0 * self.p / self.base(q))
    }

    pub fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.ln_gradient(q) * self.value(q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NuField {
    /// `nu = f^alpha`.
    PowerOfF(f64),
    Independent(AffinePower),
}

/// Conformal factor `f`, multiplier `nu` and an optional potential `V = (q, K q) / 2` on a box.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatFieldConfig {
    f: AffinePower,
    nu: NuField,
    potential: Option<DVector<f64>>,
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl FlatFieldConfig {
    pub fn new(f: AffinePower, nu: NuField, potential: Option<&[f64]>, lower: &[f64], upper: &[f64]) -> Result<Self> {
        let n = f.m.len();
        let dims = [
            Some(lower.len()),
            Some(upper.len()),
            potential.map(<[f64]>::len),
            match &nu {
                NuField::Independent(g) => Some(g.m.len()),
                NuField::PowerOfF(_) => None,
            },
        ];
        if n == 0 {
            return Err(Error::Invalid("flat field dimension must be positive".into()));
        }
        if let Some(got) = dims.into_iter().flatten().find(|&d| d != n) {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
        if lower.iter().zip(upper).any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::Invalid("domain box must have lower < upper in every coordinate".into()));
        }
        let cfg = Self {
            f,
            nu,
            potential: potential.map(DVector::from_column_slice),
            lower: DVector::from_column_slice(lower),
            upper: DVector::from_column_slice(upper),
        };
        for q in cfg.probe_points() {
            if !cfg.fields_nonvanishing(&q) {
                return Err(Error::FieldVanishes(q.as_slice().to_vec()));
            }
        }
        Ok(cfg)
    }

    /// Fields of the Maupertuis construction: `f^2 = h - V`, `nu = f^2`, potential `V = (q, K q) / 2`.
    pub fn jacobi(h: f64, k: &[f64], lower: &[f64], upper: &[f64]) -> Result<Self> {
        let m: Vec<f64> = k.iter().map(|v| -0.5 * v).collect();
        Self::new(AffinePower::new(h, &m, 0.5), NuField::PowerOfF(2.0), Some(k), lower, upper)
    }

    pub fn n(&self) -> usize {
        self.f.m.len()
    }

    pub fn f_field(&self) -> &AffinePower {
        &self.f
    }

    pub fn nu_field(&self) -> &NuField {
        &self.nu
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    // corners plus center of the box
    fn probe_points(&self) -> Vec<DVector<f64>> {
        let n = self.n();
        let mut points: Vec<DVector<f64>> = (0..1usize << n)
            .map(|mask| DVector::from_fn(n, |i, _| if mask >> i & 1 == 1 { self.upper[i] } else { self.lower[i] }))
            .collect();
        points.push((&self.lower + &self.upper) * 0.5);
        points
    }

    fn fields_nonvanishing(&self, q: &DVector<f64>) -> bool {
        let base_ok = |g: &AffinePower| {
            let b = g.base(q);
            let v = g.value(q);
            b > 0.0 && v.is_finite() && v != 0.0
        };
        base_ok(&self.f)
            && match &self.nu {
                NuField::PowerOfF(_) => true,
                NuField::Independent(g) => base_ok(g),
            }
    }

    pub fn contains(&self, q: &DVector<f64>) -> bool {
        q.len() == self.n() && q.iter().enumerate().all(|(i, x)| *x >= self.lower[i] && *x <= self.upper[i])
    }

    /// Errors when `q` is outside the box or a field vanishes there.
    pub fn check_point(&self, q: &DVector<f64>) -> Result<()> {
        if !self.contains(q) {
            return Err(Error::DomainExit(q.as_slice().to_vec()));
        }
        if !self.fields_nonvanishing(q) {
            return Err(Error::FieldVanishes(q.as_slice().to_vec()));
        }
        Ok(())
    }

    pub fn f(&self, q: &DVector<f64>) -> f64 {
        self.f.value(q)
    }

    pub fn nu(&self, q: &DVector<f64>) -> f64 {
        match &self.nu {
            NuField::PowerOfF(alpha) => self.f.value(q).powf(*alpha),
            NuField::Independent(g) => g.value(q),
        }
    }

    pub fn grad_ln_f(&self, q: &DVector<f64>) -> DVector<f64> {
        self.f.ln_gradient(q)
    }

    pub fn grad_ln_nu(&self, q: &DVector<f64>) -> DVector<f64> {
        match &self.nu {
            NuField::PowerOfF(alpha) => self.f.ln_gradient(q) * *alpha,
            NuField::Independent(g) => g.ln_gradient(q),
        }
    }

    pub fn grad_f(&self, q: &DVector<f64>) -> DVector<f64> {
        self.f.gradient(q)
    }

    pub fn potential_diag(&self) -> Option<&DVector<f64>> {
        self.potential.as_ref()
    }

    /// `V(q) = (q, K q) / 2`, zero when no potential is configured.
    pub fn potential(&self, q: &DVector<f64>) -> f64 {
        self.potential.as_ref().map_or(0.0, |k| 0.5 * q.iter().zip(k.iter()).map(|(x, k)| k * x * x).sum::<f64>())
    }

    pub fn potential_gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.potential.as_ref().map_or_else(|| DVector::zeros(q.len()), |k| k.component_mul(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn gradients_match_finite_differences() {
        let fields = FlatFieldConfig::new(
            AffinePower::new(2.0, &[0.3, -0.2], 0.7),
            NuField::Independent(AffinePower::new(1.5, &[0.1, 0.4], -1.3)),
            Some(&[1.0, 2.0]),
            &[-1.0, -1.0],
            &[1.0, 1.0],
        )
        .unwrap();
        let q = dv(&[0.3, -0.4]);
        let h = 1e-6;
        for i in 0..2 {
            let mut e = DVector::zeros(2);
            e[i] = h;
            let fd_f = ((fields.f(&(&q + &e))).ln() - (fields.f(&(&q - &e))).ln()) / (2.0 * h);
            let fd_nu = ((fields.nu(&(&q + &e))).ln() - (fields.nu(&(&q - &e))).ln()) / (2.0 * h);
            let fd_v = (fields.potential(&(&q + &e)) - fields.potential(&(&q - &e))) / (2.0 * h);
            assert!((fields.grad_ln_f(&q)[i] - fd_f).abs() < 1e-8);
            assert!((fields.grad_ln_nu(&q)[i] - fd_nu).abs() < 1e-8);
            assert!((fields.potential_gradient(&q)[i] - fd_v).abs() < 1e-8);
        }
    }

    #[test]
    fn vanishing_field_rejected_at_construction() {
        // c + (q, M q) = 1 - q1^2 reaches zero at the box corner q1 = 1
        let err = FlatFieldConfig::new(
            AffinePower::new(1.0, &[-1.0, 0.0], 0.5),
            NuField::PowerOfF(1.0),
            None,
            &[-1.0, -1.0],
            &[1.0, 1.0],
        );
        assert!(matches!(err, Err(Error::FieldVanishes(_))));
    }

    #[test]
    fn jacobi_fields_satisfy_f_squared_is_h_minus_v() {
        let fields = FlatFieldConfig::jacobi(2.0, &[1.0, 3.0], &[-0.8, -0.8], &[0.8, 0.8]).unwrap();
        let q = dv(&[0.5, -0.2]);
        let f = fields.f(&q);
        assert!((f * f - (2.0 - fields.potential(&q))).abs() < 1e-15);
        assert!((fields.nu(&q) - f * f).abs() < 1e-15);
        assert!(fields.check_point(&dv(&[0.9, 0.0])).is_err());
    }
}
