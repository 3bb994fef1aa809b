//! Experiment configuration files.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::fields::{AffinePower, FlatFieldConfig, NuField};
use crate::types::{epsilon_from_radii, project_state, BallConfig, RollingCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Reduced,
    Natural,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(alias = "q")]
    pub gamma: Vec<f64>,
    #[serde(alias = "q_dot")]
    pub gamma_dot: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub c: f64,
    pub m: Vec<f64>,
    pub p: f64,
}

impl AffineSpec {
    fn build(&self) -> AffinePower {
        AffinePower::new(self.c, &self.m, self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    Power { power: f64 },
    Field(AffineSpec),
}

/// Flat testbed fields. Without `f`, a `potential` and `energy` give the Maupertuis fields
/// `f^2 = nu = energy - V`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatSpec {
    pub f: Option<AffineSpec>,
    pub nu: Option<NuSpec>,
    pub potential: Option<Vec<f64>>,
    pub energy: Option<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Per-experiment overrides of the top-level settings.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub a: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub case: Option<String>,
    pub initial: Option<Initial>,
    pub seed: Option<u64>,
    pub t_span: Option<[f64; 2]>,
    pub normalize: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemKind,
    pub n: usize,
    pub a: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub case: Option<String>,
    pub initial: Option<Initial>,
    pub seed: Option<u64>,
    pub t_span: [f64; 2],
    #[serde(default = "default_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_tol")]
    pub abs_tol: f64,
    /// Rescale the initial velocity: unit `g0` energy for the reduced system, zero energy for the
    /// natural one.
    #[serde(default)]
    pub normalize: bool,
    pub flat: Option<FlatSpec>,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
}

fn default_tol() -> f64 {
    1e-10
}

/// One fully resolved run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub system: SystemKind,
    pub ball: Option<BallConfig>,
    pub flat: Option<FlatFieldConfig>,
    pub energy: Option<f64>,
    pub q0: DVector<f64>,
    pub v0: DVector<f64>,
    pub t_span: (f64, f64),
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub normalize: bool,
    pub thresholds: BTreeMap<String, f64>,
}

pub fn parse(text: &str) -> Result<RunConfig, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

fn parse_case(s: &str) -> Result<RollingCase, String> {
    match s {
        "i" => Ok(RollingCase::I),
        "ii" => Ok(RollingCase::Ii),
        "iii" => Ok(RollingCase::Iii),
        other => Err(format!("unknown rolling case {other:?}, expected i, ii or iii")),
    }
}

fn resolve_epsilon(
    epsilon: Option<f64>,
    sigma: Option<f64>,
    rho: Option<f64>,
    case: Option<&str>,
) -> Result<f64, String> {
    match (epsilon, sigma, rho, case) {
        (Some(e), None, None, None) => Ok(e),
        (None, Some(s), Some(r), Some(c)) => epsilon_from_radii(s, r, parse_case(c)?).map_err(|e| e.to_string()),
        _ => Err("give either epsilon or all of sigma, rho and case".into()),
    }
}

impl RunConfig {
    /// Resolves the top-level run (when there are no experiments) or every experiment.
    /// `seed_override` replaces every seed.
    pub fn resolve(&self, seed_override: Option<u64>) -> Result<Vec<Resolved>, String> {
        if self.experiments.is_empty() {
            return Ok(vec![self.resolve_one("run", None, seed_override)?]);
        }
        let mut names = std::collections::BTreeSet::new();
        self.experiments
            .iter()
            .map(|e| {
                if !names.insert(e.name.as_str()) {
                    return Err(format!("duplicate experiment name {:?}", e.name));
                }
                if e.name.is_empty() || !e.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(format!("experiment name {:?} must be nonempty and use [A-Za-z0-9_-]", e.name));
                }
                self.resolve_one(&e.name, Some(e), seed_override)
            })
            .collect()
    }

    fn resolve_one(
        &self,
        name: &str,
        exp: Option<&Experiment>,
        seed_override: Option<u64>,
    ) -> Result<Resolved, String> {
        let radii_override = exp.is_some_and(|e| e.epsilon.is_some() || e.sigma.is_some());
        let (epsilon, sigma, rho, case) = match exp {
            Some(e) if radii_override => (e.epsilon, e.sigma, e.rho, e.case.as_deref()),
            _ => (self.epsilon, self.sigma, self.rho, self.case.as_deref()),
        };
        let a = exp.and_then(|e| e.a.clone()).or_else(|| self.a.clone());
        let initial = exp.and_then(|e| e.initial.clone()).or_else(|| self.initial.clone());
        let seed = seed_override.or(exp.and_then(|e| e.seed)).or(self.seed);
        let t_span = exp.and_then(|e| e.t_span).unwrap_or(self.t_span);
        let normalize = exp.and_then(|e| e.normalize).unwrap_or(self.normalize);
        if self.n == 0 {
            return Err("n must be positive".into());
        }
        if !(t_span[0].is_finite() && t_span[1].is_finite()) || t_span[0] == t_span[1] {
            return Err("t_span must be two distinct finite numbers".into());
        }

        let mut resolved = Resolved {
            name: name.to_string(),
            system: self.system,
            ball: None,
            flat: None,
            energy: None,
            q0: DVector::zeros(self.n),
            v0: DVector::zeros(self.n),
            t_span: (t_span[0], t_span[1]),
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            normalize,
            thresholds: self.thresholds.clone(),
        };
        match self.system {
            SystemKind::Reduced | SystemKind::Natural => {
                let a = a.ok_or("field `a` is required for the reduced and natural systems")?;
                let eps = resolve_epsilon(epsilon, sigma, rho, case)?;
                let cfg = BallConfig::new(self.n, &a, eps).map_err(|e| e.to_string())?;
                let (q0, v0) = match (&initial, seed) {
                    (Some(init), _) => {
                        let q = DVector::from_column_slice(&init.gamma);
                        let v = DVector::from_column_slice(&init.gamma_dot);
                        if q.len() != self.n || v.len() != self.n {
                            return Err(format!("initial state must have {} components", self.n));
                        }
                        project_state(&q, &v).map_err(|e| e.to_string())?.into_parts()
                    }
                    (None, Some(seed)) => random_sphere_state(self.n, seed),
                    (None, None) => return Err("give either `initial` or `seed`".into()),
                };
                resolved.ball = Some(cfg);
                resolved.q0 = q0;
                resolved.v0 = v0;
            }
            SystemKind::Flat => {
                let spec = self.flat.as_ref().ok_or("field `flat` is required for the flat system")?;
                let fields = build_flat(spec, self.n)?;
                let (q0, mut v0) = match (&initial, seed) {
                    (Some(init), _) => {
                        if init.gamma.len() != self.n || init.gamma_dot.len() != self.n {
                            return Err(format!("initial state must have {} components", self.n));
                        }
                        (DVector::from_column_slice(&init.gamma), DVector::from_column_slice(&init.gamma_dot))
                    }
                    (None, Some(seed)) => random_box_state(&fields, seed),
                    (None, None) => return Err("give either `initial` or `seed`".into()),
                };
                if !fields.contains(&q0) {
                    return Err("initial position lies outside the flat domain box".into());
                }
                if let Some(h) = spec.energy {
                    let kinetic = h - fields.potential(&q0);
                    if !(kinetic > 0.0) {
                        return Err("initial position is outside the region V < energy".into());
                    }
                    let speed = v0.norm();
                    if speed == 0.0 {
                        return Err("initial velocity must be nonzero".into());
                    }
                    v0 *= (2.0 * kinetic).sqrt() / speed;
                }
                resolved.flat = Some(fields);
                resolved.energy = spec.energy;
                resolved.q0 = q0;
                resolved.v0 = v0;
            }
        }
        Ok(resolved)
    }
}

fn build_flat(spec: &FlatSpec, n: usize) -> Result<FlatFieldConfig, String> {
    let check = |v: &[f64], what: &str| {
        if v.len() == n {
            Ok(())
        } else {
            Err(format!("`{what}` must have {n} components"))
        }
    };
    check(&spec.lower, "lower")?;
    check(&spec.upper, "upper")?;
    let fields = match (&spec.f, &spec.potential, spec.energy) {
        (Some(f), potential, _) => {
            check(&f.m, "f.m")?;
            let nu = match &spec.nu {
                None => NuField::PowerOfF(2.0),
                Some(NuSpec::Power { power }) => NuField::PowerOfF(*power),
                Some(NuSpec::Field(g)) => {
                    check(&g.m, "nu.m")?;
                    NuField::Independent(g.build())
                }
            };
            FlatFieldConfig::new(f.build(), nu, potential.as_deref(), &spec.lower, &spec.upper)
        }
        (None, Some(k), Some(h)) => {
            check(k, "potential")?;
            if spec.nu.is_some() {
                return Err("`nu` is fixed to f^2 when `f` is omitted".into());
            }
            FlatFieldConfig::jacobi(h, k, &spec.lower, &spec.upper)
        }
        _ => return Err("flat fields need `f`, or `potential` together with `energy`".into()),
    };
    fields.map_err(|e| e.to_string())
}

/// Uniform direction on the sphere with a random tangent velocity of norm in `[0.5, 1.5]`.
pub fn random_sphere_state(n: usize, seed: u64) -> (DVector<f64>, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let norm = g.norm();
        if !(norm > 0.1 && norm <= 1.0) {
            continue;
        }
        let g: DVector<f64> = g / norm;
        let v = &v - &g * g.dot(&v);
        if v.norm() < 0.1 {
            continue;
        }
        let speed = rng.gen_range(0.5..1.5);
        return (g, v.normalize() * speed);
    }
}

fn random_box_state(fields: &FlatFieldConfig, seed: u64) -> (DVector<f64>, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (fields.lower(), fields.upper());
    let q = DVector::from_fn(fields.n(), |i, _| {
        let mid = 0.5 * (lo[i] + hi[i]);
        mid + 0.25 * (hi[i] - lo[i]) * rng.gen_range(-1.0..1.0)
    });
    let v = DVector::from_fn(fields.n(), |_, _| rng.gen_range(-0.5..0.5));
    (q, v)
}
