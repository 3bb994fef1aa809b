//! The acceptance property suite, shared by `chaplygin verify` and the acceptance tests.

use std::fmt;
use std::fs;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{
    chaplygin_chain, compare_with_natural_flow, energy_g0, energy_gstar, flat_testbed, great_circle_deviation,
    jacobi_energy_report, noether_phi, normalize_unit_energy,
};
use crate::cli::config::random_sphere_state;
use crate::cli::{cmd_simulate, run_job, Format, Job};
use crate::coords::{bm_correspondence_check, conic_residual, gamma_from_u, u_from_x, x_from_u, SpheroConical};
use crate::dynamics::{reduced_rhs, weak_form_residual, Flow};
use crate::fields::{AffinePower, FlatFieldConfig, NuField};
use crate::geometry::sigma;
use crate::integrate::{integrate, IntegratorOptions};
use crate::reparam::{resample, time_map, Multiplier};
use crate::trajectory::Trajectory;
use crate::types::{BallConfig, SphereState};

pub const TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Fewer samples and shorter arcs.
    Quick,
    /// Sample counts and arcs of the acceptance criteria.
    Full,
}

/// One measured quantity of a criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Above(f64),
}

impl Measurement {
    fn at_most(label: &str, value: f64, limit: f64) -> Self {
        Self { label: label.into(), value, bound: Bound::AtMost(limit) }
    }

    fn above(label: &str, value: f64, limit: f64) -> Self {
        Self { label: label.into(), value, bound: Bound::Above(limit) }
    }

    pub fn pass(&self) -> bool {
        match self.bound {
            Bound::AtMost(l) => self.value <= l,
            Bound::Above(l) => self.value > l,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub measurements: Vec<Measurement>,
    pub error: Option<String>,
    pub pass: bool,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:>2} {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name)?;
        for m in &self.measurements {
            let (op, l) = match m.bound {
                Bound::AtMost(l) => ("<=", l),
                Bound::Above(l) => (">", l),
            };
            write!(f, "; {} {:.2e} {op} {:.0e}", m.label, m.value, l)?;
        }
        if let Some(e) = &self.error {
            write!(f, "; error: {e}")?;
        }
        Ok(())
    }
}

pub const NAMES: [&str; 12] = [
    "constraint fidelity",
    "reduced energy conservation",
    "weak-form equivalence",
    "conformal energy after the Chaplygin time change",
    "eps = -1 chain to the Neumann system",
    "eps = +1 chain to the Braden system",
    "Sigma vanishes at eps = 1/2",
    "symmetric inertia: Noether integrals and energy",
    "isotropic inertia gives great circles",
    "sphero-conical coordinates",
    "flat testbed and Maupertuis",
    "CLI determinism",
];

/// Runs criterion `id` (1 to 12).
pub fn criterion(id: usize, suite: Suite) -> Outcome {
    let result = match id {
        1 => constraint_fidelity(suite),
        2 => energy_conservation(suite),
        3 => weak_form(suite),
        4 => gstar_energy(suite),
        5 => chain(-1.0),
        6 => chain(1.0),
        7 => sigma_degeneracy(suite),
        8 => symmetric(),
        9 => isotropic(),
        10 => coordinates(suite),
        11 => flat(),
        12 => determinism(),
        _ => Err(format!("no criterion {id}")),
    };
    let name = NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown");
    match result {
        Ok(measurements) => {
            let pass = measurements.iter().all(Measurement::pass);
            Outcome { id, name, measurements, error: None, pass }
        }
        Err(e) => Outcome { id, name, measurements: vec![], error: Some(e), pass: false },
    }
}

pub fn run_suite(suite: Suite) -> Vec<Outcome> {
    (1..=12).into_par_iter().map(|id| criterion(id, suite)).collect()
}

type Checks = Result<Vec<Measurement>, String>;

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn random_config(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> BallConfig {
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
    BallConfig::new(n, &a, eps).expect("valid random config")
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> SphereState {
    let (g, v) = random_sphere_state(n, rng.gen());
    SphereState::new(g, v).expect("projected")
}

const EPSILONS: [f64; 4] = [-1.0, 0.5, 1.0, 2.0];

/// Random reduced trajectories over `n = 3, 4, 5` and the test values of `eps`.
fn random_batch(suite: Suite) -> Result<Vec<(BallConfig, Trajectory)>, String> {
    let (seeds, t_end) = match suite {
        Suite::Quick => (1u64, 2.0),
        Suite::Full => (5, 10.0),
    };
    let jobs: Vec<(usize, f64, u64)> =
        (3..=5).flat_map(|n| EPSILONS.iter().flat_map(move |&e| (0..seeds).map(move |s| (n, e, s)))).collect();
    jobs.par_iter()
        .map(|&(n, eps, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + seed);
            let cfg = random_config(&mut rng, n, eps);
            let s0 = random_state(&mut rng, n);
            let traj = integrate(&Flow::Reduced(cfg.clone()), &s0, (0.0, t_end), TOL, TOL).map_err(err)?;
            Ok((cfg, traj))
        })
        .collect()
}

fn constraint_fidelity(suite: Suite) -> Checks {
    let batch = random_batch(suite)?;
    let (mut norm, mut tangency) = (0.0f64, 0.0f64);
    for (_, traj) in &batch {
        for (q, v) in traj.positions().iter().zip(traj.velocities()) {
            norm = norm.max((q.norm() - 1.0).abs());
            tangency = tangency.max(q.dot(v).abs());
        }
    }
    Ok(vec![Measurement::at_most("max ||g|-1|", norm, 1e-9), Measurement::at_most("max |(g,g')|", tangency, 1e-9)])
}

fn relative_drift(values: &[f64]) -> f64 {
    let e0 = values[0];
    values.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs()
}

fn energy_conservation(suite: Suite) -> Checks {
    let batch = random_batch(suite)?;
    let mut worst = 0.0f64;
    for (cfg, traj) in &batch {
        let e = traj.states().map(|s| energy_g0(cfg, &s)).collect::<crate::Result<Vec<_>>>().map_err(err)?;
        worst = worst.max(relative_drift(&e));
    }
    Ok(vec![Measurement::at_most("max relative drift", worst, 1e-8)])
}

fn weak_form(suite: Suite) -> Checks {
    let samples = if suite == Suite::Quick { 200 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let n = rng.gen_range(3..=5);
        let eps = EPSILONS[rng.gen_range(0..4)];
        let cfg = random_config(&mut rng, n, eps);
        let s = random_state(&mut rng, n);
        let d = reduced_rhs(&cfg, &s).map_err(err)?;
        worst = worst.max(weak_form_residual(&cfg, &s, &d));
    }
    Ok(vec![Measurement::at_most("max residual", worst, 1e-9)])
}

fn gstar_drift(cfg: &BallConfig, traj: &Trajectory) -> Result<f64, String> {
    let mult = Multiplier::chaplygin(cfg);
    let map = time_map(traj, &mult).map_err(err)?;
    let star = resample(traj, &map, &mult, 2 * traj.len()).map_err(err)?;
    let e = star.states().map(|s| energy_gstar(cfg, &s)).collect::<crate::Result<Vec<_>>>().map_err(err)?;
    Ok(relative_drift(&e))
}

fn gstar_energy(suite: Suite) -> Checks {
    let (seeds, t_end) = if suite == Suite::Quick { (1, 2.0) } else { (3, 10.0) };
    let jobs: Vec<(f64, u64, usize)> = [-1.0, 0.7, 1.0, 2.0]
        .iter()
        .flat_map(|&e| (0..seeds).flat_map(move |s| (3..=5).map(move |n| (e, s, n))))
        .collect();
    let drifts = jobs
        .par_iter()
        .map(|&(eps, seed, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(77 + seed + 10 * n as u64);
            let cfg = random_config(&mut rng, n, eps);
            let s0 = random_state(&mut rng, n);
            let traj = integrate(&Flow::Reduced(cfg.clone()), &s0, (0.0, t_end), TOL, TOL).map_err(err)?;
            gstar_drift(&cfg, &traj)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![Measurement::at_most("max relative drift", drifts.into_iter().fold(0.0, f64::max), 1e-7)])
}

/// Unit-energy reduced trajectory for `A = diag(1, 2, 3)` on `t in [0, 5]`.
pub fn chain_trajectory(eps: f64) -> crate::Result<(BallConfig, Trajectory)> {
    let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], eps)?;
    let s0 = crate::types::project_state(
        &DVector::from_column_slice(&[0.3, -0.5, 0.8]),
        &DVector::from_column_slice(&[1.0, 0.4, -0.2]),
    )?;
    let s0 = normalize_unit_energy(&cfg, &s0)?;
    let traj = integrate(&Flow::Reduced(cfg.clone()), &s0, (0.0, 5.0), TOL, TOL)?;
    Ok((cfg, traj))
}

fn chain(eps: f64) -> Checks {
    let (cfg, traj) = chain_trajectory(eps).map_err(err)?;
    let out = chaplygin_chain(&cfg, &traj).map_err(err)?;
    let energy = out.reports.iter().find(|r| r.quantity == "natural_energy").expect("reported").max_abs_dev;
    let deviation = compare_with_natural_flow(&cfg, &out.natural).map_err(err)?;
    Ok(vec![
        Measurement::at_most("max |natural energy|", energy, 1e-7),
        Measurement::at_most("position deviation", deviation, 1e-5),
    ])
}

fn sigma_degeneracy(suite: Suite) -> Checks {
    let samples = if suite == Suite::Quick { 200 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let n = rng.gen_range(2..=6);
        let cfg = random_config(&mut rng, n, 0.5);
        let g = random_state(&mut rng, n).gamma().clone();
        let tangent = |rng: &mut ChaCha8Rng| {
            let v = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
            &v - &g * g.dot(&v)
        };
        let (x, y, z) = (tangent(&mut rng), tangent(&mut rng), tangent(&mut rng));
        worst = worst.max(sigma(&cfg, &g, &x, &y, &z).map_err(err)?.abs());
    }
    Ok(vec![Measurement::at_most("max |Sigma|", worst, f64::EPSILON)])
}

fn symmetric_run(a: &[f64], eps: f64) -> Result<(f64, f64, f64), String> {
    let cfg = BallConfig::new(4, a, eps).map_err(err)?;
    let s0 = crate::types::project_state(
        &DVector::from_column_slice(&[0.5, -0.3, 0.6, 0.4]),
        &DVector::from_column_slice(&[0.2, 0.7, -0.4, 0.5]),
    )
    .map_err(err)?;
    let traj = integrate(&Flow::Reduced(cfg.clone()), &s0, (0.0, 10.0), TOL, TOL).map_err(err)?;
    let phi_drift = |i, j| -> Result<f64, String> {
        let values = traj
            .states()
            .map(|s| noether_phi(&cfg, i, j, &s).map(|p| p.value))
            .collect::<crate::Result<Vec<_>>>()
            .map_err(err)?;
        Ok(values.iter().map(|v| (v - values[0]).abs()).fold(0.0, f64::max))
    };
    Ok((phi_drift(0, 1)?, phi_drift(2, 3)?, gstar_drift(&cfg, &traj)?))
}

fn symmetric() -> Checks {
    let runs = [-1.0, 0.7, 2.0]
        .par_iter()
        .map(|&eps| symmetric_run(&[2.0, 2.0, 5.0, 5.0], eps))
        .collect::<Result<Vec<_>, _>>()?;
    let worst = |f: fn(&(f64, f64, f64)) -> f64| runs.iter().map(f).fold(0.0, f64::max);
    let control = [-1.0, 0.7, 2.0]
        .iter()
        .map(|&eps| symmetric_run(&[2.0, 3.0, 5.0, 7.0], eps).map(|r| r.0))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![
        Measurement::at_most("Phi_12 drift", worst(|r| r.0), 1e-7),
        Measurement::at_most("Phi_34 drift", worst(|r| r.1), 1e-7),
        Measurement::at_most("g* energy drift", worst(|r| r.2), 1e-7),
        Measurement::above("control Phi_12 drift", control.into_iter().fold(f64::INFINITY, f64::min), 1e-3),
    ])
}

fn isotropic() -> Checks {
    let jobs: Vec<(usize, f64)> = (3..=5).flat_map(|n| EPSILONS.iter().map(move |&e| (n, e))).collect();
    let devs = jobs
        .par_iter()
        .map(|&(n, eps)| {
            let cfg = BallConfig::new(n, &vec![1.7; n], eps).map_err(err)?;
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let s0 = random_state(&mut rng, n);
            let traj = integrate(&Flow::Reduced(cfg), &s0, (0.0, 10.0), TOL, TOL).map_err(err)?;
            great_circle_deviation(&traj).map_err(err)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(vec![Measurement::at_most("max planarity deviation", devs.into_iter().fold(0.0, f64::max), 1e-8)])
}

fn coordinates(suite: Suite) -> Checks {
    let samples = if suite == Suite::Quick { 200 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut roundtrip = 0.0f64;
    for _ in 0..samples {
        let n = rng.gen_range(3..=5);
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..5.0)).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        let cfg = BallConfig::new(n, &a, -1.0).map_err(err)?;
        let p = cfg.a_inv();
        let u: Vec<f64> = (0..n - 1).map(|k| p[k] + (p[k + 1] - p[k]) * rng.gen_range(0.01..0.99)).collect();
        let u = SpheroConical::new(&cfg, u).map_err(err)?;
        let x = x_from_u(&cfg, &u).map_err(err)?.map(f64::sqrt);
        let back = u_from_x(&cfg, &x).map_err(err)?;
        for (b, o) in back.values().iter().zip(u.values()) {
            roundtrip = roundtrip.max((b - o).abs());
        }
    }

    let cfg = BallConfig::new(3, &[1.0, 0.5, 1.0 / 3.0], -1.0).map_err(err)?;
    let u = u_from_x(&cfg, &DVector::from_element(3, 1.0 / 3.0f64.sqrt())).map_err(err)?;
    let r = 1.0 / 3.0f64.sqrt();
    let analytic = (u.values()[0] - (2.0 - r)).abs().max((u.values()[1] - (2.0 + r)).abs());

    let (mut bm, mut conic) = (0.0f64, 0.0f64);
    let cfg = BallConfig::new(3, &[3.0, 2.0, 1.0], -1.0).map_err(err)?;
    let det = cfg.a().product();
    for _ in 0..samples {
        let p = cfg.a_inv();
        let u: Vec<f64> = (0..2).map(|k| p[k] + (p[k + 1] - p[k]) * rng.gen_range(0.01..0.99)).collect();
        let u = SpheroConical::new(&cfg, u).map_err(err)?;
        bm = bm.max(bm_correspondence_check(&cfg, &u).map_err(err)?);
        let g = gamma_from_u(&cfg, &u).map_err(err)?.map(f64::sqrt);
        for uk in u.values() {
            conic = conic.max(conic_residual(&cfg, &g, det * uk).map_err(err)?.abs());
        }
    }
    Ok(vec![
        Measurement::at_most("roundtrip", roundtrip, 1e-10),
        Measurement::at_most("analytic case", analytic, 1e-12),
        Measurement::at_most("Borisov-Mamaev residual", bm, 1e-12),
        Measurement::at_most("conic residual", conic, 1e-11),
    ])
}

fn flat() -> Checks {
    let opts = IntegratorOptions::with_tolerances(TOL, TOL);
    let fields = FlatFieldConfig::new(
        AffinePower::new(2.0, &[0.3, 0.5], 0.5),
        NuField::Independent(AffinePower::new(1.0, &[0.2, 0.1], 1.5)),
        None,
        &[-4.0, -4.0],
        &[4.0, 4.0],
    )
    .map_err(err)?;
    let out = flat_testbed(
        &fields,
        &DVector::from_column_slice(&[0.4, -0.2]),
        &DVector::from_column_slice(&[0.3, 0.5]),
        (0.0, 5.0),
        &opts,
    )
    .map_err(err)?;
    let get = |name: &str| out.reports.iter().find(|r| r.quantity == name).expect("reported").clone();

    let (h, k) = (3.0, [1.0, 3.0]);
    let jacobi = FlatFieldConfig::jacobi(h, &k, &[-1.5, -0.9], &[1.5, 0.9]).map_err(err)?;
    let q0 = DVector::from_column_slice(&[0.5, 0.2]);
    let v0 = DVector::from_column_slice(&[0.8, 0.6]) * (2.0 * (h - jacobi.potential(&q0))).sqrt();
    let newton = crate::integrate::integrate_with(&Flow::FlatNewton(jacobi.clone()), &q0, &v0, (0.0, 0.4), &opts)
        .map_err(err)?;
    let (_, unit) = jacobi_energy_report(&jacobi, &newton, h).map_err(err)?;
    Ok(vec![
        Measurement::at_most("geodesic position deviation", get("geodesic_position_deviation").max_abs_dev, 1e-6),
        Measurement::at_most("geodesic equation residual", get("geodesic_equation_residual").max_abs_dev, 1e-7),
        Measurement::at_most("quad integral drift", get("quad_integral").rel_dev, 1e-7),
        Measurement::at_most("Jacobi energy deviation", unit.max_abs_dev, 1e-7),
    ])
}

const DETERMINISM_CONFIG: &str = r#"{
  "system": "reduced", "n": 4, "a": [1.0, 1.5, 2.5, 4.0], "epsilon": 0.7,
  "seed": 11, "t_span": [0.0, 3.0],
  "experiments": [{"name": "a"}, {"name": "b", "epsilon": -1.0}, {"name": "c", "seed": 12}]
}"#;

fn determinism() -> Checks {
    let base =
        std::env::temp_dir().join(format!("chaplygin-verify-{}-{:?}", std::process::id(), std::thread::current().id()));
    let result = (|| {
        let _ = fs::remove_dir_all(&base);
        fs::create_dir_all(&base).map_err(|e| e.to_string())?;
        let config_path = base.join("config.json");
        fs::write(&config_path, DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
        let mut snapshots = Vec::new();
        for k in 0..2 {
            let out = base.join(format!("out{k}"));
            let job = Job {
                config_path: config_path.clone(),
                out: out.clone(),
                seed: Some(5),
                format: Format::Csv,
                verbose: false,
            };
            let code = run_job(&job, "simulate", cmd_simulate);
            if code != 0 {
                return Err(format!("simulate exited with {code}"));
            }
            let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
                .map_err(|e| e.to_string())?
                .map(|e| {
                    let e = e.map_err(|e| e.to_string())?;
                    Ok((e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).map_err(|e| e.to_string())?))
                })
                .collect::<Result<_, String>>()?;
            files.sort();
            snapshots.push(files);
        }
        let differing = snapshots[0].len().abs_diff(snapshots[1].len())
            + snapshots[0].iter().zip(&snapshots[1]).filter(|(a, b)| a != b).count();
        Ok(vec![
            Measurement::at_most("differing files", differing as f64, 0.0),
            Measurement::above("files written", snapshots[0].len() as f64, 5.0),
        ])
    })();
    let _ = fs::remove_dir_all(&base);
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_and_display() {
        assert!(Measurement::at_most("m", 1.0, 1.0).pass());
        assert!(!Measurement::at_most("m", f64::NAN, 1.0).pass());
        assert!(!Measurement::above("m", 1.0, 1.0).pass());
        let o = Outcome {
            id: 3,
            name: "x",
            measurements: vec![Measurement::at_most("r", 2e-10, 1e-9)],
            error: None,
            pass: true,
        };
        assert_eq!(o.to_string(), "[PASS]  3 x; r 2.00e-10 <= 1e-9");
    }

    #[test]
    fn unknown_criterion_fails() {
        let o = criterion(13, Suite::Quick);
        assert!(!o.pass);
        assert!(o.error.is_some());
    }

    #[test]
    fn quick_coordinate_and_sigma_checks_pass() {
        assert!(criterion(7, Suite::Quick).pass);
        assert!(criterion(10, Suite::Quick).pass);
    }
}
