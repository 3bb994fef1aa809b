//! Reparametrizes reduced trajectories by the Chaplygin multiplier and checks that the kinetic
//! energy of the conformal metric is constant in the new time.

use chaplygin_ball::analysis::{energy_g0, energy_gstar};
use chaplygin_ball::dynamics::Flow;
use chaplygin_ball::integrate::integrate;
use chaplygin_ball::reparam::{resample, time_map, Multiplier};
use chaplygin_ball::{project_state, BallConfig};
use nalgebra::DVector;

fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    (hi - lo) / values[0].abs()
}

fn main() -> chaplygin_ball::Result<()> {
    let start =
        project_state(&DVector::from_column_slice(&[0.3, -0.5, 0.8]), &DVector::from_column_slice(&[1.0, 0.4, -0.2]))?;
    for eps in [-1.0, 0.7, 1.0, 2.0] {
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], eps)?;
        let traj = integrate(&Flow::Reduced(cfg.clone()), &start, (0.0, 10.0), 1e-10, 1e-10)?;
        let mult = Multiplier::chaplygin(&cfg);
        let map = time_map(&traj, &mult)?;
        let star = resample(&traj, &map, &mult, 400)?;

        let e0: Vec<f64> = traj.states().map(|s| energy_g0(&cfg, &s)).collect::<Result<_, _>>()?;
        let es: Vec<f64> = star.states().map(|s| energy_gstar(&cfg, &s)).collect::<Result<_, _>>()?;
        // g* energy in the original time is not constant
        let es_t: Vec<f64> = traj.states().map(|s| energy_gstar(&cfg, &s)).collect::<Result<_, _>>()?;
        let (lo, hi) = map.tau_range();
        println!(
            "eps = {eps:>4}: tau in [{lo:.4}, {hi:.4}]; spread g0(t) {:.1e}, g*(tau) {:.1e}, g*(t) {:.1e}",
            spread(&e0),
            spread(&es),
            spread(&es_t)
        );
    }
    Ok(())
}
