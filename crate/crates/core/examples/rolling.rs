//! Integrates the reduced rolling equation for a few geometry ratios and prints the constraint
//! residuals and the drift of the kinetic energy.

use chaplygin_ball::analysis::{energy_g0, great_circle_deviation, DriftReport};
use chaplygin_ball::dynamics::Flow;
use chaplygin_ball::integrate::integrate;
use chaplygin_ball::types::{epsilon_from_radii, RollingCase};
use chaplygin_ball::{project_state, BallConfig};
use nalgebra::DVector;

fn main() -> chaplygin_ball::Result<()> {
    let start = project_state(
        &DVector::from_column_slice(&[0.2, 0.5, -0.4, 0.7]),
        &DVector::from_column_slice(&[0.6, -0.1, 0.3, 0.2]),
    )?;

    // ball of radius 1 inside a spherical shell of radius 3
    let eps_shell = epsilon_from_radii(1.0, 3.0, RollingCase::Iii)?;
    for eps in [eps_shell, 0.5, 1.0, 2.0] {
        let cfg = BallConfig::new(4, &[1.0, 1.8, 2.5, 4.0], eps)?;
        let traj = integrate(&Flow::Reduced(cfg.clone()), &start, (0.0, 10.0), 1e-10, 1e-10)?;
        let (norm, tangency) = traj.constraint_residuals();
        let energy = traj.states().map(|s| energy_g0(&cfg, &s)).collect::<chaplygin_ball::Result<Vec<_>>>()?;
        let drift = DriftReport::from_values("energy_g0", energy);
        println!(
            "eps = {eps:>5.2}: {:>4} steps, ||g|-1| {norm:.1e}, (g,g') {tangency:.1e}, energy rel drift {:.2e}",
            traj.len(),
            drift.rel_dev
        );
    }

    let round = BallConfig::new(4, &[2.0; 4], 0.7)?;
    let traj = integrate(&Flow::Reduced(round), &start, (0.0, 10.0), 1e-10, 1e-10)?;
    println!("isotropic inertia: distance from the initial great circle {:.2e}", great_circle_deviation(&traj)?);
    Ok(())
}
