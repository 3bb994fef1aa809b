//! Maps a unit-energy rolling trajectory (shell over an inner sphere, eps = -1) to the Neumann
//! system and compares it with an independently integrated Neumann trajectory.

use chaplygin_ball::analysis::{chaplygin_chain, compare_with_natural_flow, energy_g0, normalize_unit_energy};
use chaplygin_ball::dynamics::Flow;
use chaplygin_ball::integrate::integrate;
use chaplygin_ball::{project_state, BallConfig};
use nalgebra::DVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for eps in [-1.0, 1.0] {
        let cfg = BallConfig::new(3, &[1.0, 2.0, 3.0], eps)?;
        let start = project_state(
            &DVector::from_column_slice(&[0.3, -0.5, 0.8]),
            &DVector::from_column_slice(&[1.0, 0.4, -0.2]),
        )?;
        let start = normalize_unit_energy(&cfg, &start)?;
        let reduced = integrate(&Flow::Reduced(cfg.clone()), &start, (0.0, 5.0), 1e-10, 1e-10)?;
        println!("eps = {eps}: {} reduced steps, g0 energy {:.12}", reduced.len(), energy_g0(&cfg, &start)?);

        let chain = chaplygin_chain(&cfg, &reduced)?;
        for report in &chain.reports {
            println!("  {:<22} max |dev| = {:.3e}", report.quantity, report.max_abs_dev);
        }
        let deviation = compare_with_natural_flow(&cfg, &chain.natural)?;
        println!(
            "  s in [{:.4}, {:.4}], deviation from independent integration {:.3e}",
            chain.natural.start_time(),
            chain.natural.end_time(),
            deviation
        );
    }
    Ok(())
}
