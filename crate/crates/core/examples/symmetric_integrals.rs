//! With two pairs of equal inertia parameters the Noether integrals `phi_12` and `phi_34` are
//! conserved together with the energy; breaking the symmetry destroys `phi_12`.

use chaplygin_ball::analysis::noether_phi;
use chaplygin_ball::dynamics::Flow;
use chaplygin_ball::integrate::integrate;
use chaplygin_ball::{project_state, BallConfig};
use nalgebra::DVector;

fn main() -> chaplygin_ball::Result<()> {
    let start = project_state(
        &DVector::from_column_slice(&[0.5, -0.3, 0.6, 0.4]),
        &DVector::from_column_slice(&[0.2, 0.7, -0.4, 0.5]),
    )?;
    for a in [[2.0, 2.0, 5.0, 5.0], [2.0, 3.0, 5.0, 7.0]] {
        for eps in [-1.0, 0.7, 2.0] {
            let cfg = BallConfig::new(4, &a, eps)?;
            let traj = integrate(&Flow::Reduced(cfg.clone()), &start, (0.0, 10.0), 1e-10, 1e-10)?;
            let drift = |i, j| -> chaplygin_ball::Result<f64> {
                let v: Vec<f64> =
                    traj.states().map(|s| noether_phi(&cfg, i, j, &s).map(|p| p.value)).collect::<Result<_, _>>()?;
                Ok(v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max))
            };
            println!("a = {a:?}, eps = {eps:>4}: phi_12 drift {:.2e}, phi_34 drift {:.2e}", drift(0, 1)?, drift(2, 3)?);
        }
    }
    Ok(())
}
