//! Newton flow with the gyroscopic-type force `F`, reparametrized by `nu`, against geodesics of
//! the conformal metric `f^2 (dq, dq)`; then the Maupertuis special case `nu = f^2 = h - V`.

use chaplygin_ball::analysis::{flat_testbed, jacobi_energy_report};
use chaplygin_ball::fields::{AffinePower, FlatFieldConfig, NuField};
use chaplygin_ball::integrate::IntegratorOptions;
use nalgebra::DVector;

fn main() -> chaplygin_ball::Result<()> {
    let opts = IntegratorOptions::with_tolerances(1e-10, 1e-10);
    let fields = FlatFieldConfig::new(
        AffinePower::new(2.0, &[0.3, 0.5], 0.5),
        NuField::Independent(AffinePower::new(1.0, &[0.2, 0.1], 1.5)),
        None,
        &[-4.0, -4.0],
        &[4.0, 4.0],
    )?;
    let q0 = DVector::from_column_slice(&[0.4, -0.2]);
    let v0 = DVector::from_column_slice(&[0.3, 0.5]);
    let out = flat_testbed(&fields, &q0, &v0, (0.0, 5.0), &opts)?;
    for r in &out.reports {
        println!("{:<30} max_abs_dev = {:.3e}", r.quantity, r.max_abs_dev);
    }

    let (h, k) = (3.0, [1.0, 3.0]);
    let jacobi = FlatFieldConfig::jacobi(h, &k, &[-1.5, -0.9], &[1.5, 0.9])?;
    let q0 = DVector::from_column_slice(&[0.5, 0.2]);
    let v_pot = 0.5 * (k[0] * 0.25 + k[1] * 0.04);
    let speed = (2.0 * (h - v_pot)).sqrt();
    let v0 = DVector::from_column_slice(&[0.8, 0.6]) * speed;
    let out = flat_testbed(&jacobi, &q0, &v0, (0.0, 0.4), &opts)?;
    let (_, report) = jacobi_energy_report(&jacobi, &out.newton, h)?;
    for r in out.reports.iter().chain([&report]) {
        println!("jacobi {:<23} max_abs_dev = {:.3e}", r.quantity, r.max_abs_dev);
    }
    Ok(())
}
