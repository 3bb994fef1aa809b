//! Sphero-conical coordinates of a point, the corresponding rolling variables and the
//! three-dimensional quasi-sphero-conical check.

use chaplygin_ball::coords::{
    bm_correspondence_check, bm_params, conic_residual, gamma_from_u, signed_from_squares, u_from_x, x_from_u,
};
use chaplygin_ball::geometry::x_to_gamma;
use chaplygin_ball::BallConfig;
use nalgebra::DVector;

fn main() -> chaplygin_ball::Result<()> {
    let cfg = BallConfig::new(3, &[1.0, 0.5, 1.0 / 3.0], -1.0)?;
    let x = DVector::from_element(3, 1.0 / 3.0f64.sqrt());
    let u = u_from_x(&cfg, &x)?;
    println!(
        "u = {:?} (2 -+ 1/sqrt(3) = {:.15}, {:.15})",
        u.values(),
        2.0 - 1.0 / 3.0f64.sqrt(),
        2.0 + 1.0 / 3.0f64.sqrt()
    );
    println!("x^2 from u = {:?}", x_from_u(&cfg, &u)?.as_slice());

    let gamma = x_to_gamma(&cfg, &x);
    let from_u = signed_from_squares(&gamma_from_u(&cfg, &u)?, &gamma);
    println!("gamma = {:?}, from u = {:?}", gamma.as_slice(), from_u.as_slice());

    let j = bm_params(&cfg)?;
    let det = cfg.a().product();
    println!("J = {j:?}, correspondence residual {:.2e}", bm_correspondence_check(&cfg, &u)?);
    for uk in u.values() {
        println!(
            "conic through gamma at z = {:.6}: residual {:.2e}",
            det * uk,
            conic_residual(&cfg, &gamma, det * uk)?
        );
    }
    Ok(())
}
