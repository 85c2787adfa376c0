//! Orbit volumes, exceptional orbits and an action with no root description.

use std::f64::consts::PI;

use weylreduce::actions::action_by_id;
use weylreduce::jacobians::{continuity_along_path, delta_numeric};
use weylreduce::quadrature::{calibrate_c, orbit_volume, riemannian_orbit_constant};

fn main() -> weylreduce::Result<()> {
    let so3 = action_by_id("conj-so3")?;
    let cal = calibrate_c(&so3, 32)?;
    println!("SO(3) conjugation, vol(G/T) = {:.10}", riemannian_orbit_constant(&so3, &cal)?);
    for t in [0.5, 1.5, 3.0, PI] {
        let reg = so3.is_regular(&[t])?;
        let vol = orbit_volume(&so3, &cal, &[t]).map(|v| format!("{v:.8}")).unwrap_or("-".into());
        println!(
            "  theta = {t:.4}  regular {}  index {:?}  delta {:.8}  orbit volume {vol}",
            reg.regular,
            reg.exceptional_index,
            delta_numeric(&so3, &[t])?
        );
    }
    // delta stays continuous across the exceptional orbit at theta = pi.
    let cont = continuity_along_path(&so3, &[PI], &[1.0], 1e-3, 100)?;
    println!("  gaps at pi: {:.1e} / {:.1e}", cont.left_gap, cont.right_gap);

    // SO(2) rotating S^2 about the x-axis, section the great circle through
    // the poles of that axis.
    let h = action_by_id("hermann-s2")?;
    let hcal = calibrate_c(&h, 32)?;
    println!("Hermann action: |W| = {}, c = {:.10}", h.weyl_order, hcal.c);
    for t in [0.0, 0.7, PI / 2.0, 2.5] {
        println!("  t = {t:.4}  delta {:.10}  |cos t|/sqrt 2 = {:.10}", delta_numeric(&h, &[t])?, t.cos().abs() / 2f64.sqrt());
    }
    Ok(())
}
