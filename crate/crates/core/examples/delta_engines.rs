//! Numeric delta against the closed forms, and what happens near a wall.

use weylreduce::actions::action_by_id;
use weylreduce::jacobians::{cross_validate, delta_closed, delta_numeric, vanishing_order, wall_probe};

fn main() -> weylreduce::Result<()> {
    for id in ["conj-su3", "adj-su3", "srep-su3so3", "sym-s3", "sym-h2"] {
        let a = action_by_id(id)?;
        let r = cross_validate(&a, 100, 0.1, 1)?;
        println!(
            "{id:<12} kappa = {:.6}  max rel error {:.2e}",
            r.calibration_scale,
            r.max_abs_rel_error.unwrap_or(f64::NAN)
        );
    }

    let a = action_by_id("conj-su2")?;
    println!("\nconj-su2 at theta, numeric vs 4 sin^2 theta:");
    for t in [0.3, 1.0, 2.0] {
        println!(
            "  {t:.1}  {:.12}  {:.12}",
            delta_numeric(&a, &[t])?,
            delta_closed(&a, &[t])?.unwrap()
        );
    }

    // delta ~ eps^k approaching a wall, k the sum of multiplicities of the
    // roots vanishing there.
    for id in ["conj-su3", "sym-s3", "srep-su3so3"] {
        let a = action_by_id(id)?;
        let probe = wall_probe(&a)?;
        let k = vanishing_order(&a, &probe, &[1e-1, 1e-2, 1e-3, 1e-4])?;
        println!("{id:<12} vanishing order {k:.3} (expected {})", probe.expected_order);
    }
    Ok(())
}
