//! Spheres and the hyperbolic plane under their isotropy groups.

use std::f64::consts::PI;

use weylreduce::actions::action_by_id;
use weylreduce::quadrature::{
    calibrate_c, disk_area, reduced_integrate, reduced_integrate_with_rule, truncated_rule, DeltaMethod,
};

fn main() -> weylreduce::Result<()> {
    for (id, area) in [("sym-s2", 4.0 * PI), ("sym-s3", 2.0 * PI * PI)] {
        let a = action_by_id(id)?;
        let cal = calibrate_c(&a, 32)?;
        let v = reduced_integrate(&a, &cal, &|_| 1.0, 64, DeltaMethod::Numeric)?;
        let cos2 = reduced_integrate(&a, &cal, &|s| s[0].cos().powi(2), 64, DeltaMethod::Numeric)?;
        println!("{id}: c = {:.10}  area {v:.12} (exact {area:.12})  int cos^2 r = {cos2:.12}", cal.c);
    }

    let h = action_by_id("sym-h2")?;
    let cal = calibrate_c(&h, 32)?;
    for r in [0.5, 1.0, 2.0, 4.0] {
        let rule = truncated_rule(&h, 32, r)?;
        let v = reduced_integrate_with_rule(&h, &cal, &|_| 1.0, &rule, DeltaMethod::Numeric)?;
        println!("H^2 disk of radius {r}: {v:.12} (2 pi (cosh r - 1) = {:.12})", disk_area(r));
    }
    Ok(())
}
