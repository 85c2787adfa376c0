//! The adjoint action of SU(2) on su(2) = R^3: a Gaussian integral as a
//! one-dimensional reduced integral, checked against Monte Carlo.

use std::f64::consts::PI;

use weylreduce::actions::action_by_id;
use weylreduce::cli::registry::function_by_id;
use weylreduce::quadrature::{calibrate_c, mc_integrate_full, reduced_integrate, DeltaMethod};

fn main() -> weylreduce::Result<()> {
    let a = action_by_id("adj-su2")?;
    let cal = calibrate_c(&a, 32)?;
    println!("c = {:.12} (2 sqrt2 pi = {:.12})", cal.c, 2.0 * 2f64.sqrt() * PI);

    for fid in ["gaussian", "quartic_gauss"] {
        let f = function_by_id(fid)?;
        let red = reduced_integrate(&a, &cal, &f.bind_section(&a)?, 64, DeltaMethod::Numeric)?;
        let mc = mc_integrate_full(&a, &f.bind(&a)?, 1_000_000, 7)?;
        println!(
            "{fid:<14} reduced {red:.10}  monte carlo {:.5} +- {:.1e}",
            mc.value, mc.stderr
        );
    }
    println!("(2 pi)^(3/2) = {:.10}, times 15 = {:.10}", (2.0 * PI).powf(1.5), 15.0 * (2.0 * PI).powf(1.5));
    Ok(())
}
