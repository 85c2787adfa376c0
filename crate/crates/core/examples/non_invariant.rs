//! Functions that are not invariant: the reduced side averages over each
//! orbit, and the L^1 norm of the lifted function is |W| times that of f.

use weylreduce::actions::action_by_id;
use weylreduce::cli::registry::function_by_id;
use weylreduce::quadrature::{
    calibrate_c, mc_integrate_full, psi_norm_check, reduced_integrate_general, DeltaMethod,
};

fn main() -> weylreduce::Result<()> {
    let a = action_by_id("conj-su3")?;
    let cal = calibrate_c(&a, 24)?;
    let f = function_by_id("abs_g12_sq")?.bind(&a)?;
    let red = reduced_integrate_general(&a, &cal, &f, 24, 500, 11, DeltaMethod::Numeric)?;
    let full = mc_integrate_full(&a, &f, 500_000, 12)?;
    println!("int |g_12|^2 over SU(3), exact 1/3");
    println!("  reduced     {:.5} +- {:.1e}", red.value, red.stderr);
    println!("  monte carlo {:.5} +- {:.1e}", full.value, full.stderr);

    let a = action_by_id("conj-su2")?;
    let cal = calibrate_c(&a, 32)?;
    let f = function_by_id("abs_trace_sq")?.bind(&a)?;
    let (lhs, rhs) = psi_norm_check(&a, &cal, &f, 32, 500_000, 13)?;
    println!("L^1 norms on SU(2): lifted {:.5} +- {:.1e}, |W| int |f| = {:.5} +- {:.1e}",
        lhs.value, lhs.stderr, rhs.value, rhs.stderr);
    Ok(())
}
