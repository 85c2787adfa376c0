//! Orthonormality of SU(2) characters through the reduced formula: the
//! integral over the group becomes a one-dimensional trapezoid sum.

use weylreduce::actions::action_by_id;
use weylreduce::quadrature::{calibrate_c, reduced_integrate, DeltaMethod};

fn chi(n: usize, t: f64) -> f64 {
    (0..=n).map(|k| ((n as f64 - 2.0 * k as f64) * t).cos()).sum()
}

fn main() -> weylreduce::Result<()> {
    let a = action_by_id("conj-su2")?;
    let cal = calibrate_c(&a, 64)?;
    println!("c = {}, |W| = {}", cal.c, cal.weyl_order);
    for m in 0..5 {
        let row: Vec<String> = (0..5)
            .map(|n| {
                let f = |s: &[f64]| chi(m, s[0]) * chi(n, s[0]);
                let v = reduced_integrate(&a, &cal, &f, 16, DeltaMethod::Numeric).unwrap();
                format!("{v:8.1e}")
            })
            .collect();
        println!("{}", row.join(" "));
    }
    Ok(())
}
