//! Lists the cataloged polar actions with their root data.

use weylreduce::actions::catalog;

fn main() {
    for a in catalog() {
        println!(
            "{:<12} {:<8} section {}  orbits {}  |W| = {}",
            a.id,
            a.group.to_string(),
            a.section_dim,
            a.orbit_dim(),
            a.weyl_order
        );
        match &a.roots {
            Some(r) => {
                for (alpha, m) in r.positive_roots.iter().zip(&r.multiplicities) {
                    println!("    root {alpha:?}  multiplicity {m}");
                }
            }
            None => println!("    no root description, numeric delta only"),
        }
    }
}
