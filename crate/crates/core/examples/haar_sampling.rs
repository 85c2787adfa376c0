//! Haar sampling on SU(n) and SO(n): trace moments against representation
//! theory (E|tr g|^(2k) = k! on SU(n) for k <= n).

use weylreduce::lie_core::{haar_sample, GroupDescriptor};
use weylreduce::rng::stream_rng;

fn main() -> weylreduce::Result<()> {
    let n = 200_000;
    for g in [
        GroupDescriptor::special_unitary(2)?,
        GroupDescriptor::special_unitary(3)?,
        GroupDescriptor::special_unitary(4)?,
        GroupDescriptor::special_orthogonal(3)?,
    ] {
        let mut rng = stream_rng(3, 0);
        let mut m = [0.0; 3];
        for _ in 0..n {
            let t = haar_sample(&g, &mut rng).trace().norm_sqr();
            m[0] += t;
            m[1] += t * t;
            m[2] += t * t * t;
        }
        println!(
            "{g}: E|tr|^2 = {:.3}  E|tr|^4 = {:.3}  E|tr|^6 = {:.3}",
            m[0] / n as f64,
            m[1] / n as f64,
            m[2] / n as f64
        );
    }
    Ok(())
}
