//! The entropic dual of ReLU: `lse` is the smooth maximum of `o u - ε H(u)`,
//! and its maximizer is the sigmoid `S(o / ε)`.

use csstd::{binary_entropy, lse, sigmoid, EntropyParam};

fn main() -> csstd::Result<()> {
    for eps in [0.1, 0.5, 1.0] {
        let param = EntropyParam::new(eps)?;
        println!("epsilon = {eps}");
        for o in [-2.0, -0.5, 0.0, 0.5, 2.0] {
            let u = sigmoid(o / eps);
            let dual = o * u - binary_entropy(u, param);
            println!(
                "  o = {o:5.1}  lse = {:.6}  o*u - H(u) at u = S(o/eps): {dual:.6}  relu = {:.1}",
                lse(o, param),
                f64::max(o, 0.0)
            );
        }
    }
    Ok(())
}
