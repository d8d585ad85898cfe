//! Dice measure of hard masks and the smooth Dice loss of soft ones.

use csstd::{dice, smooth_dice_loss, Field, SoftMask};

fn rect(x0: usize, x1: usize) -> Field {
    Field::from_fn(20, 10, |x, _| if (x0..x1).contains(&x) { 1.0 } else { 0.0 })
}

fn main() -> csstd::Result<()> {
    let truth = rect(0, 10);
    for (name, pred) in [
        ("same", rect(0, 10)),
        ("shifted by 4", rect(4, 14)),
        ("disjoint", rect(10, 20)),
    ] {
        println!("{name:13} dice {:5.1}", dice(&pred, &truth)?);
    }
    for v in [1.0, 0.9, 0.5, 0.1] {
        let soft = SoftMask::new(truth.map(|t| t * v))?;
        println!(
            "soft mask at {v}: smooth dice loss {:.4}",
            smooth_dice_loss(&soft, &truth)?
        );
    }
    Ok(())
}
