//! Thresholding-dynamics interface energy: perimeter estimates of disks and
//! the linearized regularizer used by each solver step.

use csstd::{
    gaussian_kernel, td_energy, td_perimeter, td_subgradient, EdgeWeight, Field, SoftMask,
};

fn disk(size: usize, r: f64) -> SoftMask {
    let c = size as f64 / 2.0;
    let f = Field::from_fn(size, size, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        if dx * dx + dy * dy <= r * r {
            1.0
        } else {
            0.0
        }
    });
    SoftMask::new(f).expect("binary mask")
}

fn main() -> csstd::Result<()> {
    for r in [10.0, 20.0, 40.0] {
        let p = td_perimeter(&disk(128, r), 2.0)?;
        println!(
            "r = {r:4}: td perimeter {:8.2}  (2 pi r = {:8.2})",
            p.value,
            2.0 * std::f64::consts::PI * r
        );
    }

    let u = disk(32, 8.0);
    let k = gaussian_kernel(1.0)?;
    let e = EdgeWeight::uniform(32, 32);
    let p = td_subgradient(&u, &e, &k)?;
    println!("R(u) = {:.3}", td_energy(&u, &e, &k)?);
    println!(
        "subgradient: inside {:.3}, on the rim {:.3}, outside {:.3}",
        p.get(16, 16),
        p.get(24, 16),
        p.get(1, 1)
    );
    Ok(())
}
