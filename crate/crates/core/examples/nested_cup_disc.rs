//! Three-class segmentation through nested sublevel channels, the way a cup
//! sits inside a disc.

use csstd::{
    cs_std_solve_multiphase, dice, difference_features, edge_weight, generate_phantom_with_noise,
    sublevel_to_label, verify_convex, ClassMeans, PhantomKind, SolverConfig,
};

fn main() -> csstd::Result<()> {
    let ph = generate_phantom_with_noise(PhantomKind::NestedDisks, 192, 3, 0.05)?;
    let means = ClassMeans::new(ph.means.clone())?;
    let features = difference_features(&ph.image, &means);
    let cfg = SolverConfig::default().with_channels(features.len());
    let (stack, trace) = cs_std_solve_multiphase(&features, &edge_weight(&ph.image)?, &cfg)?;

    println!(
        "iterations {}, nested {}",
        trace.iterations(),
        stack.first_nesting_violation().is_none()
    );
    for (g, channel) in stack.channels().iter().enumerate() {
        let mask = channel.threshold(0.5);
        let level = g as u8 + 1;
        println!(
            "channel {level}: convex {}  dice {:.1}",
            verify_convex(&mask, 10_000, 0)?.verdict,
            dice(&mask, &ph.labels.sublevel_mask(level))?
        );
    }
    let labels = sublevel_to_label(&stack);
    let counts: Vec<usize> = (1..=labels.classes())
        .map(|c| labels.labels().iter().filter(|&&l| l == c).count())
        .collect();
    println!("pixels per class {counts:?}");
    Ok(())
}
