//! Two-phase segmentation of the geometry phantom with and without the
//! regularizer and the convex projection.

use csstd::{
    cs_std_solve, dice, edge_weight, generate_phantom_with_noise, region_variance_feature,
    verify_convex, PhantomKind, SolverConfig,
};

fn main() -> csstd::Result<()> {
    let ph = generate_phantom_with_noise(PhantomKind::Geometry, 256, 7, 0.05)?;
    let o = region_variance_feature(&ph.image, ph.means[0], ph.means[1]);
    let e = edge_weight(&ph.image)?;
    let truth = ph.labels.sublevel_mask(1);

    let full = SolverConfig::default();
    let panels = [
        (
            "sigmoid",
            SolverConfig {
                enable_td: false,
                enable_convex: false,
                ..full.clone()
            },
        ),
        (
            "std",
            SolverConfig {
                enable_convex: false,
                ..full.clone()
            },
        ),
        ("cs-std", full),
    ];
    for (name, cfg) in panels {
        let (u, trace) = cs_std_solve(&o, &e, &cfg)?;
        let mask = u.threshold(0.5);
        let report = verify_convex(&mask, 10_000, 0)?;
        println!(
            "{name:8} iterations {:2}  components {:3}  worst fraction {:.4}  convex {}  dice {:.1}",
            trace.iterations(),
            report.component_count(),
            report.worst_fraction(),
            report.verdict,
            dice(&mask, &truth)?
        );
    }
    Ok(())
}
