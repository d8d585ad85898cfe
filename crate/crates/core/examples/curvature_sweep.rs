//! Effect of the curvature floor `δ` on the roundness of a segmented star.

use csstd::{
    cs_std_solve, edge_weight, generate_phantom, isoperimetric_ratio, region_variance_feature,
    CurvatureFloor, PhantomKind, RadiusSchedule, SolverConfig,
};

fn main() -> csstd::Result<()> {
    let ph = generate_phantom(PhantomKind::Star, 96, 0)?;
    let o = region_variance_feature(&ph.image, ph.means[0], ph.means[1]);
    let e = edge_weight(&ph.image)?;
    let base = SolverConfig {
        schedule: RadiusSchedule::new([25, 25, 25, 25, 1])?,
        outer_iters: 20,
        ..SolverConfig::default()
    };
    for delta in [0.0, 0.05, 0.15, 0.3] {
        let cfg = SolverConfig {
            delta: CurvatureFloor::new(delta)?,
            ..base.clone()
        };
        let (u, _) = cs_std_solve(&o, &e, &cfg)?;
        let mask = u.threshold(0.5);
        println!(
            "delta {delta:4}: area {:5}  isoperimetric ratio {:.4}",
            mask.sum(),
            isoperimetric_ratio(&mask)?
        );
    }
    Ok(())
}
