//! Active-set projection of a non-convex shape, checked with the convexity oracle.

use csstd::{
    isoperimetric_ratio, project_convex_traced, verify_convex, CurvatureFloor, Field,
    RadiusSchedule, SoftMask,
};

fn main() -> csstd::Result<()> {
    // an L made of two overlapping rectangles
    let l = Field::from_fn(80, 80, |x, y| {
        let bar = (15..65).contains(&x) && (50..65).contains(&y);
        let post = (15..30).contains(&x) && (15..65).contains(&y);
        if bar || post {
            1.0
        } else {
            0.0
        }
    });
    let before = verify_convex(&l, 10_000, 0)?;
    println!(
        "input: area {} verdict {} worst fraction {:.3}",
        l.sum(),
        before.verdict,
        before.worst_fraction()
    );

    let schedule = RadiusSchedule::default();
    for delta in [0.0, 0.15] {
        let (u, stats) = project_convex_traced(
            &SoftMask::new(l.clone())?,
            &schedule,
            CurvatureFloor::new(delta)?,
            500,
        )?;
        let mask = u.threshold(0.5);
        let after = verify_convex(&mask, 10_000, 0)?;
        println!(
            "delta {delta}: {} iterations, converged {}, {} pixels raised, verdict {}, isoperimetric ratio {:.3}",
            stats.iterations,
            stats.converged,
            stats.raised,
            after.verdict,
            isoperimetric_ratio(&mask)?
        );
    }
    Ok(())
}
