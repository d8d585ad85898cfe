//! Binary convex-shape condition and the active-set pseudo projection.
//!
//! A mask `u` satisfies the condition for radius `r` when
//! `(1 - u(x)) (g_r * (1 - 2u))(x) >= 0` everywhere, where `g_r` is the
//! uniform disk average. Pixels that violate it are background pixels whose
//! disk neighbourhood is mostly object, i.e. concave notches. The projection
//! raises those pixels to 1 and repeats over a cycle of radii.

mod oracle;

pub use oracle::{
    isoperimetric_ratio, label_components, verify_convex, ComponentLabels, ComponentReport,
    ConvexityReport, MAX_VIOLATING_FRACTION,
};

use crate::error::{Error, Result};
use crate::field::{ball_sum, Field, SoftMask};

/// Number of radii cycled by the projection.
pub const SCHEDULE_LEN: usize = 5;

/// Five ball radii, cycled as `radii[t mod 5]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadiusSchedule {
    radii: [usize; SCHEDULE_LEN],
}

impl RadiusSchedule {
    pub fn new(radii: [usize; SCHEDULE_LEN]) -> Result<Self> {
        if radii.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "schedule radii must be >= 1, got {radii:?}"
            )));
        }
        Ok(Self { radii })
    }

    pub fn from_slice(radii: &[usize]) -> Result<Self> {
        let arr: [usize; SCHEDULE_LEN] = radii.try_into().map_err(|_| {
            Error::InvalidParameter(format!(
                "schedule needs exactly {SCHEDULE_LEN} radii, got {}",
                radii.len()
            ))
        })?;
        Self::new(arr)
    }

    pub fn radii(&self) -> [usize; SCHEDULE_LEN] {
        self.radii
    }

    pub fn radius_at(&self, step: usize) -> usize {
        self.radii[step % SCHEDULE_LEN]
    }

    pub fn largest(&self) -> usize {
        self.radii.iter().copied().max().unwrap_or(0)
    }

    /// Errors unless every ball fits a `width x height` domain.
    pub fn check_fits(&self, width: usize, height: usize) -> Result<()> {
        let limit = width.min(height);
        if self.largest() > limit {
            return Err(Error::InvalidParameter(format!(
                "radius {} does not fit a {width}x{height} domain",
                self.largest()
            )));
        }
        Ok(())
    }
}

impl Default for RadiusSchedule {
    fn default() -> Self {
        Self {
            radii: [15, 10, 5, 3, 1],
        }
    }
}

/// Threshold `δ ∈ [0, 1)` of the active set; `δ > 0` rounds shapes off.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct CurvatureFloor(f64);

impl CurvatureFloor {
    pub fn new(delta: f64) -> Result<Self> {
        if (0.0..1.0).contains(&delta) {
            Ok(Self(delta))
        } else {
            Err(Error::InvalidParameter(format!(
                "curvature floor must lie in [0, 1), got {delta}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `(1 - u) (g_r * (1 - 2u))` with zero-background extension, in `[-1, 1]`.
pub fn violation_field(u: &SoftMask, r: usize) -> Result<Field> {
    if r > u.width().min(u.height()) {
        return Err(Error::InvalidParameter(format!(
            "ball radius {r} does not fit a {}x{} mask",
            u.width(),
            u.height()
        )));
    }
    let stencil = BallStencil::new(u.width(), u.height(), r)?;
    let values = stencil.violation(u.values())?;
    Field::new(u.width(), u.height(), values)
}

/// Precomputed per-radius data for evaluating the condition.
///
/// The exterior reads `u = 0`, so each outside cell contributes `1 - 2u = 1`.
/// Sums stay unnormalized until the last step so that binary masks produce
/// exact values and ties at the threshold are not decided by rounding.
struct BallStencil {
    width: usize,
    height: usize,
    radius: usize,
    count: usize,
    outside: Vec<f64>,
}

impl BallStencil {
    fn new(width: usize, height: usize, radius: usize) -> Result<Self> {
        let (inside, count) = ball_sum(&Field::filled(width, height, 1.0), radius)?;
        let outside = inside.values().iter().map(|n| count as f64 - n).collect();
        Ok(Self {
            width,
            height,
            radius,
            count,
            outside,
        })
    }

    fn violation(&self, u: &[f64]) -> Result<Vec<f64>> {
        let signed = Field::from_raw(
            self.width,
            self.height,
            u.iter().map(|v| 1.0 - 2.0 * v).collect(),
        );
        let (sums, _) = ball_sum(&signed, self.radius)?;
        let norm = 1.0 / self.count as f64;
        Ok(sums
            .values()
            .iter()
            .zip(&self.outside)
            .zip(u)
            .map(|((s, o), ui)| (1.0 - ui) * ((s + o) * norm))
            .collect())
    }
}

/// Linear indices of `{x : violation_field(u, r)(x) < δ}`.
pub fn active_set(u: &SoftMask, r: usize, delta: CurvatureFloor) -> Result<Vec<usize>> {
    let field = violation_field(u, r)?;
    Ok(field
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < delta.get())
        .map(|(i, _)| i)
        .collect())
}

/// Bookkeeping from one run of [`project_convex_traced`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionStats {
    /// Iterations performed (`t₂` at exit).
    pub iterations: usize,
    /// True when a full radius cycle raised no pixel.
    pub converged: bool,
    /// Total number of pixel raises over the run.
    pub raised: usize,
}

/// Active-set pseudo projection onto `[0, 1] ∩ C`.
///
/// See [`project_convex_traced`].
pub fn project_convex(
    u: &SoftMask,
    schedule: &RadiusSchedule,
    delta: CurvatureFloor,
    max_inner: usize,
) -> Result<SoftMask> {
    project_convex_traced(u, schedule, delta, max_inner).map(|(m, _)| m)
}

/// Iterates `t₂ = 0, 1, …`: take `r = radii[t₂ mod 5]`, find the active set
/// and set `u = 1` on it. Stops once a whole cycle of five radii leaves `u`
/// unchanged, or after `max_inner` iterations.
///
/// For `δ > 0` pixels already at 1 always belong to the active set, so
/// "unchanged" is tested on the pixels that are actually raised.
pub fn project_convex_traced(
    u: &SoftMask,
    schedule: &RadiusSchedule,
    delta: CurvatureFloor,
    max_inner: usize,
) -> Result<(SoftMask, ProjectionStats)> {
    if max_inner == 0 {
        return Err(Error::InvalidParameter("max_inner must be positive".into()));
    }
    schedule.check_fits(u.width(), u.height())?;
    let (w, h) = u.dims();
    let stencils = schedule
        .radii()
        .iter()
        .map(|&r| BallStencil::new(w, h, r))
        .collect::<Result<Vec<_>>>()?;

    let mut values = u.values().to_vec();
    let mut quiet = 0usize;
    let mut raised = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;
    while iterations < max_inner {
        let violation = stencils[iterations % SCHEDULE_LEN].violation(&values)?;
        let mut changed = 0usize;
        for (v, viol) in values.iter_mut().zip(violation) {
            if *v < 1.0 && viol < delta.get() {
                *v = 1.0;
                changed += 1;
            }
        }
        iterations += 1;
        raised += changed;
        if changed == 0 {
            quiet += 1;
            if quiet >= SCHEDULE_LEN {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok((
        SoftMask::from_raw(w, h, values),
        ProjectionStats {
            iterations,
            converged,
            raised,
        },
    ))
}
