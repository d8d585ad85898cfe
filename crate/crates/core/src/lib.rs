//! Variational sigmoid segmentation with a soft thresholding-dynamics
//! regularizer and a convex-shape constraint.
//!
//! The segmentation `u` minimizes `F(u; o) + λ R(u)` where `F` is the
//! entropic dual of the ReLU of the feature `o` (its minimizer is the sigmoid
//! `S(o / ε)`) and `R` is the thresholding-dynamics interface energy. An
//! active-set pseudo projection after every step makes each connected
//! component of the thresholded output convex. Multi-class problems are
//! lifted to nested sublevel channels.
//!
//! ```
//! use csstd::{cs_std_solve, region_variance_feature, EdgeWeight, Field, SolverConfig};
//!
//! let image = Field::from_fn(64, 64, |x, y| {
//!     let (dx, dy) = (x as f64 - 32.0, y as f64 - 32.0);
//!     if dx * dx + dy * dy < 196.0 { 0.75 } else { 0.25 }
//! });
//! let o = region_variance_feature(&image, 0.75, 0.25);
//! let (u, trace) = cs_std_solve(&o, &EdgeWeight::uniform(64, 64), &SolverConfig::default()).unwrap();
//! assert!(u.get(32, 32) > 0.5 && u.get(2, 2) < 0.5);
//! assert!(trace.iterations() >= 1);
//! ```

pub mod cli;
pub mod convexity;
pub mod dual;
pub mod error;
pub mod field;
pub mod pipeline;
pub mod regularizer;
pub mod solver;
pub mod sublevel;

pub use convexity::{
    active_set, isoperimetric_ratio, label_components, project_convex, project_convex_traced,
    verify_convex, violation_field, ComponentReport, ConvexityReport, CurvatureFloor,
    ProjectionStats, RadiusSchedule,
};
pub use dual::{
    binary_entropy, classic_sigmoid, data_energy, lse, regularized_sigmoid, sigmoid, EntropyParam,
};
pub use error::{Error, Result};
pub use field::{
    ball_average, ball_kernel, convolve, gaussian_kernel, gaussian_kernel_with_radius,
    gradient_magnitude, BoundaryPolicy, Field, Kernel, SoftMask,
};
pub use pipeline::{
    dice, difference_features, generate_phantom, generate_phantom_with_noise,
    region_variance_feature, smooth_dice_loss, ClassMeans, Phantom, PhantomKind,
};
pub use regularizer::{
    edge_weight, td_energy, td_perimeter, td_subgradient, EdgeWeight, TdPerimeter,
};
pub use solver::{
    cs_std_solve, cs_std_solve_multiphase, total_energy, EnergyRecord, EnergyTrace, SolverConfig,
};
pub use sublevel::{label_to_sublevel, project_nested, sublevel_to_label, LabelMap, SublevelStack};
