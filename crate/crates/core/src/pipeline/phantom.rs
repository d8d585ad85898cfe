//! Synthetic test images with known ground truth.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::sublevel::LabelMap;

/// Object/background means for two-class phantoms, ordered by label.
pub const BINARY_MEANS: [f64; 2] = [0.75, 0.25];
/// Cup/disc/background means for the nested phantom, ordered by label.
pub const NESTED_MEANS: [f64; 3] = [0.2, 0.5, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    /// A few randomly placed, well separated disks.
    Disks,
    /// One five-pointed star.
    Star,
    /// One plus sign.
    Cross,
    /// Cup inside disc inside background (three labels).
    NestedDisks,
    /// Two parallel bars with a narrow gap.
    Bars,
    /// Six objects on a grid: star, disk, cross, square, L-shape, triangle.
    Geometry,
}

impl PhantomKind {
    pub fn name(self) -> &'static str {
        match self {
            PhantomKind::Disks => "disks",
            PhantomKind::Star => "star",
            PhantomKind::Cross => "cross",
            PhantomKind::NestedDisks => "nested_disks",
            PhantomKind::Bars => "bars",
            PhantomKind::Geometry => "geometry",
        }
    }
}

impl FromStr for PhantomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "disks" => PhantomKind::Disks,
            "star" => PhantomKind::Star,
            "cross" => PhantomKind::Cross,
            "nested_disks" | "nested" => PhantomKind::NestedDisks,
            "bars" => PhantomKind::Bars,
            "geometry" => PhantomKind::Geometry,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown phantom kind {other:?}"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    /// Intensities in `[0, 1]`.
    pub image: Field,
    pub labels: LabelMap,
    /// Class means used to paint `image`, ordered by label.
    pub means: Vec<f64>,
}

/// Noise-free phantom.
pub fn generate_phantom(kind: PhantomKind, size: usize, rng_seed: u64) -> Result<Phantom> {
    generate_phantom_with_noise(kind, size, rng_seed, 0.0)
}

/// Phantom with additive Gaussian noise of standard deviation `noise_std`,
/// clamped back to `[0, 1]`.
pub fn generate_phantom_with_noise(
    kind: PhantomKind,
    size: usize,
    rng_seed: u64,
    noise_std: f64,
) -> Result<Phantom> {
    if size < 64 {
        return Err(Error::InvalidParameter(format!(
            "phantom size must be >= 64, got {size}"
        )));
    }
    if !noise_std.is_finite() || noise_std < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise level must be >= 0, got {noise_std}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let s = size as f64;
    let c = s / 2.0;
    let shapes: Vec<Shape> = match kind {
        PhantomKind::Star => vec![Shape::star(c, c, 0.35 * s, 0.15 * s)],
        PhantomKind::Cross => vec![Shape::Cross {
            cx: c,
            cy: c,
            arm: 0.3 * s,
            half_width: 0.08 * s,
        }],
        PhantomKind::Bars => {
            let (hw, gap, hh) = (0.06 * s, 0.05 * s, 0.3 * s);
            vec![
                Shape::Rect {
                    x0: c - gap / 2.0 - 2.0 * hw,
                    x1: c - gap / 2.0,
                    y0: c - hh,
                    y1: c + hh,
                },
                Shape::Rect {
                    x0: c + gap / 2.0,
                    x1: c + gap / 2.0 + 2.0 * hw,
                    y0: c - hh,
                    y1: c + hh,
                },
            ]
        }
        PhantomKind::Disks => random_disks(&mut rng, s),
        PhantomKind::Geometry => geometry(s),
        PhantomKind::NestedDisks => Vec::new(),
    };

    let (classes, means, labels): (u8, Vec<f64>, Vec<u8>) = if kind == PhantomKind::NestedDisks {
        let disc = Shape::Disk {
            cx: c,
            cy: c,
            r: 0.3 * s,
        };
        let cup = Shape::Disk {
            cx: c + 0.05 * s,
            cy: c - 0.03 * s,
            r: 0.14 * s,
        };
        let labels = raster(size, |x, y| {
            if cup.contains(x, y) {
                1
            } else if disc.contains(x, y) {
                2
            } else {
                3
            }
        });
        (3, NESTED_MEANS.to_vec(), labels)
    } else {
        let labels = raster(size, |x, y| {
            if shapes.iter().any(|sh| sh.contains(x, y)) {
                1
            } else {
                2
            }
        });
        (2, BINARY_MEANS.to_vec(), labels)
    };

    let noise = Normal::new(0.0, noise_std.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let values = labels
        .iter()
        .map(|&l| {
            let base = means[l as usize - 1];
            if noise_std > 0.0 {
                (base + noise.sample(&mut rng)).clamp(0.0, 1.0)
            } else {
                base
            }
        })
        .collect();
    Ok(Phantom {
        image: Field::new(size, size, values)?,
        labels: LabelMap::new(size, size, classes, labels)?,
        means,
    })
}

fn raster(size: usize, f: impl Fn(f64, f64) -> u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            out.push(f(x as f64, y as f64));
        }
    }
    out
}

fn random_disks(rng: &mut ChaCha8Rng, s: f64) -> Vec<Shape> {
    let mut placed: Vec<(f64, f64, f64)> = Vec::new();
    let margin = 0.06 * s;
    let mut attempts = 0;
    while placed.len() < 4 && attempts < 2000 {
        attempts += 1;
        let r = rng.random_range(s / 14.0..s / 8.0);
        let cx = rng.random_range(r + margin..s - r - margin);
        let cy = rng.random_range(r + margin..s - r - margin);
        let clear = placed
            .iter()
            .all(|&(x, y, rr)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() > r + rr + margin);
        if clear {
            placed.push((cx, cy, r));
        }
    }
    placed
        .into_iter()
        .map(|(cx, cy, r)| Shape::Disk { cx, cy, r })
        .collect()
}

fn geometry(s: f64) -> Vec<Shape> {
    let (cw, ch) = (s / 3.0, s / 2.0);
    let a = 0.38 * cw.min(ch);
    let centre = |col: usize, row: usize| ((col as f64 + 0.5) * cw, (row as f64 + 0.5) * ch);
    let (x0, y0) = centre(0, 0);
    let (x1, y1) = centre(1, 0);
    let (x2, y2) = centre(2, 0);
    let (x3, y3) = centre(0, 1);
    let (x4, y4) = centre(1, 1);
    let (x5, y5) = centre(2, 1);
    let tri: Vec<(f64, f64)> = (0..3)
        .map(|i| {
            let t = -PI / 2.0 + 2.0 * PI * i as f64 / 3.0;
            (x5 + a * t.cos(), y5 + a * t.sin())
        })
        .collect();
    vec![
        Shape::star(x0, y0, a, 0.45 * a),
        Shape::Disk {
            cx: x1,
            cy: y1,
            r: 0.8 * a,
        },
        Shape::Cross {
            cx: x2,
            cy: y2,
            arm: 0.9 * a,
            half_width: 0.3 * a,
        },
        Shape::Rect {
            x0: x3 - 0.7 * a,
            x1: x3 + 0.7 * a,
            y0: y3 - 0.7 * a,
            y1: y3 + 0.7 * a,
        },
        Shape::Polygon(vec![
            (x4 - 0.8 * a, y4 - 0.8 * a),
            (x4 - 0.2 * a, y4 - 0.8 * a),
            (x4 - 0.2 * a, y4 + 0.2 * a),
            (x4 + 0.8 * a, y4 + 0.2 * a),
            (x4 + 0.8 * a, y4 + 0.8 * a),
            (x4 - 0.8 * a, y4 + 0.8 * a),
        ]),
        Shape::Polygon(tri),
    ]
}

#[derive(Debug, Clone)]
enum Shape {
    Disk {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Rect {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    Cross {
        cx: f64,
        cy: f64,
        arm: f64,
        half_width: f64,
    },
    Polygon(Vec<(f64, f64)>),
}

impl Shape {
    fn star(cx: f64, cy: f64, outer: f64, inner: f64) -> Shape {
        let pts = (0..10)
            .map(|i| {
                let t = -PI / 2.0 + PI * i as f64 / 5.0;
                let r = if i % 2 == 0 { outer } else { inner };
                (cx + r * t.cos(), cy + r * t.sin())
            })
            .collect();
        Shape::Polygon(pts)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Disk { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) <= r * r,
            Shape::Rect { x0, x1, y0, y1 } => x >= *x0 && x <= *x1 && y >= *y0 && y <= *y1,
            Shape::Cross {
                cx,
                cy,
                arm,
                half_width,
            } => {
                let (dx, dy) = ((x - cx).abs(), (y - cy).abs());
                (dx <= *half_width && dy <= *arm) || (dy <= *half_width && dx <= *arm)
            }
            Shape::Polygon(pts) => {
                let mut inside = false;
                let n = pts.len();
                for i in 0..n {
                    let (xi, yi) = pts[i];
                    let (xj, yj) = pts[(i + n - 1) % n];
                    if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }
}
