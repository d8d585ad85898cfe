//! Brute-force convexity check on binary masks.
//!
//! Independent of the projection: components are labelled with
//! 4-connectivity, random pixel pairs are joined with a Bresenham segment,
//! and a pair is counted as violating when its segment leaves the component.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{convolve, gaussian_kernel, BoundaryPolicy, Field};

/// A component passes when strictly fewer than this fraction of sampled
/// segments leave it.
pub const MAX_VIOLATING_FRACTION: f64 = 0.01;

/// 4-connected component labels; `0` is background, components are `1..=count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabels {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub count: usize,
}

impl ComponentLabels {
    /// Pixel indices of component `label`, in raster order.
    pub fn pixels_of(&self, label: u32) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect()
    }
}

fn check_binary(mask: &Field) -> Result<()> {
    if let Some(v) = mask.values().iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidInput(format!(
            "mask must be binary, found value {v}"
        )));
    }
    Ok(())
}

/// Labels the 4-connected components of the 1-pixels of a binary mask.
pub fn label_components(mask: &Field) -> Result<ComponentLabels> {
    check_binary(mask)?;
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if mask.values()[start] == 0.0 || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if mask.values()[j] == 1.0 && labels[j] == 0 {
                    labels[j] = count;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
    }
    Ok(ComponentLabels {
        width: w,
        height: h,
        labels,
        count: count as usize,
    })
}

/// Per-component verdict data.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub label: u32,
    /// Pixel count.
    pub area: usize,
    /// Length of the iso-contour polygon around the component.
    pub perimeter: f64,
    /// Fraction of sampled segments that leave the component, in `[0, 1]`.
    pub violating_fraction: f64,
    /// `4π A / P²` of the iso-contour polygon (1 for a disk).
    pub isoperimetric_ratio: f64,
}

impl ComponentReport {
    pub fn passes(&self) -> bool {
        self.violating_fraction < MAX_VIOLATING_FRACTION
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub components: Vec<ComponentReport>,
    /// True iff every component passes.
    pub verdict: bool,
}

impl ConvexityReport {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn worst_fraction(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.violating_fraction)
            .fold(0.0, f64::max)
    }
}

/// Samples `sample_pairs` pixel pairs per component and reports how many
/// connecting segments leave the component.
pub fn verify_convex(mask: &Field, sample_pairs: usize, rng_seed: u64) -> Result<ConvexityReport> {
    if sample_pairs == 0 {
        return Err(Error::InvalidParameter(
            "sample_pairs must be positive".into(),
        ));
    }
    let labels = label_components(mask)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let w = labels.width;
    let mut pixels: Vec<Vec<usize>> = vec![Vec::new(); labels.count];
    for (i, &l) in labels.labels.iter().enumerate() {
        if l > 0 {
            pixels[l as usize - 1].push(i);
        }
    }

    let mut components = Vec::with_capacity(labels.count);
    for (k, members) in pixels.iter().enumerate() {
        let label = k as u32 + 1;
        let mut violating = 0usize;
        if members.len() > 1 {
            for _ in 0..sample_pairs {
                let a = members[rng.random_range(0..members.len())];
                let b = members[rng.random_range(0..members.len())];
                let leaves = !segment_pixels(
                    ((a % w) as i64, (a / w) as i64),
                    ((b % w) as i64, (b / w) as i64),
                )
                .all(|(x, y)| labels.labels[y as usize * w + x as usize] == label);
                if leaves {
                    violating += 1;
                }
            }
        }
        let shape = contour_measure(&labels, label, members);
        components.push(ComponentReport {
            label,
            area: members.len(),
            perimeter: shape.length,
            violating_fraction: violating as f64 / sample_pairs as f64,
            isoperimetric_ratio: shape.ratio(),
        });
    }
    let verdict = components.iter().all(ComponentReport::passes);
    Ok(ConvexityReport {
        components,
        verdict,
    })
}

/// `4π A / P²` of the largest component.
pub fn isoperimetric_ratio(mask: &Field) -> Result<f64> {
    let labels = label_components(mask)?;
    if labels.count == 0 {
        return Err(Error::InvalidInput("mask has no object pixels".into()));
    }
    let mut areas = vec![0usize; labels.count];
    for &l in &labels.labels {
        if l > 0 {
            areas[l as usize - 1] += 1;
        }
    }
    // ties go to the lowest label
    let (best, _) =
        areas.iter().enumerate().fold(
            (0usize, 0usize),
            |acc, (i, &a)| if a > acc.1 { (i, a) } else { acc },
        );
    let label = best as u32 + 1;
    let members = labels.pixels_of(label);
    Ok(contour_measure(&labels, label, &members).ratio())
}

/// Integer segment from `a` to `b` (Bresenham), endpoints included.
fn segment_pixels(a: (i64, i64), b: (i64, i64)) -> impl Iterator<Item = (i64, i64)> {
    let (dx, dy) = ((b.0 - a.0).abs(), -(b.1 - a.1).abs());
    let (sx, sy) = (
        if a.0 < b.0 { 1 } else { -1 },
        if a.1 < b.1 { 1 } else { -1 },
    );
    let mut err = dx + dy;
    let mut cur = Some(a);
    std::iter::from_fn(move || {
        let p = cur?;
        if p == b {
            cur = None;
        } else {
            let mut next = p;
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                next.0 += sx;
            }
            if e2 <= dx {
                err += dx;
                next.1 += sy;
            }
            cur = Some(next);
        }
        Some(p)
    })
}

struct ContourMeasure {
    area: f64,
    length: f64,
}

impl ContourMeasure {
    fn ratio(&self) -> f64 {
        if self.length == 0.0 {
            0.0
        } else {
            4.0 * PI * self.area / (self.length * self.length)
        }
    }
}

/// Width of the Gaussian applied to a component before its contour is traced.
const CONTOUR_SIGMA: f64 = 0.6;

/// Area and length of the half-level iso-contour of one component.
///
/// The component's indicator is smoothed with a narrow Gaussian so the
/// contour follows the shape rather than the pixel staircase; components too
/// small to survive smoothing are traced on the raw indicator instead.
fn contour_measure(labels: &ComponentLabels, label: u32, members: &[usize]) -> ContourMeasure {
    debug_assert!(members.iter().all(|&i| labels.labels[i] == label));
    let w = labels.width;
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for &i in members {
        let (x, y) = (i % w, i / w);
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let kernel = gaussian_kernel(CONTOUR_SIGMA).expect("positive sigma");
    let pad = kernel.radius() + 1;
    let (cw, ch) = (x1 - x0 + 1 + 2 * pad, y1 - y0 + 1 + 2 * pad);
    let mut crop = vec![0.0; cw * ch];
    for &i in members {
        let (x, y) = (i % w - x0 + pad, i / w - y0 + pad);
        crop[y * cw + x] = 1.0;
    }
    let raw = Field::from_raw(cw, ch, crop);
    let smooth =
        convolve(&raw, &kernel, BoundaryPolicy::ZeroBackground).expect("padded crop fits kernel");
    if smooth.max() >= 0.5 {
        iso_contour(&smooth, 0.5)
    } else {
        iso_contour(&raw, 0.5)
    }
}

/// Marching squares with linear interpolation along cell edges. The region
/// is `{f >= level}`; a saddle cell joins its inside corners only when the
/// cell mean is strictly above `level`.
fn iso_contour(f: &Field, level: f64) -> ContourMeasure {
    let (w, h) = f.dims();
    let mut area = 0.0;
    let mut length = 0.0;
    for cy in 0..h - 1 {
        for cx in 0..w - 1 {
            let corners = [
                (cx as f64, cy as f64, f.get(cx, cy)),
                (cx as f64 + 1.0, cy as f64, f.get(cx + 1, cy)),
                (cx as f64 + 1.0, cy as f64 + 1.0, f.get(cx + 1, cy + 1)),
                (cx as f64, cy as f64 + 1.0, f.get(cx, cy + 1)),
            ];
            let inside = corners.map(|c| c.2 >= level);
            let n = inside.iter().filter(|&&b| b).count();
            if n == 0 {
                continue;
            }
            if n == 4 {
                area += 1.0;
                continue;
            }
            // crossing on edge i runs from corner i to corner i+1
            let crossing = |i: usize| -> (f64, f64) {
                let (ax, ay, av) = corners[i];
                let (bx, by, bv) = corners[(i + 1) % 4];
                let t = (level - av) / (bv - av);
                (ax + t * (bx - ax), ay + t * (by - ay))
            };
            let saddle = n == 2 && inside[0] == inside[2];
            let joined = saddle && corners.iter().map(|c| c.2).sum::<f64>() / 4.0 > level;
            if saddle && !joined {
                for i in (0..4).filter(|&i| inside[i]) {
                    let p = (corners[i].0, corners[i].1);
                    let a = crossing(i);
                    let b = crossing((i + 3) % 4);
                    area += polygon_area(&[p, a, b]);
                    length += dist(a, b);
                }
                continue;
            }
            let mut poly = Vec::with_capacity(6);
            let mut cuts = Vec::with_capacity(4);
            for i in 0..4 {
                if inside[i] {
                    poly.push((corners[i].0, corners[i].1));
                }
                if inside[i] != inside[(i + 1) % 4] {
                    cuts.push(crossing(i));
                    poly.push(crossing(i));
                }
            }
            area += polygon_area(&poly);
            if saddle {
                // the outside corners are cut off individually
                for i in (0..4).filter(|&i| !inside[i]) {
                    length += dist(crossing(i), crossing((i + 3) % 4));
                }
            } else {
                length += dist(cuts[0], cuts[1]);
            }
        }
    }
    ContourMeasure { area, length }
}

fn polygon_area(p: &[(f64, f64)]) -> f64 {
    let n = p.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    twice.abs() / 2.0
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}
