//! Sublevel-set lifting of `L`-class label maps.
//!
//! Channel `γ` (1-based) is the indicator of `{l <= γ}`, so the channels are
//! pointwise nested `u₁ <= u₂ <= … <= u_{L-1}` and the label is recovered as
//! `l = L - Σ_γ u_γ`.

use crate::error::{check_dims, Error, Result};
use crate::field::{Field, SoftMask};

/// Integer labels in `1..=classes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    classes: u8,
    labels: Vec<u8>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, classes: u8, labels: Vec<u8>) -> Result<Self> {
        if classes < 2 {
            return Err(Error::InvalidParameter(format!(
                "a label map needs at least 2 classes, got {classes}"
            )));
        }
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{width}x{height} label map cannot hold {} labels",
                labels.len()
            )));
        }
        if let Some(l) = labels.iter().find(|&&l| l == 0 || l > classes) {
            return Err(Error::InvalidInput(format!(
                "label {l} outside 1..={classes}"
            )));
        }
        Ok(Self {
            width,
            height,
            classes,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn classes(&self) -> u8 {
        self.classes
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }

    /// Binary indicator of `{l <= level}`.
    pub fn sublevel_mask(&self, level: u8) -> Field {
        let values = self
            .labels
            .iter()
            .map(|&l| if l <= level { 1.0 } else { 0.0 })
            .collect();
        Field::from_raw(self.width, self.height, values)
    }
}

/// `L - 1` nested soft masks.
#[derive(Debug, Clone, PartialEq)]
pub struct SublevelStack {
    channels: Vec<SoftMask>,
}

impl SublevelStack {
    /// Validates equal dimensions and the nesting chain (zero tolerance).
    pub fn new(channels: Vec<SoftMask>) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::InvalidParameter("a stack needs at least one channel".into()))?;
        let dims = first.dims();
        for c in &channels {
            check_dims(dims, c.dims())?;
        }
        let stack = Self { channels };
        if let Some(i) = stack.first_nesting_violation() {
            return Err(Error::InvalidInput(format!(
                "channels are not nested at pixel {i}"
            )));
        }
        Ok(stack)
    }

    pub(crate) fn from_raw(channels: Vec<SoftMask>) -> Self {
        let stack = Self { channels };
        debug_assert!(stack.first_nesting_violation().is_none());
        stack
    }

    pub fn channels(&self) -> &[SoftMask] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<SoftMask> {
        self.channels
    }

    /// `L = channels + 1`.
    pub fn classes(&self) -> usize {
        self.channels.len() + 1
    }

    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    /// Pixel index of the first `u_γ > u_{γ+1}`, if any.
    pub fn first_nesting_violation(&self) -> Option<usize> {
        self.channels.windows(2).find_map(|pair| {
            pair[0]
                .values()
                .iter()
                .zip(pair[1].values())
                .position(|(lo, hi)| lo > hi)
        })
    }
}

/// `u_γ(x) = [l(x) <= γ]` for `γ = 1..L-1`.
pub fn label_to_sublevel(l: &LabelMap) -> SublevelStack {
    let channels = (1..l.classes)
        .map(|gamma| SoftMask::from_raw(l.width, l.height, l.sublevel_mask(gamma).into_values()))
        .collect();
    SublevelStack::from_raw(channels)
}

/// `l(x) = L - Σ_γ [u_γ(x) >= 0.5]`.
pub fn sublevel_to_label(s: &SublevelStack) -> LabelMap {
    let (w, h) = s.dims();
    let classes = s.classes() as u8;
    let labels = (0..w * h)
        .map(|i| {
            let on = s.channels.iter().filter(|c| c.values()[i] >= 0.5).count() as u8;
            classes - on
        })
        .collect();
    LabelMap {
        width: w,
        height: h,
        classes,
        labels,
    }
}

/// Euclidean projection of each pixel's channel vector onto
/// `{0 <= u₁ <= … <= u_{L-1} <= 1}`: pool adjacent violators, then clamp.
pub fn project_nested(raw: &[Field]) -> Result<SublevelStack> {
    let first = raw
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one channel".into()))?;
    let dims = first.dims();
    for f in raw {
        check_dims(dims, f.dims())?;
    }
    let n = first.len();
    let mut out: Vec<Vec<f64>> = vec![vec![0.0; n]; raw.len()];
    let mut chain = vec![0.0; raw.len()];
    for i in 0..n {
        for (c, f) in chain.iter_mut().zip(raw) {
            *c = f.values()[i];
        }
        isotonic_increasing(&mut chain);
        for (o, c) in out.iter_mut().zip(&chain) {
            o[i] = c.clamp(0.0, 1.0);
        }
    }
    let channels = out
        .into_iter()
        .map(|v| SoftMask::from_raw(dims.0, dims.1, v))
        .collect();
    Ok(SublevelStack::from_raw(channels))
}

/// In-place unweighted least-squares nondecreasing fit (pool adjacent violators).
pub(crate) fn isotonic_increasing(values: &mut [f64]) {
    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s0 / n0 as f64 > s1 / n1 as f64 {
                blocks.pop();
                *blocks.last_mut().unwrap() = (s0 + s1, n0 + n1);
            } else {
                break;
            }
        }
    }
    let mut i = 0;
    for (s, n) in blocks {
        let mean = s / n as f64;
        for v in &mut values[i..i + n] {
            *v = mean;
        }
        i += n;
    }
}
