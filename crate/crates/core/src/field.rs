//! Dense 2-D scalar fields, stencils and convolution.
//!
//! Everything in the solver is expressed on a [`Field`]: images, features,
//! dual variables and edge weights. [`SoftMask`] is the `[0, 1]`-valued
//! subtype used for relaxed segmentation functions. Values are stored
//! row-major (`index = y * width + x`) in 64-bit floats.

use std::ops::Deref;

use crate::error::{check_dims, Error, Result};

/// A dense, finite-valued scalar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Field {
    /// Builds a field from row-major values, rejecting empty grids and
    /// non-finite entries.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "field dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{width}x{height} field needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value at index {i}")));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    /// # Panics
    /// If either dimension is zero or `value` is not finite.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("valid constant field")
    }

    /// Evaluates `f(x, y)` at every pixel.
    ///
    /// # Panics
    /// If either dimension is zero or `f` returns a non-finite value.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values).expect("from_fn produced an invalid field")
    }

    pub(crate) fn from_raw(width: usize, height: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            values,
        }
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

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Pointwise map.
    ///
    /// # Panics
    /// If `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "map produced a non-finite value"
        );
        Self::from_raw(self.width, self.height, values)
    }

    /// Pointwise combination of two equally sized fields.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        check_dims(self.dims(), other.dims())?;
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Field::new(self.width, self.height, values)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max |self - other|` over the grid.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        check_dims(self.dims(), other.dims())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Binary field: 1 where the value is `>= level`, else 0.
    pub fn threshold(&self, level: f64) -> Field {
        self.map(|v| if v >= level { 1.0 } else { 0.0 })
    }
}

/// A field whose values all lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask(Field);

impl SoftMask {
    pub fn new(field: Field) -> Result<Self> {
        if let Some(i) = field.values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput(format!(
                "soft mask value {} at index {i} is outside [0, 1]",
                field.values[i]
            )));
        }
        Ok(Self(field))
    }

    pub fn clamped(field: Field) -> Self {
        Self(field.map(|v| v.clamp(0.0, 1.0)))
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self(Field::zeros(width, height))
    }

    pub fn ones(width: usize, height: usize) -> Self {
        Self(Field::filled(width, height, 1.0))
    }

    pub(crate) fn from_raw(width: usize, height: usize, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        Self(Field::from_raw(width, height, values))
    }

    pub fn as_field(&self) -> &Field {
        &self.0
    }

    pub fn into_field(self) -> Field {
        self.0
    }

    /// `1 - u`, still a soft mask.
    pub fn complement(&self) -> SoftMask {
        SoftMask(self.0.map(|v| 1.0 - v))
    }
}

impl Deref for SoftMask {
    type Target = Field;

    fn deref(&self) -> &Field {
        &self.0
    }
}

/// How a convolution reads values outside the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Outside pixels read as 0.
    ZeroBackground,
    /// Indices reflect about the border (half-sample symmetric: `... b a | a b ...`).
    Mirror,
}

/// A square, nonnegative, normalized stencil of half-width `radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    radius: usize,
    weights: Vec<f64>,
    /// Normalized 1-D factor when the stencil is an outer product of it with itself.
    factor: Option<Vec<f64>>,
}

impl Kernel {
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Side length `2 * radius + 1`.
    pub fn window(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at offset `(dx, dy)`; zero outside the window.
    pub fn weight(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius as isize;
        if dx.abs() > r || dy.abs() > r {
            return 0.0;
        }
        let w = self.window() as isize;
        self.weights[((dy + r) * w + dx + r) as usize]
    }

    pub fn is_separable(&self) -> bool {
        self.factor.is_some()
    }

    /// Number of cells with nonzero weight.
    pub fn support_len(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }
}

/// Uniform average over the discrete disk `{(i, j) : i² + j² <= r²}`.
pub fn ball_kernel(r: usize) -> Kernel {
    let ri = r as isize;
    let window = 2 * r + 1;
    let mut weights = vec![0.0; window * window];
    let mut count = 0usize;
    for dy in -ri..=ri {
        for dx in -ri..=ri {
            if dx * dx + dy * dy <= ri * ri {
                weights[((dy + ri) * window as isize + dx + ri) as usize] = 1.0;
                count += 1;
            }
        }
    }
    let w = 1.0 / count as f64;
    for v in weights.iter_mut() {
        *v *= w;
    }
    Kernel {
        radius: r,
        weights,
        factor: None,
    }
}

/// Sampled isotropic Gaussian on a window of half-width `ceil(3 sigma)`,
/// renormalized to unit mass.
pub fn gaussian_kernel(sigma: f64) -> Result<Kernel> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    gaussian_kernel_with_radius(sigma, (3.0 * sigma).ceil() as usize)
}

/// Sampled Gaussian with an explicit window half-width.
pub fn gaussian_kernel_with_radius(sigma: f64, radius: usize) -> Result<Kernel> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    let ri = radius as isize;
    let mut factor: Vec<f64> = (-ri..=ri)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = factor.iter().sum();
    for v in factor.iter_mut() {
        *v /= total;
    }
    let window = factor.len();
    let mut weights = Vec::with_capacity(window * window);
    for a in &factor {
        for b in &factor {
            weights.push(a * b);
        }
    }
    Ok(Kernel {
        radius,
        weights,
        factor: Some(factor),
    })
}

#[inline]
fn mirror_index(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Reads `f` at a possibly out-of-range position, extended per `policy`.
#[inline]
fn read_extended(f: &Field, x: isize, y: isize, policy: BoundaryPolicy) -> f64 {
    let (w, h) = (f.width as isize, f.height as isize);
    if x >= 0 && x < w && y >= 0 && y < h {
        return f.values[(y * w + x) as usize];
    }
    match policy {
        BoundaryPolicy::ZeroBackground => 0.0,
        BoundaryPolicy::Mirror => {
            let xm = mirror_index(x, f.width);
            let ym = mirror_index(y, f.height);
            f.values[ym * f.width + xm]
        }
    }
}

fn check_kernel_fits(f: &Field, k: &Kernel) -> Result<()> {
    if k.radius > f.width.min(f.height) {
        return Err(Error::InvalidParameter(format!(
            "kernel window {} exceeds 2*min(width, height)+1 for a {}x{} field",
            k.window(),
            f.width,
            f.height
        )));
    }
    Ok(())
}

/// `out(x) = Σ_o k(o) f̃(x - o)` with `f̃` the extension of `f` under `policy`.
///
/// Separable kernels run as two 1-D passes; everything else is a direct
/// spatial sum.
pub fn convolve(f: &Field, k: &Kernel, policy: BoundaryPolicy) -> Result<Field> {
    check_kernel_fits(f, k)?;
    match &k.factor {
        Some(factor) => Ok(convolve_separable(f, factor, policy)),
        None => Ok(convolve_direct(f, k, policy)),
    }
}

fn convolve_direct(f: &Field, k: &Kernel, policy: BoundaryPolicy) -> Field {
    let (w, h) = f.dims();
    let r = k.radius as isize;
    let taps: Vec<(isize, isize, f64)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter_map(|(dx, dy)| {
            let wt = k.weight(dx, dy);
            (wt != 0.0).then_some((dx, dy, wt))
        })
        .collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for &(dx, dy, wt) in &taps {
                acc += wt * read_extended(f, x - dx, y - dy, policy);
            }
            out[(y * w as isize + x) as usize] = acc;
        }
    }
    Field::from_raw(w, h, out)
}

fn convolve_separable(f: &Field, factor: &[f64], policy: BoundaryPolicy) -> Field {
    let (w, h) = f.dims();
    let r = (factor.len() / 2) as isize;
    let tap = |n: usize, i: isize| -> Option<usize> {
        if i >= 0 && (i as usize) < n {
            Some(i as usize)
        } else {
            match policy {
                BoundaryPolicy::ZeroBackground => None,
                BoundaryPolicy::Mirror => Some(mirror_index(i, n)),
            }
        }
    };

    let mut rows = vec![0.0; w * h];
    for y in 0..h {
        let row = &f.values[y * w..(y + 1) * w];
        for x in 0..w as isize {
            let mut acc = 0.0;
            for (j, wt) in factor.iter().enumerate() {
                let d = j as isize - r;
                if let Some(i) = tap(w, x - d) {
                    acc += wt * row[i];
                }
            }
            rows[y * w + x as usize] = acc;
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        for (j, wt) in factor.iter().enumerate() {
            let d = j as isize - r;
            if let Some(src) = tap(h, y - d) {
                let dst_row = &mut out[y as usize * w..(y as usize + 1) * w];
                let src_row = &rows[src * w..(src + 1) * w];
                for (o, s) in dst_row.iter_mut().zip(src_row) {
                    *o += wt * s;
                }
            }
        }
    }
    Field::from_raw(w, h, out)
}

/// Equivalent to `convolve(f, &ball_kernel(r), ZeroBackground)`, computed
/// with per-row prefix sums so the cost is `O(r)` per pixel instead of `O(r²)`.
pub fn ball_average(f: &Field, r: usize) -> Result<Field> {
    let (sums, count) = ball_sum(f, r)?;
    let norm = 1.0 / count as f64;
    Ok(sums.map(|s| s * norm))
}

/// Unnormalized zero-background disk sums plus the disk cell count.
pub(crate) fn ball_sum(f: &Field, r: usize) -> Result<(Field, usize)> {
    if r > f.width.min(f.height) {
        return Err(Error::InvalidParameter(format!(
            "ball radius {r} does not fit a {}x{} field",
            f.width, f.height
        )));
    }
    let (w, h) = f.dims();
    let mut prefix = vec![0.0; (w + 1) * h];
    for y in 0..h {
        let mut acc = 0.0;
        for x in 0..w {
            acc += f.values[y * w + x];
            prefix[y * (w + 1) + x + 1] = acc;
        }
    }
    let ri = r as isize;
    let spans: Vec<(isize, isize)> = (-ri..=ri)
        .map(|dy| {
            let mut half = 0isize;
            while (half + 1) * (half + 1) + dy * dy <= ri * ri {
                half += 1;
            }
            (dy, half)
        })
        .collect();
    let count: isize = spans.iter().map(|&(_, half)| 2 * half + 1).sum();

    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for &(dy, half) in &spans {
                let yy = y + dy;
                if yy < 0 || yy >= h as isize {
                    continue;
                }
                let lo = (x - half).max(0) as usize;
                let hi = ((x + half + 1).min(w as isize)) as usize;
                let base = yy as usize * (w + 1);
                acc += prefix[base + hi] - prefix[base + lo];
            }
            out[y as usize * w + x as usize] = acc;
        }
    }
    Ok((Field::from_raw(w, h, out), count as usize))
}

/// `‖∇v‖` with central differences inside and one-sided differences on the border.
pub fn gradient_magnitude(v: &Field) -> Result<Field> {
    let (w, h) = v.dims();
    if w < 2 || h < 2 {
        return Err(Error::InvalidParameter(format!(
            "gradient needs at least a 2x2 field, got {w}x{h}"
        )));
    }
    let diff = |n: usize, i: usize, at: &dyn Fn(usize) -> f64| -> f64 {
        if i == 0 {
            at(1) - at(0)
        } else if i == n - 1 {
            at(n - 1) - at(n - 2)
        } else {
            0.5 * (at(i + 1) - at(i - 1))
        }
    };
    Ok(Field::from_fn(w, h, |x, y| {
        let gx = diff(w, x, &|i| v.get(i, y));
        let gy = diff(h, y, &|j| v.get(x, j));
        gx.hypot(gy)
    }))
}
