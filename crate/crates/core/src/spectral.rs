//! Fourier-domain kernelized correlation filter.
//!
//! Training solves kernel ridge regression over every cyclic shift of a base
//! sample in closed form: `α̂ = ŷ / (k̂ˣˣ + λ)`. Detection evaluates
//! `f = F⁻¹(k̂ᶻˣ ⊙ α̂)` so that the response peak sits at the cyclic
//! displacement of the probe relative to the model.

use std::cell::RefCell;

use ndarray::{Array2, Zip};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_inplace(data: &mut [Complex64], len: usize, inverse: bool) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        };
        plan.process(data);
    });
}

fn transform2(a: &mut Array2<Complex64>, inverse: bool) {
    let (h, w) = a.dim();
    let mut buf: Vec<Complex64> = a.iter().copied().collect();
    fft_inplace(&mut buf, w, inverse);
    // columns: transpose, transform rows of length h, transpose back
    let mut t = vec![Complex64::default(); h * w];
    for y in 0..h {
        for x in 0..w {
            t[x * h + y] = buf[y * w + x];
        }
    }
    fft_inplace(&mut t, h, inverse);
    for ((y, x), v) in a.indexed_iter_mut() {
        *v = t[x * h + y];
    }
}

/// Unnormalized forward 2D DFT.
pub fn fft2(a: &Array2<f64>) -> Array2<Complex64> {
    let mut c = a.mapv(|v| Complex64::new(v, 0.0));
    if !c.is_empty() {
        transform2(&mut c, false);
    }
    c
}

/// Forward 2D DFT of a complex array.
pub fn fft2_complex(a: &Array2<Complex64>) -> Array2<Complex64> {
    let mut c = a.clone();
    if !c.is_empty() {
        transform2(&mut c, false);
    }
    c
}

/// Normalized inverse 2D DFT (complex result).
pub fn ifft2_complex(a: &Array2<Complex64>) -> Array2<Complex64> {
    let mut c = a.clone();
    if c.is_empty() {
        return c;
    }
    transform2(&mut c, true);
    let n = c.len() as f64;
    c.mapv_inplace(|v| v / n);
    c
}

/// Normalized inverse 2D DFT, keeping the real part.
pub fn ifft2(a: &Array2<Complex64>) -> Array2<f64> {
    ifft2_complex(a).mapv(|v| v.re)
}

/// Multi-channel feature map with uniform `rows × cols` channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStack {
    channels: Vec<Array2<f64>>,
    cell_size: usize,
}

impl FeatureStack {
    pub fn new(channels: Vec<Array2<f64>>, cell_size: usize) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::invalid("feature stack needs at least one channel"))?;
        let dim = first.dim();
        if dim.0 == 0 || dim.1 == 0 {
            return Err(Error::invalid("feature channels must be non-empty"));
        }
        if channels.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid("feature channels must share dimensions"));
        }
        if cell_size == 0 {
            return Err(Error::invalid("cell size must be positive"));
        }
        Ok(Self { channels, cell_size })
    }

    pub fn single(channel: Array2<f64>) -> Result<Self> {
        Self::new(vec![channel], 1)
    }

    pub fn channels(&self) -> &[Array2<f64>] {
        &self.channels
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn cell_size(&self) -> usize {
        self.cell_size
    }

    /// `(rows, cols)`.
    pub fn dim(&self) -> (usize, usize) {
        self.channels[0].dim()
    }

    pub fn squared_norm(&self) -> f64 {
        self.channels.iter().flatten().map(|v| v * v).sum()
    }

    /// `(1 - rate) * self + rate * other`, channel-wise.
    pub fn lerp(&self, other: &FeatureStack, rate: f64) -> Result<FeatureStack> {
        self.check_compatible(other)?;
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| Zip::from(a).and(b).map_collect(|&a, &b| (1.0 - rate) * a + rate * b))
            .collect();
        Ok(FeatureStack {
            channels,
            cell_size: self.cell_size,
        })
    }

    fn check_compatible(&self, other: &FeatureStack) -> Result<()> {
        if self.dim() != other.dim() || self.num_channels() != other.num_channels() {
            return Err(Error::invalid(format!(
                "feature stacks differ: {:?}x{} vs {:?}x{}",
                self.dim(),
                self.num_channels(),
                other.dim(),
                other.num_channels()
            )));
        }
        Ok(())
    }
}

/// Gaussian kernel correlation over all cyclic shifts:
/// `k(τ) = exp(-max(0, ‖x‖² + ‖z‖² - 2·Σ_c F⁻¹(x̂_c ⊙ conj(ẑ_c))(τ)) / (σ²·W·H·C))`.
///
/// Entry `τ` is the kernel between `x` and `z` cyclically shifted by `τ`.
pub fn gaussian_kernel_correlation(x: &FeatureStack, z: &FeatureStack, sigma: f64) -> Result<Array2<f64>> {
    x.check_compatible(z)?;
    if !(sigma > 0.0) {
        return Err(Error::invalid("kernel sigma must be positive"));
    }
    let (h, w) = x.dim();
    let mut cross = Array2::<Complex64>::zeros((h, w));
    for (xc, zc) in x.channels.iter().zip(&z.channels) {
        let xf = fft2(xc);
        let zf = fft2(zc);
        Zip::from(&mut cross)
            .and(&xf)
            .and(&zf)
            .for_each(|acc, a, b| *acc += a * b.conj());
    }
    let corr = ifft2(&cross);
    let xx = x.squared_norm();
    let zz = z.squared_norm();
    let denom = sigma * sigma * (h * w * x.num_channels()) as f64;
    Ok(corr.mapv(|c| (-((xx + zz - 2.0 * c).max(0.0)) / denom).exp()))
}

/// 2D Gaussian regression target peaked at zero shift (cyclic distances).
pub fn gaussian_label(rows: usize, cols: usize, bandwidth: f64) -> Array2<f64> {
    let cyc = |i: usize, n: usize| {
        let d = i.min(n - i) as f64;
        d * d
    };
    let s2 = 2.0 * bandwidth * bandwidth;
    Array2::from_shape_fn((rows, cols), |(r, c)| (-(cyc(r, rows) + cyc(c, cols)) / s2).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationModel {
    pub alpha_hat: Array2<Complex64>,
    pub model_x: FeatureStack,
    pub sigma: f64,
    pub lambda: f64,
    pub label_hat: Array2<Complex64>,
}

/// Closed-form dual solution `α̂ = ŷ ⊘ (k̂ˣˣ + λ)`.
pub fn train_filter(x1: &FeatureStack, label_hat: &Array2<Complex64>, sigma: f64, lambda: f64) -> Result<CorrelationModel> {
    if label_hat.dim() != x1.dim() {
        return Err(Error::invalid(format!(
            "label {:?} does not match features {:?}",
            label_hat.dim(),
            x1.dim()
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda must be positive"));
    }
    let kf = fft2(&gaussian_kernel_correlation(x1, x1, sigma)?);
    let mut alpha_hat = Array2::zeros(kf.dim());
    for ((a, k), y) in alpha_hat.iter_mut().zip(&kf).zip(label_hat) {
        let den = k + lambda;
        if den.norm() == 0.0 || !den.re.is_finite() || !den.im.is_finite() {
            return Err(Error::Numeric("zero or non-finite denominator in filter training".into()));
        }
        *a = y / den;
    }
    Ok(CorrelationModel {
        alpha_hat,
        model_x: x1.clone(),
        sigma,
        lambda,
        label_hat: label_hat.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMap {
    pub values: Array2<f64>,
    pub peak_value: f64,
    /// `(row, col)` of the first maximum in row-major order.
    pub peak_pos: (usize, usize),
}

impl ResponseMap {
    pub fn from_values(values: Array2<f64>) -> Self {
        let mut peak_value = f64::NEG_INFINITY;
        let mut peak_pos = (0, 0);
        for ((r, c), &v) in values.indexed_iter() {
            if v > peak_value {
                peak_value = v;
                peak_pos = (r, c);
            }
        }
        Self {
            values,
            peak_value,
            peak_pos,
        }
    }

    /// Peak location as a signed cyclic displacement `(dy, dx)` in cells,
    /// refined to sub-cell accuracy with a 1D parabola along each axis.
    pub fn displacement(&self) -> (f64, f64) {
        let (h, w) = self.values.dim();
        let (r, c) = self.peak_pos;
        let v = |rr: usize, cc: usize| self.values[[rr % h, cc % w]];
        let refine = |lo: f64, mid: f64, hi: f64| {
            let den = lo - 2.0 * mid + hi;
            if den < 0.0 {
                (0.5 * (lo - hi) / den).clamp(-0.5, 0.5)
            } else {
                0.0
            }
        };
        let dy = if h >= 3 {
            refine(v(r + h - 1, c), v(r, c), v(r + 1, c))
        } else {
            0.0
        };
        let dx = if w >= 3 {
            refine(v(r, c + w - 1), v(r, c), v(r, c + 1))
        } else {
            0.0
        };
        let wrap = |p: usize, n: usize| if p > n / 2 { p as f64 - n as f64 } else { p as f64 };
        (wrap(r, h) + dy, wrap(c, w) + dx)
    }
}

/// `F⁻¹(k̂ᶻˣ ⊙ α̂)`; the peak position is the cyclic shift that best aligns
/// the model with `z`.
pub fn response_map(model: &CorrelationModel, z: &FeatureStack) -> Result<ResponseMap> {
    let k = gaussian_kernel_correlation(z, &model.model_x, model.sigma)?;
    let kf = fft2(&k);
    let prod = Zip::from(&kf).and(&model.alpha_hat).map_collect(|k, a| k * a);
    Ok(ResponseMap::from_values(ifft2(&prod)))
}

/// Linear interpolation of both the appearance model and the dual
/// coefficients towards a model freshly trained on `new_x`.
pub fn update_model(model: &CorrelationModel, new_x: &FeatureStack, rate: f64) -> Result<CorrelationModel> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid(format!("update rate {rate} outside [0, 1]")));
    }
    model.model_x.check_compatible(new_x)?;
    if rate == 0.0 {
        return Ok(model.clone());
    }
    let fresh = train_filter(new_x, &model.label_hat, model.sigma, model.lambda)?;
    if rate == 1.0 {
        return Ok(fresh);
    }
    let alpha_hat = Zip::from(&model.alpha_hat)
        .and(&fresh.alpha_hat)
        .map_collect(|a, b| a * (1.0 - rate) + b * rate);
    Ok(CorrelationModel {
        alpha_hat,
        model_x: model.model_x.lerp(new_x, rate)?,
        sigma: model.sigma,
        lambda: model.lambda,
        label_hat: model.label_hat.clone(),
    })
}

/// Weighted sum of per-layer response maps already resampled to one size.
pub fn fuse_responses(layers: &[Array2<f64>], mu: &[f64]) -> Result<ResponseMap> {
    if layers.is_empty() {
        return Err(Error::invalid("no response layers to fuse"));
    }
    if layers.len() != mu.len() {
        return Err(Error::invalid(format!("{} layers but {} weights", layers.len(), mu.len())));
    }
    let dim = layers[0].dim();
    if layers.iter().any(|l| l.dim() != dim) {
        return Err(Error::invalid("response layers must share dimensions"));
    }
    let mut acc = Array2::zeros(dim);
    for (layer, &m) in layers.iter().zip(mu) {
        acc.scaled_add(m, layer);
    }
    Ok(ResponseMap::from_values(acc))
}
