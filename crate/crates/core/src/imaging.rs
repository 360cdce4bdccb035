//! Pixel-level primitives: RGB images, frames, boxes, cropping, color
//! conversion and image gradients.
//!
//! Real-valued 2D arrays use `ndarray::Array2` indexed `[[row, col]]`, i.e.
//! `[[y, x]]`. Pixel `(x, y)` covers the unit square `[x, x+1) × [y, y+1)`;
//! a box contains pixel `(x, y)` when `box.x <= x < box.x + box.w` (same on y).

use std::f64::consts::PI;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rgb = [f64; 3];

/// Row-major RGB image with channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<Rgb>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!("image size {width}x{height} must be positive")));
        }
        Ok(Self {
            width,
            height,
            data: vec![fill; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Result<Self> {
        let mut img = Self::new(width, height, [0.0; 3])?;
        for y in 0..height {
            for x in 0..width {
                img.data[y * width + x] = f(x, y);
            }
        }
        Ok(img)
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel buffer of length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if data.iter().flatten().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::invalid("channel values must lie in [0, 1]"));
        }
        Ok(Self { width, height, data })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, px: Rgb) {
        self.data[y * self.width + x] = px;
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.data
    }

    /// Luma (Rec. 601 weights) as a `height × width` array.
    pub fn to_gray(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.height, self.width), |(y, x)| luma(self.get(x, y)))
    }

    /// Iterator over the pixels that fall inside `bbox` (clipped to the image).
    pub fn region(&self, bbox: &BBox) -> impl Iterator<Item = Rgb> + '_ {
        let (x0, x1) = pixel_span(bbox.x, bbox.w, self.width);
        let (y0, y1) = pixel_span(bbox.y, bbox.h, self.height);
        (y0..y1).flat_map(move |y| (x0..x1).map(move |x| self.get(x, y)))
    }

    pub fn to_rgb8(&self) -> image::RgbImage {
        image::RgbImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            let p = self.get(x as usize, y as usize);
            image::Rgb(p.map(|c| (c * 255.0).round().clamp(0.0, 255.0) as u8))
        })
    }

    pub fn from_rgb8(img: &image::RgbImage) -> Result<Self> {
        let (w, h) = img.dimensions();
        let data = img.pixels().map(|p| p.0.map(|c| f64::from(c) / 255.0)).collect();
        Self::from_vec(w as usize, h as usize, data)
    }
}

#[inline]
pub fn luma(px: Rgb) -> f64 {
    0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]
}

/// Integer pixel range `[start, end)` covered by the real interval
/// `[origin, origin + len)`, clipped to `[0, limit)`.
pub fn pixel_span(origin: f64, len: f64, limit: usize) -> (usize, usize) {
    let lo = origin.ceil().max(0.0);
    let hi = (origin + len).ceil().max(0.0);
    let lo = (lo as usize).min(limit);
    let hi = (hi as usize).min(limit);
    (lo, hi.max(lo))
}

/// One video image plus its 1-based index in the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub image: RgbImage,
    pub index: usize,
}

impl Frame {
    pub fn new(image: RgbImage, index: usize) -> Self {
        Self { image, index }
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    /// Loads an 8-bit image file (PNG, JPEG), normalizing channels by 1/255.
    pub fn load(path: impl AsRef<Path>, index: usize) -> Result<Self> {
        let img = image::open(path.as_ref())?.to_rgb8();
        Ok(Self::new(RgbImage::from_rgb8(&img)?, index))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.image.to_rgb8().save(path.as_ref())?;
        Ok(())
    }
}

/// Axis-aligned box; `(x, y)` is the top-left corner in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self::new(cx - w / 2.0, cy - h / 2.0, w, h)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn is_valid(&self) -> bool {
        self.w > 0.0 && self.h > 0.0 && self.x.is_finite() && self.y.is_finite() && self.w.is_finite() && self.h.is_finite()
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Same center, size multiplied by `(sx, sy)`.
    pub fn scaled(&self, sx: f64, sy: f64) -> Self {
        let (cx, cy) = self.center();
        Self::from_center(cx, cy, self.w * sx, self.h * sy)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy, self.w, self.h)
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let iw = (self.right().min(other.right()) - self.x.max(other.x)).max(0.0);
        let ih = (self.bottom().min(other.bottom()) - self.y.max(other.y)).max(0.0);
        iw * ih
    }

    pub fn contains_box(&self, other: &BBox) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.bottom()
    }
}

/// Intersection over union of two boxes.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// A resampled region cut from a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub pixels: RgbImage,
    pub source_bbox: BBox,
}

impl Patch {
    pub fn width(&self) -> usize {
        self.pixels.width()
    }

    pub fn height(&self) -> usize {
        self.pixels.height()
    }
}

/// Cuts `bbox` out of `frame` and bilinearly resamples it to `out_w × out_h`.
/// Pixels outside the frame replicate the nearest edge pixel.
pub fn crop(frame: &Frame, bbox: &BBox, out_w: usize, out_h: usize) -> Result<Patch> {
    Ok(Patch {
        pixels: crop_image(&frame.image, bbox, out_w, out_h)?,
        source_bbox: *bbox,
    })
}

pub fn crop_image(img: &RgbImage, bbox: &BBox, out_w: usize, out_h: usize) -> Result<RgbImage> {
    if !bbox.is_valid() {
        return Err(Error::invalid(format!("crop box {bbox:?} must have positive size")));
    }
    if out_w == 0 || out_h == 0 {
        return Err(Error::invalid("crop output size must be positive"));
    }
    let sx = bbox.w / out_w as f64;
    let sy = bbox.h / out_h as f64;
    let xs: Vec<_> = (0..out_w)
        .map(|i| lerp_coords(bbox.x + (i as f64 + 0.5) * sx - 0.5, img.width()))
        .collect();
    let ys: Vec<_> = (0..out_h)
        .map(|j| lerp_coords(bbox.y + (j as f64 + 0.5) * sy - 0.5, img.height()))
        .collect();
    let mut out = Vec::with_capacity(out_w * out_h);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let a = img.get(x0, y0);
            let b = img.get(x1, y0);
            let c = img.get(x0, y1);
            let d = img.get(x1, y1);
            let mut px = [0.0; 3];
            for k in 0..3 {
                let top = a[k] * (1.0 - fx) + b[k] * fx;
                let bot = c[k] * (1.0 - fx) + d[k] * fx;
                px[k] = top * (1.0 - fy) + bot * fy;
            }
            out.push(px);
        }
    }
    Ok(RgbImage {
        width: out_w,
        height: out_h,
        data: out,
    })
}

/// Neighbor indices and fractional weight for sampling at `pos`, clamped to `[0, len)`.
#[inline]
fn lerp_coords(pos: f64, len: usize) -> (usize, usize, f64) {
    let max = (len - 1) as f64;
    let p = pos.clamp(0.0, max);
    let i0 = p.floor();
    let f = p - i0;
    let i0 = i0 as usize;
    let i1 = (i0 + 1).min(len - 1);
    (i0, i1, f)
}

/// Bilinear resize of a real-valued array to `out_h × out_w` (pixel-center aligned).
pub fn resize_bilinear(src: &Array2<f64>, out_w: usize, out_h: usize) -> Result<Array2<f64>> {
    let (h, w) = src.dim();
    if h == 0 || w == 0 || out_w == 0 || out_h == 0 {
        return Err(Error::invalid("resize dimensions must be positive"));
    }
    let sx = w as f64 / out_w as f64;
    let sy = h as f64 / out_h as f64;
    let xs: Vec<_> = (0..out_w).map(|i| lerp_coords((i as f64 + 0.5) * sx - 0.5, w)).collect();
    let ys: Vec<_> = (0..out_h).map(|j| lerp_coords((j as f64 + 0.5) * sy - 0.5, h)).collect();
    Ok(Array2::from_shape_fn((out_h, out_w), |(j, i)| {
        let (y0, y1, fy) = ys[j];
        let (x0, x1, fx) = xs[i];
        let top = src[[y0, x0]] * (1.0 - fx) + src[[y0, x1]] * fx;
        let bot = src[[y1, x0]] * (1.0 - fx) + src[[y1, x1]] * fx;
        top * (1.0 - fy) + bot * fy
    }))
}

/// Hexcone RGB → HSV with every channel in `[0, 1]`; hue is angle / 360°.
/// Gray pixels get hue 0.
pub fn rgb_to_hsv(px: Rgb) -> [f64; 3] {
    let [r, g, b] = px;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta <= 0.0 {
        return [0.0, s, v];
    }
    let sector = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = sector / 6.0;
    if h >= 1.0 {
        h -= 1.0;
    }
    [h, s, v]
}

pub fn hsv_to_rgb(hsv: [f64; 3]) -> Rgb {
    let [h, s, v] = hsv;
    let c = v * s;
    let hp = (h.rem_euclid(1.0)) * 6.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r + m, g + m, b + m]
}

/// Image gradients: central differences inside, one-sided differences on the
/// border. Returns `(magnitude, orientation)` with orientation in `[0, π)`.
pub fn gradients(gray: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
    let (h, w) = gray.dim();
    if h < 2 || w < 2 {
        return Err(Error::invalid(format!("gradients need at least 2x2 input, got {w}x{h}")));
    }
    let diff = |lo: f64, hi: f64, span: usize| (hi - lo) / span as f64;
    let mut mag = Array2::zeros((h, w));
    let mut ori = Array2::zeros((h, w));
    for y in 0..h {
        for x in 0..w {
            let gx = match x {
                0 => diff(gray[[y, 0]], gray[[y, 1]], 1),
                _ if x == w - 1 => diff(gray[[y, w - 2]], gray[[y, w - 1]], 1),
                _ => diff(gray[[y, x - 1]], gray[[y, x + 1]], 2),
            };
            let gy = match y {
                0 => diff(gray[[0, x]], gray[[1, x]], 1),
                _ if y == h - 1 => diff(gray[[h - 2, x]], gray[[h - 1, x]], 1),
                _ => diff(gray[[y - 1, x]], gray[[y + 1, x]], 2),
            };
            mag[[y, x]] = gx.hypot(gy);
            ori[[y, x]] = fold_orientation(gy.atan2(gx));
        }
    }
    Ok((mag, ori))
}

/// Maps an angle to the unsigned orientation range `[0, π)`.
pub fn fold_orientation(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}
