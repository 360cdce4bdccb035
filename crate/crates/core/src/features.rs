//! Hand-crafted per-cell features for the correlation filter.
//!
//! Each cell contributes a centered mean intensity, an L2-normalized
//! gradient-orientation histogram, and color-name frequencies. The color
//! channels come either from a fixed 10-region RGB partition or, when a table
//! is supplied, from an 11-name lookup indexed by 15-bit RGB.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::imaging::{gradients, rgb_to_hsv, Patch, Rgb};
use crate::spectral::FeatureStack;

/// Number of channels produced by the built-in color partition.
pub const COARSE_COLOR_BINS: usize = 10;

const HOG_EPS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub cell_size: usize,
    pub hog_orientations: usize,
    pub use_intensity: bool,
    pub use_hog: bool,
    pub use_color: bool,
    pub window: bool,
    pub color_table: Option<Arc<ColorNameTable>>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            cell_size: 4,
            hog_orientations: 9,
            use_intensity: true,
            use_hog: true,
            use_color: true,
            window: true,
            color_table: None,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cell_size < 1 {
            return Err(Error::Config("features.cell_size must be >= 1".into()));
        }
        if self.hog_orientations < 2 {
            return Err(Error::Config("features.hog_orientations must be >= 2".into()));
        }
        if !(self.use_intensity || self.use_hog || self.use_color) {
            return Err(Error::Config("at least one feature type must be enabled".into()));
        }
        Ok(())
    }

    pub fn color_channels(&self) -> usize {
        match &self.color_table {
            Some(t) => t.names(),
            None => COARSE_COLOR_BINS,
        }
    }

    pub fn num_channels(&self) -> usize {
        usize::from(self.use_intensity)
            + if self.use_hog { self.hog_orientations } else { 0 }
            + if self.use_color { self.color_channels() } else { 0 }
    }
}

/// Fixed partition of the RGB cube: black, gray, white, brown, then six hue
/// sectors (red, yellow, green, cyan, blue, magenta).
pub fn coarse_color_bin(px: Rgb) -> usize {
    let max = px[0].max(px[1]).max(px[2]);
    let min = px[0].min(px[1]).min(px[2]);
    if max - min < 0.2 {
        return if max < 0.25 {
            0
        } else if max < 0.75 {
            1
        } else {
            2
        };
    }
    if max < 0.4 {
        return 3;
    }
    let hue = rgb_to_hsv(px)[0];
    4 + ((hue * 6.0 + 0.5).floor() as usize % 6)
}

/// Lookup table from 15-bit RGB (`r/8 + 32·(g/8) + 1024·(b/8)`) to a
/// probability distribution over color names.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorNameTable {
    rows: Vec<Vec<f64>>,
}

impl ColorNameTable {
    pub const ENTRIES: usize = 32768;
    pub const NAMES: usize = 11;

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text).map_err(|(line, msg)| Error::format(path, line, msg))
    }

    fn parse(text: &str) -> std::result::Result<Self, (Option<usize>, String)> {
        let mut rows = Vec::with_capacity(Self::ENTRIES);
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| (Some(i + 1), format!("bad number: {e}")))?;
            if vals.len() != Self::NAMES {
                return Err((Some(i + 1), format!("expected {} values, found {}", Self::NAMES, vals.len())));
            }
            let sum: f64 = vals.iter().sum();
            if vals.iter().any(|v| *v < 0.0) || (sum - 1.0).abs() > 1e-3 {
                return Err((Some(i + 1), format!("row must be a distribution (sum {sum})")));
            }
            rows.push(vals);
        }
        if rows.len() != Self::ENTRIES {
            return Err((None, format!("expected {} rows, found {}", Self::ENTRIES, rows.len())));
        }
        Ok(Self { rows })
    }

    pub fn names(&self) -> usize {
        Self::NAMES
    }

    pub fn lookup(&self, px: Rgb) -> &[f64] {
        let q = |c: f64| ((c * 255.0).round().clamp(0.0, 255.0) as usize) >> 3;
        &self.rows[q(px[0]) + 32 * q(px[1]) + 1024 * q(px[2])]
    }
}

/// Outer product of 1D Hann windows, `rows × cols`. A length-1 axis is 1.
pub fn hann_window(w: usize, h: usize) -> Array2<f64> {
    let hann = |n: usize| -> Vec<f64> {
        if n <= 1 {
            return vec![1.0; n];
        }
        (0..n)
            .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / (n - 1) as f64).cos()))
            .collect()
    };
    let wx = hann(w);
    let wy = hann(h);
    Array2::from_shape_fn((h, w), |(r, c)| wy[r] * wx[c])
}

/// Orientation bin for an unsigned angle in `[0, π)`.
#[inline]
pub fn orientation_bin(theta: f64, bins: usize) -> usize {
    ((theta / PI * bins as f64).floor() as usize).min(bins - 1)
}

/// Per-cell feature extraction. Patch dimensions must be multiples of the
/// cell size.
pub fn extract_features(patch: &Patch, cfg: &FeatureConfig) -> Result<FeatureStack> {
    cfg.validate()?;
    let img = &patch.pixels;
    let (w, h) = (img.width(), img.height());
    let cs = cfg.cell_size;
    if w % cs != 0 || h % cs != 0 {
        return Err(Error::invalid(format!("patch {w}x{h} not divisible by cell size {cs}")));
    }
    let (cols, rows) = (w / cs, h / cs);
    let norm = 1.0 / (cs * cs) as f64;
    let gray = img.to_gray();
    let mut channels = Vec::with_capacity(cfg.num_channels());

    if cfg.use_intensity {
        let mut ch = Array2::zeros((rows, cols));
        for ((y, x), v) in gray.indexed_iter() {
            ch[[y / cs, x / cs]] += (v - 0.5) * norm;
        }
        channels.push(ch);
    }

    if cfg.use_hog {
        let bins = cfg.hog_orientations;
        let mut hist = vec![Array2::<f64>::zeros((rows, cols)); bins];
        if w >= 2 && h >= 2 {
            let (mag, ori) = gradients(&gray)?;
            for ((y, x), &m) in mag.indexed_iter() {
                if m > 0.0 {
                    hist[orientation_bin(ori[[y, x]], bins)][[y / cs, x / cs]] += m;
                }
            }
        }
        for r in 0..rows {
            for c in 0..cols {
                let l2 = hist.iter().map(|ch| ch[[r, c]].powi(2)).sum::<f64>().sqrt();
                let scale = 1.0 / (l2 + HOG_EPS);
                hist.iter_mut().for_each(|ch| ch[[r, c]] *= scale);
            }
        }
        channels.extend(hist);
    }

    if cfg.use_color {
        let n = cfg.color_channels();
        let mut col = vec![Array2::<f64>::zeros((rows, cols)); n];
        for y in 0..h {
            for x in 0..w {
                let px = img.get(x, y);
                let cell = [y / cs, x / cs];
                match &cfg.color_table {
                    Some(t) => {
                        for (ch, p) in col.iter_mut().zip(t.lookup(px)) {
                            ch[cell] += p * norm;
                        }
                    }
                    None => col[coarse_color_bin(px)][cell] += norm,
                }
            }
        }
        channels.extend(col);
    }

    if cfg.window {
        let win = hann_window(cols, rows);
        channels.iter_mut().for_each(|ch| *ch *= &win);
    }
    FeatureStack::new(channels, cs)
}
