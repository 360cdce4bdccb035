//! Deterministic synthetic sequences with exact ground truth.
//!
//! Objects are axis-aligned rectangles rendered with area coverage, so a
//! sub-pixel box edge produces a fractional blend instead of a jagged step.
//! The target moves with constant velocity and its size follows a linear
//! schedule from 1 to `scale_end`.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{BBox, Frame, Rgb, RgbImage};

use super::dataset::{FrameSource, Sequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Distractor {
    /// Center offset from the target center, in units of the target size.
    pub offset: [f64; 2],
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub name: String,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    /// First-frame target box, zero-based.
    pub target: BBox,
    pub target_color: Rgb,
    /// Amplitude of the target's internal stripe pattern.
    pub target_texture: f64,
    /// Per-frame center translation in pixels.
    pub velocity: [f64; 2],
    /// Size multiplier reached at the last frame.
    pub scale_end: f64,
    pub background: Rgb,
    /// Amplitude of the smooth static background texture.
    pub background_texture: f64,
    /// Lattice spacing of the background texture in pixels.
    pub background_cell: f64,
    /// Per-frame i.i.d. pixel noise amplitude.
    pub pixel_noise: f64,
    pub distractors: Vec<Distractor>,
    pub attributes: Vec<String>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            name: "synthetic".into(),
            width: 160,
            height: 120,
            frames: 30,
            target: BBox::new(60.0, 45.0, 32.0, 24.0),
            target_color: [0.85, 0.2, 0.15],
            target_texture: 0.25,
            velocity: [0.0, 0.0],
            scale_end: 1.0,
            background: [0.35, 0.45, 0.4],
            background_texture: 0.15,
            background_cell: 12.0,
            pixel_noise: 0.0,
            distractors: Vec::new(),
            attributes: Vec::new(),
        }
    }
}

impl SynthSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("synthetic spec: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        // well-formed JSON with wrong or unknown fields is a bad spec, not a bad file
        serde_json::from_str(&text).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => Error::Config(format!("{}: {e}", path.display())),
            _ => Error::format(path, Some(e.line()), e.to_string()),
        })
    }

    /// Target scale factor at frame `k`.
    pub fn scale_at(&self, k: usize) -> f64 {
        if self.frames <= 1 {
            return 1.0;
        }
        1.0 + (self.scale_end - 1.0) * k as f64 / (self.frames - 1) as f64
    }

    pub fn target_at(&self, k: usize) -> BBox {
        let (cx, cy) = self.target.center();
        let s = self.scale_at(k);
        BBox::from_center(
            cx + self.velocity[0] * k as f64,
            cy + self.velocity[1] * k as f64,
            self.target.w * s,
            self.target.h * s,
        )
    }

    fn validate(&self) -> Result<()> {
        let colors = std::iter::once(&self.target_color)
            .chain(std::iter::once(&self.background))
            .chain(self.distractors.iter().map(|d| &d.color));
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.width < 8 || self.height < 8 || self.frames == 0 {
            Err(Error::invalid("synthetic frames must be at least 8x8 and the sequence non-empty"))
        } else if !self.target.is_valid() || !(self.scale_end > 0.0) {
            Err(Error::invalid("target box and scale_end must be positive"))
        } else if !(self.background_cell > 0.0) {
            Err(Error::invalid("background_cell must be positive"))
        } else if colors.flatten().any(|&c| !unit(c)) {
            Err(Error::invalid("colors must lie in [0, 1]"))
        } else if [self.target_texture, self.background_texture, self.pixel_noise]
            .iter()
            .any(|&a| !(0.0..=1.0).contains(&a))
        {
            Err(Error::invalid("texture and noise amplitudes must lie in [0, 1]"))
        } else {
            Ok(())
        }
    }
}

/// Fraction of the unit pixel square at `(x, y)` covered by `b`.
fn coverage(b: &BBox, x: usize, y: usize) -> f64 {
    let (x, y) = (x as f64, y as f64);
    let ox = (b.right().min(x + 1.0) - b.x.max(x)).max(0.0);
    let oy = (b.bottom().min(y + 1.0) - b.y.max(y)).max(0.0);
    ox * oy
}

struct ValueNoise {
    cols: usize,
    cell: f64,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(width: usize, height: usize, cell: f64, rng: &mut ChaCha8Rng) -> Self {
        let cols = (width as f64 / cell).ceil() as usize + 2;
        let rows = (height as f64 / cell).ceil() as usize + 2;
        let lattice = (0..rows * cols).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self { cols, cell, lattice }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = (x / self.cell, y / self.cell);
        let (ix, iy) = (gx.floor() as usize, gy.floor() as usize);
        let (fx, fy) = (gx - ix as f64, gy - iy as f64);
        let l = |c: usize, r: usize| self.lattice[r * self.cols + c];
        let top = l(ix, iy) * (1.0 - fx) + l(ix + 1, iy) * fx;
        let bot = l(ix, iy + 1) * (1.0 - fx) + l(ix + 1, iy + 1) * fx;
        top * (1.0 - fy) + bot * fy
    }
}

/// Object color at pixel center `(px, py)` with a stripe pattern anchored
/// to the box so it scales with the object.
fn object_color(color: Rgb, b: &BBox, px: f64, py: f64, texture: f64) -> Rgb {
    let u = (px - b.x) / b.w;
    let v = (py - b.y) / b.h;
    let pattern = (std::f64::consts::TAU * 2.0 * u).sin() * (std::f64::consts::TAU * 1.5 * v).cos();
    let k = 1.0 + texture * 0.5 * pattern;
    color.map(|c| (c * k).clamp(0.0, 1.0))
}

pub fn synth_sequence(spec: &SynthSpec, seed: u64) -> Result<Sequence> {
    spec.validate()?;
    let frame_box = BBox::new(0.0, 0.0, spec.width as f64, spec.height as f64);
    let groundtruth: Vec<BBox> = (0..spec.frames).map(|k| spec.target_at(k)).collect();
    if let Some(k) = groundtruth.iter().position(|b| !frame_box.contains_box(b)) {
        return Err(Error::invalid(format!("target leaves the frame at frame {}", k + 1)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<ValueNoise> = (0..3)
        .map(|_| ValueNoise::new(spec.width, spec.height, spec.background_cell, &mut rng))
        .collect();
    let background = RgbImage::from_fn(spec.width, spec.height, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        std::array::from_fn(|c| (spec.background[c] + spec.background_texture * noise[c].at(px, py)).clamp(0.0, 1.0))
    })?;

    let mut frames = Vec::with_capacity(spec.frames);
    for (k, target) in groundtruth.iter().enumerate() {
        let (tcx, tcy) = target.center();
        let mut objects: Vec<(BBox, Rgb)> = spec
            .distractors
            .iter()
            .map(|d| {
                let b = BBox::from_center(tcx + d.offset[0] * target.w, tcy + d.offset[1] * target.h, target.w, target.h);
                (b, d.color)
            })
            .collect();
        objects.push((*target, spec.target_color));

        let mut img = background.clone();
        for (b, color) in &objects {
            let x0 = b.x.floor().max(0.0) as usize;
            let y0 = b.y.floor().max(0.0) as usize;
            let x1 = (b.right().ceil().max(0.0) as usize).min(spec.width);
            let y1 = (b.bottom().ceil().max(0.0) as usize).min(spec.height);
            for y in y0..y1 {
                for x in x0..x1 {
                    let a = coverage(b, x, y);
                    if a <= 0.0 {
                        continue;
                    }
                    let obj = object_color(*color, b, x as f64 + 0.5, y as f64 + 0.5, spec.target_texture);
                    let bg = img.get(x, y);
                    img.set(x, y, std::array::from_fn(|c| (1.0 - a) * bg[c] + a * obj[c]));
                }
            }
        }
        if spec.pixel_noise > 0.0 {
            for y in 0..spec.height {
                for x in 0..spec.width {
                    let px = img.get(x, y);
                    let n: f64 = rng.random_range(-1.0..=1.0) * spec.pixel_noise;
                    img.set(x, y, px.map(|c| (c + n).clamp(0.0, 1.0)));
                }
            }
        }
        frames.push(Frame::new(img, k + 1));
    }

    let mut attributes: BTreeSet<String> = spec.attributes.iter().cloned().collect();
    if spec.scale_end != 1.0 {
        attributes.insert("SV".into());
    }
    if !spec.distractors.is_empty() {
        attributes.insert("BC".into());
    }
    Ok(Sequence {
        name: spec.name.clone(),
        frames: FrameSource::Memory(frames),
        groundtruth,
        attributes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pixels(seq: &Sequence, i: usize) -> Vec<Rgb> {
        seq.frame(i).unwrap().image.pixels().to_vec()
    }

    #[test]
    fn zero_motion_gives_identical_frames() {
        let spec = SynthSpec { frames: 5, ..Default::default() };
        let seq = synth_sequence(&spec, 3).unwrap();
        for i in 1..5 {
            assert_eq!(pixels(&seq, i), pixels(&seq, 0));
            assert_eq!(seq.groundtruth[i], seq.groundtruth[0]);
        }
        assert!(seq.attributes.is_empty());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let spec = SynthSpec {
            frames: 4,
            velocity: [1.5, -0.5],
            pixel_noise: 0.05,
            ..Default::default()
        };
        let a = synth_sequence(&spec, 11).unwrap();
        let b = synth_sequence(&spec, 11).unwrap();
        let c = synth_sequence(&spec, 12).unwrap();
        for i in 0..4 {
            let (pa, pb) = (pixels(&a, i), pixels(&b, i));
            assert!(pa.iter().zip(&pb).all(|(x, y)| x.map(f64::to_bits) == y.map(f64::to_bits)));
        }
        assert_ne!(pixels(&a, 0), pixels(&c, 0));
    }

    #[test]
    fn linear_scale_schedule_is_exact() {
        let spec = SynthSpec {
            frames: 50,
            width: 200,
            height: 160,
            target: BBox::new(80.0, 65.0, 20.0, 15.0),
            scale_end: 2.0,
            ..Default::default()
        };
        let seq = synth_sequence(&spec, 0).unwrap();
        for (k, b) in seq.groundtruth.iter().enumerate() {
            assert_eq!(b.w, 20.0 * (1.0 + k as f64 / 49.0));
            assert_eq!(b.center(), (90.0, 72.5));
        }
        assert!(seq.attributes.contains("SV"));
    }

    #[test]
    fn target_leaving_frame_is_rejected() {
        let spec = SynthSpec {
            frames: 100,
            velocity: [2.0, 0.0],
            ..Default::default()
        };
        assert!(matches!(synth_sequence(&spec, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn target_pixels_take_target_color() {
        let spec = SynthSpec {
            frames: 1,
            target_texture: 0.0,
            ..Default::default()
        };
        let seq = synth_sequence(&spec, 0).unwrap();
        let f = seq.frame(0).unwrap();
        assert_eq!(f.image.get(70, 50), spec.target_color);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = SynthSpec {
            distractors: vec![Distractor { offset: [1.3, 0.0], color: [0.1, 0.2, 0.9] }],
            ..Default::default()
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(SynthSpec::from_json(&text).unwrap(), spec);
        let partial = SynthSpec::from_json(r#"{"frames": 12, "scale_end": 1.5}"#).unwrap();
        assert_eq!(partial.frames, 12);
        assert!(matches!(SynthSpec::from_json(r#"{"framez": 1}"#), Err(Error::Config(_))));
    }
}
