//! Color-similarity proposal selection.
//!
//! Proposals and the two reference instances (first-frame target and
//! previous prediction) are described by 256-bin quantized HSV histograms
//! and compared with the Bhattacharyya coefficient. How much the previous
//! instance is trusted decays with the number of consecutive low-confidence
//! frames reported by the correlation filter.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{rgb_to_hsv, BBox, Patch, Rgb};
use crate::proposals::Proposal;

pub const HIST_BINS: usize = 256;

/// 8-bit HSV code: hue in the top 4 bits, saturation in the next 2, value in
/// the last 2. Channels are expected in `[0, 255]`.
pub fn hsv_bin(h: f64, s: f64, v: f64) -> Result<u8> {
    for (name, c) in [("hue", h), ("saturation", s), ("value", v)] {
        if !(0.0..=255.0).contains(&c) {
            return Err(Error::invalid(format!("{name} channel {c} outside [0, 255]")));
        }
    }
    let q = |c: f64, step: f64, levels: usize| ((c / step).floor() as usize).min(levels - 1);
    Ok((16 * q(h, 16.0, 16) + 4 * q(s, 64.0, 4) + q(v, 64.0, 4)) as u8)
}

fn pixel_bin(px: Rgb) -> usize {
    let [h, s, v] = rgb_to_hsv(px).map(|c| (c * 255.0).clamp(0.0, 255.0));
    // channels are clamped, so the quantizer cannot fail
    hsv_bin(h, s, v).map_or(0, usize::from)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HsvHistogram {
    pub bins: [u32; HIST_BINS],
    pub pixel_count: u32,
}

impl HsvHistogram {
    pub fn from_pixels(pixels: impl IntoIterator<Item = Rgb>) -> Result<Self> {
        let mut bins = [0u32; HIST_BINS];
        let mut n = 0u32;
        for px in pixels {
            bins[pixel_bin(px)] += 1;
            n += 1;
        }
        if n == 0 {
            return Err(Error::invalid("histogram of an empty region"));
        }
        Ok(Self { bins, pixel_count: n })
    }

    pub fn from_counts(bins: [u32; HIST_BINS]) -> Result<Self> {
        let n: u32 = bins.iter().sum();
        if n == 0 {
            return Err(Error::invalid("histogram with zero pixels"));
        }
        Ok(Self { bins, pixel_count: n })
    }
}

pub fn color_histogram(patch: &Patch) -> Result<HsvHistogram> {
    HsvHistogram::from_pixels(patch.pixels.pixels().iter().copied())
}

/// `Σ_r √(H_I(r)/N(I) · H_P(r)/N(P))`.
pub fn bhattacharyya(hi: &HsvHistogram, hp: &HsvHistogram) -> Result<f64> {
    if hi.pixel_count == 0 || hp.pixel_count == 0 {
        return Err(Error::invalid("bhattacharyya needs non-empty histograms"));
    }
    let (ni, np) = (f64::from(hi.pixel_count), f64::from(hp.pixel_count));
    let s: f64 = hi
        .bins
        .iter()
        .zip(&hp.bins)
        .filter(|(a, b)| **a > 0 && **b > 0)
        .map(|(&a, &b)| (f64::from(a) / ni * f64::from(b) / np).sqrt())
        .sum();
    Ok(s.min(1.0))
}

/// `(1 − e^{−α_D·Δ})·sim_init + e^{−α_D·Δ}·sim_prev`.
pub fn proposal_score(sim_init: f64, sim_prev: f64, delta: u32, alpha_d: f64) -> f64 {
    let w_prev = (-alpha_d * f64::from(delta)).exp();
    (1.0 - w_prev) * sim_init + w_prev * sim_prev
}

/// Which reference instances feed the similarity score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceMode {
    #[default]
    Both,
    Init,
    Prev,
}

impl std::str::FromStr for InstanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Self::Both),
            "init" => Ok(Self::Init),
            "prev" => Ok(Self::Prev),
            _ => Err(Error::Config(format!("unknown instance mode `{s}` (expected init, prev or both)"))),
        }
    }
}

impl std::fmt::Display for InstanceMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Both => "both",
            Self::Init => "init",
            Self::Prev => "prev",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub patch: Patch,
    pub histogram: HsvHistogram,
    pub bbox: BBox,
    pub frame_index: usize,
}

impl Instance {
    pub fn new(patch: Patch, bbox: BBox, frame_index: usize) -> Result<Self> {
        let histogram = color_histogram(&patch)?;
        Ok(Self {
            patch,
            histogram,
            bbox,
            frame_index,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectorParams {
    pub eta: f64,
    pub eta_prime: f64,
    pub alpha_d: f64,
    pub keep_fraction: f64,
    pub beta: f64,
    pub mode: InstanceMode,
}

impl Default for SelectorParams {
    fn default() -> Self {
        Self {
            eta: 0.01,
            eta_prime: 0.60,
            alpha_d: 0.15,
            keep_fraction: 0.5,
            beta: 0.70,
            mode: InstanceMode::Both,
        }
    }
}

impl SelectorParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(0.0..=1.0).contains(&self.eta) {
            return bad("selector.eta must lie in [0, 1]");
        }
        if !(self.eta_prime >= 0.0) {
            return bad("selector.eta_prime must be >= 0");
        }
        if !(self.alpha_d >= 0.0) {
            return bad("selector.alpha_d must be >= 0");
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return bad("selector.keep_fraction must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return bad("selector.beta must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Adaptive-selection memory, owned and advanced by one tracker.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorState {
    pub f_mean: f64,
    /// Consecutive contaminated frames since the last confident one.
    pub delta: u32,
    /// Frame index of the last confident frame.
    pub anchor_frame: usize,
    pub instance_init: Instance,
    pub instance_prev: Instance,
    pub params: SelectorParams,
}

impl SelectorState {
    /// Starts from the first-frame instance and that frame's peak response.
    pub fn new(initial: Instance, f_max: f64, params: SelectorParams) -> Result<Self> {
        params.validate()?;
        if !(f_max >= 0.0) {
            return Err(Error::invalid(format!("initial confidence {f_max} must be >= 0")));
        }
        Ok(Self {
            f_mean: f_max,
            delta: 0,
            anchor_frame: initial.frame_index,
            instance_prev: initial.clone(),
            instance_init: initial,
            params,
        })
    }

    /// Exponential moving average of the final per-frame confidence.
    pub fn update_mean_confidence(&mut self, f_max: f64) -> Result<f64> {
        if !(f_max >= 0.0) {
            return Err(Error::invalid(format!("confidence {f_max} must be >= 0")));
        }
        self.f_mean = (1.0 - self.params.eta) * self.f_mean + self.params.eta * f_max;
        Ok(self.f_mean)
    }

    /// A frame whose temporary peak falls strictly below `η′·f_mean` is
    /// contaminated and increments `delta`; otherwise the frame becomes the
    /// new anchor and `delta` resets. Returns whether the frame was contaminated.
    pub fn update_contamination(&mut self, f_max_tmp: f64, frame_index: usize) -> bool {
        let contaminated = f_max_tmp < self.params.eta_prime * self.f_mean;
        if contaminated {
            self.delta += 1;
        } else {
            self.delta = 0;
            self.anchor_frame = frame_index;
        }
        contaminated
    }

    pub fn score(&self, sim_init: f64, sim_prev: f64) -> f64 {
        match self.params.mode {
            InstanceMode::Both => proposal_score(sim_init, sim_prev, self.delta, self.params.alpha_d),
            InstanceMode::Init => sim_init,
            InstanceMode::Prev => sim_prev,
        }
    }

    /// Fills both similarities of a proposal from its color histogram.
    pub fn measure(&self, proposal: &mut Proposal, hist: &HsvHistogram) -> Result<()> {
        proposal.sim_init = bhattacharyya(&self.instance_init.histogram, hist)?;
        proposal.sim_prev = bhattacharyya(&self.instance_prev.histogram, hist)?;
        Ok(())
    }
}

/// Number of proposals kept out of `n`.
pub fn kept_count(n: usize, keep_fraction: f64) -> usize {
    ((keep_fraction * n as f64).ceil() as usize).min(n)
}

/// Scores every proposal, ranks by combined score (then edge score, then
/// input order) and keeps the first `⌈keep_fraction·N⌉`.
pub fn select_proposals(proposals: Vec<Proposal>, state: &SelectorState) -> Vec<Proposal> {
    let n = proposals.len();
    let mut scored: Vec<Proposal> = proposals
        .into_iter()
        .map(|mut p| {
            p.combined_score = state.score(p.sim_init, p.sim_prev);
            p
        })
        .collect();
    scored.sort_by(|a, b| {
        b.combined_score
            .total_cmp(&a.combined_score)
            .then_with(|| b.edge_score.partial_cmp(&a.edge_score).unwrap_or(Ordering::Equal))
    });
    scored.truncate(kept_count(n, state.params.keep_fraction));
    scored
}

/// Target center and size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    pub center: (f64, f64),
    pub size: (f64, f64),
}

impl TargetState {
    pub fn from_bbox(b: &BBox) -> Self {
        Self {
            center: b.center(),
            size: (b.w, b.h),
        }
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_center(self.center.0, self.center.1, self.size.0, self.size.1)
    }
}

/// Damped move from the initial prediction towards the selected proposal
/// (given in frame coordinates).
pub fn fine_tune_state(initial_center: (f64, f64), prev_size: (f64, f64), proposal_box: &BBox, beta: f64) -> TargetState {
    let (px, py) = proposal_box.center();
    let lerp = |a: f64, b: f64| a + beta * (b - a);
    TargetState {
        center: (lerp(initial_center.0, px), lerp(initial_center.1, py)),
        size: (lerp(prev_size.0, proposal_box.w), lerp(prev_size.1, proposal_box.h)),
    }
}
