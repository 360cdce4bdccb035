//! Per-frame tracking pipeline.
//!
//! 1. correlation-filter localization on the padded window around the previous state;
//! 2. contamination bookkeeping from that temporary peak;
//! 3. edge proposals on the `s_d`-scaled detection patch centered at the new location;
//! 4. IoU pre-filter against the initial prediction;
//! 5. color-similarity ranking, keeping the top fraction;
//! 6. filter response of every kept proposal, best peak wins;
//! 7. damped blend of initial prediction and winning proposal;
//! 8. model, previous-instance and mean-confidence updates.

use std::time::{Duration, Instant};

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureConfig};
use crate::imaging::{crop, crop_image, BBox, Frame, Patch};
use crate::proposals::{generate_proposals, iou_prefilter, Proposal, ProposalConfig};
use crate::selection::{fine_tune_state, select_proposals, HsvHistogram, Instance, SelectorParams, SelectorState};
use crate::spectral::{fft2, gaussian_label, response_map, train_filter, update_model, CorrelationModel, FeatureStack, ResponseMap};

pub use crate::selection::TargetState;

const MIN_TARGET_SIDE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    /// Proposal detection patch size relative to the target.
    pub s_d: f64,
    /// Correlation-filter window size relative to the target.
    pub padding: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub update_rate: f64,
    /// Side of the square template every window is resampled to, in pixels.
    pub template_size: usize,
    /// Regression-target bandwidth as a fraction of `√(rows·cols)` cells.
    pub label_bandwidth: f64,
    /// When false, proposals are skipped and the tracker is a plain
    /// fixed-size correlation filter.
    pub use_proposals: bool,
    pub features: FeatureConfig,
    pub proposals: ProposalConfig,
    pub selector: SelectorParams,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            s_d: 1.40,
            padding: 2.5,
            lambda: 1e-4,
            sigma: 0.5,
            update_rate: 0.02,
            template_size: 96,
            label_bandwidth: 0.04,
            use_proposals: true,
            features: FeatureConfig::default(),
            proposals: ProposalConfig::default(),
            selector: SelectorParams::default(),
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.s_d > 1.0) {
            return bad(format!("s_d must be > 1, got {}", self.s_d));
        }
        if !(self.padding > 1.0) {
            return bad(format!("padding must be > 1, got {}", self.padding));
        }
        if !(self.lambda > 0.0) || !(self.sigma > 0.0) || !(self.label_bandwidth > 0.0) {
            return bad("lambda, sigma and label_bandwidth must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.update_rate) {
            return bad("update_rate must lie in [0, 1]".into());
        }
        self.features.validate()?;
        if self.template_size == 0 || !self.template_size.is_multiple_of(self.features.cell_size) {
            return bad(format!(
                "template_size {} must be a positive multiple of features.cell_size {}",
                self.template_size, self.features.cell_size
            ));
        }
        self.proposals.validate()?;
        self.selector.validate()
    }
}

/// Wall time spent in each pipeline stage for one frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub localize: Duration,
    pub proposals: Duration,
    pub prefilter: Duration,
    pub selection: Duration,
    pub evaluation: Duration,
    pub update: Duration,
}

impl StageTimings {
    pub fn sum(&self) -> Duration {
        self.localize + self.proposals + self.prefilter + self.selection + self.evaluation + self.update
    }

    pub fn accumulate(&mut self, o: &StageTimings) {
        self.localize += o.localize;
        self.proposals += o.proposals;
        self.prefilter += o.prefilter;
        self.selection += o.selection;
        self.evaluation += o.evaluation;
        self.update += o.update;
    }

    pub fn named(&self) -> [(&'static str, Duration); 6] {
        [
            ("localize", self.localize),
            ("proposals", self.proposals),
            ("prefilter", self.prefilter),
            ("selection", self.selection),
            ("evaluation", self.evaluation),
            ("update", self.update),
        ]
    }
}

/// Everything a step decided, with proposal boxes in frame coordinates.
/// `chosen` carries the winning proposal's size, recentered on its own
/// response peak.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub state: TargetState,
    pub initial_center: (f64, f64),
    pub f_max_tmp: f64,
    pub contaminated: bool,
    pub generated: usize,
    pub survivors: Vec<Proposal>,
    pub kept: Vec<Proposal>,
    pub chosen: Option<Proposal>,
    pub timings: StageTimings,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct Tracker {
    model: CorrelationModel,
    state: TargetState,
    selector: SelectorState,
    config: TrackerConfig,
    frame_index: usize,
}

impl Tracker {
    /// Trains the filter on the first frame and stores the ground-truth
    /// patch as both reference instances.
    pub fn init(frame: &Frame, gt: &BBox, config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        let (fw, fh) = (frame.width() as f64, frame.height() as f64);
        if !gt.is_valid() || gt.w < MIN_TARGET_SIDE || gt.h < MIN_TARGET_SIDE {
            return Err(Error::invalid(format!("initial box {gt:?} is degenerate")));
        }
        let (cx, cy) = gt.center();
        if !(0.0..fw).contains(&cx) || !(0.0..fh).contains(&cy) {
            return Err(Error::invalid(format!("initial box {gt:?} lies outside the {fw}x{fh} frame")));
        }
        let state = TargetState::from_bbox(gt);
        let x = window_features(frame, &state, &config)?;
        let (rows, cols) = x.dim();
        let label = gaussian_label(rows, cols, config.label_bandwidth * ((rows * cols) as f64).sqrt());
        let label_hat: Array2<Complex64> = fft2(&label);
        let model = train_filter(&x, &label_hat, config.sigma, config.lambda)?;
        let f_max = response_map(&model, &x)?.peak_value.max(0.0);
        let instance = Instance::new(instance_patch(frame, gt)?, *gt, frame.index)?;
        let selector = SelectorState::new(instance, f_max, config.selector)?;
        Ok(Self {
            model,
            state,
            selector,
            config,
            frame_index: frame.index,
        })
    }

    pub fn state(&self) -> TargetState {
        self.state
    }

    pub fn selector(&self) -> &SelectorState {
        &self.selector
    }

    pub fn model(&self) -> &CorrelationModel {
        &self.model
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    /// Filter response on the padded window centered on `state`.
    pub fn respond(&self, frame: &Frame, state: &TargetState) -> Result<ResponseMap> {
        response_map(&self.model, &window_features(frame, state, &self.config)?)
    }

    /// Frame position of the response peak for a window centered on `state`.
    fn peak_center(&self, response: &ResponseMap, state: &TargetState) -> (f64, f64) {
        let (dy, dx) = response.displacement();
        let cell_px = self.config.features.cell_size as f64 / self.config.template_size as f64;
        (
            state.center.0 + dx * cell_px * self.config.padding * state.size.0,
            state.center.1 + dy * cell_px * self.config.padding * state.size.1,
        )
    }

    pub fn step(&mut self, frame: &Frame) -> Result<TargetState> {
        self.step_detailed(frame).map(|r| r.state)
    }

    pub fn step_detailed(&mut self, frame: &Frame) -> Result<StepReport> {
        let started = Instant::now();
        if frame.width() < 3 || frame.height() < 3 {
            return Err(Error::invalid(format!("frame {}x{} is too small", frame.width(), frame.height())));
        }
        let cfg = self.config.clone();
        let mut t = StageTimings::default();
        let prev = self.state;

        // (1) localization
        let clock = Instant::now();
        let response = self.respond(frame, &prev)?;
        let initial_center = clamp_center(self.peak_center(&response, &prev), frame);
        let f_max_tmp = response.peak_value.max(0.0);
        // (2) contamination
        let contaminated = self.selector.update_contamination(f_max_tmp, frame.index);
        t.localize = clock.elapsed();

        let mut report = StepReport {
            state: TargetState {
                center: initial_center,
                size: prev.size,
            },
            initial_center,
            f_max_tmp,
            contaminated,
            generated: 0,
            survivors: Vec::new(),
            kept: Vec::new(),
            chosen: None,
            timings: t,
            total: Duration::ZERO,
        };
        let mut f_final = f_max_tmp;

        if cfg.use_proposals {
            // (3) proposals on the detection patch, native resolution
            let clock = Instant::now();
            let pw = (cfg.s_d * prev.size.0).round().max(3.0);
            let ph = (cfg.s_d * prev.size.1).round().max(3.0);
            let patch_box = BBox::from_center(initial_center.0, initial_center.1, pw, ph);
            let det = crop(frame, &patch_box, pw as usize, ph as usize)?;
            let anchor = BBox::from_center(pw / 2.0, ph / 2.0, prev.size.0, prev.size.1);
            let proposals = generate_proposals(&det, &anchor, &cfg.proposals)?;
            report.generated = proposals.len();
            t.proposals = clock.elapsed();

            // (4) IoU pre-filter
            let clock = Instant::now();
            let mut survivors = iou_prefilter(&proposals, &anchor, cfg.proposals.iou_low, cfg.proposals.iou_high);
            t.prefilter = clock.elapsed();

            // (5) color similarity and top-fraction selection
            let clock = Instant::now();
            for p in &mut survivors {
                let hist = HsvHistogram::from_pixels(det.pixels.region(&p.bbox))?;
                self.selector.measure(p, &hist)?;
            }
            let kept = select_proposals(survivors.clone(), &self.selector);
            t.selection = clock.elapsed();

            // (6) response of each kept proposal
            let clock = Instant::now();
            let to_frame = |b: &BBox| b.translated(patch_box.x, patch_box.y);
            let mut kept: Vec<Proposal> = kept
                .into_iter()
                .map(|mut p| {
                    p.bbox = to_frame(&p.bbox);
                    p
                })
                .collect();
            let mut peaks = Vec::with_capacity(kept.len());
            for p in &mut kept {
                let state = TargetState::from_bbox(&p.bbox);
                let r = self.respond(frame, &state)?;
                p.response = r.peak_value;
                peaks.push(self.peak_center(&r, &state));
            }
            // first maximum wins ties
            let best = (0..kept.len()).fold(None::<usize>, |acc, i| match acc {
                Some(j) if kept[j].response >= kept[i].response => Some(j),
                _ => Some(i),
            });
            t.evaluation = clock.elapsed();

            // (7) damped fine-tuning
            if let Some(b) = best {
                let mut chosen = kept[b].clone();
                chosen.bbox = BBox::from_center(peaks[b].0, peaks[b].1, chosen.bbox.w, chosen.bbox.h);
                report.state = fine_tune_state(initial_center, prev.size, &chosen.bbox, cfg.selector.beta);
                f_final = chosen.response.max(0.0);
                report.chosen = Some(chosen);
            }
            report.survivors = survivors
                .into_iter()
                .map(|mut p| {
                    p.bbox = to_frame(&p.bbox);
                    p
                })
                .collect();
            report.kept = kept;
        }

        // (8) updates
        let clock = Instant::now();
        let state = bound_state(report.state, frame);
        report.state = state;
        let x = window_features(frame, &state, &cfg)?;
        self.model = update_model(&self.model, &x, cfg.update_rate)?;
        self.selector.instance_prev = Instance::new(instance_patch(frame, &state.bbox())?, state.bbox(), frame.index)?;
        self.selector.update_mean_confidence(f_final)?;
        self.state = state;
        self.frame_index = frame.index;
        t.update = clock.elapsed();

        report.timings = t;
        report.total = started.elapsed();
        Ok(report)
    }
}

fn window_features(frame: &Frame, state: &TargetState, cfg: &TrackerConfig) -> Result<FeatureStack> {
    let window = BBox::from_center(state.center.0, state.center.1, cfg.padding * state.size.0, cfg.padding * state.size.1);
    let patch = crop(frame, &window, cfg.template_size, cfg.template_size)?;
    extract_features(&patch, &cfg.features)
}

fn instance_patch(frame: &Frame, b: &BBox) -> Result<Patch> {
    let w = b.w.round().max(1.0) as usize;
    let h = b.h.round().max(1.0) as usize;
    Ok(Patch {
        pixels: crop_image(&frame.image, b, w, h)?,
        source_bbox: *b,
    })
}

fn clamp_center(c: (f64, f64), frame: &Frame) -> (f64, f64) {
    (
        c.0.clamp(0.0, frame.width() as f64 - 1.0),
        c.1.clamp(0.0, frame.height() as f64 - 1.0),
    )
}

/// Keeps the center inside the frame and the size within `[2, frame size]`.
fn bound_state(s: TargetState, frame: &Frame) -> TargetState {
    let (fw, fh) = (frame.width() as f64, frame.height() as f64);
    TargetState {
        center: clamp_center(s.center, frame),
        size: (
            s.size.0.clamp(MIN_TARGET_SIDE.min(fw), fw),
            s.size.1.clamp(MIN_TARGET_SIDE.min(fh), fh),
        ),
    }
}

/// One tracked state per frame plus per-frame stage timings. The first
/// entry is the initial box; its timing covers initialization.
#[derive(Debug, Clone)]
pub struct SequenceRun {
    pub states: Vec<TargetState>,
    pub timings: Vec<StageTimings>,
    pub frame_times: Vec<Duration>,
}

impl SequenceRun {
    pub fn total_time(&self) -> Duration {
        self.frame_times.iter().sum()
    }

    pub fn stage_totals(&self) -> StageTimings {
        let mut acc = StageTimings::default();
        self.timings.iter().for_each(|t| acc.accumulate(t));
        acc
    }

    pub fn fps(&self) -> f64 {
        let secs = self.total_time().as_secs_f64();
        if secs > 0.0 {
            self.states.len() as f64 / secs
        } else {
            0.0
        }
    }
}

/// Initializes on the first frame and steps through the rest.
pub fn run_sequence<I>(frames: I, gt0: &BBox, config: &TrackerConfig) -> Result<SequenceRun>
where
    I: IntoIterator<Item = Result<Frame>>,
{
    run_sequence_with(frames, gt0, config, |_| {})
}

/// Like [`run_sequence`], handing every step report to `observe`.
pub fn run_sequence_with<I, F>(frames: I, gt0: &BBox, config: &TrackerConfig, mut observe: F) -> Result<SequenceRun>
where
    I: IntoIterator<Item = Result<Frame>>,
    F: FnMut(&StepReport),
{
    let mut frames = frames.into_iter();
    let first = frames
        .next()
        .ok_or_else(|| Error::invalid("cannot track an empty sequence"))??;
    let started = Instant::now();
    let mut tracker = Tracker::init(&first, gt0, config.clone())?;
    let init_time = started.elapsed();
    let mut run = SequenceRun {
        states: vec![TargetState::from_bbox(gt0)],
        timings: vec![StageTimings {
            update: init_time,
            ..Default::default()
        }],
        frame_times: vec![init_time],
    };
    for frame in frames {
        let report = tracker.step_detailed(&frame?)?;
        run.states.push(report.state);
        run.timings.push(report.timings);
        run.frame_times.push(report.total);
        observe(&report);
    }
    Ok(run)
}
