//! Correlation-filter tracking with adaptive proposal selection.
//!
//! A kernelized correlation filter localizes the target; edge-based box
//! proposals around that location are ranked by color similarity to the
//! first and previous target appearances, the best-responding proposal is
//! blended into the estimate, and the target size follows it.
//!
//! ```no_run
//! use cfaps::harness::{synth_sequence, SynthSpec};
//! use cfaps::tracker::{run_sequence, TrackerConfig};
//!
//! let seq = synth_sequence(&SynthSpec { scale_end: 1.4, ..Default::default() }, 7)?;
//! let run = run_sequence(seq.iter_frames(), &seq.groundtruth[0], &TrackerConfig::default())?;
//! println!("{:?}", run.states.last());
//! # Ok::<(), cfaps::Error>(())
//! ```
//!
//! The `examples/` directory has one program per stage: `kcf_filter`,
//! `features`, `proposals`, `color_selection`, `track_synthetic`,
//! `otb_eval` and `ablation`.

// validation writes `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod features;
pub mod harness;
pub mod imaging;
pub mod proposals;
pub mod selection;
pub mod spectral;
pub mod tracker;

pub use error::{Error, Result};
pub use imaging::{BBox, Frame, RgbImage};
pub use tracker::{run_sequence, TargetState, Tracker, TrackerConfig};
