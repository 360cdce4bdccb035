//! Benchmark plumbing: OTB sequences, one-pass metrics, ablation sweeps and
//! synthetic sequences.

pub mod ablation;
pub mod dataset;
pub mod metrics;
pub mod synth;

pub use ablation::{ablate, ablate_percentages, grid_plan, render_table, table_plan, AblationRow};
pub use dataset::{format_boxes, load_otb_sequence, parse_boxes, read_boxes, FrameSource, Sequence};
pub use metrics::{attribute_breakdown, center_error, evaluate, overlap, EvalReport, Summary};
pub use synth::{synth_sequence, Distractor, SynthSpec};
