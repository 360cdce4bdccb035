//! Sweeps the keep fraction and the instance mode on a synthetic sequence
//! with a neighboring distractor and prints the resulting table.
//!
//! cargo run --release --example ablation [frames]

use cfaps::harness::{ablate, render_table, synth_sequence, table_plan, Distractor, SynthSpec};
use cfaps::{BBox, TrackerConfig};

fn main() -> cfaps::Result<()> {
    let frames = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(60);
    let spec = SynthSpec {
        name: "pair".into(),
        width: 360,
        height: 200,
        frames,
        target: BBox::new(24.0, 80.0, 30.0, 24.0),
        velocity: [2.0, 0.3],
        background_texture: 0.0,
        distractors: vec![Distractor {
            offset: [1.3, 0.0],
            color: [0.15, 0.3, 0.85],
        }],
        ..Default::default()
    };
    let seq = synth_sequence(&spec, 4)?;
    let rows = ablate(&seq, &TrackerConfig::default(), &table_plan(&[0.3, 0.5, 0.7, 1.0]))?;
    print!("{}", render_table(&rows));
    Ok(())
}
