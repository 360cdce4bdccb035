//! Tracks every sequence under an OTB-style root directory and prints
//! per-sequence and pooled per-attribute precision and success. Without an
//! argument, two synthetic sequences are written to a temporary directory.
//!
//! cargo run --release --example otb_eval [root]

use std::path::PathBuf;

use cfaps::harness::{attribute_breakdown, evaluate, load_otb_sequence, synth_sequence, Distractor, SynthSpec};
use cfaps::{run_sequence, BBox, TrackerConfig};

fn synthetic_root() -> cfaps::Result<PathBuf> {
    let root = std::env::temp_dir().join("cfaps_otb_eval");
    let grow = SynthSpec {
        name: "Grow".into(),
        width: 240,
        height: 180,
        frames: 60,
        target: BBox::new(20.0, 20.0, 28.0, 22.0),
        velocity: [1.5, 1.2],
        scale_end: 1.5,
        ..Default::default()
    };
    let pair = SynthSpec {
        name: "Pair".into(),
        width: 300,
        height: 160,
        frames: 60,
        target: BBox::new(20.0, 60.0, 30.0, 24.0),
        velocity: [2.0, 0.2],
        distractors: vec![Distractor {
            offset: [1.4, 0.0],
            color: [0.2, 0.3, 0.8],
        }],
        ..Default::default()
    };
    for (i, spec) in [grow, pair].iter().enumerate() {
        synth_sequence(spec, i as u64)?.write_otb(root.join(&spec.name))?;
    }
    Ok(root)
}

fn main() -> cfaps::Result<()> {
    let root = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => synthetic_root()?,
    };
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(&root)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("img").is_dir())
        .collect();
    dirs.sort();

    let cfg = TrackerConfig::default();
    let mut results = Vec::new();
    for dir in &dirs {
        let seq = load_otb_sequence(dir)?.preload()?;
        let run = run_sequence(seq.iter_frames(), &seq.groundtruth[0], &cfg)?;
        let report = evaluate(&run.states, &seq.groundtruth, Some(&run.frame_times))?;
        println!(
            "{:<16} {:>5} frames  DP@20 {:5.1}%  AUC {:5.1}%  {:6.1} fps",
            seq.name,
            seq.len(),
            report.dp20 * 100.0,
            report.auc * 100.0,
            report.fps.unwrap_or(0.0)
        );
        results.push((seq.attributes, report));
    }
    let table = attribute_breakdown(results.iter().map(|(a, r)| (a, r)));
    for (attr, s) in table {
        println!("[{attr}] {} frames  DP@20 {:5.1}%  AUC {:5.1}%", s.frames, s.dp20 * 100.0, s.auc * 100.0);
    }
    Ok(())
}
