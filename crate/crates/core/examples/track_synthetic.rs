//! Tracks a synthetic target that drifts diagonally while growing, once with
//! proposal selection and once as a fixed-size correlation filter.
//!
//! cargo run --release --example track_synthetic [frames] [scale_end]

use cfaps::harness::{evaluate, synth_sequence, SynthSpec};
use cfaps::{run_sequence, BBox, TrackerConfig};

fn main() -> cfaps::Result<()> {
    let mut args = std::env::args().skip(1);
    let frames: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let scale_end: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1.8);

    let spec = SynthSpec {
        name: "grow".into(),
        width: 320,
        height: 240,
        frames,
        target: BBox::new(20.0, 20.0, 30.0, 24.0),
        velocity: [1.6, 1.2],
        scale_end,
        ..Default::default()
    };
    let seq = synth_sequence(&spec, 42)?;
    let gt0 = seq.groundtruth[0];

    let adaptive = TrackerConfig::default();
    let mut fixed = TrackerConfig::default();
    fixed.selector.beta = 0.0;
    fixed.selector.keep_fraction = 1.0;

    for (label, cfg) in [("adaptive", adaptive), ("fixed-size", fixed)] {
        let run = run_sequence(seq.iter_frames(), &gt0, &cfg)?;
        let report = evaluate(&run.states, &seq.groundtruth, Some(&run.frame_times))?;
        let good = report.overlaps.iter().filter(|&&o| o >= 0.5).count();
        let last = run.states.last().unwrap();
        let truth = seq.groundtruth.last().unwrap();
        println!(
            "{label:>10}: overlap>=0.5 on {good}/{} frames, final width {:.1} vs {:.1}, final overlap {:.2}, dp20 {:.2}, auc {:.3}, {:.0} fps",
            report.overlaps.len(),
            last.size.0,
            truth.w,
            report.overlaps.last().unwrap(),
            report.dp20,
            report.auc,
            report.fps.unwrap_or(0.0),
        );
    }
    Ok(())
}
