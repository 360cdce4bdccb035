//! Extracts the tracker's feature stack from a synthetic frame and prints
//! per-channel statistics.
//!
//! cargo run --release --example features [cell_size]

use cfaps::features::{extract_features, FeatureConfig};
use cfaps::harness::{synth_sequence, SynthSpec};
use cfaps::imaging::crop;

fn main() -> cfaps::Result<()> {
    let cell_size = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let seq = synth_sequence(&SynthSpec::default(), 1)?;
    let frame = seq.frame(0)?;
    let gt = seq.groundtruth[0];
    let (cx, cy) = gt.center();
    let window = cfaps::BBox::from_center(cx, cy, 2.5 * gt.w, 2.5 * gt.h);
    let patch = crop(&frame, &window, 64, 64)?;

    let cfg = FeatureConfig {
        cell_size,
        ..Default::default()
    };
    let stack = extract_features(&patch, &cfg)?;
    let (h, w) = stack.dim();
    println!("{}x{} patch -> {} channels of {h}x{w} cells", patch.width(), patch.height(), stack.num_channels());
    let intensity = usize::from(cfg.use_intensity);
    let color_start = stack.num_channels() - if cfg.use_color { cfg.color_channels() } else { 0 };
    for (i, ch) in stack.channels().iter().enumerate() {
        let kind = if i < intensity {
            "intensity"
        } else if i < color_start {
            "hog"
        } else {
            "color"
        };
        let mean = ch.mean().unwrap_or(0.0);
        let max = ch.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("  {i:>2} {kind:<9} mean {mean:+.4} max {max:+.4}");
    }
    Ok(())
}
