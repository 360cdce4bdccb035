//! Generates edge-based box proposals around a target and shows how the IoU
//! prefilter narrows them down.
//!
//! cargo run --release --example proposals

use cfaps::harness::{synth_sequence, SynthSpec};
use cfaps::imaging::{crop, iou};
use cfaps::proposals::{generate_proposals, iou_prefilter, ProposalConfig};
use cfaps::BBox;

fn main() -> cfaps::Result<()> {
    let seq = synth_sequence(&SynthSpec::default(), 3)?;
    let frame = seq.frame(0)?;
    let gt = seq.groundtruth[0];
    let (cx, cy) = gt.center();

    // detection patch at native resolution so patch and frame pixels agree
    let window = BBox::from_center(cx, cy, 1.4 * gt.w, 1.4 * gt.h);
    let (pw, ph) = (window.w.round() as usize, window.h.round() as usize);
    let patch = crop(&frame, &window, pw, ph)?;
    let prev = gt.translated(-window.x, -window.y);

    let cfg = ProposalConfig::default();
    let all = generate_proposals(&patch, &prev, &cfg)?;
    let kept = iou_prefilter(&all, &prev, cfg.iou_low, cfg.iou_high);
    println!("{} proposals, {} inside IoU [{}, {}] of the previous box", all.len(), kept.len(), cfg.iou_low, cfg.iou_high);
    for p in kept.iter().take(8) {
        println!(
            "  edge score {:.4}  box ({:5.1},{:5.1},{:5.1},{:5.1})  IoU {:.3}",
            p.edge_score,
            p.bbox.x,
            p.bbox.y,
            p.bbox.w,
            p.bbox.h,
            iou(&p.bbox, &prev)
        );
    }
    Ok(())
}
