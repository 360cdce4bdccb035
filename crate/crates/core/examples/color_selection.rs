//! Ranks boxes by HSV histogram similarity to a red target while a blue
//! look-alike sits next to it, and shows how the contamination count shifts
//! weight between the initial and previous instances.
//!
//! cargo run --release --example color_selection

use cfaps::harness::{synth_sequence, Distractor, SynthSpec};
use cfaps::imaging::{crop_image, Patch};
use cfaps::proposals::Proposal;
use cfaps::selection::{color_histogram, proposal_score, select_proposals, Instance, SelectorParams, SelectorState};
use cfaps::BBox;

fn patch_of(img: &cfaps::RgbImage, b: &BBox) -> cfaps::Result<Patch> {
    Ok(Patch {
        pixels: crop_image(img, b, b.w as usize, b.h as usize)?,
        source_bbox: *b,
    })
}

fn main() -> cfaps::Result<()> {
    let spec = SynthSpec {
        frames: 1,
        background_texture: 0.0,
        distractors: vec![Distractor {
            offset: [1.3, 0.0],
            color: [0.15, 0.3, 0.85],
        }],
        ..Default::default()
    };
    let frame = synth_sequence(&spec, 0)?.frame(0)?;
    let gt = spec.target;
    let state = SelectorState::new(Instance::new(patch_of(&frame.image, &gt)?, gt, 1)?, 1.0, SelectorParams::default())?;

    let mut proposals = Vec::new();
    for step in -4..=14 {
        let b = gt.translated(f64::from(step) * 0.1 * gt.w, 0.0);
        let mut p = Proposal::new(b, 1.0);
        state.measure(&mut p, &color_histogram(&patch_of(&frame.image, &b)?)?)?;
        proposals.push(p);
    }
    let kept = select_proposals(proposals.clone(), &state);
    println!("offset  similarity  kept");
    for p in &proposals {
        let on = kept.iter().any(|k| k.bbox == p.bbox);
        println!("{:+5.1}w  {:10.3}  {}", (p.bbox.x - gt.x) / gt.w, p.sim_init + 0.0, if on { "yes" } else { "" });
    }

    println!("\nweight on the initial instance as contamination grows:");
    for delta in [0, 1, 3, 10, 30] {
        println!("  {delta:>2} frames: score(0.9, 0.3) = {:.3}", proposal_score(0.9, 0.3, delta, 0.15));
    }
    Ok(())
}
