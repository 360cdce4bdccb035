//! Keep-fraction and instance-mode sweeps over a single sequence.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::selection::InstanceMode;
use crate::tracker::{run_sequence, TrackerConfig};

use super::dataset::Sequence;
use super::metrics::evaluate;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub fraction: f64,
    pub mode: InstanceMode,
    pub dp20: f64,
    pub auc: f64,
    pub fps: f64,
}

/// The standard percentage-table layout: every fraction with both
/// instances, plus each single instance at 50%.
pub fn table_plan(fractions: &[f64]) -> Vec<(f64, InstanceMode)> {
    let mut plan: Vec<_> = fractions.iter().map(|&f| (f, InstanceMode::Both)).collect();
    plan.push((0.5, InstanceMode::Init));
    plan.push((0.5, InstanceMode::Prev));
    plan
}

/// Full grid, mode-major, fractions in input order inside each mode.
pub fn grid_plan(fractions: &[f64], modes: &[InstanceMode]) -> Vec<(f64, InstanceMode)> {
    modes.iter().flat_map(|&m| fractions.iter().map(move |&f| (f, m))).collect()
}

/// Runs the tracker once per plan entry, varying only the keep fraction and
/// instance mode.
pub fn ablate(seq: &Sequence, cfg: &TrackerConfig, plan: &[(f64, InstanceMode)]) -> Result<Vec<AblationRow>> {
    let gt0 = seq
        .groundtruth
        .first()
        .ok_or_else(|| Error::invalid("sequence has no ground truth"))?;
    let mut rows = Vec::with_capacity(plan.len());
    for &(fraction, mode) in plan {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Config(format!("keep fraction {fraction} outside (0, 1]")));
        }
        let mut c = cfg.clone();
        c.selector.keep_fraction = fraction;
        c.selector.mode = mode;
        let run = run_sequence(seq.iter_frames(), gt0, &c)?;
        let report = evaluate(&run.states, &seq.groundtruth, Some(&run.frame_times))?;
        rows.push(AblationRow {
            fraction,
            mode,
            dp20: report.dp20,
            auc: report.auc,
            fps: run.fps(),
        });
    }
    Ok(rows)
}

pub fn ablate_percentages(seq: &Sequence, cfg: &TrackerConfig, fractions: &[f64]) -> Result<Vec<AblationRow>> {
    ablate(seq, cfg, &grid_plan(fractions, &[cfg.selector.mode]))
}

pub fn render_table(rows: &[AblationRow]) -> String {
    let mut out = String::from("fraction  instance  DP(%)   AUC(%)  fps\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>7.0}%  {:<8}  {:>6.1}  {:>6.1}  {:.1}",
            r.fraction * 100.0,
            r.mode.to_string(),
            r.dp20 * 100.0,
            r.auc * 100.0,
            r.fps
        );
    }
    out
}
