//! One-pass evaluation: center-error precision and overlap success curves.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::{iou, BBox};
use crate::tracker::TargetState;

pub const PRECISION_POINTS: usize = 51;
pub const SUCCESS_POINTS: usize = 21;
pub const DP_THRESHOLD: usize = 20;

pub fn center_error(pred: &TargetState, gt: &BBox) -> f64 {
    let (gx, gy) = gt.center();
    (pred.center.0 - gx).hypot(pred.center.1 - gy)
}

pub fn overlap(pred: &TargetState, gt: &BBox) -> f64 {
    iou(&pred.bbox(), gt)
}

/// `k / 20` for k = 0..=20.
pub fn success_threshold(k: usize) -> f64 {
    k as f64 / (SUCCESS_POINTS - 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub frames: usize,
    pub dp20: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub dp20: f64,
    pub auc: f64,
    /// `None` when no timings were supplied (e.g. evaluating a results file).
    pub fps: Option<f64>,
    pub precision_curve: Vec<f64>,
    pub success_curve: Vec<f64>,
    pub center_errors: Vec<f64>,
    pub overlaps: Vec<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, Summary>,
}

fn curves(errors: &[f64], overlaps: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = errors.len() as f64;
    let precision = (0..PRECISION_POINTS)
        .map(|t| errors.iter().filter(|&&e| e <= t as f64).count() as f64 / n)
        .collect();
    let success = (0..SUCCESS_POINTS)
        .map(|k| {
            let tau = success_threshold(k);
            overlaps.iter().filter(|&&o| o > tau).count() as f64 / n
        })
        .collect();
    (precision, success)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

impl EvalReport {
    pub fn summary(&self) -> Summary {
        Summary {
            frames: self.center_errors.len(),
            dp20: self.dp20,
            auc: self.auc,
        }
    }

    /// Tags this single-sequence report with the sequence's attributes.
    pub fn with_attributes(mut self, attributes: &BTreeSet<String>) -> Self {
        let s = self.summary();
        self.attributes = attributes.iter().map(|a| (a.clone(), s.clone())).collect();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `frame_times` are per-frame tracking durations. When present, fps is
/// frames tracked divided by their summed time.
pub fn evaluate(preds: &[TargetState], gts: &[BBox], frame_times: Option<&[Duration]>) -> Result<EvalReport> {
    if preds.is_empty() || preds.len() != gts.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} ground-truth boxes",
            preds.len(),
            gts.len()
        )));
    }
    let center_errors: Vec<f64> = preds.iter().zip(gts).map(|(p, g)| center_error(p, g)).collect();
    let overlaps: Vec<f64> = preds.iter().zip(gts).map(|(p, g)| overlap(p, g)).collect();
    let (precision_curve, success_curve) = curves(&center_errors, &overlaps);
    let fps = frame_times.and_then(|t| {
        let total: f64 = t.iter().map(Duration::as_secs_f64).sum();
        (total > 0.0).then(|| t.len() as f64 / total)
    });
    Ok(EvalReport {
        dp20: precision_curve[DP_THRESHOLD],
        auc: mean(&success_curve),
        fps,
        precision_curve,
        success_curve,
        center_errors,
        overlaps,
        attributes: BTreeMap::new(),
    })
}

/// Pools per-frame results of all sequences carrying each attribute.
pub fn attribute_breakdown<'a>(runs: impl IntoIterator<Item = (&'a BTreeSet<String>, &'a EvalReport)>) -> BTreeMap<String, Summary> {
    let mut pooled: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (attrs, report) in runs {
        for a in attrs {
            let e = pooled.entry(a.clone()).or_default();
            e.0.extend_from_slice(&report.center_errors);
            e.1.extend_from_slice(&report.overlaps);
        }
    }
    pooled
        .into_iter()
        .map(|(a, (errs, ovs))| {
            let (p, s) = curves(&errs, &ovs);
            let summary = Summary {
                frames: errs.len(),
                dp20: p[DP_THRESHOLD],
                auc: mean(&s),
            };
            (a, summary)
        })
        .collect()
}
