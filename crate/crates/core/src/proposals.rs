//! Edge-based detection proposals.
//!
//! Edge responses are gradient magnitudes grouped into contour segments
//! (8-connected, split where orientation drifts more than π/4 from the
//! segment's seed). A box scores the edge mass of segments it wholly
//! contains, minus the mass in its central half-size region, normalized by
//! `2·(w + h)^κ`.

use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_4;
use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::imaging::{gradients, iou, pixel_span, BBox, Patch};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    pub response: Array2<f64>,
    pub orientation: Array2<f64>,
    /// Contour segment per pixel, 0 for non-edge pixels.
    pub group_id: Array2<u32>,
}

/// Pixel bounds (inclusive) and summed response of one contour segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGroup {
    pub id: u32,
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
    pub mass: f64,
}

impl EdgeMap {
    pub fn width(&self) -> usize {
        self.response.ncols()
    }

    pub fn height(&self) -> usize {
        self.response.nrows()
    }

    pub fn num_groups(&self) -> usize {
        self.group_id.iter().copied().max().unwrap_or(0) as usize
    }

    /// Per-segment bounds and mass, indexed by `id - 1`.
    pub fn groups(&self) -> Vec<EdgeGroup> {
        let mut groups: Vec<EdgeGroup> = (1..=self.num_groups() as u32)
            .map(|id| EdgeGroup {
                id,
                x0: usize::MAX,
                x1: 0,
                y0: usize::MAX,
                y1: 0,
                mass: 0.0,
            })
            .collect();
        for ((y, x), &g) in self.group_id.indexed_iter() {
            if g == 0 {
                continue;
            }
            let e = &mut groups[g as usize - 1];
            e.x0 = e.x0.min(x);
            e.x1 = e.x1.max(x);
            e.y0 = e.y0.min(y);
            e.y1 = e.y1.max(y);
            e.mass += self.response[[y, x]];
        }
        groups
    }

    pub fn total_response(&self) -> f64 {
        self.response.sum()
    }
}

fn orientation_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % PI;
    d.min(PI - d)
}

/// Thresholded gradient-magnitude edges with contour grouping.
pub fn edge_map(patch: &Patch, threshold: f64) -> Result<EdgeMap> {
    let (w, h) = (patch.width(), patch.height());
    if w < 3 || h < 3 {
        return Err(Error::invalid(format!("edge map needs at least 3x3, got {w}x{h}")));
    }
    let (mag, orientation) = gradients(&patch.pixels.to_gray())?;
    let response = mag.mapv(|m| if m > threshold { m } else { 0.0 });
    let mut group_id = Array2::<u32>::zeros((h, w));
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for sy in 0..h {
        for sx in 0..w {
            if response[[sy, sx]] <= 0.0 || group_id[[sy, sx]] != 0 {
                continue;
            }
            next += 1;
            let anchor = orientation[[sy, sx]];
            group_id[[sy, sx]] = next;
            queue.push_back((sx, sy));
            while let Some((x, y)) = queue.pop_front() {
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let nx = x as isize + dx;
                        let ny = y as isize + dy;
                        if (dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if response[[ny, nx]] > 0.0
                            && group_id[[ny, nx]] == 0
                            && orientation_gap(orientation[[ny, nx]], anchor) <= FRAC_PI_4
                        {
                            group_id[[ny, nx]] = next;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
        }
    }
    Ok(EdgeMap {
        response,
        orientation,
        group_id,
    })
}

/// Scales the response of every segment that comes within `margin` pixels
/// of the patch border by `weight` (0 removes it).
pub fn suppress_background(edges: &EdgeMap, margin: f64, weight: f64) -> EdgeMap {
    let (h, w) = edges.response.dim();
    let near_border = |x: usize, y: usize| {
        (x as f64) < margin || ((w - 1 - x) as f64) < margin || (y as f64) < margin || ((h - 1 - y) as f64) < margin
    };
    let mut flagged = vec![false; edges.num_groups() + 1];
    for ((y, x), &g) in edges.group_id.indexed_iter() {
        if g != 0 && near_border(x, y) {
            flagged[g as usize] = true;
        }
    }
    let mut out = edges.clone();
    for (r, &g) in out.response.iter_mut().zip(&edges.group_id) {
        if flagged[g as usize] && g != 0 {
            *r *= weight;
        }
    }
    out
}

/// Per-pixel contour affinity: 1 on segments lying wholly inside `bbox`, 0 elsewhere.
pub fn contour_affinity(edges: &EdgeMap, bbox: &BBox) -> Array2<f64> {
    let (cx0, cx1) = pixel_span(bbox.x, bbox.w, edges.width());
    let (cy0, cy1) = pixel_span(bbox.y, bbox.h, edges.height());
    let inside: Vec<bool> = std::iter::once(false)
        .chain(
            edges
                .groups()
                .iter()
                .map(|g| g.x0 >= cx0 && g.x1 < cx1 && g.y0 >= cy0 && g.y1 < cy1),
        )
        .collect();
    edges.group_id.mapv(|g| if inside[g as usize] { 1.0 } else { 0.0 })
}

/// Centered region of half width and half height.
pub fn inner_box(b: &BBox) -> BBox {
    b.scaled(0.5, 0.5)
}

/// Box score `[Σ_{i∈b} c_i·r_i − Σ_{l∈b_in} r_l] / (2·(w + h)^κ)`.
pub fn score_box(bbox: &BBox, edges: &EdgeMap, c: &Array2<f64>, kappa: f64) -> f64 {
    let span = |b: &BBox| {
        (
            pixel_span(b.x, b.w, edges.width()),
            pixel_span(b.y, b.h, edges.height()),
        )
    };
    let ((x0, x1), (y0, y1)) = span(bbox);
    let mut num = 0.0;
    for y in y0..y1 {
        for x in x0..x1 {
            num += c[[y, x]] * edges.response[[y, x]];
        }
    }
    let ((ix0, ix1), (iy0, iy1)) = span(&inner_box(bbox));
    for y in iy0..iy1 {
        for x in ix0..ix1 {
            num -= edges.response[[y, x]];
        }
    }
    num / (2.0 * (bbox.w + bbox.h).powf(kappa))
}

/// Precomputed segment bounds and a summed-area table for scoring many boxes
/// against one edge map. Equivalent to `contour_affinity` + `score_box`.
pub struct BoxScorer {
    groups: Vec<EdgeGroup>,
    integral: Array2<f64>,
    width: usize,
    height: usize,
    kappa: f64,
}

impl BoxScorer {
    pub fn new(edges: &EdgeMap, kappa: f64) -> Self {
        let (h, w) = edges.response.dim();
        let mut integral = Array2::zeros((h + 1, w + 1));
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                row += edges.response[[y, x]];
                integral[[y + 1, x + 1]] = integral[[y, x + 1]] + row;
            }
        }
        let groups = edges.groups().into_iter().filter(|g| g.mass != 0.0).collect();
        Self {
            groups,
            integral,
            width: w,
            height: h,
            kappa,
        }
    }

    fn area_sum(&self, b: &BBox) -> f64 {
        let (x0, x1) = pixel_span(b.x, b.w, self.width);
        let (y0, y1) = pixel_span(b.y, b.h, self.height);
        let i = &self.integral;
        i[[y1, x1]] - i[[y0, x1]] - i[[y1, x0]] + i[[y0, x0]]
    }

    pub fn score(&self, b: &BBox) -> f64 {
        let (x0, x1) = pixel_span(b.x, b.w, self.width);
        let (y0, y1) = pixel_span(b.y, b.h, self.height);
        let contained: f64 = self
            .groups
            .iter()
            .filter(|g| g.x0 >= x0 && g.x1 < x1 && g.y0 >= y0 && g.y1 < y1)
            .map(|g| g.mass)
            .sum();
        (contained - self.area_sum(&inner_box(b))) / (2.0 * (b.w + b.h).powf(self.kappa))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    /// Box in detection-patch coordinates.
    pub bbox: BBox,
    pub edge_score: f64,
    pub sim_init: f64,
    pub sim_prev: f64,
    pub combined_score: f64,
    pub response: f64,
}

impl Proposal {
    pub fn new(bbox: BBox, edge_score: f64) -> Self {
        Self {
            bbox,
            edge_score,
            sim_init: 0.0,
            sim_prev: 0.0,
            combined_score: 0.0,
            response: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProposalConfig {
    pub kappa: f64,
    pub max_proposals: usize,
    /// Translation step as a fraction of the candidate's own size.
    pub step_fraction: f64,
    /// Steps taken in each direction along each axis.
    pub translation_steps: usize,
    pub scales: Vec<f64>,
    pub aspects: Vec<f64>,
    pub nms_iou: f64,
    pub iou_low: f64,
    pub iou_high: f64,
    pub edge_threshold: f64,
    pub border_margin: f64,
    pub border_weight: f64,
}

impl Default for ProposalConfig {
    fn default() -> Self {
        Self {
            kappa: 1.40,
            max_proposals: 128,
            step_fraction: 0.1,
            translation_steps: 3,
            scales: vec![0.80, 0.85, 0.90, 0.95, 1.0, 1.05, 1.10, 1.15, 1.20, 1.25],
            aspects: vec![0.9, 1.0, 1.1],
            nms_iou: 0.8,
            iou_low: 0.5,
            iou_high: 0.95,
            edge_threshold: 0.02,
            border_margin: 2.0,
            border_weight: 0.0,
        }
    }
}

impl ProposalConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.kappa > 0.0) {
            return bad("proposals.kappa must be > 0");
        }
        if !(0.0 <= self.iou_low && self.iou_low <= self.iou_high && self.iou_high <= 1.0) {
            return bad("proposals.iou_low/iou_high must satisfy 0 <= low <= high <= 1");
        }
        if !(0.0..=1.0).contains(&self.nms_iou) {
            return bad("proposals.nms_iou must lie in [0, 1]");
        }
        if !(self.step_fraction > 0.0) {
            return bad("proposals.step_fraction must be > 0");
        }
        if self.scales.is_empty() || self.scales.iter().any(|s| !(*s > 0.0)) {
            return bad("proposals.scales must be positive and non-empty");
        }
        if self.aspects.is_empty() || self.aspects.iter().any(|s| !(*s > 0.0)) {
            return bad("proposals.aspects must be positive and non-empty");
        }
        if !(0.0..1.0).contains(&self.border_weight) {
            return bad("proposals.border_weight must lie in [0, 1)");
        }
        if self.border_margin < 0.0 || self.edge_threshold < 0.0 {
            return bad("proposals.border_margin and edge_threshold must be >= 0");
        }
        Ok(())
    }
}

/// Greedy non-maximum suppression over proposals sorted by descending score.
pub fn non_max_suppression(sorted: Vec<Proposal>, max_iou: f64, limit: usize) -> Vec<Proposal> {
    let mut kept: Vec<Proposal> = Vec::new();
    for p in sorted {
        if kept.len() >= limit {
            break;
        }
        if kept.iter().all(|k| iou(&k.bbox, &p.bbox) <= max_iou) {
            kept.push(p);
        }
    }
    kept
}

/// Candidate boxes around `prev_box` (patch coordinates), scored on the
/// background-suppressed edge map. Only positive scores are kept; the result
/// is NMS-filtered and sorted by descending edge score.
pub fn generate_proposals(patch: &Patch, prev_box: &BBox, cfg: &ProposalConfig) -> Result<Vec<Proposal>> {
    let edges = edge_map(patch, cfg.edge_threshold)?;
    let edges = suppress_background(&edges, cfg.border_margin, cfg.border_weight);
    Ok(proposals_from_edges(&edges, prev_box, cfg))
}

pub fn proposals_from_edges(edges: &EdgeMap, prev_box: &BBox, cfg: &ProposalConfig) -> Vec<Proposal> {
    let scorer = BoxScorer::new(edges, cfg.kappa);
    if scorer.groups.is_empty() {
        return Vec::new();
    }
    let (pw, ph) = (edges.width() as f64, edges.height() as f64);
    let (cx, cy) = prev_box.center();
    let t = cfg.translation_steps as isize;
    let mut candidates = Vec::new();
    for &s in &cfg.scales {
        for &a in &cfg.aspects {
            let bw = prev_box.w * s * a.sqrt();
            let bh = prev_box.h * s / a.sqrt();
            for ty in -t..=t {
                for tx in -t..=t {
                    let b = BBox::from_center(
                        cx + tx as f64 * cfg.step_fraction * bw,
                        cy + ty as f64 * cfg.step_fraction * bh,
                        bw,
                        bh,
                    );
                    if b.x < 0.0 || b.y < 0.0 || b.right() > pw || b.bottom() > ph {
                        continue;
                    }
                    let score = scorer.score(&b);
                    if score > 0.0 && score.is_finite() {
                        candidates.push(Proposal::new(b, score));
                    }
                }
            }
        }
    }
    candidates.sort_by(|a, b| b.edge_score.total_cmp(&a.edge_score));
    non_max_suppression(candidates, cfg.nms_iou, cfg.max_proposals)
}

/// Keeps proposals whose IoU with `anchor` lies in `[low, high]`, in order.
pub fn iou_prefilter(proposals: &[Proposal], anchor: &BBox, low: f64, high: f64) -> Vec<Proposal> {
    proposals
        .iter()
        .filter(|p| {
            let v = iou(&p.bbox, anchor);
            low <= v && v <= high
        })
        .cloned()
        .collect()
}
