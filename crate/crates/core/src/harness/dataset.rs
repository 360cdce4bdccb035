//! OTB-layout sequences: `img/` with numbered frames plus
//! `groundtruth_rect.txt` (`x,y,w,h` per line, 1-based pixel coordinates).
//! An optional `attributes.txt` lists tags such as `SV`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::imaging::{BBox, Frame};
use crate::tracker::TargetState;

pub const GROUNDTRUTH_FILE: &str = "groundtruth_rect.txt";
pub const ATTRIBUTES_FILE: &str = "attributes.txt";
const IMAGE_EXTENSIONS: [&str; 4] = ["jpg", "jpeg", "png", "bmp"];

#[derive(Debug, Clone)]
pub enum FrameSource {
    Files(Vec<PathBuf>),
    Memory(Vec<Frame>),
}

#[derive(Debug, Clone)]
pub struct Sequence {
    pub name: String,
    pub frames: FrameSource,
    /// Zero-based boxes, one per frame.
    pub groundtruth: Vec<BBox>,
    pub attributes: BTreeSet<String>,
}

impl Sequence {
    pub fn len(&self) -> usize {
        match &self.frames {
            FrameSource::Files(f) => f.len(),
            FrameSource::Memory(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Frame `i` (0-based position); its `index` field is `i + 1`.
    pub fn frame(&self, i: usize) -> Result<Frame> {
        match &self.frames {
            FrameSource::Files(paths) => {
                let p = paths
                    .get(i)
                    .ok_or_else(|| Error::invalid(format!("frame {i} out of range")))?;
                Frame::load(p, i + 1)
            }
            FrameSource::Memory(frames) => frames
                .get(i)
                .cloned()
                .ok_or_else(|| Error::invalid(format!("frame {i} out of range"))),
        }
    }

    pub fn iter_frames(&self) -> impl Iterator<Item = Result<Frame>> + '_ {
        (0..self.len()).map(move |i| self.frame(i))
    }

    /// Loads every file-backed frame into memory.
    pub fn preload(&self) -> Result<Sequence> {
        let frames = self.iter_frames().collect::<Result<Vec<_>>>()?;
        Ok(Sequence {
            frames: FrameSource::Memory(frames),
            ..self.clone()
        })
    }

    /// Writes the sequence in OTB layout (PNG frames).
    pub fn write_otb(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let img = dir.join("img");
        fs::create_dir_all(&img)?;
        for (i, frame) in self.iter_frames().enumerate() {
            frame?.save(img.join(format!("{:04}.png", i + 1)))?;
        }
        let states: Vec<TargetState> = self.groundtruth.iter().map(TargetState::from_bbox).collect();
        fs::write(dir.join(GROUNDTRUTH_FILE), format_boxes(&states))?;
        if !self.attributes.is_empty() {
            let tags: Vec<&str> = self.attributes.iter().map(String::as_str).collect();
            fs::write(dir.join(ATTRIBUTES_FILE), tags.join(",") + "\n")?;
        }
        Ok(())
    }
}

/// Parses `x,y,w,h` lines (comma, tab or space separated, 1-based) into
/// zero-based boxes. Blank lines are skipped.
pub fn parse_boxes(text: &str, path: &Path) -> Result<Vec<BBox>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| Error::format(path, Some(i + 1), m);
        let vals: Vec<f64> = line
            .split(|c: char| c == ',' || c == '\t' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| err(format!("`{t}` is not a number"))))
            .collect::<Result<_>>()?;
        if vals.len() != 4 {
            return Err(err(format!("expected 4 values, found {}", vals.len())));
        }
        let b = BBox::new(vals[0] - 1.0, vals[1] - 1.0, vals[2], vals[3]);
        if !b.is_valid() {
            return Err(err(format!("box {line} must have positive finite size")));
        }
        out.push(b);
    }
    Ok(out)
}

/// One 1-based `x,y,w,h` line per state.
pub fn format_boxes(states: &[TargetState]) -> String {
    let mut out = String::new();
    for s in states {
        let b = s.bbox();
        let _ = writeln!(out, "{:.3},{:.3},{:.3},{:.3}", b.x + 1.0, b.y + 1.0, b.w, b.h);
    }
    out
}

pub fn read_boxes(path: impl AsRef<Path>) -> Result<Vec<BBox>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::format(path, None, e.to_string()))?;
    parse_boxes(&text, path)
}

fn frame_number(p: &Path) -> Option<u64> {
    let ext = p.extension()?.to_str()?.to_ascii_lowercase();
    if !IMAGE_EXTENSIONS.contains(&ext.as_str()) {
        return None;
    }
    p.file_stem()?.to_str()?.parse().ok()
}

pub fn load_otb_sequence(dir: impl AsRef<Path>) -> Result<Sequence> {
    let dir = dir.as_ref();
    let img_dir = dir.join("img");
    let entries = fs::read_dir(&img_dir).map_err(|e| Error::format(&img_dir, None, format!("cannot read frame directory: {e}")))?;
    let mut frames: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if let Some(n) = frame_number(&path) {
            frames.push((n, path));
        }
    }
    if frames.is_empty() {
        return Err(Error::format(&img_dir, None, "no numbered image frames"));
    }
    frames.sort();

    let gt_path = dir.join(GROUNDTRUTH_FILE);
    let groundtruth = read_boxes(&gt_path)?;
    if groundtruth.len() != frames.len() {
        return Err(Error::format(
            &gt_path,
            None,
            format!("{} boxes for {} frames", groundtruth.len(), frames.len()),
        ));
    }
    let attributes = match fs::read_to_string(dir.join(ATTRIBUTES_FILE)) {
        Ok(text) => text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
        Err(_) => BTreeSet::new(),
    };
    let name = dir
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("sequence")
        .to_string();
    Ok(Sequence {
        name,
        frames: FrameSource::Files(frames.into_iter().map(|(_, p)| p).collect()),
        groundtruth,
        attributes,
    })
}
