//! Plain-text tracker configuration: one `key = value` per line, `#`
//! comments, dotted keys for nested sections (`selector.alpha_d = 0.15`).

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::features::ColorNameTable;
use crate::tracker::TrackerConfig;

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl TrackerConfig {
    /// Applies a single dotted assignment. Relative paths (color tables) are
    /// resolved against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let f = &mut self.features;
        let p = &mut self.proposals;
        let s = &mut self.selector;
        match key {
            "s_d" => self.s_d = parse(key, value)?,
            "padding" => self.padding = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "sigma" => self.sigma = parse(key, value)?,
            "update_rate" => self.update_rate = parse(key, value)?,
            "template_size" => self.template_size = parse(key, value)?,
            "label_bandwidth" => self.label_bandwidth = parse(key, value)?,
            "use_proposals" => self.use_proposals = parse(key, value)?,
            "features.cell_size" => f.cell_size = parse(key, value)?,
            "features.hog_orientations" => f.hog_orientations = parse(key, value)?,
            "features.use_intensity" => f.use_intensity = parse(key, value)?,
            "features.use_hog" => f.use_hog = parse(key, value)?,
            "features.use_color" => f.use_color = parse(key, value)?,
            "features.window" => f.window = parse(key, value)?,
            "features.color_table" => {
                f.color_table = if value.is_empty() || value == "none" {
                    None
                } else {
                    let path = base.map_or_else(|| Path::new(value).to_path_buf(), |b| b.join(value));
                    Some(Arc::new(ColorNameTable::load(path)?))
                }
            }
            "proposals.kappa" => p.kappa = parse(key, value)?,
            "proposals.max_proposals" => p.max_proposals = parse(key, value)?,
            "proposals.step_fraction" => p.step_fraction = parse(key, value)?,
            "proposals.translation_steps" => p.translation_steps = parse(key, value)?,
            "proposals.scales" => p.scales = parse_list(key, value)?,
            "proposals.aspects" => p.aspects = parse_list(key, value)?,
            "proposals.nms_iou" => p.nms_iou = parse(key, value)?,
            "proposals.iou_low" => p.iou_low = parse(key, value)?,
            "proposals.iou_high" => p.iou_high = parse(key, value)?,
            "proposals.edge_threshold" => p.edge_threshold = parse(key, value)?,
            "proposals.border_margin" => p.border_margin = parse(key, value)?,
            "proposals.border_weight" => p.border_weight = parse(key, value)?,
            "selector.eta" => s.eta = parse(key, value)?,
            "selector.eta_prime" => s.eta_prime = parse(key, value)?,
            "selector.alpha_d" => s.alpha_d = parse(key, value)?,
            "selector.keep_fraction" => s.keep_fraction = parse(key, value)?,
            "selector.beta" => s.beta = parse(key, value)?,
            "selector.instance_mode" => s.mode = value.parse()?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses configuration text on top of the defaults and validates it.
    pub fn from_config_str(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(key.trim(), value.trim(), base).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_config_str(&text, path.parent())
    }

    /// Renders every scalar field in the file format. The color table is
    /// omitted since it is loaded from a path.
    pub fn to_config_string(&self) -> String {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        let f = &self.features;
        let p = &self.proposals;
        let s = &self.selector;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("s_d", self.s_d.to_string());
        kv("padding", self.padding.to_string());
        kv("lambda", self.lambda.to_string());
        kv("sigma", self.sigma.to_string());
        kv("update_rate", self.update_rate.to_string());
        kv("template_size", self.template_size.to_string());
        kv("label_bandwidth", self.label_bandwidth.to_string());
        kv("use_proposals", self.use_proposals.to_string());
        kv("features.cell_size", f.cell_size.to_string());
        kv("features.hog_orientations", f.hog_orientations.to_string());
        kv("features.use_intensity", f.use_intensity.to_string());
        kv("features.use_hog", f.use_hog.to_string());
        kv("features.use_color", f.use_color.to_string());
        kv("features.window", f.window.to_string());
        kv("proposals.kappa", p.kappa.to_string());
        kv("proposals.max_proposals", p.max_proposals.to_string());
        kv("proposals.step_fraction", p.step_fraction.to_string());
        kv("proposals.translation_steps", p.translation_steps.to_string());
        kv("proposals.scales", list(&p.scales));
        kv("proposals.aspects", list(&p.aspects));
        kv("proposals.nms_iou", p.nms_iou.to_string());
        kv("proposals.iou_low", p.iou_low.to_string());
        kv("proposals.iou_high", p.iou_high.to_string());
        kv("proposals.edge_threshold", p.edge_threshold.to_string());
        kv("proposals.border_margin", p.border_margin.to_string());
        kv("proposals.border_weight", p.border_weight.to_string());
        kv("selector.eta", s.eta.to_string());
        kv("selector.eta_prime", s.eta_prime.to_string());
        kv("selector.alpha_d", s.alpha_d.to_string());
        kv("selector.keep_fraction", s.keep_fraction.to_string());
        kv("selector.beta", s.beta.to_string());
        kv("selector.instance_mode", s.mode.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::InstanceMode;

    #[test]
    fn parses_dotted_keys_and_comments() {
        let text = "# tuned\n s_d = 1.5 \nselector.alpha_d = 0.2  # trailing\n\nselector.instance_mode = init\nproposals.scales = 0.9, 1.0, 1.1\n";
        let cfg = TrackerConfig::from_config_str(text, None).unwrap();
        assert_eq!(cfg.s_d, 1.5);
        assert_eq!(cfg.selector.alpha_d, 0.2);
        assert_eq!(cfg.selector.mode, InstanceMode::Init);
        assert_eq!(cfg.proposals.scales, vec![0.9, 1.0, 1.1]);
        assert_eq!(cfg.lambda, 1e-4);
    }

    #[test]
    fn unknown_key_and_bad_values_are_config_errors() {
        let e = TrackerConfig::from_config_str("selector.gamma = 1", None).unwrap_err();
        assert!(matches!(e, Error::Config(ref m) if m.contains("line 1") && m.contains("selector.gamma")));
        assert!(matches!(TrackerConfig::from_config_str("s_d = abc", None), Err(Error::Config(_))));
        assert!(matches!(TrackerConfig::from_config_str("s_d 1.4", None), Err(Error::Config(_))));
        assert!(matches!(TrackerConfig::from_config_str("s_d = 0.9", None), Err(Error::Config(_))));
        assert!(matches!(
            TrackerConfig::from_config_str("selector.keep_fraction = 0", None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn rendered_config_parses_back() {
        let mut cfg = TrackerConfig::default();
        cfg.selector.keep_fraction = 0.7;
        cfg.proposals.aspects = vec![0.8, 1.25];
        cfg.features.hog_orientations = 12;
        let back = TrackerConfig::from_config_str(&cfg.to_config_string(), None).unwrap();
        assert_eq!(back, cfg);
    }
}
