//! Run configuration: defaults, then the `key = value` file named by
//! `REGSEQ_CONFIG`, then command-line flags.

use std::path::Path;

use regseq_core::funclib::MAX_PRECISION_BITS;
use regseq_core::seeker::{DEFAULT_RETRIES, DEFAULT_SCAN_BUDGET};

use crate::args::{Common, Mode, OutputFormat};

pub const CONFIG_ENV: &str = "REGSEQ_CONFIG";
pub const MAX_RETRIES: u32 = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub spec_text: Option<String>,
    pub precision_cap_bits: u32,
    pub mode: Mode,
    pub retries: u32,
    pub budget: u64,
    pub output: OutputFormat,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spec_text: None,
            precision_cap_bits: MAX_PRECISION_BITS,
            mode: Mode::Relaxed,
            retries: DEFAULT_RETRIES,
            budget: DEFAULT_SCAN_BUDGET,
            output: OutputFormat::Json,
            trace: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("config key {key}: cannot parse {value:?}"))
}

fn parse_enum<T: clap::ValueEnum>(key: &str, value: &str) -> Result<T, String> {
    T::from_str(value, true).map_err(|_| format!("config key {key}: unknown value {value:?}"))
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), String> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", no + 1))?;
            let (key, value) = (key.trim(), value.trim().trim_matches('"'));
            match key.replace('-', "_").as_str() {
                "spec" => self.spec_text = Some(value.to_string()),
                "precision_cap" | "precision_cap_bits" => self.precision_cap_bits = parse_num(key, value)?,
                "mode" => self.mode = parse_enum(key, value)?,
                "retries" => self.retries = parse_num(key, value)?,
                "budget" => self.budget = parse_num(key, value)?,
                "output" => self.output = parse_enum(key, value)?,
                "trace" => self.trace = parse_num(key, value)?,
                _ => return Err(format!("config line {}: unknown key {key:?}", no + 1)),
            }
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, flags: &Common) {
        if let Some(s) = &flags.spec {
            self.spec_text = Some(s.clone());
        }
        if let Some(c) = flags.precision_cap {
            self.precision_cap_bits = c;
        }
        if let Some(m) = flags.mode {
            self.mode = m;
        }
        if let Some(r) = flags.retries {
            self.retries = r;
        }
        if let Some(b) = flags.budget {
            self.budget = b;
        }
        if let Some(o) = flags.output {
            self.output = o;
        }
        self.trace |= flags.trace;
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.precision_cap_bits == 0 || self.precision_cap_bits > MAX_PRECISION_BITS {
            return Err(format!(
                "precision cap must be in 1..={MAX_PRECISION_BITS}, got {}",
                self.precision_cap_bits
            ));
        }
        if self.retries > MAX_RETRIES {
            return Err(format!("retries must be at most {MAX_RETRIES}, got {}", self.retries));
        }
        Ok(())
    }

    /// Defaults, then the file at `path` (if any), then `flags`.
    pub fn load(path: Option<&Path>, flags: &Common) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        if let Some(path) = path {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            cfg.apply_file_text(&text)?;
        }
        cfg.apply_flags(flags);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut cfg = RunConfig::default();
        cfg.apply_file_text("# run\nspec = x^(3/2)\nretries = 7\noutput = csv\nprecision-cap = 512\n")
            .unwrap();
        assert_eq!(cfg.spec_text.as_deref(), Some("x^(3/2)"));
        assert_eq!(
            (cfg.retries, cfg.output, cfg.precision_cap_bits),
            (7, OutputFormat::Csv, 512)
        );
        let flags = Common {
            retries: Some(9),
            ..Common::default()
        };
        cfg.apply_flags(&flags);
        assert_eq!(cfg.retries, 9);
        assert_eq!(cfg.output, OutputFormat::Csv);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_file_text("colour = blue").is_err());
        assert!(cfg.apply_file_text("retries").is_err());
        assert!(cfg.apply_file_text("mode = lenient").is_err());
        cfg.retries = 101;
        assert!(cfg.validate().is_err());
        cfg.retries = 100;
        cfg.precision_cap_bits = MAX_PRECISION_BITS + 1;
        assert!(cfg.validate().is_err());
    }
}
