//! `key = value` experiment configuration shared by files and flags.
//!
//! Layers are applied in order defaults < scenario defaults < file < flags.
//! Every value is parsed and range-checked in [`ExperimentConfig::resolve`],
//! before any computation starts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use besov_core::admissible::parse_number;
use besov_core::AdmissibleFn;

use crate::{CliError, CliResult, VERSION};

/// Known keys with their defaults. The defaults reproduce the acceptance
/// settings: `(N, d, s, p, q) = (2, 1, 1/2, 1, ∞)`, 200 samples up to level 34.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("n", "2"),
    ("s", "1/2"),
    ("p", "1"),
    ("q", "inf"),
    ("jmax", "34"),
    ("samples", "200"),
    ("seed", "7"),
    ("grid_level", "10"),
    ("top", "6"),
    ("grid_samples", "40"),
    ("psi", "logpow:c=1/4,b=-1"),
    ("slack", "0.01"),
    ("order", "auto"),
    ("r", "auto"),
    ("alpha", "auto"),
    ("floor_level", "0"),
    ("mode", "all"),
    ("x", "1.3"),
    ("level", "8"),
    ("lower", "-2"),
    ("upper", "2"),
    ("control_jmax", "5"),
    ("control_points", "64"),
];

/// Unresolved `key → text` layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer(pub BTreeMap<String, String>);

impl Layer {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> CliResult<()> {
        if !DEFAULTS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Usage(format!("unknown configuration key `{key}`")));
        }
        self.0.insert(key.to_string(), value.into());
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut layer = Layer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
            layer.set(k.trim(), v.trim())?;
        }
        Ok(layer)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Fully validated parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub jmax: u32,
    pub samples: usize,
    pub seed: u64,
    pub grid_level: u32,
    pub top: u32,
    pub grid_samples: usize,
    pub psi: AdmissibleFn,
    pub slack: f64,
    pub order: Option<u32>,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub floor_level: i32,
    pub mode: String,
    pub x: f64,
    pub level: u32,
    pub lower: f64,
    pub upper: f64,
    pub control_jmax: u32,
    pub control_points: usize,
    /// The resolved text of every key, as embedded in output headers.
    pub resolved: BTreeMap<String, String>,
}

fn bad(key: &str, value: &str, why: &str) -> CliError {
    CliError::Usage(format!("`{key} = {value}`: {why}"))
}

fn real(key: &str, v: &str) -> CliResult<f64> {
    parse_number(v).filter(|x| !x.is_nan()).ok_or_else(|| bad(key, v, "expected a number, fraction or `inf`"))
}

fn finite(key: &str, v: &str) -> CliResult<f64> {
    real(key, v).and_then(|x| if x.is_finite() { Ok(x) } else { Err(bad(key, v, "must be finite")) })
}

fn exponent(key: &str, v: &str) -> CliResult<f64> {
    real(key, v).and_then(|x| if x > 0.0 { Ok(x) } else { Err(bad(key, v, "must lie in (0, inf]")) })
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim().parse().map_err(|_| bad(key, v, "expected a nonnegative integer"))
}

fn auto<T>(key: &str, v: &str, f: impl Fn(&str, &str) -> CliResult<T>) -> CliResult<Option<T>> {
    if v == "auto" {
        Ok(None)
    } else {
        f(key, v).map(Some)
    }
}

impl ExperimentConfig {
    /// Applies `layers` over [`DEFAULTS`] and validates the result.
    pub fn resolve(layers: &[&Layer]) -> CliResult<Self> {
        let mut m: BTreeMap<String, String> = DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for layer in layers {
            for (k, v) in &layer.0 {
                m.insert(k.clone(), v.clone());
            }
        }
        let g = |k: &str| m[k].as_str();
        let n: usize = integer("n", g("n"))?;
        if !(1..=3).contains(&n) {
            return Err(bad("n", g("n"), "dimension must be 1, 2 or 3"));
        }
        let jmax: u32 = integer("jmax", g("jmax"))?;
        if !(1..=besov_core::seqspace::MAX_LEVEL).contains(&jmax) {
            return Err(bad("jmax", g("jmax"), "must lie in 1..=62"));
        }
        let samples: usize = integer("samples", g("samples"))?;
        if samples == 0 {
            return Err(bad("samples", g("samples"), "sampling budget must be positive"));
        }
        let grid_level: u32 = integer("grid_level", g("grid_level"))?;
        let level: u32 = integer("level", g("level"))?;
        for (k, v) in [("grid_level", grid_level), ("level", level)] {
            if !(1..=besov_core::normest::MAX_GRID_LEVEL).contains(&v) {
                return Err(bad(k, g(k), "grid level must lie in 1..=30"));
            }
        }
        let top: u32 = integer("top", g("top"))?;
        if top == 0 {
            return Err(bad("top", g("top"), "must be at least 1"));
        }
        // grid comparisons cannot reach past the sequence depth
        let top = top.min(jmax);
        let slack = finite("slack", g("slack"))?;
        if !(0.0..1.0).contains(&slack) {
            return Err(bad("slack", g("slack"), "must lie in [0, 1)"));
        }
        m.insert(String::from("top"), top.to_string());
        let g = |k: &str| m[k].as_str();
        let psi: AdmissibleFn = g("psi").parse().map_err(|e: besov_core::Error| bad("psi", g("psi"), &e.to_string()))?;
        let mode = g("mode").to_string();
        if !["all", "holder", "bmo", "weaklp"].contains(&mode.as_str()) {
            return Err(bad("mode", g("mode"), "expected all, holder, bmo or weaklp"));
        }
        let lower = finite("lower", g("lower"))?;
        let upper = finite("upper", g("upper"))?;
        if upper <= lower {
            return Err(bad("upper", g("upper"), "needs lower < upper"));
        }
        let control_jmax: u32 = integer("control_jmax", g("control_jmax"))?;
        if !(1..=12).contains(&control_jmax) {
            return Err(bad("control_jmax", g("control_jmax"), "must lie in 1..=12"));
        }
        let control_points: usize = integer("control_points", g("control_points"))?;
        if control_points == 0 {
            return Err(bad("control_points", g("control_points"), "sampling budget must be positive"));
        }
        Ok(ExperimentConfig {
            n,
            s: finite("s", g("s"))?,
            p: exponent("p", g("p"))?,
            q: exponent("q", g("q"))?,
            jmax,
            samples,
            seed: integer("seed", g("seed"))?,
            grid_level,
            top,
            grid_samples: integer("grid_samples", g("grid_samples"))?,
            psi,
            slack,
            order: auto("order", g("order"), integer)?,
            r: auto("r", g("r"), exponent)?,
            alpha: auto("alpha", g("alpha"), finite)?,
            floor_level: integer("floor_level", g("floor_level"))?,
            mode,
            x: finite("x", g("x"))?,
            level,
            lower,
            upper,
            control_jmax,
            control_points,
            resolved: m,
        })
    }

    /// `# besov <version>`, the command, then one `# key = value` per key.
    pub fn header(&self, command: &str) -> String {
        let mut h = format!("# besov {VERSION}\n# command = {command}\n");
        for (k, v) in &self.resolved {
            let _ = writeln!(h, "# {k} = {v}");
        }
        h
    }

    /// The resolved configuration as a JSON object.
    pub fn to_json(&self, command: &str) -> serde_json::Value {
        serde_json::json!({
            "version": VERSION,
            "command": command,
            "config": self.resolved,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_inf() {
        let mut l = Layer::default();
        l.set("s", "1/2").unwrap();
        l.set("q", "inf").unwrap();
        let c = ExperimentConfig::resolve(&[&l]).unwrap();
        assert_eq!(c.s, 0.5);
        assert_eq!(c.q, f64::INFINITY);
    }

    #[test]
    fn later_layers_win() {
        let file = Layer::parse("p = 2 # comment\n\nseed=3\n").unwrap();
        let mut flags = Layer::default();
        flags.set("p", "1/2").unwrap();
        let c = ExperimentConfig::resolve(&[&file, &flags]).unwrap();
        assert_eq!(c.p, 0.5);
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Layer::parse("bogus = 1").is_err());
        assert!(Layer::parse("p 1").is_err());
        for (k, v) in [("p", "0"), ("q", "-1"), ("jmax", "0"), ("samples", "0"), ("s", "abc"), ("psi", "foo:1")] {
            let mut l = Layer::default();
            l.set(k, v).unwrap();
            assert!(matches!(ExperimentConfig::resolve(&[&l]), Err(CliError::Usage(_))), "{k} = {v}");
        }
    }

    #[test]
    fn header_lists_every_key() {
        let c = ExperimentConfig::resolve(&[]).unwrap();
        let h = c.header("verify lemmas");
        assert!(h.starts_with(&format!("# besov {VERSION}\n")));
        assert_eq!(h.lines().count(), DEFAULTS.len() + 2);
        assert!(h.contains("# q = inf\n"));
    }
}
