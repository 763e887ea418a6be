//! Flat key-value run configuration with command-line overrides.
//!
//! A config file holds one `key=value` per line (`#` comments); every key
//! can be overridden with `--set key=value`. Unknown keys are rejected so a
//! typo cannot silently fall back to a default.

use anyhow::{bail, Context, Result};
use maxmix::inference::{CensorScheme, CensoringConfig, ThresholdMode};
use maxmix::model::ModelSpec;
use std::collections::BTreeMap;
use std::path::Path;

/// Every key the tools understand, with its documentation.
pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("model", "model class: mm-teg-iteg|mm-teg-ismith|ms-teg|ms-smith|ims-smith (or m1..m5)"),
    ("a", "true/initial mixing coefficient"),
    ("phi_x", "AD-part correlation range"),
    ("r_x", "AD-part disk radius"),
    ("phi_y", "AI-part correlation range"),
    ("r_y", "AI-part disk radius"),
    ("k", "number of sites"),
    ("n", "independent copies per replicate"),
    ("j", "power-study replicates"),
    ("m", "Monte-Carlo draws for the Godambe matrices"),
    ("side", "side length of the sampling square"),
    ("seed", "master seed"),
    ("workers", "worker threads (default: all cores)"),
    ("a0_grid", "null values: comma list or start:end:step"),
    ("censor_quantile", "per-site empirical threshold probability"),
    ("censor_u", "fixed Fréchet threshold (overrides censor_quantile)"),
    ("censor_scheme", "two-case|four-case"),
    ("delta", "distance cutoff for pair weights (inf allowed)"),
    ("accuracy", "storm cap per simulated replicate"),
    ("fixed_sites", "reuse one site sample across replicates (true|false)"),
    ("run_lr", "run the LR test in power studies (true|false)"),
    ("season_months", "month range kept by analyze, e.g. 4-9"),
    ("u_diag", "rank threshold for the chi/chibar diagnostics"),
    ("u_frechet", "fixed Fréchet threshold used by analyze"),
];

#[derive(Clone, Debug, Default)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(p) = path {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .with_context(|| format!("expected key=value, got '{line}'"))?;
                insert_checked(&mut map, k.trim(), v.trim())?;
            }
        }
        for ov in overrides {
            let (k, v) = ov
                .split_once('=')
                .with_context(|| format!("--set expects key=value, got '{ov}'"))?;
            insert_checked(&mut map, k.trim(), v.trim())?;
        }
        Ok(Config { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_f64_loose(v).with_context(|| format!("key {key}")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("key {key}")),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().with_context(|| format!("key {key}")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => bail!("key {key}: expected true/false, got '{other}'"),
            },
        }
    }

    pub fn model(&self) -> Result<ModelSpec> {
        let name = self.get("model").unwrap_or("mm-teg-iteg");
        Ok(ModelSpec::from_name(name)?)
    }

    /// Parameter vector of `spec` from the a/phi_x/r_x/phi_y/r_y keys.
    pub fn params_for(&self, spec: ModelSpec) -> Result<Vec<f64>> {
        let defaults: BTreeMap<&str, f64> = [
            ("a", 0.5),
            ("phi_x", 0.10),
            ("r_x", 0.25),
            ("phi_y", 0.75),
            ("r_y", 1.2),
        ]
        .into_iter()
        .collect();
        spec.param_names()
            .iter()
            .map(|name| self.f64_or(name, defaults[name]))
            .collect()
    }

    pub fn censoring(&self) -> Result<CensoringConfig> {
        let threshold = if let Some(u) = self.get("censor_u") {
            ThresholdMode::FixedFrechet(parse_f64_loose(u)?)
        } else {
            ThresholdMode::EmpiricalQuantile(self.f64_or("censor_quantile", 0.9)?)
        };
        let scheme = match self.get("censor_scheme").unwrap_or("two-case") {
            "two-case" | "2" => CensorScheme::TwoCase,
            "four-case" | "4" => CensorScheme::FourCase,
            other => bail!("censor_scheme must be two-case or four-case, got '{other}'"),
        };
        let cfg = CensoringConfig {
            threshold,
            scheme,
            delta: self.f64_or("delta", f64::INFINITY)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Null-value grid: `a,b,c` or `start:end:step` (defaults to the full
    /// 0.01..0.99 grid in steps of 0.01).
    pub fn a0_grid(&self) -> Result<Vec<f64>> {
        parse_grid(self.get("a0_grid").unwrap_or("0.01:0.99:0.01"))
    }

    /// Month range kept by the analysis pipeline (inclusive), default 4-9.
    pub fn season_months(&self) -> Result<(u32, u32)> {
        let text = self.get("season_months").unwrap_or("4-9");
        let (a, b) = text
            .split_once('-')
            .with_context(|| format!("season_months expects lo-hi, got '{text}'"))?;
        Ok((a.trim().parse()?, b.trim().parse()?))
    }
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("grid must be start:end:step, got '{text}'");
        }
        let (start, end, step) = (
            parse_f64_loose(parts[0])?,
            parse_f64_loose(parts[1])?,
            parse_f64_loose(parts[2])?,
        );
        if !(step > 0.0) || end < start {
            bail!("bad grid '{text}'");
        }
        let n = ((end - start) / step).round() as usize;
        Ok((0..=n).map(|i| start + i as f64 * step).collect())
    } else {
        text.split(',').map(|t| parse_f64_loose(t)).collect()
    }
}

fn parse_f64_loose(v: &str) -> Result<f64> {
    let t = v.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => t.parse::<f64>().with_context(|| format!("bad number '{t}'")),
    }
}

fn insert_checked(map: &mut BTreeMap<String, String>, k: &str, v: &str) -> Result<()> {
    if !KNOWN_KEYS.iter().any(|(name, _)| *name == k) {
        bail!(
            "unknown config key '{k}' (known: {})",
            KNOWN_KEYS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        );
    }
    map.insert(k.to_string(), v.to_string());
    Ok(())
}
