use std::path::{Path, PathBuf};

use adaptive_qec::adaptive::ExactOptions;
use adaptive_qec::channel::NoiseFamily;
use adaptive_qec::code::{builtin_code, StabilizerCode};
use adaptive_qec::ensemble::{DEFAULT_DEDUP_TOLERANCE, DEFAULT_PRUNE_FLOOR};
use adaptive_qec::mc::{McOptions, DEFAULT_MEMO_CAPACITY, DEFAULT_STREAMS};
use adaptive_qec::threshold::{DEFAULT_TARGET, DEFAULT_TOLERANCE};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    /// Exact when the combination budget allows, Monte Carlo otherwise.
    Auto,
    Exact,
    Mc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run depends on. Read from a JSON file (either this object or
/// a JSON report that embeds it under `config`), then overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Builtin code name or path to a code definition file.
    pub code: String,
    pub family: NoiseFamily,
    pub p: Option<f64>,
    pub levels: Option<usize>,
    pub method: MethodChoice,
    pub samples: u64,
    pub seed: u64,
    pub streams: usize,
    pub target_entropy: f64,
    pub tol: f64,
    pub budget: f64,
    pub dedup_tolerance: f64,
    pub prune_floor: f64,
    pub unoptimized: bool,
    pub mc_cells: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            code: "five-qubit".into(),
            family: NoiseFamily::Depolarizing,
            p: None,
            levels: None,
            method: MethodChoice::Auto,
            samples: 10_000,
            seed: 1,
            streams: DEFAULT_STREAMS,
            target_entropy: DEFAULT_TARGET,
            tol: DEFAULT_TOLERANCE,
            budget: ExactOptions::default().budget,
            dedup_tolerance: DEFAULT_DEDUP_TOLERANCE,
            prune_floor: DEFAULT_PRUNE_FLOOR,
            unoptimized: false,
            mc_cells: false,
            format: Format::Csv,
            out: None,
            threads: None,
        }
    }
}

/// Flags shared by every subcommand; each one overrides the config file.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// JSON config file (a bare config or an earlier JSON report).
    #[arg(long, env = "ADQEC_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    /// Builtin code name (five-qubit, steane, bitflip2, repetition3) or a
    /// code definition file.
    #[arg(long, global = true)]
    pub code: Option<String>,
    /// depolarizing, indep-flips, phase-flip or two-axis.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Noise parameter of the family.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub method: Option<MethodChoice>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo streams; results depend on this, not on --threads.
    #[arg(long, global = true)]
    pub streams: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub target_entropy: Option<f64>,
    /// Bisection bracket width at which root searches stop.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest number of level-map evaluations for one exact level.
    #[arg(long, global = true)]
    pub budget: Option<f64>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the engines.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print the resolved plan without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

pub fn load_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

/// Parses a config object, or the `config` member of a JSON report.
pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let inner = match value {
        serde_json::Value::Object(mut m) if m.contains_key("schema_version") => {
            m.remove("config").ok_or("report has no `config` member")?
        }
        v => v,
    };
    serde_json::from_value(inner).map_err(|e| e.to_string())
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => load_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.code {
            c.code = v.clone();
        }
        if let Some(v) = &self.family {
            c.family = v.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
        }
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        take!(method, samples, seed, streams, target_entropy, tol, budget, format);
        if self.p.is_some() {
            c.p = self.p;
        }
        if self.levels.is_some() {
            c.levels = self.levels;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        c.validate()?;
        Ok(c)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if let Some(p) = self.p {
            if !(0.0..=self.family.max_param()).contains(&p) {
                return bad(format!(
                    "--p {p} is outside [0, {}] for the {} family",
                    self.family.max_param(),
                    self.family
                ));
            }
        }
        if self.samples == 0 {
            return bad("--samples must be at least 1".into());
        }
        if self.streams == 0 {
            return bad("--streams must be at least 1".into());
        }
        if !(self.tol > 0.0) {
            return bad(format!("--tol must be positive, got {}", self.tol));
        }
        if !(self.budget >= 1.0) {
            return bad(format!("--budget must be at least 1, got {}", self.budget));
        }
        if !(0.0..=2.0).contains(&self.target_entropy) {
            return bad(format!("--target-entropy must lie in [0, 2] bits, got {}", self.target_entropy));
        }
        if self.threads == Some(0) {
            return bad("--threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn load_code(&self) -> Result<StabilizerCode, CliError> {
        match builtin_code(&self.code) {
            Ok(c) => Ok(c),
            Err(e) => {
                let path = Path::new(&self.code);
                if path.is_file() {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                    text.parse().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
                } else {
                    Err(CliError::Usage(format!("{e}; builtin codes are five-qubit, steane, bitflip2, repetition3")))
                }
            }
        }
    }

    pub fn require_p(&self) -> Result<f64, CliError> {
        self.p.ok_or_else(|| CliError::Usage("this command needs --p".into()))
    }

    pub fn exact(&self) -> ExactOptions {
        ExactOptions { dedup_tolerance: self.dedup_tolerance, prune_floor: self.prune_floor, budget: self.budget }
    }

    pub fn mc(&self) -> McOptions {
        McOptions {
            samples: self.samples,
            seed: self.seed,
            streams: self.streams,
            memo_capacity: DEFAULT_MEMO_CAPACITY,
            dedup_tolerance: self.dedup_tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"code": "steane", "p": 0.05, "seed": 9}"#).unwrap();
        let args = CommonArgs { config: Some(path), seed: Some(3), ..Default::default() };
        let c = args.resolve().unwrap();
        assert_eq!(c.code, "steane");
        assert_eq!(c.p, Some(0.05));
        assert_eq!(c.seed, 3);
        assert_eq!(c.samples, RunConfig::default().samples);
    }

    #[test]
    fn report_config_round_trips() {
        let c = RunConfig { code: "steane".into(), p: Some(0.0625), levels: Some(2), ..Default::default() };
        let report = serde_json::json!({"schema_version": 1, "command": "entropy", "config": c, "rows": []});
        assert_eq!(parse_config(&report.to_string()).unwrap(), c);
        assert_eq!(parse_config(&serde_json::to_string(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_config(r#"{"cod": "steane"}"#).is_err());
        let args = CommonArgs { p: Some(0.5), ..Default::default() };
        assert!(args.resolve().is_err());
        let args = CommonArgs { family: Some("bogus".into()), ..Default::default() };
        assert!(args.resolve().is_err());
    }
}
