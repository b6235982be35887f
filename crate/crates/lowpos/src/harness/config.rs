//! Experiment configuration: annotation strategy, resource paths,
//! hyperparameters, seeds, and the flat key=value config-file format.
//! Every CLI flag has a config twin; the CLI overrides the file.

use std::path::PathBuf;

use crate::clean::{CleaningConfig, Script};
use crate::dict::DictScheme;
use crate::error::{Error, Result};
use crate::neural::Hyperparams;
use crate::silver::SilverMode;

/// Which silver annotation and auxiliary tasks a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Freq,
    Amb,
    FreqAe,
    AmbAe,
    Pla16,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Freq,
        Strategy::Amb,
        Strategy::FreqAe,
        Strategy::AmbAe,
        Strategy::Pla16,
    ];

    pub fn silver_mode(self) -> SilverMode {
        match self {
            Strategy::Freq | Strategy::FreqAe => SilverMode::Freq,
            Strategy::Amb | Strategy::AmbAe | Strategy::Pla16 => SilverMode::Amb,
        }
    }

    pub fn uses_autoencode(self) -> bool {
        matches!(self, Strategy::FreqAe | Strategy::AmbAe)
    }

    pub fn uses_logfreq(self) -> bool {
        self == Strategy::Pla16
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "freq" => Ok(Strategy::Freq),
            "amb" => Ok(Strategy::Amb),
            "freq+ae" => Ok(Strategy::FreqAe),
            "amb+ae" => Ok(Strategy::AmbAe),
            "pla16" => Ok(Strategy::Pla16),
            other => Err(Error::Config(format!(
                "unknown strategy `{other}` (expected freq, amb, freq+ae, amb+ae, or pla16)"
            ))),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Freq => "freq",
            Strategy::Amb => "amb",
            Strategy::FreqAe => "freq+ae",
            Strategy::AmbAe => "amb+ae",
            Strategy::Pla16 => "pla16",
        })
    }
}

/// Everything one experiment needs: resource paths, the strategy,
/// training hyperparameters, seeds, and cleaning thresholds.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub gold: Option<PathBuf>,
    pub raw: Option<PathBuf>,
    pub bilingual: Option<PathBuf>,
    pub monolingual: Option<PathBuf>,
    pub monolingual_scheme: DictScheme,
    pub high_resource: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub strategy: Strategy,
    pub hyperparams: Hyperparams,
    pub seeds: Vec<u64>,
    pub cleaning: CleaningConfig,
    pub max_vocab: usize,
    pub language_code: String,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            gold: None,
            raw: None,
            bilingual: None,
            monolingual: None,
            monolingual_scheme: DictScheme::Ud,
            high_resource: None,
            embeddings: None,
            strategy: Strategy::Amb,
            hyperparams: Hyperparams::default(),
            seeds: vec![1, 2, 3, 4, 5],
            cleaning: CleaningConfig::default(),
            max_vocab: 50_000,
            language_code: "und".to_string(),
        }
    }
}

impl ExperimentConfig {
    /// Parses a flat key=value file (UTF-8, `#` comments) on top of the
    /// defaults.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, "expected key=value"))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        }
        Ok(cfg)
    }

    /// Applies one setting; shared by the file parser and CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_usize = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("bad integer `{v}` for `{key}`")))
        };
        let parse_f64 = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{v}` for `{key}`")))
        };
        match key {
            "gold" => self.gold = Some(PathBuf::from(value)),
            "raw" => self.raw = Some(PathBuf::from(value)),
            "bilingual" => self.bilingual = Some(PathBuf::from(value)),
            "monolingual" => self.monolingual = Some(PathBuf::from(value)),
            "monolingual_scheme" => self.monolingual_scheme = value.parse()?,
            "high_resource" => self.high_resource = Some(PathBuf::from(value)),
            "embeddings" => self.embeddings = Some(PathBuf::from(value)),
            "strategy" => self.strategy = value.parse()?,
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::Config(format!("bad seed `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                if self.seeds.is_empty() {
                    return Err(Error::Config("seeds list is empty".into()));
                }
            }
            "word_dim" => self.hyperparams.word_dim = parse_usize(value)?,
            "char_dim" => self.hyperparams.char_dim = parse_usize(value)?,
            "hidden_dim" => self.hyperparams.hidden_dim = parse_usize(value)?,
            "char_dropout_rate" => self.hyperparams.char_dropout_rate = parse_f64(value)?,
            "word_noise_sigma" => self.hyperparams.word_noise_sigma = parse_f64(value)?,
            "learning_rate" => self.hyperparams.learning_rate = parse_f64(value)?,
            "min_epochs" => self.hyperparams.min_epochs = parse_usize(value)?,
            "max_epochs" => self.hyperparams.max_epochs = parse_usize(value)?,
            "patience" => self.hyperparams.patience = parse_usize(value)?,
            "foreign_frac" => self.cleaning.foreign_frac = parse_f64(value)?,
            "symbol_frac" => self.cleaning.symbol_frac = parse_f64(value)?,
            "allowed_scripts" => {
                self.cleaning.allowed_scripts = value
                    .split(',')
                    .map(|s| s.trim().parse::<Script>())
                    .collect::<Result<_>>()?;
            }
            "max_vocab" => self.max_vocab = parse_usize(value)?,
            "language_code" => self.language_code = value.to_string(),
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Checks the resources a training run needs. Every strategy
    /// requires the raw corpus, the gold test set, the bilingual
    /// dictionary, and the high-resource corpus; the monolingual
    /// dictionary and embeddings stay optional.
    pub fn validate_for_training(&self) -> Result<()> {
        for (name, path) in [
            ("raw", &self.raw),
            ("gold", &self.gold),
            ("bilingual", &self.bilingual),
            ("high_resource", &self.high_resource),
        ] {
            if path.is_none() {
                return Err(Error::Config(format!(
                    "strategy {} requires `{name}` to be set",
                    self.strategy
                )));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        self.hyperparams.validate()
    }
}
