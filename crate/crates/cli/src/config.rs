//! Run configuration: a TOML file with the same keys as the flags, flags
//! taking precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use storyworld::scalar::unit_fraction;
use storyworld::{Limits, Rational};

use crate::CliError;

pub const DEFAULT_SAMPLE_K: usize = 64;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A number or a fraction string such as `"1/2"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum FractionValue {
    Number(f64),
    Text(String),
}

impl FractionValue {
    fn text(&self) -> String {
        match self {
            FractionValue::Number(x) => x.to_string(),
            FractionValue::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub story: Option<PathBuf>,
    pub channel: Option<String>,
    pub truth: Option<String>,
    pub sample_k: Option<usize>,
    pub seed: Option<u64>,
    pub theta: Option<FractionValue>,
    pub epsilon: Option<f64>,
    pub bound: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: ConfigFile) -> ConfigFile {
        ConfigFile {
            story: over.story.or(self.story),
            channel: over.channel.or(self.channel),
            truth: over.truth.or(self.truth),
            sample_k: over.sample_k.or(self.sample_k),
            seed: over.seed.or(self.seed),
            theta: over.theta.or(self.theta),
            epsilon: over.epsilon.or(self.epsilon),
            bound: over.bound.or(self.bound),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
        }
    }
}

/// Validated settings for `analyze`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub story: PathBuf,
    pub channel: String,
    pub truth: String,
    pub sample_k: usize,
    pub seed: u64,
    pub theta: Rational,
    pub epsilon: f64,
    pub limits: Limits,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(c: ConfigFile) -> Result<Self, CliError> {
        let story = c
            .story
            .ok_or_else(|| CliError::Config("no story file given".into()))?;
        let sample_k = c.sample_k.unwrap_or(DEFAULT_SAMPLE_K);
        if sample_k == 0 {
            return Err(CliError::Config("sample-k must be at least 1".into()));
        }
        let theta = match c.theta {
            Some(v) => unit_fraction(&v.text())?,
            None => Rational::new(1, 2),
        };
        let epsilon = c.epsilon.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(CliError::Config(format!("epsilon {epsilon} is outside [0, 1]")));
        }
        let limits = Limits::new(c.bound.unwrap_or(Limits::DEFAULT_MAX_ATOMS))?;
        Ok(RunConfig {
            story,
            channel: c.channel.unwrap_or_else(|| "identity".into()),
            truth: c.truth.unwrap_or_else(|| "first-canonical".into()),
            sample_k,
            seed: c.seed.unwrap_or(DEFAULT_SEED),
            theta,
            epsilon,
            limits,
            format: c.format.unwrap_or(Format::Json),
            out: c.out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_keys_and_precedence() {
        let file: ConfigFile = toml::from_str(
            "story = \"a.story\"\nsample-k = 8\ntheta = \"3/4\"\nformat = \"csv\"\nseed = 9\n",
        )
        .unwrap();
        let flags = ConfigFile {
            seed: Some(1),
            ..Default::default()
        };
        let run = RunConfig::from_file(file.merge(flags)).unwrap();
        assert_eq!(run.sample_k, 8);
        assert_eq!(run.seed, 1);
        assert_eq!(run.theta, Rational::new(3, 4));
        assert_eq!(run.format, Format::Csv);
        assert_eq!(run.channel, "identity");
    }

    #[test]
    fn numeric_theta() {
        let file: ConfigFile = toml::from_str("story = \"a\"\ntheta = 0.25\n").unwrap();
        assert_eq!(RunConfig::from_file(file).unwrap().theta, Rational::new(1, 4));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(toml::from_str::<ConfigFile>("colour = 1").is_err());
        let bad = |c: ConfigFile| RunConfig::from_file(c).is_err();
        let base = || ConfigFile {
            story: Some("a".into()),
            ..Default::default()
        };
        assert!(bad(ConfigFile::default()));
        assert!(bad(ConfigFile { sample_k: Some(0), ..base() }));
        assert!(bad(ConfigFile { theta: Some(FractionValue::Number(1.5)), ..base() }));
        assert!(bad(ConfigFile { epsilon: Some(-0.1), ..base() }));
        assert!(bad(ConfigFile { bound: Some(0), ..base() }));
        assert!(bad(ConfigFile { bound: Some(64), ..base() }));
    }
}
