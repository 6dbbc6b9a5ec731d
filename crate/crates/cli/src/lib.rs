//! Command-line front end for `storyworld`.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 inconsistency, 3 I/O failure.

pub mod analysis;
pub mod config;
pub mod selectors;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use storyworld::models::enumerate_models;
use storyworld::story::parse_story_with;
use storyworld::{Limits, Timeline};

use config::{ConfigFile, Format, FractionValue, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] storyworld::Error),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Core(e) if e.is_inconsistency() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "storyworld", version, about = "Possible-worlds analysis of story timelines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a story file and check every step for consistency.
    Validate {
        story: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Count (and optionally list) the worlds consistent with one step.
    Enumerate {
        story: PathBuf,
        #[arg(long, default_value_t = 0)]
        step: usize,
        /// Print each world's true atoms.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Run the conveyance pipeline and metric suite, writing a report.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    /// Story file; may instead come from the config file.
    pub story: Option<PathBuf>,
    /// TOML file with the same keys as these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// identity | drop:<f>;... | corrupt:<f>;... | rename:<a>=<b>,...
    #[arg(long)]
    pub channel: Option<String>,
    /// first-canonical | <formula>;<formula>...
    #[arg(long)]
    pub truth: Option<String>,
    #[arg(long)]
    pub sample_k: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Kernel threshold in [0, 1], as a decimal or a/b.
    #[arg(long)]
    pub theta: Option<String>,
    /// Satellite threshold in bits.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub bound: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl AnalyzeArgs {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            story: self.story.clone(),
            channel: self.channel.clone(),
            truth: self.truth.clone(),
            sample_k: self.sample_k,
            seed: self.seed,
            theta: self.theta.clone().map(FractionValue::Text),
            epsilon: self.epsilon,
            bound: self.bound,
            format: self.format,
            out: self.out.clone(),
        };
        RunConfig::from_file(file.merge(flags))
    }
}

fn limits(bound: Option<usize>) -> Result<Limits, CliError> {
    Ok(Limits::new(bound.unwrap_or(Limits::DEFAULT_MAX_ATOMS))?)
}

pub fn load_story(path: &Path, limits: &Limits) -> Result<Timeline, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_story_with(&text, limits).map_err(|e| match e {
        storyworld::Error::Syntax { .. } => CliError::Config(format!("{}:{e}", path.display())),
        other => CliError::Core(other),
    })
}

/// Runs one command, returning what to print on standard output.
pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Validate { story, bound } => {
            let t = load_story(story, &limits(*bound)?)?;
            Ok(format!(
                "ok: {} steps, {} ground atoms\n",
                t.len(),
                t.universe().atom_count()
            ))
        }
        Command::Enumerate {
            story,
            step,
            list,
            bound,
        } => {
            let lim = limits(*bound)?;
            let t = load_story(story, &lim)?;
            let s = enumerate_models(t.step(*step)?, t.universe(), &lim)?;
            let mut out = format!("{}\n", s.len());
            if *list {
                let u = t.universe();
                for w in s.iter() {
                    let atoms: Vec<String> = (0..u.atom_count())
                        .filter(|&i| w.value(i))
                        .map(|i| u.atom(i).to_string())
                        .collect();
                    let _ = writeln!(out, "{{{}}}", atoms.join(", "));
                }
            }
            Ok(out)
        }
        Command::Analyze(args) => {
            let run = args.run_config()?;
            let t = load_story(&run.story, &run.limits)?;
            let report = analysis::analyze(&t, &run)?;
            let text = match run.format {
                Format::Json => analysis::to_json(&report),
                Format::Csv => analysis::to_csv(&report)?,
            };
            match &run.out {
                Some(path) => {
                    std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match execute(&cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return 3;
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
