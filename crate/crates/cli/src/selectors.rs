//! Text forms of channels and truth-world selectors.
//!
//! Channels: `identity`, `drop:<f>;<g>`, `corrupt:<f>;<g>`, `rename:<a>=<b>,<c>=<d>`.
//! Truth: `first-canonical`, or `;`-separated formulas the world must satisfy.

use storyworld::conveyance::Channel;
use storyworld::story::parse_formula;
use storyworld::{Formula, Universe, WorldSet};

use crate::CliError;

fn formula_list(text: &str, u: &Universe) -> Result<Vec<Formula>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_formula(s, u).map_err(|e| CliError::Config(format!("`{s}`: {e}"))))
        .collect()
}

pub fn parse_channel(spec: &str, u: &Universe) -> Result<Channel, CliError> {
    let spec = spec.trim();
    if spec == "identity" {
        return Ok(Channel::identity());
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("unknown channel `{spec}`")))?;
    match kind.trim() {
        "drop" => Ok(Channel::drop(formula_list(rest, u)?)),
        "corrupt" => Ok(Channel::corrupt(formula_list(rest, u)?)),
        "rename" => {
            let mut pairs = Vec::new();
            for pair in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (from, to) = pair
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("rename entry `{pair}` needs `=`")))?;
                pairs.push((from.trim().to_string(), to.trim().to_string()));
            }
            Ok(Channel::rename(pairs))
        }
        other => Err(CliError::Config(format!("unknown channel kind `{other}`"))),
    }
}

/// Index into `worlds` of the selected truth world.
pub fn select_truth(spec: &str, worlds: &WorldSet) -> Result<usize, CliError> {
    let spec = spec.trim();
    if worlds.is_empty() {
        return Err(CliError::Config("no world to select a truth from".into()));
    }
    if spec == "first-canonical" {
        return Ok(0);
    }
    let required = formula_list(spec, worlds.universe())?;
    for (i, w) in worlds.iter().enumerate() {
        if required.iter().all(|f| w.evaluate(f).unwrap_or(false)) {
            return Ok(i);
        }
    }
    Err(CliError::Core(storyworld::Error::Inconsistent {
        conflict: required.iter().map(|f| f.to_string()).collect(),
    }))
}
