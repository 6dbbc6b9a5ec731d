//! Story files, fabulas and their time series.

mod fabula;
mod parse;
mod timeline;

pub use fabula::{apply_transition, delta, Delta, Fabula, Proposition, TransitionEdit};
pub use parse::{parse_formula, parse_story, parse_story_with};
pub use timeline::{serialize_story, Timeline};
