//! Propositional language over the ground atoms of a finite typed universe.

mod formula;
mod search;
mod universe;
mod world;

pub use formula::{Compiled, Formula};
pub use search::{consistent, entails, minimal_conflict, Limits};
pub(crate) use search::{compile_all, models};
pub use universe::{ground_atoms, Atom, RelationSig, Sort, Universe, UniverseBuilder};
pub use world::{all_literals, evaluate, Literal, World, MAX_WORLD_ATOMS};
