//! Truly concurrent bisimilarities on finite prime event structures.
//!
//! Strong and branching pomset, step, history-preserving and hereditary
//! history-preserving bisimilarity are decided two ways: by computing the
//! greatest bisimulation directly ([`oracle`]) and by solving the
//! corresponding Spoiler/Duplicator game ([`game`]).

pub mod error;
pub mod fixtures;
pub mod game;
pub mod generate;
pub mod iso;
pub mod kind;
pub mod oracle;
pub mod pes;
pub mod product;

pub use error::{Error, Result};
pub use kind::{Flavor, Mode, RelationKind};
pub use pes::{validate_pes, Caps, EventSet, Label, Pes, RawPes, RawTermination};
pub use product::{CheckOptions, State};
