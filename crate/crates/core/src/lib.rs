//! Epistemic logic without logical omniscience: syntactic, awareness,
//! algorithmic and impossible-worlds structures, their probabilistic
//! extensions, model checking and decision procedures.

pub mod algo;
pub mod cli;
pub mod decision;
pub mod document;
pub mod error;
pub mod formula;
pub mod implicit;
pub mod linarith;
pub mod model;
pub mod parser;
pub mod structures;

pub use formula::Formula;
pub use structures::{Approach, ClassTag, EpistemicStructure, Modal};
