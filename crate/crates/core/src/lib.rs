//! Compilation of MITL formulae into generalized timed transducers and
//! automata with future and history clocks, and zone-based Büchi
//! emptiness checking for the resulting automata.

pub mod automaton;
pub mod equivalence;
pub mod ext;
pub mod explorer;
pub mod formula;
pub mod translate;
pub mod zone;

pub use ext::{ExtReal, Rat};
