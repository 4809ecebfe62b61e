//! Simulation of multimodal convention formation between an Instructor and a
//! Builder who assemble block towers together.
//!
//! The Instructor describes tower programs with speech and gesture, trading
//! informativeness against production cost; the Builder interprets messages
//! pragmatically while both agents learn which arbitrary words name which
//! chunked sub-structures.

pub mod agents;
pub mod convention;
pub mod dsl;
pub mod io;
pub mod lexicon;
pub mod optim;
pub mod preference;
pub mod rng;
