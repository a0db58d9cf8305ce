//! Verification toolkit for FAA (functional analysis architecture) models.
//!
//! The pipeline: parse a textual architecture model ([`parser`]), validate it
//! ([`adl`]), compile it into a network of timed automata ([`transform`],
//! [`ta`]), and check queries against the network with a zone-based explorer
//! built on difference bound matrices ([`checker`], [`dbm`]). Networks can
//! also be exported to UPPAAL 4.x XML ([`uppaal`]). The `adlv` binary wires
//! these together behind `check` / `transform` / `export` / `fuzz`
//! subcommands ([`cli`], [`report`]).

pub mod adl;
pub mod checker;
pub mod cli;
pub mod dbm;
pub mod fuzz;
pub mod parser;
pub mod report;
pub mod ta;
pub mod transform;
pub mod uppaal;

/// Tool version echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
