//! Command-line front end for the `ldp` solver: case file parsing and
//! serialization, deterministic corpus generation, fuzz campaigns with an
//! independent verification harness, and an embedded regression suite.
//!
//! The binary (`ldp`) wires these modules to subcommands; they live in a
//! library so integration tests and downstream harnesses can drive
//! campaigns in-process.

pub mod campaign;
pub mod casefile;
pub mod corpus;
pub mod regress;
