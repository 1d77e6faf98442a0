//! File formats, the benchmark protocol and boundary-grid export for the
//! `occelm-core` one-class classifiers. The `occelm` binary wraps these.

pub mod bench;
pub mod grid;
pub mod io;
pub mod modelfile;
pub mod report;
