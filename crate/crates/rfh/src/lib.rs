//! File formats, built-in examples, reports and the command-line front end
//! for `rfh-core`.

pub mod cli;
pub mod fixtures;
pub mod io;
pub mod pipeline;
pub mod report;
