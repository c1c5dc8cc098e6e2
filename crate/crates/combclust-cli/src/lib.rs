//! Configuration, file formats, verb pipelines and reports behind the
//! `combclust` command-line tool.

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;
