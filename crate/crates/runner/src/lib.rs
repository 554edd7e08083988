//! Configuration, preset catalogue, sweeps and file output for the
//! `sgdec` command-line tool.

pub mod compare;
pub mod config;
pub mod presets;
pub mod output;
pub mod run;
pub mod sweep;
