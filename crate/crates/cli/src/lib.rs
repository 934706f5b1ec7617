//! Library side of the `gdf` command: argument definitions, verification
//! suites, command dispatch and report rendering.

pub mod args;
pub mod output;
pub mod run;
pub mod suites;
