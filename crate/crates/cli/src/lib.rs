//! Command-line front end for regel: sketch and end-to-end synthesis, parser
//! training, and a harness that replays the interactive refinement loop on
//! benchmark files.

pub mod bench;
pub mod benchmark;
pub mod cli;
pub mod e2e;
pub mod error;

pub use bench::{run_bench, BenchConfig, RunReport};
pub use benchmark::{load_dir, Benchmark, Loaded};
pub use error::CliError;
