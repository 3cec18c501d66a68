//! Command-line front end for `symconv`: image loading and resizing,
//! detection pipelines, evaluation, and JSON/PGM/CSV output.

pub mod args;
pub mod config;
pub mod error;
pub mod imageio;
pub mod output;
pub mod pipeline;
pub mod run;

pub use config::{Criterion, Mode, RunConfig};
pub use error::{CliError, Result};
pub use imageio::{load_image, write_pgm16};
pub use output::Detections;
pub use run::{run, RunReport};
