//! File formats, reports and the command-line front end for the nfcrowd
//! simulator.

pub mod config;
pub mod dump;
pub mod output;
pub mod vectors;

pub use config::load_config;
pub use dump::state_dump;
pub use output::Format;
