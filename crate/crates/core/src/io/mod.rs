//! Configuration files, result files and plot data.

mod config;
mod plots;
mod results;

pub use config::{config_to_toml, parse_config, parse_config_str};
pub use plots::{emit_plot_data, plot_tables};
pub use results::{config_hash, write_results, Results};
