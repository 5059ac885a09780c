//! Experiment runner: JSON configs in, result files out.

pub mod catalog;
pub mod config;
pub mod output;
pub mod run;

use std::path::{Path, PathBuf};

pub use config::{ConfigError, ExperimentConfig, Kind};
pub use run::{run_experiment, Check, Outcome};

/// Exit code for unreadable or invalid configs.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code when a guaranteed property failed during the run.
pub const EXIT_INVARIANT: i32 = 3;

/// Loads a config from a file path, or from the catalog when no such file
/// exists. Returns the config and the directory relative paths resolve against.
pub fn load(arg: &str) -> Result<(ExperimentConfig, PathBuf), ConfigError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            column: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let cfg = ExperimentConfig::parse(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        return Ok((cfg, base));
    }
    match catalog::find(arg) {
        Some(cfg) => Ok((cfg, PathBuf::from("."))),
        None => Err(ConfigError {
            line: None,
            column: None,
            message: format!("{arg} is neither a config file nor a catalog entry (see `exdist list`)"),
        }),
    }
}
