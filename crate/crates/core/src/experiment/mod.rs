//! Configured experiment runs and their serialized output.

mod config;
mod output;
mod runs;

pub use config::{
    ExperimentConfig, ExperimentKind, GridSection, ModelKind, ModelPoint, ModelSection, OutputFormat, OutputSection,
    PoolSection, RngSection, SimSection,
};
pub use output::{round12, Cell, Table};
pub use runs::{run_experiment, ExperimentOutput};

use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Metadata block written with JSON output.
pub fn metadata(config: &ExperimentConfig) -> Value {
    json!({
        "seed": config.seed(),
        "version": VERSION,
        "config": serde_json::to_value(config).unwrap_or(Value::Null),
    })
}

/// Encodes the table in the configured format.
pub fn render(config: &ExperimentConfig, out: &ExperimentOutput) -> Result<String> {
    match config.format() {
        OutputFormat::Csv => out.table.to_csv(),
        OutputFormat::Json => out.table.to_json(metadata(config)),
    }
}

/// Writes the rendered table (when an output path is set) and returns the
/// single-object summary for standard output.
pub fn write_output(config: &ExperimentConfig, out: &ExperimentOutput) -> Result<Value> {
    let text = render(config, out)?;
    if let Some(path) = &config.output.path {
        let path = std::path::Path::new(path);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        }
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(json!({
        "experiment": config.experiment.as_str(),
        "seed": config.seed(),
        "version": VERSION,
        "rows": out.table.len(),
        "format": config.format(),
        "output": config.output.path,
        "flags": out.flags,
        "details": out.details,
    }))
}
