//! Result envelope: a `#`-prefixed metadata header (tool banner, command
//! provenance, and the full resolved config between markers) followed by a
//! CSV payload. Identical config and seed reproduce the payload
//! byte-for-byte; only the wall-clock line varies.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ResolvedConfig;
use crate::CliError;

pub const CONFIG_BEGIN: &str = "# --- resolved config ---";
pub const CONFIG_END: &str = "# --- end resolved config ---";

/// Payload floats carry 17 significant digits so re-reading them is exact.
pub fn csv_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV table of the payload.
pub struct Table {
    /// Short name; also the suffix of the sibling file for secondary tables.
    pub name: &'static str,
    pub header: &'static str,
    pub rows: Vec<String>,
}

/// Everything a command produced.
pub struct CommandOutput {
    /// Provenance lines rendered as `# key = value` before the config block.
    pub meta: Vec<(String, String)>,
    /// First table goes to `--out` (or stdout); later tables go to sibling
    /// files named `<stem>.<table>.csv`.
    pub tables: Vec<Table>,
}

fn render_envelope(
    resolved: &ResolvedConfig,
    meta: &[(String, String)],
    wall_clock: f64,
    table: &Table,
) -> String {
    let mut s = String::new();
    s.push_str(&format!("# nodsis {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("# table = {}\n", table.name));
    s.push_str(&format!("# wall-clock-seconds = {wall_clock:.6}\n"));
    for (k, v) in meta {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push_str(CONFIG_BEGIN);
    s.push('\n');
    for line in resolved.render().lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(CONFIG_END);
    s.push('\n');
    s.push_str(table.header);
    s.push('\n');
    for row in &table.rows {
        s.push_str(row);
        s.push('\n');
    }
    s
}

fn sibling_path(out: &Path, table_name: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.{table_name}.csv"))
}

/// Write every table of a command's output. Returns the paths written (empty
/// when printing to stdout).
pub fn write_output(
    out: Option<&Path>,
    resolved: &ResolvedConfig,
    output: &CommandOutput,
    wall_clock: f64,
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for (i, table) in output.tables.iter().enumerate() {
        let text = render_envelope(resolved, &output.meta, wall_clock, table);
        match out {
            Some(path) => {
                let target = if i == 0 {
                    path.to_path_buf()
                } else {
                    sibling_path(path, table.name)
                };
                std::fs::write(&target, text).map_err(|e| {
                    CliError::Io(format!("cannot write {}: {e}", target.display()))
                })?;
                written.push(target);
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(text.as_bytes())
                    .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
            }
        }
    }
    Ok(written)
}
