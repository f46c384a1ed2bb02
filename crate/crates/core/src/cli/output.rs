use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::{CliError, RunConfig};

/// Default output directory when neither the config nor a flag sets one.
pub const OUT_DIR_ENV: &str = "MIE_SPECTRA_OUT_DIR";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub(crate) fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Target {
    Stdout,
    File(PathBuf),
}

/// `-` means stdout. Otherwise the file name (the configured one or
/// `default_name`) is joined onto the output directory, which comes from
/// the config, then the environment, then the working directory.
pub(crate) fn target(config: &RunConfig, default_name: &str) -> Target {
    if config.output.as_deref() == Some(Path::new("-")) {
        return Target::Stdout;
    }
    let dir = config
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let name = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name));
    Target::File(dir.join(name))
}

pub(crate) fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, content).map_err(io)
}

pub(crate) fn emit(target: &Target, content: &str) -> Result<(), CliError> {
    match target {
        Target::Stdout => std::io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("-"),
                source,
            }),
        Target::File(path) => write_file(path, content),
    }
}

/// Comma-joined row terminated by a newline.
pub(crate) fn csv_row<S: AsRef<str>>(out: &mut String, cells: &[S]) {
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(c.as_ref());
    }
    out.push('\n');
}

pub(crate) fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub(crate) fn comment(out: &mut String, text: &str) {
    let _ = writeln!(out, "# {text}");
}
