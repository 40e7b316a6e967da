use helmholtz_abc::Error;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// `manifest.toml`: the effective parameters of a run, written in the
/// config-file format so that `--config` on the `[parameters]` table
/// reproduces it.
#[derive(Serialize)]
struct Manifest<'a, P: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    command_line: Vec<String>,
    outputs: Vec<String>,
    parameters: &'a P,
}

pub fn write<P: Serialize>(dir: &Path, subcommand: &str, parameters: &P, outputs: &[PathBuf]) -> Result<PathBuf, Error> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        command_line: std::env::args().collect(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        parameters,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(format!("manifest: {e}")))?;
    let path = dir.join("manifest.toml");
    write_file(&path, &text)?;
    Ok(path)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

pub fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
