use std::io::Write;

use idlaw_core::{IdLawError, LawSpec};

use crate::{CliResult, Failure, Format, OutputArgs};

/// Explicit `--format`, else guessed from the `--out` extension, else `default`.
pub fn format_of(out: &OutputArgs, default: Format) -> Format {
    if let Some(f) = out.format {
        return f;
    }
    match out.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        _ => default,
    }
}

pub fn write_text(out: &OutputArgs, text: &str) -> CliResult<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Input(format!("stdout: {e}")))
        }
    }
}

/// Renders in the chosen format and writes it out.
pub fn emit(
    out: &OutputArgs,
    default: Format,
    json: impl FnOnce() -> idlaw_core::Result<String>,
    csv: impl FnOnce() -> idlaw_core::Result<String>,
) -> CliResult<()> {
    let mut text = match format_of(out, default) {
        Format::Json => json()?,
        Format::Csv => csv()?,
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    write_text(out, &text)
}

pub fn load_law(path: &std::path::Path) -> CliResult<LawSpec> {
    LawSpec::load(path).map_err(|e| match e {
        IdLawError::Io(io) => Failure::Input(format!("cannot read {}: {io}", path.display())),
        other => Failure::Input(format!("{}: {other}", path.display())),
    })
}

/// Splits a flat list into points of `dim` coordinates.
pub fn points(values: &[f64], dim: usize) -> CliResult<Vec<Vec<f64>>> {
    if values.is_empty() || values.len() % dim != 0 {
        return Err(Failure::Input(format!(
            "--y needs a non-empty multiple of {dim} values, got {}",
            values.len()
        )));
    }
    Ok(values.chunks(dim).map(|c| c.to_vec()).collect())
}
