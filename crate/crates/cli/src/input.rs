//! Reading codes, distributions and symbol files.

use std::fs;
use std::path::Path;

use vlrs::format::parse_code_spec;
use vlrs::model::{byte_labels, SourceModel, Symbol, Vlrs};

use crate::error::CliError;
use crate::PdfArgs;

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read_file(path)?;
    String::from_utf8(bytes).map_err(|_| CliError::Io(format!("{}: not valid UTF-8", path.display())))
}

pub fn load_code(path: &Path) -> Result<Vlrs, CliError> {
    Ok(parse_code_spec(&read_text(path)?)?)
}

pub fn parse_pdf(text: &str) -> Result<SourceModel, CliError> {
    let values = text
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad probability {v:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SourceModel::new(values).map_err(|e| CliError::Usage(format!("bad distribution: {e}")))
}

pub fn load_pdf(args: &PdfArgs) -> Result<SourceModel, CliError> {
    match (&args.pdf, &args.pdf_from) {
        (Some(text), _) => parse_pdf(text),
        (None, Some(path)) => Ok(SourceModel::from_bytes(&read_file(path)?)),
        (None, None) => Err(CliError::Usage("one of --pdf or --pdf-from is required".into())),
    }
}

pub fn pdf_for(code: &Vlrs, source: SourceModel) -> Result<SourceModel, CliError> {
    code.check_source(&source)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(source)
}

pub fn require_byte_alphabet(code: &Vlrs) -> Result<(), CliError> {
    if code.alphabet_size() != 256 {
        return Err(CliError::Usage(format!(
            "byte mode needs a 256-symbol code, this one has {} symbols",
            code.alphabet_size()
        )));
    }
    Ok(())
}

pub fn bytes_to_symbols(data: &[u8]) -> Vec<Symbol> {
    data.iter().map(|&b| Symbol(b as u32)).collect()
}

pub fn symbols_to_bytes(symbols: &[Symbol]) -> Vec<u8> {
    symbols.iter().map(|s| s.0 as u8).collect()
}

pub fn parse_symbols(code: &Vlrs, text: &str) -> Result<Vec<Symbol>, CliError> {
    text.split_whitespace()
        .map(|label| {
            code.symbol_by_label(label)
                .ok_or_else(|| CliError::Usage(format!("unknown symbol {label:?} in input")))
        })
        .collect()
}

pub fn render_symbols(code: &Vlrs, symbols: &[Symbol]) -> String {
    let mut out = symbols
        .iter()
        .map(|&s| code.label(s))
        .collect::<Vec<_>>()
        .join(" ");
    if !symbols.is_empty() {
        out.push('\n');
    }
    out
}

/// `--labels` value: comma-separated labels or `bytes`.
pub fn parse_labels(text: &str, size: usize) -> Result<Vec<String>, CliError> {
    let labels: Vec<String> = if text == "bytes" {
        byte_labels()
    } else {
        text.split(',').map(|l| l.trim().to_string()).collect()
    };
    if labels.len() != size {
        return Err(CliError::Usage(format!(
            "{} labels given for {size} symbols",
            labels.len()
        )));
    }
    Ok(labels)
}
