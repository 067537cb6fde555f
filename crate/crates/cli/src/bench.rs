//! Corpus benchmark: per-file byte codes built from each file's own
//! distribution.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use vlrs::codec::{Codec, Encoder};
use vlrs::construct::{huffman, lexicographic_vlrs, mirror_vlrs};
use vlrs::format::write_container;
use vlrs::model::{byte_labels, SourceModel, Vlrs};

use crate::error::CliError;
use crate::input::bytes_to_symbols;
use crate::BenchArgs;

#[derive(Serialize, Clone, Debug)]
struct CodeResult {
    bits: u64,
    container_bytes: usize,
    bits_per_symbol: f64,
}

#[derive(Serialize, Debug)]
struct FileResult {
    file: String,
    bytes: usize,
    /// Empirical order-0 entropy of the raw byte counts.
    entropy: f64,
    huffman: Option<CodeResult>,
    lex: Option<CodeResult>,
    mirror: Option<CodeResult>,
    /// Why a column is missing, if one is.
    note: Option<String>,
}

fn raw_entropy(data: &[u8]) -> f64 {
    let mut counts = [0u64; 256];
    for &b in data {
        counts[b as usize] += 1;
    }
    let n = data.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .fold(0.0, |a, b| a + b)
}

fn measure(code: &Vlrs, data: &[u8], verify: bool) -> Result<CodeResult, String> {
    let symbols = bytes_to_symbols(data);
    let block = Encoder::new(code).encode(&symbols).map_err(|e| e.to_string())?;
    if verify {
        let back = Codec::new(code)
            .and_then(|c| c.decode(&block))
            .map_err(|e| e.to_string())?;
        if back != symbols {
            return Err("decoded output differs from the input".into());
        }
    }
    let container = write_container(code, &block).map_err(|e| e.to_string())?;
    Ok(CodeResult {
        bits: block.payload.len() as u64,
        container_bytes: container.len(),
        bits_per_symbol: block.payload.len() as f64 / data.len() as f64,
    })
}

fn bench_file(path: &Path, verify: bool) -> Result<FileResult, CliError> {
    let data = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let mut result = FileResult {
        file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        bytes: data.len(),
        entropy: raw_entropy(&data),
        huffman: None,
        lex: None,
        mirror: None,
        note: None,
    };
    if data.is_empty() {
        result.note = Some("empty file".into());
        return Ok(result);
    }
    let source = SourceModel::from_bytes(&data);
    let h = huffman(&source).map_err(|e| CliError::Validation(e.to_string()))?;
    let relabel = |c: Vlrs| c.relabel(byte_labels()).expect("256 symbols");
    let mut notes = Vec::new();
    let mut run = |name: &str, code: Result<Vlrs, String>| match code.and_then(|c| measure(&c, &data, verify)) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("{name}: {e}"));
            None
        }
    };
    result.huffman = run("huffman", h.to_vlrs(byte_labels()).map_err(|e| e.to_string()));
    result.lex = run("lex", lexicographic_vlrs(&h).map(relabel).map_err(|e| e.to_string()));
    result.mirror = run("mirror", mirror_vlrs(&h).map(relabel).map_err(|e| e.to_string()));
    if !notes.is_empty() {
        result.note = Some(notes.join("; "));
    }
    Ok(result)
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn cell(r: &Option<CodeResult>) -> String {
    r.as_ref()
        .map_or_else(|| "n/a".to_string(), |r| format!("{:.3}", r.bits_per_symbol))
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let files = corpus_files(&args.corpus)?;
    let results = files
        .par_iter()
        .map(|p| bench_file(p, args.verify))
        .collect::<Result<Vec<_>, _>>()?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&results).expect("serializable report"));
        return Ok(());
    }
    let width = results.iter().map(|r| r.file.len()).max().unwrap_or(4).max(4);
    println!(
        "{:<width$} {:>10} {:>8} {:>8} {:>8} {:>8}",
        "file", "bytes", "entropy", "huffman", "lex", "mirror"
    );
    for r in &results {
        println!(
            "{:<width$} {:>10} {:>8.3} {:>8} {:>8} {:>8}",
            r.file,
            r.bytes,
            r.entropy,
            cell(&r.huffman),
            cell(&r.lex),
            cell(&r.mirror)
        );
        if let Some(note) = &r.note {
            println!("{:<width$}   note: {note}", "");
        }
    }
    println!("(bits per byte)");
    Ok(())
}
