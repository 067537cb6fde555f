use serde::Serialize;
use vlrs::analysis::{
    asymptotic_mdl, empirical_bit_stats, entropy, exact_mdl, marginal_bit_trace, rule_transition_matrix,
    stationary_rule_distribution, AnalysisError,
};
use vlrs::codec::Codec;
use vlrs::construct::{hu_tucker, huffman, lexicographic_vlrs, mirror_vlrs, ConstructError};
use vlrs::format::{parse_code_spec_unchecked, read_container, render_code_spec, write_container};
use vlrs::model::{byte_labels, default_labels, Vlrs};
use vlrs::simplify::simplify;
use vlrs::validate::validate as validate_code;

use crate::error::CliError;
use crate::input::*;
use crate::{AnalyzeArgs, BitstatsArgs, ConstructArgs, Construction, DecodeArgs, EncodeArgs, ValidateArgs};

/// Dense matrices are only printed up to this many rules.
const MAX_PRINTED_RULES: usize = 16;
/// Dense matrices are only put in JSON output up to this many rules.
const MAX_JSON_RULES: usize = 256;

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::Model(_) | AnalysisError::NotMirror(_) | AnalysisError::EmptySequence => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Validation(e.to_string()),
    }
}

fn construct_error(e: ConstructError) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    let code = parse_code_spec_unchecked(&read_text(&args.spec)?)?;
    let report = validate_code(&code);
    if args.json {
        print_json(&report);
    } else {
        print!("{report}");
    }
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation("code is not valid".into()))
    }
}

pub fn encode(args: &EncodeArgs) -> Result<(), CliError> {
    let code = load_code(&args.code)?;
    let data = read_file(&args.input)?;
    let symbols = if args.byte_alphabet {
        require_byte_alphabet(&code)?;
        bytes_to_symbols(&data)
    } else {
        let text = String::from_utf8(data)
            .map_err(|_| CliError::Usage("symbol file is not UTF-8; use --byte-alphabet for binary data".into()))?;
        parse_symbols(&code, &text)?
    };
    let codec = Codec::new(&code)?;
    let block = if args.strip_termination {
        codec.encode_stripped(&symbols)?
    } else {
        codec.encode(&symbols)?
    };
    let bytes = write_container(&code, &block)?;
    write_file(&args.output, &bytes)?;
    eprintln!(
        "encoded {} symbols into {} bits ({} termination bits{})",
        block.symbol_count,
        block.payload.len(),
        block.termination_len,
        if block.termination_stripped { ", stripped" } else { "" }
    );
    Ok(())
}

pub fn decode(args: &DecodeArgs) -> Result<(), CliError> {
    let code = load_code(&args.code)?;
    let container = read_container(&read_file(&args.input)?)?;
    container.check_code(&code)?;
    let symbols = Codec::new(&code)?.decode(&container.block)?;
    let out = if args.byte_alphabet {
        require_byte_alphabet(&code)?;
        symbols_to_bytes(&symbols)
    } else {
        render_symbols(&code, &symbols).into_bytes()
    };
    write_file(&args.output, &out)
}

#[derive(Serialize)]
struct ConstructReport {
    construction: &'static str,
    spec: String,
    codewords: Vec<String>,
    mdl: f64,
    entropy: f64,
}

pub fn construct(args: &ConstructArgs) -> Result<(), CliError> {
    let source = load_pdf(&args.pdf)?;
    let n = source.len();
    let labels = match (&args.labels, &args.pdf.pdf_from) {
        (Some(text), _) => parse_labels(text, n)?,
        (None, Some(_)) => byte_labels(),
        (None, None) => default_labels(n),
    };
    let (name, assignment) = match args.kind {
        Construction::Huffman => ("huffman", huffman(&source)),
        Construction::Hutucker => ("hutucker", hu_tucker(&source)),
        Construction::Lex => ("lex", huffman(&source)),
        Construction::Mirror => ("mirror", huffman(&source)),
    };
    let assignment = assignment.map_err(construct_error)?;
    let code = match args.kind {
        Construction::Huffman | Construction::Hutucker => assignment.to_vlrs(labels.clone()),
        Construction::Lex => lexicographic_vlrs(&assignment),
        Construction::Mirror => mirror_vlrs(&assignment),
    }
    .map_err(construct_error)?;
    let mut code: Vlrs = code
        .relabel(labels)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.simplify {
        code = simplify(&code).map_err(|e| CliError::Validation(e.to_string()))?;
    }
    let mdl = asymptotic_mdl(&code, &source).map_err(analysis_error)?;
    let spec = render_code_spec(&code);
    if args.json {
        print_json(&ConstructReport {
            construction: name,
            spec,
            codewords: assignment.codewords().iter().map(|c| c.to_text()).collect(),
            mdl,
            entropy: entropy(&source),
        });
    } else {
        print!("{spec}");
        println!("# mdl {mdl:.3}");
    }
    Ok(())
}

#[derive(Serialize)]
struct ExactReport {
    length: usize,
    total_bits: f64,
    bits_per_symbol: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    entropy: f64,
    rules: Vec<String>,
    /// Row-major, `transition[r][c] = P(R_t = r | R_t+1 = c)`; omitted for large codes.
    transition: Option<Vec<Vec<f64>>>,
    stationary: Vec<f64>,
    stationary_method: vlrs::analysis::StationaryMethod,
    asymptotic_mdl: f64,
    exact_mdl: Option<ExactReport>,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let code = load_code(&args.code)?;
    let source = pdf_for(&code, load_pdf(&args.pdf)?)?;
    let chain = rule_transition_matrix(&code, &source).map_err(analysis_error)?;
    let stationary = stationary_rule_distribution(&chain).map_err(analysis_error)?;
    let mdl = asymptotic_mdl(&code, &source).map_err(analysis_error)?;
    let exact = args
        .length
        .map(|n| {
            exact_mdl(&code, &source, n).map(|total| ExactReport {
                length: n,
                total_bits: total,
                bits_per_symbol: total / n as f64,
            })
        })
        .transpose()
        .map_err(analysis_error)?;
    let rules: Vec<String> = (0..code.rules().len()).map(|id| code.describe_rule(id)).collect();

    if args.json {
        print_json(&AnalyzeReport {
            entropy: entropy(&source),
            transition: (rules.len() <= MAX_JSON_RULES).then(|| chain.dense()),
            rules,
            stationary: stationary.probabilities,
            stationary_method: stationary.method,
            asymptotic_mdl: mdl,
            exact_mdl: exact,
        });
        return Ok(());
    }

    println!("entropy          {:.3}", entropy(&source));
    println!("rules            {}", rules.len());
    if rules.len() <= MAX_PRINTED_RULES {
        println!("transition matrix (column = following rule)");
        for (r, row) in chain.dense().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|p| format!("{p:.3}")).collect();
            println!("  r{:<3} {}", r + 1, cells.join(" "));
        }
    }
    println!("stationary distribution");
    let width = rules.iter().map(String::len).max().unwrap_or(0);
    for (r, (rule, p)) in rules.iter().zip(&stationary.probabilities).enumerate() {
        println!("  r{:<3} {rule:<width$}  {p:.3}", r + 1);
    }
    println!("asymptotic mdl   {mdl:.3}");
    if let Some(e) = exact {
        println!(
            "exact mdl        {:.3} bits for {} symbols ({:.3} per symbol)",
            e.total_bits, e.length, e.bits_per_symbol
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct BitstatsReport {
    #[serde(flatten)]
    stats: vlrs::analysis::BitStats,
    /// Analytic first-bit probabilities, for mirror codes.
    alpha: Option<f64>,
}

pub fn bitstats(args: &BitstatsArgs) -> Result<(), CliError> {
    let code = load_code(&args.code)?;
    let true_source = pdf_for(&code, load_pdf(&args.pdf)?)?;
    let encode_source = match &args.encode_pdf {
        Some(text) => pdf_for(&code, parse_pdf(text)?)?,
        None => true_source.clone(),
    };
    let stats = empirical_bit_stats(&code, &encode_source, &true_source, args.length, args.trials, args.seed)
        .map_err(analysis_error)?;
    let alpha = marginal_bit_trace(&code, &true_source, 1).ok().map(|t| t.alpha);
    if args.json {
        print_json(&BitstatsReport { stats, alpha });
        return Ok(());
    }
    println!("trials           {}", stats.trials);
    println!("length           {}", stats.length);
    println!("bits             {}", stats.total_bits);
    println!("bits per symbol  {:.3}", stats.bits_per_symbol);
    println!("zero frequency   {:.3}", stats.zero_frequency);
    if let Some(a) = alpha {
        println!("alpha            {a:.3}");
    }
    println!("zero frequency by position");
    for (row, chunk) in stats.per_position.chunks(16).enumerate() {
        let cells: Vec<String> = chunk.iter().map(|p| format!("{p:.3}")).collect();
        println!("  {:>3}: {}", row * 16, cells.join(" "));
    }
    Ok(())
}
