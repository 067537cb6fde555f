//! Line-oriented code description:
//!
//! ```text
//! # comment
//! alphabet: a1 a2 a3
//! termination: 1
//! rule: a1 - -> 0
//! rule: a2 - -> 10
//! ```
//!
//! `-` is the empty input. The `termination` line is optional and selects
//! which bit termination patterns prefer (0 by default).

use std::fmt::Write;

use thiserror::Error;

use crate::bits::BitString;
use crate::model::{ModelError, Rule, TerminationPolicy, Vlrs};
use crate::validate::{validate, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("code is not valid:\n{0}")]
    Invalid(Box<ValidationReport>),
}

/// Parse and validate.
pub fn parse_code_spec(text: &str) -> Result<Vlrs, SpecError> {
    let code = parse_code_spec_unchecked(text)?;
    let report = validate(&code);
    if !report.is_valid() {
        return Err(SpecError::Invalid(Box::new(report)));
    }
    Ok(code)
}

/// Parse without running [`validate`].
pub fn parse_code_spec_unchecked(text: &str) -> Result<Vlrs, SpecError> {
    let mut alphabet: Option<Vec<String>> = None;
    let mut policy: Option<TerminationPolicy> = None;
    let mut rules = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let syntax = |message: String| SpecError::Syntax { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, rest)) = content.split_once(':') else {
            return Err(syntax(format!("expected `key: value`, found {content:?}")));
        };
        let rest = rest.trim();
        match key.trim() {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(syntax("second alphabet line".into()));
                }
                if !rules.is_empty() {
                    return Err(syntax("alphabet must come before the rules".into()));
                }
                let labels: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if labels.is_empty() {
                    return Err(syntax("empty alphabet".into()));
                }
                alphabet = Some(labels);
            }
            "termination" => {
                if policy.is_some() {
                    return Err(syntax("second termination line".into()));
                }
                policy = Some(match rest {
                    "0" => TerminationPolicy::PreferZero,
                    "1" => TerminationPolicy::PreferOne,
                    other => return Err(syntax(format!("termination must be 0 or 1, found {other:?}"))),
                });
            }
            "rule" => {
                let Some(labels) = &alphabet else {
                    return Err(syntax("rule before the alphabet line".into()));
                };
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                let [label, input, arrow, output] = tokens[..] else {
                    return Err(syntax(format!("expected `<label> <bits|-> -> <bits>`, found {rest:?}")));
                };
                if arrow != "->" {
                    return Err(syntax(format!("expected `->`, found {arrow:?}")));
                }
                let Some(symbol) = labels.iter().position(|l| l == label) else {
                    return Err(syntax(format!("unknown symbol {label:?}")));
                };
                let input: BitString = input
                    .parse()
                    .map_err(|e| syntax(format!("input {input:?}: {e}")))?;
                let output: BitString = match output {
                    "-" | "ε" => return Err(syntax("rule output must not be empty".into())),
                    bits => bits
                        .parse()
                        .map_err(|e| syntax(format!("output {bits:?}: {e}")))?,
                };
                rules.push(Rule::new(symbol, input, output));
            }
            other => return Err(syntax(format!("unknown key {other:?}"))),
        }
    }
    let Some(alphabet) = alphabet else {
        return Err(SpecError::Syntax {
            line: text.lines().count().max(1),
            message: "missing alphabet line".into(),
        });
    };
    Ok(Vlrs::new(alphabet, rules)?.with_termination(policy.unwrap_or_default()))
}

/// Canonical text form; parses back to an equal code.
pub fn render_code_spec(code: &Vlrs) -> String {
    let mut out = String::new();
    writeln!(out, "alphabet: {}", code.alphabet().join(" ")).unwrap();
    if code.termination_policy() == TerminationPolicy::PreferOne {
        out.push_str("termination: 1\n");
    }
    for rule in code.rules() {
        writeln!(out, "rule: {} {} -> {}", code.label(rule.symbol), rule.input, rule.output).unwrap();
    }
    out
}
