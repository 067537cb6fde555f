//! Merging of sibling rule families.
//!
//! Two rules of one symbol `a w0 -> v0` and `a w1 -> v1` rewrite every
//! stream starting with `w` exactly like the single rule `a w -> v`. A family
//! over a full fixed-length suffix set collapses by repeated pairwise merges,
//! so only pairs are considered.

use std::collections::HashMap;

use thiserror::Error;

use crate::bits::BitString;
use crate::model::{Rule, Vlrs};
use crate::validate::{validate, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplifyError {
    #[error("cannot simplify an invalid code:\n{0}")]
    InvalidCode(Box<ValidationReport>),
}

/// Merge sibling rule pairs until none is left. The result rewrites every
/// stream exactly as the input code does.
pub fn simplify(code: &Vlrs) -> Result<Vlrs, SimplifyError> {
    let report = validate(code);
    if !report.is_valid() {
        return Err(SimplifyError::InvalidCode(Box::new(report)));
    }
    let mut current = code.clone();
    while let Some(next) = merge_pass(&current) {
        if !validate(&next).is_valid() {
            log::warn!("merge pass produced an invalid code; keeping the previous rule set");
            break;
        }
        current = next;
    }
    Ok(current)
}

fn split_last(b: &BitString) -> Option<(BitString, bool)> {
    let last = b.last()?;
    Some((b.slice(0..b.len() - 1), last))
}

/// One round of simultaneous merges, or `None` when nothing merges.
fn merge_pass(code: &Vlrs) -> Option<Vlrs> {
    let mut inputs: Vec<&BitString> = code.rules().iter().map(|r| &r.input).collect();
    inputs.sort();
    // `v` must not become a proper prefix of another symbol's input
    let safe_output = |v: &BitString, symbol| {
        let start = inputs.partition_point(|b| *b < v);
        !inputs[start..].iter().take_while(|b| v.is_prefix_of(b)).any(|b| {
            *b != v
                && code
                    .rules()
                    .iter()
                    .any(|r| r.symbol != symbol && &r.input == *b)
        })
    };

    let mut replaced: HashMap<usize, Rule> = HashMap::new();
    let mut removed = vec![false; code.rules().len()];
    for symbol in code.symbols() {
        let by_input: HashMap<&BitString, usize> = code
            .rule_ids_of(symbol)
            .map(|id| (&code.rule(id).input, id))
            .collect();
        for id in code.rule_ids_of(symbol) {
            let rule = code.rule(id);
            let (Some((w, false)), Some((v, false))) = (split_last(&rule.input), split_last(&rule.output)) else {
                continue;
            };
            let Some(&sibling) = by_input.get(&{
                let mut w1 = w.clone();
                w1.push(true);
                w1
            }) else {
                continue;
            };
            let mut v1 = v.clone();
            v1.push(true);
            if code.rule(sibling).output != v1 || v.is_empty() || !safe_output(&v, symbol) {
                continue;
            }
            replaced.insert(id, Rule::new(symbol, w, v));
            removed[sibling] = true;
        }
    }
    if replaced.is_empty() {
        return None;
    }
    let rules = code
        .rules()
        .iter()
        .enumerate()
        .filter(|(id, _)| !removed[*id])
        .map(|(id, r)| replaced.remove(&id).unwrap_or_else(|| r.clone()))
        .collect();
    let merged = Vlrs::new(code.alphabet().to_vec(), rules)
        .expect("merging keeps symbols and non-empty outputs")
        .with_termination(code.termination_policy());
    Some(merged)
}
