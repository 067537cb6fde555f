//! The code itself: an ordered alphabet plus production rules `a l -> b`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{is_prefix_free, BitSet, BitString};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("the alphabet is empty")]
    EmptyAlphabet,
    #[error("symbol label {0:?} is not a single non-empty token")]
    InvalidLabel(String),
    #[error("symbol label {0:?} appears twice in the alphabet")]
    DuplicateLabel(String),
    #[error("rule refers to symbol index {index} but the alphabet has {size} symbols")]
    UnknownSymbol { index: usize, size: usize },
    #[error("rule {0} has an empty output; outputs must contain at least one bit")]
    EmptyOutput(usize),
    #[error("codewords {0} and {1} violate the prefix condition")]
    NotPrefixFree(BitString, BitString),
    #[error("a codeword must contain at least one bit")]
    EmptyCodeword,
    #[error("probability {value} of symbol {index} is outside (0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("source model has {source_len} symbols but the code has {alphabet_len}")]
    SizeMismatch { source_len: usize, alphabet_len: usize },
    #[error("{labels} labels given for {symbols} symbols")]
    LabelCount { labels: usize, symbols: usize },
}

/// A source symbol `a_{i}`, stored by zero-based alphabet position.
///
/// Labels are for display; the order `a_1 < a_2 < ...` is the index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Symbol {
    fn from(i: usize) -> Self {
        Symbol(u32::try_from(i).expect("symbol index overflows u32"))
    }
}

/// One production rule `symbol input -> output`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub symbol: Symbol,
    pub input: BitString,
    pub output: BitString,
}

impl Rule {
    pub fn new(symbol: impl Into<Symbol>, input: BitString, output: BitString) -> Self {
        Self {
            symbol: symbol.into(),
            input,
            output,
        }
    }

    /// Net number of bits the rule generates: `|output| - |input|`.
    pub fn delta(&self) -> i64 {
        self.output.len() as i64 - self.input.len() as i64
    }
}

/// Free-function form of [`Rule::delta`].
pub fn delta(rule: &Rule) -> i64 {
    rule.delta()
}

/// Which bit value a termination pattern prefers when several shortest
/// patterns are valid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminationPolicy {
    #[default]
    PreferZero,
    PreferOne,
}

impl TerminationPolicy {
    pub fn preferred_bit(self) -> bool {
        matches!(self, TerminationPolicy::PreferOne)
    }
}

/// A variable length re-writing system.
///
/// Rules are kept grouped by symbol; within a symbol they keep the order in
/// which they were given, so rule `(i, j)` is the `j`-th rule of symbol `i`.
/// Construction only checks structure (labels, symbol range, non-empty
/// outputs). The prefix and Kraft conditions are checked by
/// [`crate::validate::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vlrs {
    alphabet: Vec<String>,
    rules: Vec<Rule>,
    offsets: Vec<usize>,
    termination: TerminationPolicy,
}

impl Vlrs {
    pub fn new(alphabet: Vec<String>, mut rules: Vec<Rule>) -> Result<Self, ModelError> {
        if alphabet.is_empty() {
            return Err(ModelError::EmptyAlphabet);
        }
        let mut seen = HashSet::new();
        for label in &alphabet {
            let well_formed = !label.is_empty()
                && !label.contains('#')
                && !label.chars().any(char::is_whitespace);
            if !well_formed {
                return Err(ModelError::InvalidLabel(label.clone()));
            }
            if !seen.insert(label.as_str()) {
                return Err(ModelError::DuplicateLabel(label.clone()));
            }
        }
        for (k, rule) in rules.iter().enumerate() {
            if rule.symbol.index() >= alphabet.len() {
                return Err(ModelError::UnknownSymbol {
                    index: rule.symbol.index(),
                    size: alphabet.len(),
                });
            }
            if rule.output.is_empty() {
                return Err(ModelError::EmptyOutput(k));
            }
        }
        rules.sort_by_key(|r| r.symbol);
        let mut offsets = vec![0; alphabet.len() + 1];
        for rule in &rules {
            offsets[rule.symbol.index() + 1] += 1;
        }
        for i in 0..alphabet.len() {
            offsets[i + 1] += offsets[i];
        }
        Ok(Self {
            alphabet,
            rules,
            offsets,
            termination: TerminationPolicy::default(),
        })
    }

    /// Alphabet labelled `a1, a2, ...`.
    pub fn with_default_labels(size: usize, rules: Vec<Rule>) -> Result<Self, ModelError> {
        Self::new(default_labels(size), rules)
    }

    /// Same rules under new labels; the alphabet size must not change.
    pub fn relabel(self, alphabet: Vec<String>) -> Result<Self, ModelError> {
        if alphabet.len() != self.alphabet.len() {
            return Err(ModelError::LabelCount {
                labels: alphabet.len(),
                symbols: self.alphabet.len(),
            });
        }
        Ok(Self::new(alphabet, self.rules)?.with_termination(self.termination))
    }

    pub fn with_termination(mut self, policy: TerminationPolicy) -> Self {
        self.termination = policy;
        self
    }

    pub fn termination_policy(&self) -> TerminationPolicy {
        self.termination
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn label(&self, symbol: Symbol) -> &str {
        &self.alphabet[symbol.index()]
    }

    pub fn symbol_by_label(&self, label: &str) -> Option<Symbol> {
        self.alphabet.iter().position(|l| l == label).map(Symbol::from)
    }

    pub fn symbols(&self) -> impl ExactSizeIterator<Item = Symbol> {
        (0..self.alphabet.len()).map(Symbol::from)
    }

    /// All rules, grouped by symbol.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: usize) -> &Rule {
        &self.rules[id]
    }

    /// Global rule ids belonging to `symbol`.
    pub fn rule_ids_of(&self, symbol: Symbol) -> std::ops::Range<usize> {
        self.offsets[symbol.index()]..self.offsets[symbol.index() + 1]
    }

    pub fn rules_of(&self, symbol: Symbol) -> &[Rule] {
        &self.rules[self.rule_ids_of(symbol)]
    }

    /// `(symbol index, position within symbol)`, both one-based as in `r_{i,j}`.
    pub fn rule_coordinates(&self, id: usize) -> (usize, usize) {
        let sym = self.rules[id].symbol;
        (sym.index() + 1, id - self.offsets[sym.index()] + 1)
    }

    /// Longest input segment over all rules.
    pub fn horizon(&self) -> usize {
        self.rules.iter().map(|r| r.input.len()).max().unwrap_or(0)
    }

    pub fn describe_rule(&self, id: usize) -> String {
        let r = &self.rules[id];
        format!("{} {} -> {}", self.label(r.symbol), r.input, r.output)
    }

    /// Every input is a suffix of its output, so emitted bits are never rewritten.
    pub fn is_suffix_constrained(&self) -> bool {
        self.rules.iter().all(|r| r.input.is_suffix_of(&r.output))
    }

    /// One rule per symbol with an empty input: a classical variable length code.
    pub fn is_fixed_to_variable(&self) -> bool {
        self.symbols().all(|s| {
            let rules = self.rules_of(s);
            rules.len() == 1 && rules[0].input.is_empty()
        })
    }

    /// True iff each symbol's rules all generate the same number of bits.
    pub fn has_uniform_deltas(&self) -> bool {
        self.symbols().all(|s| {
            let rules = self.rules_of(s);
            rules.windows(2).all(|w| w[0].delta() == w[1].delta())
        })
    }

    /// Verify that `source` describes this alphabet.
    pub fn check_source(&self, source: &SourceModel) -> Result<(), ModelError> {
        if source.len() != self.alphabet_size() {
            return Err(ModelError::SizeMismatch {
                source_len: source.len(),
                alphabet_len: self.alphabet_size(),
            });
        }
        Ok(())
    }
}

pub fn default_labels(size: usize) -> Vec<String> {
    (1..=size).map(|i| format!("a{i}")).collect()
}

/// Labels "00".."ff" for the 256-symbol byte alphabet.
pub fn byte_labels() -> Vec<String> {
    (0..=255u8).map(|b| format!("{b:02x}")).collect()
}

/// The code `a_i -> codeword_i`, one empty-input rule per symbol.
pub fn from_vlc(codewords: &[BitString]) -> Result<Vlrs, ModelError> {
    from_vlc_labelled(default_labels(codewords.len()), codewords)
}

pub fn from_vlc_labelled(alphabet: Vec<String>, codewords: &[BitString]) -> Result<Vlrs, ModelError> {
    check_prefix_code(codewords)?;
    let rules = codewords
        .iter()
        .enumerate()
        .map(|(i, c)| Rule::new(i, BitString::empty(), c.clone()))
        .collect();
    Vlrs::new(alphabet, rules)
}

pub(crate) fn check_prefix_code(codewords: &[BitString]) -> Result<(), ModelError> {
    if codewords.iter().any(BitString::is_empty) {
        return Err(ModelError::EmptyCodeword);
    }
    let mut sorted: Vec<&BitString> = codewords.iter().collect();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0].is_prefix_of(w[1]) {
            return Err(ModelError::NotPrefixFree(w[0].clone(), w[1].clone()));
        }
    }
    debug_assert!(is_prefix_free(&codewords.iter().cloned().collect::<BitSet>()));
    Ok(())
}

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Stationary memoryless source: one probability per symbol, all strictly positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    probabilities: Vec<f64>,
}

impl SourceModel {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, ModelError> {
        if probabilities.is_empty() {
            return Err(ModelError::EmptyAlphabet);
        }
        for (index, &value) in probabilities.iter().enumerate() {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ModelError::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(ModelError::NotNormalized(sum));
        }
        Ok(Self { probabilities })
    }

    /// Empirical model with add-one smoothing, so unseen symbols keep a
    /// non-zero probability.
    pub fn from_counts_smoothed(counts: &[u64]) -> Result<Self, ModelError> {
        let total: f64 = counts.iter().map(|&c| c as f64 + 1.0).sum();
        Self::new(counts.iter().map(|&c| (c as f64 + 1.0) / total).collect())
    }

    /// Byte frequencies of `data` over the 256-symbol alphabet, add-one smoothed.
    pub fn from_bytes(data: &[u8]) -> Self {
        let mut counts = [0u64; 256];
        for &b in data {
            counts[b as usize] += 1;
        }
        Self::from_counts_smoothed(&counts).expect("smoothed counts are a valid model")
    }

    pub fn uniform(size: usize) -> Result<Self, ModelError> {
        Self::new(vec![1.0 / size as f64; size])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, symbol: Symbol) -> f64 {
        self.probabilities[symbol.index()]
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

impl fmt::Display for Vlrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::spec_text::render_code_spec(self))
    }
}
