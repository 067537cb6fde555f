//! Backward encoding.

use std::collections::{HashMap, VecDeque};

use crate::bits::BitString;
use crate::codec::decoder::Closer;
use crate::codec::trie::{PrefixTrie, Walk};
use crate::codec::CodecError;
use crate::model::{Symbol, TerminationPolicy, Vlrs};

/// Inspection view of the encoder: the pending-head states and which rule
/// each `(symbol, state)` pair triggers.
#[derive(Clone, Debug)]
pub struct EncoderAutomaton {
    horizon: usize,
    states: Vec<BitString>,
    lookup: HashMap<(Symbol, usize), usize>,
}

impl EncoderAutomaton {
    /// States are the input segments that are not a proper prefix of another
    /// input segment, i.e. the leaves of the union of the per-symbol input trees.
    pub fn build(code: &Vlrs) -> Result<Self, CodecError> {
        let mut inputs: Vec<&BitString> = code.rules().iter().map(|r| &r.input).collect();
        inputs.sort();
        inputs.dedup();
        let states: Vec<BitString> = inputs
            .iter()
            .enumerate()
            .filter(|(k, s)| inputs.get(k + 1).is_none_or(|next| !s.is_prefix_of(next)))
            .map(|(_, s)| (*s).clone())
            .collect();

        let mut lookup = HashMap::new();
        for symbol in code.symbols() {
            for (state_id, state) in states.iter().enumerate() {
                let mut matching = code
                    .rule_ids_of(symbol)
                    .filter(|&id| code.rule(id).input.is_prefix_of(state));
                match (matching.next(), matching.next()) {
                    (Some(id), None) => {
                        lookup.insert((symbol, state_id), id);
                    }
                    _ => {
                        return Err(CodecError::InvalidCode(format!(
                            "encoder state {state} does not select exactly one rule of {}",
                            code.label(symbol)
                        )))
                    }
                }
            }
        }
        Ok(Self {
            horizon: code.horizon(),
            states,
            lookup,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn states(&self) -> &[BitString] {
        &self.states
    }

    /// The state whose segment prefixes `head`, if `head` is long enough.
    pub fn state_for(&self, head: &BitString) -> Option<usize> {
        self.states.iter().position(|s| s.is_prefix_of(head))
    }

    pub fn rule_for(&self, symbol: Symbol, state: usize) -> Option<usize> {
        self.lookup.get(&(symbol, state)).copied()
    }
}

pub fn build_encoder_automaton(code: &Vlrs) -> Result<EncoderAutomaton, CodecError> {
    EncoderAutomaton::build(code)
}

/// Orders candidate termination patterns: shorter first, then by the
/// policy's preferred bit.
fn termination_order(policy: TerminationPolicy, a: &BitString, b: &BitString) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| match policy {
        TerminationPolicy::PreferZero => a.cmp(b),
        TerminationPolicy::PreferOne => a.complement().cmp(&b.complement()),
    })
}

/// The termination will be some rule's full input segment: if a longer
/// pattern `l x` is valid then `l` alone is, since no output prefixes `l x`.
pub(crate) fn termination_from(code: &Vlrs, outputs: &PrefixTrie, symbol: Symbol) -> Option<BitString> {
    let mut candidates: Vec<&BitString> = code.rules_of(symbol).iter().map(|r| &r.input).collect();
    candidates.sort_by(|a, b| termination_order(code.termination_policy(), a, b));
    candidates
        .into_iter()
        .find(|t| !matches!(outputs.walk(t.iter()), Walk::Match { .. }))
        .cloned()
}

/// Shortest bit pattern that lets `last` select a rule while leaving the
/// decoder with nothing to emit once the final symbol is out.
pub fn select_termination(code: &Vlrs, last: Symbol) -> Result<BitString, CodecError> {
    let closer = Closer::new(code);
    termination_from(code, closer.outputs(), last).ok_or_else(|| CodecError::NoTermination {
        symbol: code.label(last).to_string(),
    })
}

/// What one call to [`Encoder::encode`] produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedBlock {
    pub payload: BitString,
    pub symbol_count: usize,
    /// Number of artificial bits appended behind the last symbol.
    pub termination_len: usize,
    /// The trailing termination bits were removed from the payload.
    pub termination_stripped: bool,
}

impl EncodedBlock {
    pub fn empty() -> Self {
        Self {
            payload: BitString::empty(),
            symbol_count: 0,
            termination_len: 0,
            termination_stripped: false,
        }
    }
}

/// Rule lookup tables plus per-symbol terminations. Cheaper to build than a
/// full [`super::Codec`] when only encoding is needed.
#[derive(Clone)]
pub struct Encoder<'a> {
    code: &'a Vlrs,
    inputs: Vec<PrefixTrie>,
    terminations: Vec<Option<BitString>>,
}

impl<'a> Encoder<'a> {
    pub fn new(code: &'a Vlrs) -> Self {
        let inputs = code
            .symbols()
            .map(|s| {
                let ids = code.rule_ids_of(s);
                PrefixTrie::from_keys(code.rules_of(s).iter().map(|r| &r.input).zip(ids))
            })
            .collect();
        let closer = Closer::new(code);
        let terminations = code
            .symbols()
            .map(|s| termination_from(code, closer.outputs(), s))
            .collect();
        Self {
            code,
            inputs,
            terminations,
        }
    }

    pub fn code(&self) -> &'a Vlrs {
        self.code
    }

    pub fn termination(&self, symbol: Symbol) -> Option<&BitString> {
        self.terminations.get(symbol.index()).and_then(Option::as_ref)
    }

    /// Rule that encodes `symbol` when it is the last one of a block.
    pub fn termination_rule(&self, symbol: Symbol) -> Option<usize> {
        let t = self.termination(symbol)?;
        match self.inputs[symbol.index()].walk(t.iter()) {
            Walk::Match { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Rule of `symbol` whose input prefixes `head`.
    pub fn rule_for_head(&self, symbol: Symbol, head: &BitString) -> Option<usize> {
        match self.inputs.get(symbol.index())?.walk(head.iter()) {
            Walk::Match { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn encode(&self, symbols: &[Symbol]) -> Result<EncodedBlock, CodecError> {
        self.encode_inner(symbols, |_| {})
    }

    /// Like [`Encoder::encode`], also returning the rule used for each symbol.
    pub fn encode_traced(&self, symbols: &[Symbol]) -> Result<(EncodedBlock, Vec<usize>), CodecError> {
        let mut trace = vec![0usize; symbols.len()];
        let mut k = symbols.len();
        let block = self.encode_inner(symbols, |rule| {
            k -= 1;
            trace[k] = rule;
        })?;
        Ok((block, trace))
    }

    /// Apply rules to an explicit bit tail instead of a termination pattern.
    pub fn rewrite(&self, symbols: &[Symbol], tail: &BitString) -> Result<BitString, CodecError> {
        let mut stream: VecDeque<bool> = tail.iter().collect();
        for (pos, &symbol) in symbols.iter().enumerate().rev() {
            self.apply(&mut stream, pos, symbol)?;
        }
        Ok(stream.into_iter().collect())
    }

    fn encode_inner(&self, symbols: &[Symbol], mut on_rule: impl FnMut(usize)) -> Result<EncodedBlock, CodecError> {
        let Some(&last) = symbols.last() else {
            return Ok(EncodedBlock::empty());
        };
        self.check_symbol(last, symbols.len() - 1)?;
        let termination = self.terminations[last.index()]
            .as_ref()
            .ok_or_else(|| CodecError::NoTermination {
                symbol: self.code.label(last).to_string(),
            })?;
        let mut stream: VecDeque<bool> = termination.iter().collect();
        for (pos, &symbol) in symbols.iter().enumerate().rev() {
            on_rule(self.apply(&mut stream, pos, symbol)?);
        }
        Ok(EncodedBlock {
            payload: stream.into_iter().collect(),
            symbol_count: symbols.len(),
            termination_len: termination.len(),
            termination_stripped: false,
        })
    }

    fn check_symbol(&self, symbol: Symbol, position: usize) -> Result<(), CodecError> {
        if symbol.index() >= self.inputs.len() {
            return Err(CodecError::UnknownSymbol { position, symbol });
        }
        Ok(())
    }

    fn apply(&self, stream: &mut VecDeque<bool>, position: usize, symbol: Symbol) -> Result<usize, CodecError> {
        self.check_symbol(symbol, position)?;
        let Walk::Match { value, depth } = self.inputs[symbol.index()].walk(stream.iter().copied()) else {
            return Err(CodecError::NoApplicableRule {
                position,
                symbol: self.code.label(symbol).to_string(),
            });
        };
        stream.drain(..depth);
        for bit in self.code.rule(value).output.iter().rev() {
            stream.push_front(bit);
        }
        Ok(value)
    }
}
