//! Forward decoding automaton.
//!
//! A state is the pending bit segment that has been read (or re-created by a
//! reversed rule) but does not yet identify a symbol. On each input bit the
//! segment is extended and then closed: while some rule output prefixes the
//! segment, the rule's symbol is emitted and the output is replaced by the
//! rule's input bits.

use std::collections::{HashMap, VecDeque};

use crate::bits::BitString;
use crate::codec::trie::{PrefixTrie, Walk};
use crate::codec::CodecError;
use crate::model::{Symbol, Vlrs};

/// Upper bound on rule applications inside one closure.
const MAX_CLOSURE_STEPS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Transition {
    emit_start: u32,
    emit_len: u32,
    next: Option<u32>,
}

/// Result of closing a pending segment.
pub(crate) enum Closure {
    Pending(Vec<bool>),
    Dead,
}

pub(crate) struct Closer<'a> {
    code: &'a Vlrs,
    outputs: PrefixTrie,
}

impl<'a> Closer<'a> {
    pub fn new(code: &'a Vlrs) -> Self {
        let outputs = PrefixTrie::from_keys(code.rules().iter().map(|r| &r.output).zip(0..));
        Self { code, outputs }
    }

    pub fn outputs(&self) -> &PrefixTrie {
        &self.outputs
    }

    /// Apply reversed rules to `pending` until no output prefixes it.
    pub fn close(&self, mut pending: Vec<bool>, emitted: &mut Vec<Symbol>) -> Result<Closure, CodecError> {
        let mut seen: Vec<Vec<bool>> = Vec::new();
        for _ in 0..MAX_CLOSURE_STEPS {
            match self.outputs.walk(pending.iter().copied()) {
                Walk::Interior => return Ok(Closure::Pending(pending)),
                Walk::Dead => return Ok(Closure::Dead),
                Walk::Match { value, depth } => {
                    let rule = self.code.rule(value);
                    emitted.push(rule.symbol);
                    seen.push(pending.clone());
                    let mut next = rule.input.bits().to_vec();
                    next.extend_from_slice(&pending[depth..]);
                    if seen.contains(&next) {
                        return Err(CodecError::ClosureCycle {
                            pending: BitString::from_bits(next),
                            rule: self.code.describe_rule(value),
                        });
                    }
                    pending = next;
                }
            }
        }
        Err(CodecError::ClosureDiverges {
            pending: BitString::from_bits(pending),
        })
    }
}

/// Finite-state forward decoder for a code.
#[derive(Clone, Debug)]
pub struct DecoderAutomaton {
    states: Vec<BitString>,
    index: HashMap<BitString, u32>,
    transitions: Vec<[Transition; 2]>,
    emitted: Vec<Symbol>,
}

impl DecoderAutomaton {
    /// Breadth-first exploration of the states reachable from ε.
    pub fn build(code: &Vlrs) -> Result<Self, CodecError> {
        let closer = Closer::new(code);
        let mut states = vec![BitString::empty()];
        let mut index = HashMap::from([(BitString::empty(), 0u32)]);
        let mut transitions: Vec<[Transition; 2]> = Vec::new();
        let mut emitted = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        let mut scratch = Vec::new();

        while let Some(id) = queue.pop_front() {
            let mut pair = [Transition {
                emit_start: 0,
                emit_len: 0,
                next: None,
            }; 2];
            for bit in [false, true] {
                let mut pending = states[id].bits().to_vec();
                pending.push(bit);
                scratch.clear();
                let closure = closer.close(pending, &mut scratch)?;
                let next = match closure {
                    Closure::Dead => None,
                    Closure::Pending(bits) => {
                        let key = BitString::from_bits(bits);
                        let next_id = match index.get(&key) {
                            Some(&n) => n,
                            None => {
                                let n = states.len() as u32;
                                states.push(key.clone());
                                index.insert(key, n);
                                queue.push_back(n as usize);
                                n
                            }
                        };
                        Some(next_id)
                    }
                };
                pair[bit as usize] = Transition {
                    emit_start: emitted.len() as u32,
                    emit_len: scratch.len() as u32,
                    next,
                };
                emitted.extend_from_slice(&scratch);
            }
            // states are dequeued in id order
            debug_assert_eq!(transitions.len(), id);
            transitions.push(pair);
        }
        Ok(Self {
            states,
            index,
            transitions,
            emitted,
        })
    }

    /// State 0 is always ε.
    pub fn initial_state(&self) -> usize {
        0
    }

    pub fn states(&self) -> &[BitString] {
        &self.states
    }

    pub fn state_index(&self, pending: &BitString) -> Option<usize> {
        self.index.get(pending).map(|&i| i as usize)
    }

    /// Symbols emitted and successor state; `None` means the bit cannot occur
    /// in a well-formed stream from this state.
    pub fn transition(&self, state: usize, bit: bool) -> (&[Symbol], Option<usize>) {
        let t = self.transitions[state][bit as usize];
        let start = t.emit_start as usize;
        (
            &self.emitted[start..start + t.emit_len as usize],
            t.next.map(|n| n as usize),
        )
    }

    /// Longest symbol list emitted by a single bit.
    pub fn max_emission(&self) -> usize {
        self.transitions
            .iter()
            .flat_map(|pair| pair.iter())
            .map(|t| t.emit_len as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Build the decoder automaton of `code`.
pub fn build_decoder_automaton(code: &Vlrs) -> Result<DecoderAutomaton, CodecError> {
    DecoderAutomaton::build(code)
}
