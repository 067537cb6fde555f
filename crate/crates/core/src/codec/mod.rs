//! Backward encoder and forward decoder.
//!
//! Encoding walks the symbol sequence from the last symbol to the first,
//! starting from a termination pattern chosen for the last symbol. Each step
//! consumes the symbol plus the matching input segment at the head of the bit
//! stream and prepends the rule output. Decoding runs the
//! [`DecoderAutomaton`] forward and stops after the known symbol count.

mod decoder;
mod encoder;
pub(crate) mod trie;

use thiserror::Error;

pub use decoder::{build_decoder_automaton, DecoderAutomaton};
pub use encoder::{build_encoder_automaton, select_termination, EncodedBlock, Encoder, EncoderAutomaton};

use crate::bits::BitString;
use crate::model::{Symbol, Vlrs};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("decoder closure cycles: rule {rule} re-creates pending segment {pending}")]
    ClosureCycle { pending: BitString, rule: String },
    #[error("decoder closure does not terminate (pending segment {pending})")]
    ClosureDiverges { pending: BitString },
    #[error("no termination pattern exists for last symbol {symbol}")]
    NoTermination { symbol: String },
    #[error("no rule of {symbol} applies at position {position}")]
    NoApplicableRule { position: usize, symbol: String },
    #[error("symbol index {} at position {position} is outside the alphabet", .symbol.0)]
    UnknownSymbol { position: usize, symbol: Symbol },
    #[error("payload truncated: decoded {decoded} of {expected} symbols")]
    Truncated { decoded: usize, expected: usize },
    #[error("malformed block at bit {position}: {reason}")]
    Malformed { position: usize, reason: String },
    #[error("termination bits can only be stripped for suffix-constrained codes")]
    NotSuffixConstrained,
    #[error("stripped termination cannot be restored unambiguously")]
    AmbiguousTermination,
}

/// Encoder and decoder for one code, built once and reused across blocks.
#[derive(Clone)]
pub struct Codec<'a> {
    encoder: Encoder<'a>,
    decoder: DecoderAutomaton,
}

impl<'a> Codec<'a> {
    pub fn new(code: &'a Vlrs) -> Result<Self, CodecError> {
        Ok(Self {
            encoder: Encoder::new(code),
            decoder: DecoderAutomaton::build(code)?,
        })
    }

    pub fn code(&self) -> &'a Vlrs {
        self.encoder.code()
    }

    pub fn encoder(&self) -> &Encoder<'a> {
        &self.encoder
    }

    pub fn decoder(&self) -> &DecoderAutomaton {
        &self.decoder
    }

    pub fn encode(&self, symbols: &[Symbol]) -> Result<EncodedBlock, CodecError> {
        self.encoder.encode(symbols)
    }

    /// Encode, then drop the trailing termination bits. Only valid for
    /// suffix-constrained codes, whose emitted bits are never rewritten.
    pub fn encode_stripped(&self, symbols: &[Symbol]) -> Result<EncodedBlock, CodecError> {
        if !self.code().is_suffix_constrained() {
            return Err(CodecError::NotSuffixConstrained);
        }
        let block = self.encoder.encode(symbols)?;
        Ok(strip(block))
    }

    pub fn decode(&self, block: &EncodedBlock) -> Result<Vec<Symbol>, CodecError> {
        let count = block.symbol_count;
        let bits = block.payload.bits();
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            if bits.len() > block.termination_len {
                return Err(CodecError::Malformed {
                    position: 0,
                    reason: format!("{} payload bits for an empty block", bits.len()),
                });
            }
            return Ok(out);
        }
        let mut state = self.decoder.initial_state();
        for (pos, &bit) in bits.iter().enumerate() {
            let (emitted, next) = self.decoder.transition(state, bit);
            let need = count - out.len();
            out.extend_from_slice(&emitted[..need.min(emitted.len())]);
            if out.len() == count {
                let remaining = bits.len() - pos - 1;
                if remaining > block.termination_len {
                    return Err(CodecError::Malformed {
                        position: pos + 1,
                        reason: format!(
                            "all {count} symbols decoded with {remaining} payload bits left over"
                        ),
                    });
                }
                return Ok(out);
            }
            state = next.ok_or_else(|| CodecError::Malformed {
                position: pos,
                reason: "bit sequence cannot be produced by this code".into(),
            })?;
        }
        if block.termination_stripped {
            return self.restore_termination(state, out, count);
        }
        Err(CodecError::Truncated {
            decoded: out.len(),
            expected: count,
        })
    }

    /// Finish a stripped block: exactly one termination pattern must complete
    /// the final symbol on its last bit and be the one chosen for that symbol.
    fn restore_termination(&self, state: usize, out: Vec<Symbol>, count: usize) -> Result<Vec<Symbol>, CodecError> {
        let mut candidates: Vec<&BitString> = self
            .code()
            .symbols()
            .filter_map(|s| self.encoder.termination(s))
            .filter(|t| !t.is_empty())
            .collect();
        candidates.sort();
        candidates.dedup();

        let mut accepted: Option<Vec<Symbol>> = None;
        for t in candidates {
            let mut trial = out.clone();
            let mut st = Some(state);
            for (k, bit) in t.iter().enumerate() {
                let Some(s) = st else { break };
                let (emitted, next) = self.decoder.transition(s, bit);
                trial.extend_from_slice(emitted);
                st = next;
                if trial.len() >= count {
                    if k + 1 == t.len() {
                        trial.truncate(count);
                        let last = trial[count - 1];
                        if self.encoder.termination(last) == Some(t) {
                            match &accepted {
                                Some(prev) if *prev != trial => return Err(CodecError::AmbiguousTermination),
                                _ => accepted = Some(trial.clone()),
                            }
                        }
                    }
                    break;
                }
            }
        }
        accepted.ok_or(CodecError::Truncated {
            decoded: out.len(),
            expected: count,
        })
    }
}

fn strip(mut block: EncodedBlock) -> EncodedBlock {
    let keep = block.payload.len() - block.termination_len;
    block.payload = block.payload.slice(0..keep);
    block.termination_stripped = true;
    block
}

/// Encode `symbols` with `code`.
pub fn encode(code: &Vlrs, symbols: &[Symbol]) -> Result<EncodedBlock, CodecError> {
    Encoder::new(code).encode(symbols)
}

/// Decode `block` with `code`.
pub fn decode(code: &Vlrs, block: &EncodedBlock) -> Result<Vec<Symbol>, CodecError> {
    Codec::new(code)?.decode(block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;
    use crate::model::Rule;

    fn code(size: usize, table: &[(usize, &str, &str)]) -> Vlrs {
        let rules = table
            .iter()
            .map(|&(s, l, b)| Rule::new(s, bs(l), bs(b)))
            .collect();
        Vlrs::with_default_labels(size, rules).unwrap()
    }

    fn c1() -> Vlrs {
        code(3, &[(0, "-", "0"), (1, "-", "10"), (2, "-", "11")])
    }
    fn c2() -> Vlrs {
        code(3, &[(0, "0", "10"), (0, "1", "01"), (1, "-", "00"), (2, "-", "11")])
    }
    fn c3() -> Vlrs {
        code(3, &[(0, "-", "00"), (1, "0", "01"), (1, "1", "10"), (2, "-", "11")])
    }
    fn c4() -> Vlrs {
        code(3, &[(0, "1", "0"), (0, "0", "10"), (1, "-", "110"), (2, "-", "111")])
    }

    fn syms(idx: &[u32]) -> Vec<Symbol> {
        idx.iter().map(|&i| Symbol(i)).collect()
    }

    fn state_set(a: &DecoderAutomaton) -> Vec<String> {
        let mut s: Vec<String> = a.states().iter().map(|b| b.to_string()).collect();
        s.sort();
        s
    }

    #[test]
    fn decoder_states() {
        let a1 = build_decoder_automaton(&c1()).unwrap();
        assert_eq!(state_set(&a1), ["-", "1"]);
        let a2 = build_decoder_automaton(&c2()).unwrap();
        assert_eq!(state_set(&a2), ["-", "0", "1"]);
        let a3 = build_decoder_automaton(&c3()).unwrap();
        assert_eq!(state_set(&a3), ["-", "0", "1"]);
        let a4 = build_decoder_automaton(&c4()).unwrap();
        assert_eq!(state_set(&a4), ["-", "1", "11"]);
        let one = a4.state_index(&bs("1")).unwrap();
        let (emitted, next) = a4.transition(one, false);
        assert_eq!(emitted, syms(&[0, 0]));
        assert_eq!(next, Some(one));
        assert_eq!(a4.max_emission(), 2);
        assert_eq!(a2.max_emission(), 1);
    }

    #[test]
    fn decoder_rejects_rewrite_cycle() {
        let bad = code(2, &[(0, "0", "0"), (1, "-", "1")]);
        assert!(matches!(
            build_decoder_automaton(&bad),
            Err(CodecError::ClosureCycle { .. })
        ));
    }

    #[test]
    fn encoder_states() {
        let states = |c: &Vlrs| -> Vec<String> {
            build_encoder_automaton(c)
                .unwrap()
                .states()
                .iter()
                .map(|s| s.to_string())
                .collect()
        };
        assert_eq!(states(&c1()), ["-"]);
        assert_eq!(states(&c2()), ["0", "1"]);
        assert_eq!(states(&c3()), ["0", "1"]);
        assert_eq!(states(&c4()), ["0", "1"]);
    }

    #[test]
    fn encoder_lookup_resolves_every_head() {
        for c in [c1(), c2(), c3(), c4()] {
            let automaton = build_encoder_automaton(&c).unwrap();
            assert_eq!(automaton.horizon(), c.horizon());
            for head in BitString::all_of_length(automaton.horizon()) {
                let state = automaton.state_for(&head).unwrap();
                for s in c.symbols() {
                    let rule = automaton.rule_for(s, state).unwrap();
                    assert!(c.rule(rule).input.is_prefix_of(&head));
                    assert_eq!(c.rule(rule).symbol, s);
                }
            }
        }
    }

    #[test]
    fn terminations() {
        assert_eq!(select_termination(&c2(), Symbol(0)).unwrap(), bs("0"));
        assert_eq!(select_termination(&c4(), Symbol(0)).unwrap(), bs("1"));
        assert_eq!(select_termination(&c1(), Symbol(2)).unwrap(), bs("-"));
        assert_eq!(select_termination(&c3(), Symbol(1)).unwrap(), bs("0"));
        let c3_one = c3().with_termination(crate::model::TerminationPolicy::PreferOne);
        assert_eq!(select_termination(&c3_one, Symbol(1)).unwrap(), bs("1"));
    }

    #[test]
    fn no_termination_is_an_error() {
        // both inputs of a1 are themselves outputs, so any termination would be decoded
        let c = code(1, &[(0, "0", "0"), (0, "1", "1")]);
        assert!(matches!(
            select_termination(&c, Symbol(0)),
            Err(CodecError::NoTermination { .. })
        ));
        assert!(matches!(
            encode(&c, &syms(&[0])),
            Err(CodecError::NoTermination { .. })
        ));
    }

    #[test]
    fn example_vectors() {
        let s1 = syms(&[0, 1, 1, 2, 1, 0, 0, 0]);
        let block = encode(&c2(), &s1).unwrap();
        assert_eq!(block.payload, bs("1000011001010"));
        assert_eq!(block.symbol_count, 8);
        assert_eq!(block.termination_len, 1);
        assert_eq!(decode(&c2(), &block).unwrap(), s1);

        let a1x5 = syms(&[0; 5]);
        let block = encode(&c4(), &a1x5).unwrap();
        assert_eq!(block.payload, bs("000"));
        assert_eq!(block.termination_len, 1);
        assert_eq!(decode(&c4(), &block).unwrap(), a1x5);

        let block = encode(&c1(), &syms(&[1])).unwrap();
        assert_eq!(block.payload, bs("10"));
        assert_eq!(block.termination_len, 0);

        let direct = EncodedBlock {
            payload: bs("0"),
            symbol_count: 1,
            termination_len: 0,
            termination_stripped: false,
        };
        assert_eq!(decode(&c1(), &direct).unwrap(), syms(&[0]));
    }

    #[test]
    fn empty_sequence() {
        let block = encode(&c4(), &[]).unwrap();
        assert_eq!(block, EncodedBlock::empty());
        assert!(decode(&c4(), &block).unwrap().is_empty());
    }

    #[test]
    fn decode_errors() {
        let codec_code = c2();
        let codec = Codec::new(&codec_code).unwrap();
        let mut block = codec.encode(&syms(&[0, 1, 2])).unwrap();
        block.symbol_count = 5;
        assert_eq!(
            codec.decode(&block),
            Err(CodecError::Truncated { decoded: 3, expected: 5 })
        );
        block.symbol_count = 1;
        assert!(matches!(codec.decode(&block), Err(CodecError::Malformed { .. })));

        // "111" cannot start a stream of the code {0, 10}
        let partial = code(2, &[(0, "-", "0"), (1, "-", "10")]);
        let codec = Codec::new(&partial).unwrap();
        let bad = EncodedBlock {
            payload: bs("11"),
            symbol_count: 2,
            termination_len: 0,
            termination_stripped: false,
        };
        assert!(matches!(codec.decode(&bad), Err(CodecError::Malformed { position: 1, .. })));
    }

    #[test]
    fn stripped_termination_for_suffix_constrained() {
        let c = c2();
        let codec = Codec::new(&c).unwrap();
        let s1 = syms(&[0, 1, 1, 2, 1, 0, 0, 0]);
        let block = codec.encode_stripped(&s1).unwrap();
        assert_eq!(block.payload, bs("100001100101"));
        assert_eq!(codec.decode(&block).unwrap(), s1);

        let c4 = c4();
        let codec4 = Codec::new(&c4).unwrap();
        assert_eq!(codec4.encode_stripped(&s1), Err(CodecError::NotSuffixConstrained));
    }

    #[test]
    fn traced_encoding_uses_one_rule_per_symbol() {
        let c = c4();
        let enc = Encoder::new(&c);
        let (block, trace) = enc.encode_traced(&syms(&[0, 0, 0, 0, 0])).unwrap();
        assert_eq!(block.payload, bs("000"));
        // r11 r12 r11 r12 r11 from the first symbol to the last
        assert_eq!(trace, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn unknown_symbol() {
        assert!(matches!(
            encode(&c1(), &syms(&[0, 7])),
            Err(CodecError::UnknownSymbol { position: 1, .. })
        ));
    }
}
