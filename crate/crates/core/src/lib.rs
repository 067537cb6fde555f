//! Variable length rewriting systems: codes whose production rules
//! `a l -> b` consume a source symbol together with a few lookahead bits of
//! the already encoded stream and emit a bit string in their place.
//!
//! Encoding runs backwards over the symbol sequence; decoding is a forward
//! finite-state machine. Besides the codec the crate validates rule sets,
//! computes compression rates through the rule Markov chain and builds
//! Huffman, lexicographic (order preserving) and mirror codes.
//!
//! ```
//! use vlrs::format::parse_code_spec;
//! use vlrs::codec::Codec;
//! use vlrs::model::Symbol;
//!
//! let code = parse_code_spec(
//!     "alphabet: a1 a2 a3\n\
//!      rule: a1 0 -> 10\n\
//!      rule: a1 1 -> 01\n\
//!      rule: a2 - -> 00\n\
//!      rule: a3 - -> 11\n",
//! )
//! .unwrap();
//! let codec = Codec::new(&code).unwrap();
//! let symbols: Vec<Symbol> = [0, 1, 0, 0, 2, 0].into_iter().map(Symbol).collect();
//! let block = codec.encode(&symbols).unwrap();
//! assert_eq!(codec.decode(&block).unwrap(), symbols);
//! ```

pub mod analysis;
pub mod bits;
pub mod codec;
pub mod construct;
pub mod format;
pub mod model;
pub mod simplify;
pub mod validate;

pub use bits::{BitSet, BitString};
pub use codec::{Codec, EncodedBlock};
pub use model::{Rule, SourceModel, Symbol, TerminationPolicy, Vlrs};
