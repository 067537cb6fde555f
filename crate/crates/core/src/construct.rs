//! Code constructors: Huffman and Hu-Tucker prefix codes, and the
//! lexicographic and mirror rewriting systems built on top of a prefix code.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::model::{check_prefix_code, default_labels, ModelError, Rule, SourceModel, Vlrs};

/// Longest codeword accepted by [`lexicographic_vlrs`]; the construction
/// enumerates all `2^k+` bit strings of that length.
pub const MAX_LEXICOGRAPHIC_LENGTH: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("at least two symbols are needed, got {0}")]
    TooFewSymbols(usize),
    #[error("longest codeword has {0} bits; at most {MAX_LEXICOGRAPHIC_LENGTH} are supported")]
    TooLong(usize),
}

/// One codeword per symbol, in alphabet order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodewordAssignment {
    codewords: Vec<BitString>,
}

impl CodewordAssignment {
    pub fn new(codewords: Vec<BitString>) -> Result<Self, ConstructError> {
        check_prefix_code(&codewords)?;
        Ok(Self { codewords })
    }

    pub fn codewords(&self) -> &[BitString] {
        &self.codewords
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.codewords.iter().map(BitString::len).collect()
    }

    pub fn k_plus(&self) -> usize {
        self.codewords.iter().map(BitString::len).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn mdl(&self, source: &SourceModel) -> f64 {
        crate::analysis::vlc_mdl(&self.codewords, source)
    }

    /// The assignment as a plain variable-length code.
    pub fn to_vlrs(&self, alphabet: Vec<String>) -> Result<Vlrs, ConstructError> {
        Ok(crate::model::from_vlc_labelled(alphabet, &self.codewords)?)
    }
}

/// Canonical code for the given lengths: codewords ordered by
/// `(length, symbol index)` take consecutive values.
pub fn canonical_codewords(lengths: &[usize]) -> Vec<BitString> {
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));
    let mut codewords = vec![BitString::empty(); lengths.len()];
    let mut value: u64 = 0;
    let mut prev_len = 0;
    for (k, &i) in order.iter().enumerate() {
        if k > 0 {
            value += 1;
        }
        value <<= lengths[i] - prev_len;
        prev_len = lengths[i];
        codewords[i] = BitString::from_u64(value, lengths[i]);
    }
    codewords
}

#[derive(PartialEq)]
struct Node {
    probability: f64,
    id: usize,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.probability
            .total_cmp(&other.probability)
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Optimal prefix code. The two least probable clusters merge first, ties
/// going to the smaller cluster id (leaves are `0..n`, merges count up from
/// `n`); codewords are then assigned canonically.
pub fn huffman(source: &SourceModel) -> Result<CodewordAssignment, ConstructError> {
    let n = source.len();
    if n < 2 {
        return Err(ConstructError::TooFewSymbols(n));
    }
    let mut heap: BinaryHeap<Reverse<Node>> = source
        .probabilities()
        .iter()
        .enumerate()
        .map(|(id, &probability)| Reverse(Node { probability, id }))
        .collect();
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut next_id = n;
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().unwrap();
        let Reverse(b) = heap.pop().unwrap();
        parent[a.id] = next_id;
        parent[b.id] = next_id;
        heap.push(Reverse(Node {
            probability: a.probability + b.probability,
            id: next_id,
        }));
        next_id += 1;
    }
    let lengths: Vec<usize> = (0..n)
        .map(|leaf| {
            let mut depth = 0;
            let mut v = leaf;
            while parent[v] != usize::MAX {
                v = parent[v];
                depth += 1;
            }
            depth
        })
        .collect();
    CodewordAssignment::new(canonical_codewords(&lengths))
}

/// Optimal alphabetic code by dynamic programming over split points.
/// `cost[i][j]` is the least weighted depth of a tree over symbols `i..=j`.
/// Among equal costs the split with the smaller left subtree cost wins, then
/// the leftmost split.
pub fn hu_tucker(source: &SourceModel) -> Result<CodewordAssignment, ConstructError> {
    let n = source.len();
    if n < 2 {
        return Err(ConstructError::TooFewSymbols(n));
    }
    let p = source.probabilities();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + p[i];
    }
    let weight = |i: usize, j: usize| prefix[j + 1] - prefix[i];
    let mut cost = vec![vec![0.0f64; n]; n];
    let mut split = vec![vec![0usize; n]; n];
    for span in 1..n {
        for i in 0..n - span {
            let j = i + span;
            let mut best: Option<(f64, f64, usize)> = None;
            for k in i..j {
                let total = cost[i][k] + cost[k + 1][j];
                let better = match best {
                    None => true,
                    Some((c, left, _)) => {
                        // exact ties only; costs come from identical sums
                        total < c || (total == c && cost[i][k] < left)
                    }
                };
                if better {
                    best = Some((total, cost[i][k], k));
                }
            }
            let (c, _, k) = best.unwrap();
            cost[i][j] = c + weight(i, j);
            split[i][j] = k;
        }
    }
    let mut codewords = vec![BitString::empty(); n];
    let mut stack = vec![(0usize, n - 1, BitString::empty())];
    while let Some((i, j, prefix)) = stack.pop() {
        if i == j {
            codewords[i] = prefix;
            continue;
        }
        let k = split[i][j];
        let mut left = prefix.clone();
        left.push(false);
        let mut right = prefix;
        right.push(true);
        stack.push((i, k, left));
        stack.push((k + 1, j, right));
    }
    CodewordAssignment::new(codewords)
}

/// Rewriting system that keeps the codeword lengths of `assignment` but
/// preserves the lexicographic order of symbol sequences.
///
/// All bit strings of length `k+` are handed out in increasing order: symbol
/// `a_i` takes the next `2^(k+ - k_i)` of them as outputs, paired in order
/// with all inputs of length `k+ - k_i`. Every rule of `a_i` therefore
/// generates exactly `k_i` bits.
pub fn lexicographic_vlrs(assignment: &CodewordAssignment) -> Result<Vlrs, ConstructError> {
    let k_plus = assignment.k_plus();
    if k_plus > MAX_LEXICOGRAPHIC_LENGTH {
        return Err(ConstructError::TooLong(k_plus));
    }
    let mut rules = Vec::new();
    let mut next: u64 = 0;
    for (i, k) in assignment.lengths().into_iter().enumerate() {
        let extra = k_plus - k;
        for input in BitString::all_of_length(extra) {
            rules.push(Rule::new(i, input, BitString::from_u64(next, k_plus)));
            next += 1;
        }
    }
    Ok(Vlrs::new(default_labels(assignment.len()), rules)?)
}

/// Rewriting system built from a prefix code `H` and its complement: per
/// symbol, `last(h) -> 0 h` and `last(!h) -> 1 !h`. Emitted bits are never
/// rewritten and the first bit of each output is 0 or 1 with probability
/// tending to one half.
pub fn mirror_vlrs(assignment: &CodewordAssignment) -> Result<Vlrs, ConstructError> {
    let mut rules = Vec::with_capacity(2 * assignment.len());
    for (i, h) in assignment.codewords().iter().enumerate() {
        let h_bar = h.complement();
        let last = |c: &BitString| BitString::from_bits(c.last().into_iter().collect());
        rules.push(Rule::new(i, last(h), h.prepend(false)));
        rules.push(Rule::new(i, last(&h_bar), h_bar.prepend(true)));
    }
    Ok(Vlrs::new(default_labels(assignment.len()), rules)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bs;

    fn words(list: &[&str]) -> Vec<BitString> {
        list.iter().map(|w| bs(w)).collect()
    }

    fn source(p: &[f64]) -> SourceModel {
        SourceModel::new(p.to_vec()).unwrap()
    }

    fn code(size: usize, table: &[(usize, &str, &str)]) -> Vlrs {
        let rules = table
            .iter()
            .map(|&(s, l, b)| Rule::new(s, bs(l), bs(b)))
            .collect();
        Vlrs::with_default_labels(size, rules).unwrap()
    }

    #[test]
    fn canonical_assignment() {
        assert_eq!(canonical_codewords(&[1, 2, 2]), words(&["0", "10", "11"]));
        assert_eq!(canonical_codewords(&[2, 1, 2]), words(&["10", "0", "11"]));
        assert_eq!(canonical_codewords(&[3, 1, 3, 2]), words(&["110", "0", "111", "10"]));
    }

    #[test]
    fn huffman_examples() {
        let mu1 = source(&[0.7, 0.2, 0.1]);
        let h = huffman(&mu1).unwrap();
        assert_eq!(h.codewords(), words(&["0", "10", "11"]).as_slice());
        assert!((h.mdl(&mu1) - 1.3).abs() < 1e-12);
        let h2 = huffman(&source(&[0.2, 0.7, 0.1])).unwrap();
        assert_eq!(h2.codewords(), words(&["10", "0", "11"]).as_slice());
        assert_eq!(huffman(&SourceModel::uniform(4).unwrap()).unwrap().lengths(), vec![2; 4]);
        assert!(matches!(huffman(&source(&[1.0])), Err(ConstructError::TooFewSymbols(1))));
    }

    #[test]
    fn hu_tucker_examples() {
        let mu2 = source(&[0.2, 0.7, 0.1]);
        let ht = hu_tucker(&mu2).unwrap();
        assert_eq!(ht.codewords(), words(&["0", "10", "11"]).as_slice());
        assert!((ht.mdl(&mu2) - 1.8).abs() < 1e-12);
        let mu1 = source(&[0.7, 0.2, 0.1]);
        assert_eq!(hu_tucker(&mu1).unwrap().codewords(), words(&["0", "10", "11"]).as_slice());
        assert_eq!(hu_tucker(&SourceModel::uniform(4).unwrap()).unwrap().lengths(), vec![2; 4]);
    }

    #[test]
    fn hu_tucker_is_alphabetic() {
        let p = source(&[0.05, 0.3, 0.1, 0.25, 0.02, 0.28]);
        let ht = hu_tucker(&p).unwrap();
        assert!(ht.codewords().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lexicographic_examples() {
        let h2 = huffman(&source(&[0.2, 0.7, 0.1])).unwrap();
        let c3 = code(3, &[(0, "-", "00"), (1, "0", "01"), (1, "1", "10"), (2, "-", "11")]);
        assert_eq!(lexicographic_vlrs(&h2).unwrap(), c3);

        let h1 = huffman(&source(&[0.7, 0.2, 0.1])).unwrap();
        let lex1 = code(3, &[(0, "0", "00"), (0, "1", "01"), (1, "-", "10"), (2, "-", "11")]);
        assert_eq!(lexicographic_vlrs(&h1).unwrap(), lex1);

        let flc = CodewordAssignment::new(words(&["00", "01", "10", "11"])).unwrap();
        let lex = lexicographic_vlrs(&flc).unwrap();
        assert_eq!(lex.rules().len(), 4);
        assert!(lex.is_fixed_to_variable());
    }

    #[test]
    fn lexicographic_guard() {
        // a chain of 26 codewords reaches length 25
        let mut cw: Vec<BitString> = (1..26)
            .map(|k| {
                let mut w = BitString::from_bits(vec![true; k - 1]);
                w.push(false);
                w
            })
            .collect();
        cw.push(BitString::from_bits(vec![true; 25]));
        let deep = CodewordAssignment::new(cw).unwrap();
        assert!(matches!(lexicographic_vlrs(&deep), Err(ConstructError::TooLong(25))));
    }

    #[test]
    fn mirror_examples() {
        let c1 = CodewordAssignment::new(words(&["0", "10", "11"])).unwrap();
        let expected = code(
            3,
            &[
                (0, "0", "00"),
                (0, "1", "11"),
                (1, "0", "010"),
                (1, "1", "101"),
                (2, "1", "011"),
                (2, "0", "100"),
            ],
        );
        let m = mirror_vlrs(&c1).unwrap();
        assert_eq!(m, expected);
        assert!(m.is_suffix_constrained());
        assert!(m.rules().iter().all(|r| r.delta() >= 1));

        let flc = CodewordAssignment::new(words(&["0", "1"])).unwrap();
        let expected = code(2, &[(0, "0", "00"), (0, "1", "11"), (1, "1", "01"), (1, "0", "10")]);
        assert_eq!(mirror_vlrs(&flc).unwrap(), expected);
    }

    #[test]
    fn assignment_must_be_prefix_free() {
        assert!(CodewordAssignment::new(words(&["0", "01"])).is_err());
    }
}
