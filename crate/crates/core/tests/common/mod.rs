#![allow(dead_code)]

use vlrs::bits::bs;
use vlrs::codec::Encoder;
use vlrs::model::{Rule, SourceModel, Symbol, Vlrs};

pub fn code(size: usize, table: &[(usize, &str, &str)]) -> Vlrs {
    let rules = table
        .iter()
        .map(|&(s, l, b)| Rule::new(s, bs(l), bs(b)))
        .collect();
    Vlrs::with_default_labels(size, rules).unwrap()
}

pub fn c1() -> Vlrs {
    code(3, &[(0, "-", "0"), (1, "-", "10"), (2, "-", "11")])
}

pub fn c2() -> Vlrs {
    code(3, &[(0, "0", "10"), (0, "1", "01"), (1, "-", "00"), (2, "-", "11")])
}

pub fn c3() -> Vlrs {
    code(3, &[(0, "-", "00"), (1, "0", "01"), (1, "1", "10"), (2, "-", "11")])
}

pub fn c4() -> Vlrs {
    code(3, &[(0, "1", "0"), (0, "0", "10"), (1, "-", "110"), (2, "-", "111")])
}

pub fn reference_codes() -> Vec<(&'static str, Vlrs)> {
    vec![("C1", c1()), ("C2", c2()), ("C3", c3()), ("C4", c4())]
}

pub fn mu1() -> SourceModel {
    SourceModel::new(vec![0.7, 0.2, 0.1]).unwrap()
}

pub fn mu2() -> SourceModel {
    SourceModel::new(vec![0.2, 0.7, 0.1]).unwrap()
}

pub fn symbols(indices: &[u32]) -> Vec<Symbol> {
    indices.iter().map(|&i| Symbol(i)).collect()
}

/// Every sequence of `len` symbols over an alphabet of `n`, in
/// lexicographic order of the index sequences.
pub fn all_sequences(n: usize, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut s = prefix.clone();
                    s.push(Symbol::from(i));
                    s
                })
            })
            .collect();
    }
    out
}

/// Expected payload length of an `n`-symbol block by enumeration.
pub fn brute_force_exact_mdl(code: &Vlrs, source: &SourceModel, n: usize) -> f64 {
    let encoder = Encoder::new(code);
    all_sequences(code.alphabet_size(), n)
        .iter()
        .map(|seq| {
            let p: f64 = seq.iter().map(|&s| source.probability(s)).product();
            p * encoder.encode(seq).unwrap().payload.len() as f64
        })
        .sum()
}
