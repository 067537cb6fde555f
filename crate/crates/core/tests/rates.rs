mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vlrs::analysis::{
    asymptotic_mdl, chain_mdl, entropy, exact_mdl, rule_transition_matrix, sample_sequence,
    stationary_rule_distribution,
};
use vlrs::codec::Encoder;
use vlrs::construct::{hu_tucker, huffman, lexicographic_vlrs, mirror_vlrs};
use vlrs::model::{SourceModel, Vlrs};

fn tested_codes() -> Vec<(String, Vlrs)> {
    let mut codes: Vec<(String, Vlrs)> = reference_codes()
        .into_iter()
        .map(|(n, c)| (n.to_string(), c))
        .collect();
    let h1 = huffman(&mu1()).unwrap();
    codes.push(("lex(mu1)".into(), lexicographic_vlrs(&h1).unwrap()));
    codes.push(("mirror(mu1)".into(), mirror_vlrs(&h1).unwrap()));
    codes
}

fn sources() -> Vec<SourceModel> {
    vec![
        mu1(),
        mu2(),
        SourceModel::new(vec![1.0 / 3.0; 3]).unwrap(),
        SourceModel::new(vec![0.05, 0.15, 0.8]).unwrap(),
    ]
}

#[test]
fn exact_mdl_matches_enumeration() {
    for (name, code) in tested_codes() {
        for source in [mu1(), mu2()] {
            for n in 1..=6 {
                let exact = exact_mdl(&code, &source, n).unwrap();
                let brute = brute_force_exact_mdl(&code, &source, n);
                assert!((exact - brute).abs() < 1e-9, "{name} n={n}: {exact} vs {brute}");
            }
        }
    }
}

#[test]
fn exact_mdl_per_symbol_approaches_asymptotic() {
    for (name, code) in tested_codes() {
        let asymptotic = asymptotic_mdl(&code, &mu1()).unwrap();
        let per_symbol = exact_mdl(&code, &mu1(), 200).unwrap() / 200.0;
        assert!((per_symbol - asymptotic).abs() < 0.01, "{name}: {per_symbol} vs {asymptotic}");
    }
}

#[test]
fn mdl_is_at_least_entropy() {
    for (name, code) in tested_codes() {
        for source in sources() {
            let mdl = asymptotic_mdl(&code, &source).unwrap();
            assert!(mdl >= entropy(&source) - 1e-9, "{name}: {mdl}");
        }
    }
}

#[test]
fn shortcut_agrees_with_chain() {
    for (name, code) in tested_codes() {
        for source in sources() {
            let a = asymptotic_mdl(&code, &source).unwrap();
            let b = chain_mdl(&code, &source).unwrap();
            assert!((a - b).abs() < 1e-9, "{name}: {a} vs {b}");
        }
    }
}

#[test]
fn columns_are_stochastic_and_pi_is_fixed() {
    for (name, code) in tested_codes() {
        for source in sources() {
            let t = rule_transition_matrix(&code, &source).unwrap();
            let dense = t.dense();
            for c in 0..t.len() {
                let sum: f64 = dense.iter().map(|row| row[c]).sum();
                assert!((sum - 1.0).abs() < 1e-12, "{name} column {c}");
            }
            let pi = stationary_rule_distribution(&t).unwrap().probabilities;
            assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(pi.iter().all(|&p| p >= 0.0));
            let tpi = t.apply(&pi);
            let residual: f64 = tpi.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            assert!(residual < 1e-10, "{name}: {residual}");
        }
    }
}

#[test]
fn stationary_matches_simulated_rule_frequencies() {
    for (name, code) in tested_codes() {
        let t = rule_transition_matrix(&code, &mu1()).unwrap();
        let pi = stationary_rule_distribution(&t).unwrap().probabilities;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let seq = sample_sequence(&mu1(), 1_000_000, &mut rng);
        let (_, trace) = Encoder::new(&code).encode_traced(&seq).unwrap();
        let mut counts = vec![0usize; code.rules().len()];
        for r in trace {
            counts[r] += 1;
        }
        for (r, (&count, p)) in counts.iter().zip(&pi).enumerate() {
            let freq = count as f64 / seq.len() as f64;
            assert!((freq - p).abs() < 0.005, "{name} rule {r}: {freq} vs {p}");
        }
    }
}

#[test]
fn lexicographic_rate_equals_huffman_rate() {
    for source in sources() {
        let h = huffman(&source).unwrap();
        let expected: f64 = h
            .lengths()
            .iter()
            .zip(source.probabilities())
            .map(|(&k, p)| p * k as f64)
            .sum();
        let lex = lexicographic_vlrs(&h).unwrap();
        assert!((asymptotic_mdl(&lex, &source).unwrap() - expected).abs() < 1e-12);
        assert!(lex.has_uniform_deltas());
        let ht = hu_tucker(&source).unwrap().mdl(&source);
        assert!(expected <= ht + 1e-12);
    }
    let lex2 = lexicographic_vlrs(&huffman(&mu2()).unwrap()).unwrap();
    assert!(asymptotic_mdl(&lex2, &mu2()).unwrap() < hu_tucker(&mu2()).unwrap().mdl(&mu2()));
}

#[test]
fn mirror_rate_equals_codeword_rate() {
    // a mirror rule emits the codeword plus a leading bit and consumes one bit
    for source in sources() {
        let h = huffman(&source).unwrap();
        let m = mirror_vlrs(&h).unwrap();
        let a = asymptotic_mdl(&m, &source).unwrap();
        assert!((a - h.mdl(&source)).abs() < 1e-12);
        for n in 1..=6 {
            let exact = exact_mdl(&m, &source, n).unwrap();
            let brute = brute_force_exact_mdl(&m, &source, n);
            assert!((exact - brute).abs() < 1e-9);
        }
    }
}
