//! Probability that a generated bit is 0, analytically for mirror codes and
//! by simulation for any code.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{asymptotic_mdl, AnalysisError};
use crate::codec::Encoder;
use crate::model::{SourceModel, Symbol, Vlrs};

/// `f_values[k]` is the probability that the first bit produced `k + 1`
/// steps from the end of the block (in encoding order) is 0.
#[derive(Clone, Debug, Serialize)]
pub struct BitProbabilityTrace {
    pub alpha: f64,
    pub f_values: Vec<f64>,
    pub limit: f64,
    /// `|2 alpha - 1|`, the per-step contraction towards the limit.
    pub contraction: f64,
}

/// For each symbol, the ids of its rule with output `0 H` and its rule with
/// output `1 H'`, where `H'` is the complement of `H` and each input is the
/// last bit of the rest of its output.
pub fn mirror_pairs(code: &Vlrs) -> Result<Vec<(usize, usize)>, AnalysisError> {
    let fail = |msg: String| Err(AnalysisError::NotMirror(msg));
    let mut pairs = Vec::with_capacity(code.alphabet_size());
    for s in code.symbols() {
        let ids: Vec<usize> = code.rule_ids_of(s).collect();
        if ids.len() != 2 {
            return fail(format!("{} has {} rules instead of 2", code.label(s), ids.len()));
        }
        let (zero, one) = match (code.rule(ids[0]).output.get(0), code.rule(ids[1]).output.get(0)) {
            (Some(false), Some(true)) => (ids[0], ids[1]),
            (Some(true), Some(false)) => (ids[1], ids[0]),
            _ => return fail(format!("outputs of {} do not start with 0 and 1", code.label(s))),
        };
        let (z, o) = (code.rule(zero), code.rule(one));
        let h = z.output.slice(1..z.output.len());
        let h_bar = o.output.slice(1..o.output.len());
        if h.is_empty() || h.complement() != h_bar {
            return fail(format!("outputs of {} are not mirrored", code.label(s)));
        }
        if z.input.len() != 1 || z.input.last() != h.last() || o.input.len() != 1 || o.input.last() != h_bar.last() {
            return fail(format!("inputs of {} are not the last codeword bit", code.label(s)));
        }
        pairs.push((zero, one));
    }
    Ok(pairs)
}

/// Recursion `f_{t+1} = alpha f_t + (1 - alpha)(1 - f_t)` started from the
/// rules selected by the termination patterns.
pub fn marginal_bit_trace(code: &Vlrs, source: &SourceModel, steps: usize) -> Result<BitProbabilityTrace, AnalysisError> {
    code.check_source(source)?;
    let pairs = mirror_pairs(code)?;
    let encoder = Encoder::new(code);
    let mut alpha = 0.0;
    let mut f = 0.0;
    for (s, &(zero, _)) in code.symbols().zip(&pairs) {
        let p = source.probability(s);
        // the 0-output rule fires when the stream head is its input bit
        if code.rule(zero).input.last() == Some(false) {
            alpha += p;
        }
        if encoder.termination_rule(s) == Some(zero) {
            f += p;
        }
    }
    let mut f_values = Vec::with_capacity(steps);
    for _ in 0..steps {
        f_values.push(f);
        f = alpha * f + (1.0 - alpha) * (1.0 - f);
    }
    Ok(BitProbabilityTrace {
        alpha,
        f_values,
        limit: 0.5,
        contraction: (2.0 * alpha - 1.0).abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BitStats {
    pub trials: usize,
    pub length: usize,
    pub total_bits: u64,
    pub zero_frequency: f64,
    /// Zero frequency at each of the first payload positions, over trials.
    pub per_position: Vec<f64>,
    pub bits_per_symbol: f64,
    /// Asymptotic rate the code would have if the encoder's model were right.
    pub model_mdl: Option<f64>,
}

/// Draw `length` i.i.d. symbols.
pub fn sample_sequence<R: Rng>(source: &SourceModel, length: usize, rng: &mut R) -> Vec<Symbol> {
    let dist = WeightedIndex::new(source.probabilities()).expect("source probabilities are positive");
    (0..length).map(|_| Symbol::from(dist.sample(rng))).collect()
}

const MAX_TRACKED_POSITIONS: usize = 64;

/// Encode `trials` sequences drawn from `true_source` and count zero bits.
/// Trial `k` uses stream `k` of a generator seeded with `seed`, so the result
/// does not depend on scheduling.
pub fn empirical_bit_stats(
    code: &Vlrs,
    encode_source: &SourceModel,
    true_source: &SourceModel,
    length: usize,
    trials: usize,
    seed: u64,
) -> Result<BitStats, AnalysisError> {
    code.check_source(true_source)?;
    let model_mdl = asymptotic_mdl(code, encode_source).ok();
    let encoder = Encoder::new(code);
    let payloads: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let seq = sample_sequence(true_source, length, &mut rng);
            encoder.encode(&seq).map(|b| b.payload.into_bits())
        })
        .collect::<Result<_, _>>()?;

    let total_bits: u64 = payloads.iter().map(|p| p.len() as u64).sum();
    let zeros: u64 = payloads
        .iter()
        .map(|p| p.iter().filter(|&&b| !b).count() as u64)
        .sum();
    let tracked = payloads
        .iter()
        .map(Vec::len)
        .min()
        .unwrap_or(0)
        .min(MAX_TRACKED_POSITIONS);
    let per_position = (0..tracked)
        .map(|k| payloads.iter().filter(|p| !p[k]).count() as f64 / trials as f64)
        .collect();
    let symbols = (length * trials) as f64;
    Ok(BitStats {
        trials,
        length,
        total_bits,
        zero_frequency: if total_bits == 0 { 0.0 } else { zeros as f64 / total_bits as f64 },
        per_position,
        bits_per_symbol: if symbols == 0.0 { 0.0 } else { total_bits as f64 / symbols },
        model_mdl,
    })
}
