use super::{rule_transition_matrix, stationary_rule_distribution, AnalysisError};
use crate::bits::BitString;
use crate::codec::{CodecError, Encoder};
use crate::model::{SourceModel, Vlrs};

/// Shannon entropy in bits per symbol.
pub fn entropy(source: &SourceModel) -> f64 {
    source
        .probabilities()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .fold(0.0, |a, b| a + b)
}

/// Mean codeword length of a plain prefix code.
pub fn vlc_mdl(codewords: &[BitString], source: &SourceModel) -> f64 {
    codewords
        .iter()
        .zip(source.probabilities())
        .map(|(c, p)| p * c.len() as f64)
        .sum()
}

/// Expected bits per symbol in the long run. When all rules of each symbol
/// generate the same number of bits the chain is not needed.
pub fn asymptotic_mdl(code: &Vlrs, source: &SourceModel) -> Result<f64, AnalysisError> {
    code.check_source(source)?;
    if code.has_uniform_deltas() {
        Ok(code
            .symbols()
            .map(|s| source.probability(s) * code.rules_of(s)[0].delta() as f64)
            .sum())
    } else {
        chain_mdl(code, source)
    }
}

/// `Σ π(r) δ(r)` through the stationary distribution, without the shortcut.
pub fn chain_mdl(code: &Vlrs, source: &SourceModel) -> Result<f64, AnalysisError> {
    let model = rule_transition_matrix(code, source)?;
    let pi = stationary_rule_distribution(&model)?;
    Ok(pi
        .probabilities
        .iter()
        .zip(model.deltas())
        .map(|(p, &d)| p * d as f64)
        .sum())
}

/// Expected payload length in bits of an `n`-symbol block, termination
/// included.
///
/// The last symbol's rule is fixed by its termination pattern; the rule
/// distribution at earlier positions follows by applying `T` backwards.
pub fn exact_mdl(code: &Vlrs, source: &SourceModel, n: usize) -> Result<f64, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::EmptySequence);
    }
    let model = rule_transition_matrix(code, source)?;
    let encoder = Encoder::new(code);
    let mut dist = vec![0.0; model.len()];
    let mut termination_bits = 0.0;
    for s in code.symbols() {
        let p = source.probability(s);
        let no_termination = || CodecError::NoTermination {
            symbol: code.label(s).to_string(),
        };
        let t = encoder.termination(s).ok_or_else(no_termination)?;
        let rule = encoder.termination_rule(s).ok_or_else(no_termination)?;
        termination_bits += p * t.len() as f64;
        dist[rule] += p;
    }
    let mut total = termination_bits;
    for step in 0..n {
        if step > 0 {
            dist = model.apply(&dist);
        }
        total += dist
            .iter()
            .zip(model.deltas())
            .map(|(p, &d)| p * d as f64)
            .sum::<f64>();
    }
    Ok(total)
}
