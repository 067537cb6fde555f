//! Structural conditions on a rule set plus an operational decodability check.
//!
//! The four structural conditions say nothing about whether the rules really
//! form a uniquely decodable code, so [`validate`] also builds the decoder
//! automaton and runs an exhaustive round trip over short sequences.

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::bits::{adjacent_prefix_violations, kraft_sum_of, BitString};
use crate::codec::Codec;
use crate::model::{Symbol, Vlrs};

/// Longest sequence length covered by the exhaustive round trip.
const ROUNDTRIP_MAX_LEN: usize = 4;
/// Cap on the number of sequences tried; large alphabets get shorter lengths.
const ROUNDTRIP_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offense {
    /// Rule ids involved (empty for a symbol without rules).
    pub rules: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResult {
    /// 1 to 4.
    pub condition: u8,
    pub description: &'static str,
    pub passed: bool,
    pub offenders: Vec<Offense>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionResult>,
    pub decodable: bool,
    pub diagnostics: Vec<String>,
}

impl ValidationReport {
    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn is_valid(&self) -> bool {
        self.conditions_hold() && self.decodable
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            writeln!(
                f,
                "condition {} ({}): {}",
                c.condition,
                c.description,
                if c.passed { "pass" } else { "FAIL" }
            )?;
            for o in &c.offenders {
                writeln!(f, "  {}", o.message)?;
            }
        }
        writeln!(f, "decodable: {}", if self.decodable { "yes" } else { "no" })?;
        for d in &self.diagnostics {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

pub fn validate(code: &Vlrs) -> ValidationReport {
    let conditions = vec![
        condition_rules_per_symbol(code),
        condition_outputs_prefix_free(code),
        condition_inputs_full(code),
        condition_outputs_vs_inputs(code),
    ];
    let mut diagnostics = Vec::new();
    let structural = conditions.iter().all(|c| c.passed);
    let mut decodable = true;

    for (id, rule) in code.rules().iter().enumerate() {
        if rule.output.is_prefix_of(&rule.input) {
            decodable = false;
            diagnostics.push(format!(
                "rule {} outputs a prefix of its own input",
                code.describe_rule(id)
            ));
        }
    }

    match Codec::new(code) {
        Err(e) => {
            decodable = false;
            diagnostics.push(format!("decoder automaton: {e}"));
        }
        Ok(codec) if structural && decodable => {
            if let Err(msg) = exhaustive_roundtrip(&codec) {
                decodable = false;
                diagnostics.push(msg);
            }
        }
        Ok(_) => {}
    }
    if !structural {
        decodable = false;
        diagnostics.push("structural conditions fail; round trip skipped".into());
    }

    ValidationReport {
        conditions,
        decodable,
        diagnostics,
    }
}

fn result(condition: u8, description: &'static str, offenders: Vec<Offense>) -> ConditionResult {
    ConditionResult {
        condition,
        description,
        passed: offenders.is_empty(),
        offenders,
    }
}

fn condition_rules_per_symbol(code: &Vlrs) -> ConditionResult {
    let offenders = code
        .symbols()
        .filter(|&s| code.rule_ids_of(s).is_empty())
        .map(|s| Offense {
            rules: vec![],
            message: format!("symbol {} has no rule", code.label(s)),
        })
        .collect();
    result(1, "every symbol has a rule", offenders)
}

fn condition_outputs_prefix_free(code: &Vlrs) -> ConditionResult {
    let mut outputs: Vec<(&BitString, usize)> =
        code.rules().iter().map(|r| &r.output).zip(0..).collect();
    outputs.sort();
    let offenders = adjacent_prefix_violations(&outputs)
        .map(|(a, b)| Offense {
            rules: vec![a.1, b.1],
            message: if a.0 == b.0 {
                format!(
                    "rules {} and {} share an output",
                    code.describe_rule(a.1),
                    code.describe_rule(b.1)
                )
            } else {
                format!(
                    "output of {} prefixes output of {}",
                    code.describe_rule(a.1),
                    code.describe_rule(b.1)
                )
            },
        })
        .collect();
    result(2, "outputs form a prefix code", offenders)
}

fn condition_inputs_full(code: &Vlrs) -> ConditionResult {
    let mut offenders = Vec::new();
    for s in code.symbols() {
        let ids = code.rule_ids_of(s);
        if ids.is_empty() {
            continue;
        }
        let mut inputs: Vec<(&BitString, usize)> =
            ids.clone().map(|id| (&code.rule(id).input, id)).collect();
        inputs.sort();
        for (a, b) in adjacent_prefix_violations(&inputs) {
            offenders.push(Offense {
                rules: vec![a.1, b.1],
                message: format!(
                    "inputs of {} and {} are not prefix-free",
                    code.describe_rule(a.1),
                    code.describe_rule(b.1)
                ),
            });
        }
        let kraft = kraft_sum_of(inputs.iter().map(|(b, _)| *b));
        if !kraft.is_one() {
            offenders.push(Offense {
                rules: ids.collect(),
                message: format!("inputs of {} have Kraft sum {kraft}, not 1", code.label(s)),
            });
        }
    }
    result(3, "each symbol's inputs are {ε} or a full prefix code", offenders)
}

/// For distinct symbols, an output either equals the other's input or is not
/// a prefix of it.
fn condition_outputs_vs_inputs(code: &Vlrs) -> ConditionResult {
    let mut inputs: Vec<(&BitString, usize)> =
        code.rules().iter().map(|r| &r.input).zip(0..).collect();
    inputs.sort();
    let mut offenders = Vec::new();
    for (id, rule) in code.rules().iter().enumerate() {
        // inputs extending the output form a contiguous run in sorted order
        let start = inputs.partition_point(|(b, _)| *b < &rule.output);
        for &(input, other) in inputs[start..]
            .iter()
            .take_while(|(b, _)| rule.output.is_prefix_of(b))
        {
            if code.rule(other).symbol != rule.symbol && *input != rule.output {
                offenders.push(Offense {
                    rules: vec![id, other],
                    message: format!(
                        "output of {} is a proper prefix of the input of {}",
                        code.describe_rule(id),
                        code.describe_rule(other)
                    ),
                });
            }
        }
    }
    result(4, "outputs are equal to or not a prefix of other symbols' inputs", offenders)
}

/// Longest length `L <= ROUNDTRIP_MAX_LEN` whose sequence count fits the budget.
fn roundtrip_max_len(alphabet: usize) -> usize {
    let mut total = 0usize;
    let mut count = 1usize;
    for len in 1..=ROUNDTRIP_MAX_LEN {
        count = count.saturating_mul(alphabet);
        total = total.saturating_add(count);
        if total > ROUNDTRIP_BUDGET {
            return (len - 1).max(1);
        }
    }
    ROUNDTRIP_MAX_LEN
}

fn exhaustive_roundtrip(codec: &Codec<'_>) -> Result<(), String> {
    let code = codec.code();
    let n = code.alphabet_size();
    for len in 1..=roundtrip_max_len(n) {
        let mut digits = vec![0usize; len];
        loop {
            let seq: Vec<Symbol> = digits.iter().map(|&d| Symbol::from(d)).collect();
            let show = || {
                seq.iter()
                    .map(|&s| code.label(s))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let block = codec
                .encode(&seq)
                .map_err(|e| format!("encoding [{}] fails: {e}", show()))?;
            match codec.decode(&block) {
                Ok(back) if back == seq => {}
                Ok(_) => return Err(format!("[{}] does not decode back to itself", show())),
                Err(e) => return Err(format!("decoding [{}] fails: {e}", show())),
            }
            // odometer increment
            let mut k = len;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < n {
                    break;
                }
                digits[k] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    Ok(())
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

    #[test]
    fn reference_codes_are_valid() {
        let codes = [
            code(3, &[(0, "-", "0"), (1, "-", "10"), (2, "-", "11")]),
            code(3, &[(0, "0", "10"), (0, "1", "01"), (1, "-", "00"), (2, "-", "11")]),
            code(3, &[(0, "-", "00"), (1, "0", "01"), (1, "1", "10"), (2, "-", "11")]),
            code(3, &[(0, "1", "0"), (0, "0", "10"), (1, "-", "110"), (2, "-", "111")]),
        ];
        for c in &codes {
            let report = validate(c);
            assert!(report.is_valid(), "{report}");
        }
    }

    #[test]
    fn self_rewriting_rule_is_not_decodable() {
        let c = code(2, &[(0, "0", "0"), (1, "-", "1")]);
        let report = validate(&c);
        assert!(!report.decodable);
        assert!(!report.is_valid());
        assert!(report.diagnostics.iter().any(|d| d.contains("own input")));
    }

    #[test]
    fn condition_failures_are_reported() {
        let no_rule = code(2, &[(0, "-", "0")]);
        let r = validate(&no_rule);
        assert!(!r.conditions[0].passed);
        assert!(!r.decodable);

        let dup = code(2, &[(0, "-", "0"), (1, "-", "0")]);
        let r = validate(&dup);
        assert!(!r.conditions[1].passed);
        assert_eq!(r.conditions[1].offenders[0].rules.len(), 2);

        let partial_inputs = code(2, &[(0, "0", "10"), (1, "-", "0")]);
        let r = validate(&partial_inputs);
        assert!(!r.conditions[2].passed);

        // output "0" of a2 is a proper prefix of a1's input "01"
        let cond4 = code(
            2,
            &[(0, "00", "100"), (0, "01", "101"), (0, "1", "11"), (1, "-", "0")],
        );
        let r = validate(&cond4);
        assert!(r.conditions[0].passed && r.conditions[1].passed && r.conditions[2].passed);
        assert!(!r.conditions[3].passed);
        assert_eq!(r.conditions[3].offenders.len(), 2);
    }

    #[test]
    fn equal_output_and_input_is_allowed() {
        // a2 -> 0 equals a1's input 0
        let c = code(2, &[(0, "0", "10"), (0, "1", "11"), (1, "-", "0")]);
        let r = validate(&c);
        assert!(r.conditions[3].passed);
    }

    #[test]
    fn budget_shrinks_length_for_large_alphabets() {
        assert_eq!(roundtrip_max_len(3), 4);
        assert_eq!(roundtrip_max_len(16), 4);
        assert_eq!(roundtrip_max_len(256), 2);
        assert_eq!(roundtrip_max_len(100_000), 1);
    }
}
