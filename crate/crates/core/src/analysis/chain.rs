//! The rule process read in encoding order is a Markov chain: given the rule
//! `r'` applied to the symbol after, the rule `r` chosen for the current
//! symbol depends only on the symbol drawn and the head of `r'`'s output.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use super::AnalysisError;
use crate::codec::trie::{PrefixTrie, Walk};
use crate::model::{SourceModel, Vlrs};

const STOCHASTIC_TOLERANCE: f64 = 1e-12;
const RESIDUAL_TARGET: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1_000_000;

/// Column-stochastic transition matrix over the rules of a code, stored by
/// column. `T[r][r']` is the probability that rule `r` is applied right
/// before (in encoding order) rule `r'`.
#[derive(Clone, Debug)]
pub struct RuleChainModel {
    columns: Vec<Vec<(usize, f64)>>,
    deltas: Vec<i64>,
}

pub fn rule_transition_matrix(code: &Vlrs, source: &SourceModel) -> Result<RuleChainModel, AnalysisError> {
    code.check_source(source)?;
    let tries: Vec<PrefixTrie> = code
        .symbols()
        .map(|s| PrefixTrie::from_keys(code.rules_of(s).iter().map(|r| &r.input).zip(code.rule_ids_of(s))))
        .collect();
    let columns = code
        .rules()
        .iter()
        .map(|next| {
            let mut column: Vec<(usize, f64)> = code
                .symbols()
                .filter_map(|s| match tries[s.index()].walk(next.output.iter()) {
                    Walk::Match { value, .. } => Some((value, source.probability(s))),
                    _ => None,
                })
                .collect();
            column.sort_by_key(|&(r, _)| r);
            column
        })
        .collect();
    let model = RuleChainModel {
        columns,
        deltas: code.rules().iter().map(|r| r.delta()).collect(),
    };
    model.check_stochastic()?;
    Ok(model)
}

/// Reachability facts about the nonzero pattern of `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStructure {
    pub irreducible: bool,
    /// Number of classes with no transition leaving them.
    pub closed_classes: usize,
    /// Least common multiple of the periods of the closed classes.
    pub period: usize,
}

impl RuleChainModel {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn deltas(&self) -> &[i64] {
        &self.deltas
    }

    pub fn entry(&self, row: usize, column: usize) -> f64 {
        self.columns[column]
            .iter()
            .find(|&&(r, _)| r == row)
            .map_or(0.0, |&(_, p)| p)
    }

    /// Row-major dense copy; `dense()[r][c] == entry(r, c)`.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for (c, column) in self.columns.iter().enumerate() {
            for &(r, p) in column {
                m[r][c] += p;
            }
        }
        m
    }

    fn check_stochastic(&self) -> Result<(), AnalysisError> {
        for (column, entries) in self.columns.iter().enumerate() {
            let sum: f64 = entries.iter().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(AnalysisError::NotStochastic { column, sum });
            }
        }
        Ok(())
    }

    /// `T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        self.apply_into(x, &mut y);
        y
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (column, &weight) in self.columns.iter().zip(x) {
            if weight == 0.0 {
                continue;
            }
            for &(r, p) in column {
                y[r] += p * weight;
            }
        }
    }

    pub fn structure(&self) -> ChainStructure {
        let n = self.len();
        let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
        for (c, column) in self.columns.iter().enumerate() {
            for &(r, p) in column {
                if p > 0.0 {
                    graph.add_edge(nodes[c], nodes[r], ());
                }
            }
        }
        let sccs = tarjan_scc(&graph);
        let mut class_of = vec![0usize; n];
        for (k, scc) in sccs.iter().enumerate() {
            for node in scc {
                class_of[node.index()] = k;
            }
        }
        let mut closed_classes = 0;
        let mut period = 1;
        for (k, scc) in sccs.iter().enumerate() {
            let closed = scc
                .iter()
                .all(|&v| graph.neighbors(v).all(|w| class_of[w.index()] == k));
            if closed {
                closed_classes += 1;
                period = lcm(period, class_period(&graph, scc, &class_of, k));
            }
        }
        ChainStructure {
            irreducible: sccs.len() == 1,
            closed_classes,
            period,
        }
    }
}

/// gcd over all edges `u -> v` inside the class of `level(u) + 1 - level(v)`,
/// with levels from a BFS rooted anywhere in the class.
fn class_period(graph: &DiGraph<(), ()>, scc: &[NodeIndex], class_of: &[usize], class: usize) -> usize {
    let mut level = vec![usize::MAX; graph.node_count()];
    let root = scc[0];
    level[root.index()] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut g = 0usize;
    while let Some(u) = queue.pop_front() {
        for v in graph.neighbors(u) {
            if class_of[v.index()] != class {
                continue;
            }
            if level[v.index()] == usize::MAX {
                level[v.index()] = level[u.index()] + 1;
                queue.push_back(v);
            } else {
                let diff = (level[u.index()] + 1).abs_diff(level[v.index()]);
                g = gcd(g, diff);
            }
        }
    }
    // a single state without a self-loop has no cycle; treat as aperiodic
    g.max(1)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StationaryMethod {
    PowerIteration,
    /// Mean of `period` consecutive iterates.
    Averaged { period: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct StationaryDistribution {
    pub probabilities: Vec<f64>,
    pub iterations: usize,
    /// `||T π - π||_1` of the returned vector.
    pub residual: f64,
    pub method: StationaryMethod,
}

/// Fixed point of `T` by power iteration from the uniform vector. A periodic
/// or reducible chain is averaged over one period instead.
pub fn stationary_rule_distribution(model: &RuleChainModel) -> Result<StationaryDistribution, AnalysisError> {
    let n = model.len();
    let structure = model.structure();
    let window = structure.period;
    let method = if structure.irreducible && window == 1 {
        StationaryMethod::PowerIteration
    } else {
        log::warn!(
            "rule chain is {} with period {}; averaging power iterates",
            if structure.irreducible { "irreducible" } else { "reducible" },
            window
        );
        StationaryMethod::Averaged { period: window }
    };

    let mut recent: Vec<Vec<f64>> = vec![vec![1.0 / n as f64; n]];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=MAX_ITERATIONS {
        model.apply_into(recent.last().unwrap(), &mut next);
        if recent.len() == window {
            recent.remove(0);
        }
        recent.push(next.clone());
        if recent.len() < window || iteration % window != 0 {
            continue;
        }
        let estimate = average(&recent);
        residual = l1_distance(&model.apply(&estimate), &estimate);
        if residual < RESIDUAL_TARGET {
            let total: f64 = estimate.iter().sum();
            return Ok(StationaryDistribution {
                probabilities: estimate.iter().map(|p| p / total).collect(),
                iterations: iteration,
                residual,
                method,
            });
        }
    }
    Err(AnalysisError::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

fn average(vectors: &[Vec<f64>]) -> Vec<f64> {
    let k = vectors.len() as f64;
    (0..vectors[0].len())
        .map(|i| vectors.iter().map(|v| v[i]).sum::<f64>() / k)
        .collect()
}

fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
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

    fn mu1() -> SourceModel {
        SourceModel::new(vec![0.7, 0.2, 0.1]).unwrap()
    }

    #[test]
    fn c4_matrix() {
        let c4 = code(3, &[(0, "1", "0"), (0, "0", "10"), (1, "-", "110"), (2, "-", "111")]);
        let t = rule_transition_matrix(&c4, &mu1()).unwrap();
        let expected = [
            [0.0, 0.7, 0.7, 0.7],
            [0.7, 0.0, 0.0, 0.0],
            [0.2, 0.2, 0.2, 0.2],
            [0.1, 0.1, 0.1, 0.1],
        ];
        let dense = t.dense();
        for r in 0..4 {
            for c in 0..4 {
                assert!((dense[r][c] - expected[r][c]).abs() < 1e-15, "T[{r}][{c}]");
            }
        }
        let pi = stationary_rule_distribution(&t).unwrap();
        for (p, e) in pi.probabilities.iter().zip([0.412, 0.288, 0.2, 0.1]) {
            assert!((p - e).abs() < 1e-3, "{p} vs {e}");
        }
        assert_eq!(pi.method, StationaryMethod::PowerIteration);
        assert!(pi.residual < 1e-12);
    }

    #[test]
    fn c2_column_for_output_00() {
        let c2 = code(3, &[(0, "0", "10"), (0, "1", "01"), (1, "-", "00"), (2, "-", "11")]);
        let t = rule_transition_matrix(&c2, &mu1()).unwrap();
        let column: Vec<f64> = (0..4).map(|r| t.entry(r, 2)).collect();
        assert_eq!(column, vec![0.7, 0.0, 0.2, 0.1]);
    }

    #[test]
    fn memoryless_chain() {
        let c1 = code(3, &[(0, "-", "0"), (1, "-", "10"), (2, "-", "11")]);
        let t = rule_transition_matrix(&c1, &mu1()).unwrap();
        for c in 0..3 {
            assert_eq!((0..3).map(|r| t.entry(r, c)).collect::<Vec<_>>(), vec![0.7, 0.2, 0.1]);
        }
        let pi = stationary_rule_distribution(&t).unwrap();
        for (p, e) in pi.probabilities.iter().zip([0.7, 0.2, 0.1]) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_chain_is_averaged() {
        // a1 0 -> 1, a1 1 -> 0 with a single symbol alternates deterministically
        let flip = code(1, &[(0, "0", "1"), (0, "1", "0")]);
        let t = rule_transition_matrix(&flip, &SourceModel::new(vec![1.0]).unwrap()).unwrap();
        let s = t.structure();
        assert!(s.irreducible);
        assert_eq!(s.period, 2);
        let pi = stationary_rule_distribution(&t).unwrap();
        assert_eq!(pi.method, StationaryMethod::Averaged { period: 2 });
        assert!((pi.probabilities[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reducible_chain_finds_closed_class() {
        // rule 0 feeds itself; rule 1 is transient
        let c = code(1, &[(0, "0", "00"), (0, "1", "01")]);
        let t = rule_transition_matrix(&c, &SourceModel::new(vec![1.0]).unwrap()).unwrap();
        let s = t.structure();
        assert!(!s.irreducible);
        assert_eq!(s.closed_classes, 1);
        let pi = stationary_rule_distribution(&t).unwrap();
        assert!((pi.probabilities[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn source_size_must_match() {
        let c1 = code(3, &[(0, "-", "0"), (1, "-", "10"), (2, "-", "11")]);
        let two = SourceModel::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(rule_transition_matrix(&c1, &two), Err(AnalysisError::Model(_))));
    }
}
