//! Classical nets: joint probabilities, conditionals, validation, coarsening.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fuzzy::DirectProductSet;
use crate::graph::NodeClass;
use crate::net::{Assignment, CbNet, Net, NodeDecl, NodeSpace, Value, CONTRADICTION_EPS};

/// Column-normalization tolerance.
pub const EPS_NORM: f64 = 1e-9;

/// A defect found by [`validate`] or [`crate::quantum::validate_quantum`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Cyclic,
    InvalidNode {
        node: String,
    },
    NegativeEntry {
        node: String,
        row: usize,
        col: usize,
        value: f64,
    },
    ColumnSum {
        node: String,
        col: usize,
        sum: f64,
    },
    NegativeOccupation {
        component: String,
        value: i32,
    },
    /// Squared external sums of internal amplitudes do not add up to one.
    ExternalNormalization {
        sum: f64,
    },
    /// Squared magnitudes of the joint amplitude do not add up to one.
    JointNormalization {
        sum: f64,
    },
    Unchecked {
        reason: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cyclic => f.write_str("graph contains a directed cycle"),
            Violation::InvalidNode { node } => write!(
                f,
                "node `{node}`: outgoing arrows are neither a single external arrow nor internal arrows only"
            ),
            Violation::NegativeEntry { node, row, col, value } => {
                write!(f, "node `{node}` row {row} column {col}: negative entry {value}")
            }
            Violation::ColumnSum { node, col, sum } => {
                write!(f, "node `{node}` column {col}: sums to {sum}, expected 1")
            }
            Violation::NegativeOccupation { component, value } => {
                write!(f, "component `{component}` takes negative occupation {value}")
            }
            Violation::ExternalNormalization { sum } => {
                write!(f, "external-state probabilities sum to {sum}, expected 1")
            }
            Violation::JointNormalization { sum } => {
                write!(f, "squared joint amplitudes sum to {sum}, expected 1")
            }
            Violation::Unchecked { reason } => write!(f, "not checked: {reason}"),
        }
    }
}

/// Graph-level checks shared by both net kinds.
pub(crate) fn structural_violations<T: Value>(net: &Net<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    if net.order().is_none() {
        out.push(Violation::Cyclic);
    }
    for i in 0..net.len() {
        if net.graph().classify(i) == NodeClass::Invalid {
            out.push(Violation::InvalidNode {
                node: net.node_name(i).to_string(),
            });
        }
    }
    out
}

pub fn validate(net: &CbNet) -> Vec<Violation> {
    let mut out = structural_violations(net);
    for i in 0..net.len() {
        let t = net.table(i);
        for col in 0..t.cols() {
            for (row, &v) in t.column(col).iter().enumerate() {
                if v < 0.0 {
                    out.push(Violation::NegativeEntry {
                        node: net.node_name(i).to_string(),
                        row,
                        col,
                        value: v,
                    });
                }
            }
            let sum: f64 = t.column(col).iter().sum();
            if (sum - 1.0).abs() > EPS_NORM {
                out.push(Violation::ColumnSum {
                    node: net.node_name(i).to_string(),
                    col,
                    sum,
                });
            }
        }
    }
    out
}

/// Product of the node probabilities for a full component assignment.
pub fn joint_probability(net: &CbNet, full: &Assignment) -> Result<f64> {
    net.joint_value(&net.resolve(full)?)
}

/// Sum of the joint over every state. Works on cyclic pre-nets too.
pub fn total_mass(net: &CbNet) -> Result<f64> {
    let all = net.mask(&DirectProductSet::full())?;
    let mut s = 0.0;
    net.for_each_state(&all, |_, p| s += p)?;
    Ok(s)
}

/// `chi_c[f]`: joint mass inside a direct product set.
pub fn chi_c(net: &CbNet, f: &DirectProductSet) -> Result<f64> {
    net.require_acyclic()?;
    let allowed = net.mask(f)?;
    let mut s = 0.0;
    net.for_each_state(&allowed, |_, p| s += p)?;
    Ok(s)
}

/// Conditional distribution over the value combinations of a set of
/// hypothesis components.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub components: Vec<String>,
    /// `(values, probability)` in [`Net::value_grid`] order.
    pub probabilities: Vec<(Vec<i32>, f64)>,
    /// Non-additivity factor: summed unnormalized hypothesis weights over the
    /// evidence weight.
    pub f_qna: f64,
}

impl Distribution {
    pub fn probability(&self, values: &[i32]) -> Option<f64> {
        self.probabilities.iter().find(|(v, _)| v == values).map(|(_, p)| *p)
    }

    pub(crate) fn from_weights(
        components: &[&str],
        grid: Vec<Vec<i32>>,
        weights: &BTreeMap<Vec<i32>, f64>,
        evidence_weight: f64,
    ) -> Result<Self> {
        let total: f64 = grid.iter().map(|g| weights.get(g).copied().unwrap_or(0.0)).sum();
        if total <= CONTRADICTION_EPS || evidence_weight <= CONTRADICTION_EPS {
            return Err(Error::ContradictoryEvidence);
        }
        Ok(Distribution {
            components: components.iter().map(|c| c.to_string()).collect(),
            probabilities: grid
                .into_iter()
                .map(|g| {
                    let w = weights.get(&g).copied().unwrap_or(0.0);
                    (g, w / total)
                })
                .collect(),
            f_qna: total / evidence_weight,
        })
    }
}

/// `P(H = h | E)` for every value combination `h` of `hypothesis`.
pub fn classical_distribution(net: &CbNet, hypothesis: &[&str], evidence: &DirectProductSet) -> Result<Distribution> {
    net.require_acyclic()?;
    net.check_disjoint(hypothesis, evidence)?;
    let keys = hypothesis
        .iter()
        .map(|h| net.component(h))
        .collect::<Result<Vec<_>>>()?;
    let allowed = net.mask(evidence)?;
    let mut weights: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
    let mut evidence_weight = 0.0;
    net.for_each_state(&allowed, |s, p| {
        evidence_weight += p;
        let k: Vec<i32> = keys.iter().map(|&c| net.component_value(s, c)).collect();
        *weights.entry(k).or_insert(0.0) += p;
    })?;
    Distribution::from_weights(hypothesis, net.value_grid(hypothesis)?, &weights, evidence_weight)
}

/// `chi_c[H, E] / chi_c[E]` for sharp hypothesis and evidence.
pub fn classical_conditional(net: &CbNet, hypothesis: &Assignment, evidence: &Assignment) -> Result<f64> {
    let e = DirectProductSet::from_assignment(evidence);
    let comps: Vec<&str> = hypothesis.keys().map(String::as_str).collect();
    net.check_disjoint(&comps, &e)?;
    let den = chi_c(net, &e)?;
    if den <= CONTRADICTION_EPS {
        return Err(Error::ContradictoryEvidence);
    }
    let he = e
        .intersect(&DirectProductSet::from_assignment(hypothesis))
        .expect("disjoint sharp sets always intersect");
    Ok(chi_c(net, &he)? / den)
}

/// Dense factor over a set of nodes, last node fastest.
#[derive(Debug, Clone)]
struct Factor {
    scope: Vec<usize>,
    card: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    fn of_node(net: &CbNet, node: usize) -> Factor {
        let parents = net.graph().parents(node);
        let mut scope: Vec<usize> = parents.to_vec();
        scope.push(node);
        let card: Vec<usize> = scope.iter().map(|&n| net.space(n).len()).collect();
        let size = card.iter().product();
        let t = net.table(node);
        let rows = t.rows();
        // table columns use the same mixed radix as the parent part of the scope
        let values = (0..size).map(|i| t.get(i % rows, i / rows)).collect();
        Factor { scope, card, values }
    }

    fn index(&self, assign: &[usize], pos: &[usize]) -> usize {
        pos.iter().zip(&self.card).fold(0, |acc, (&p, &c)| acc * c + assign[p])
    }

    fn product(fs: &[Factor], net: &CbNet) -> Factor {
        let mut scope: Vec<usize> = Vec::new();
        for f in fs {
            for &v in &f.scope {
                if !scope.contains(&v) {
                    scope.push(v);
                }
            }
        }
        scope.sort_unstable();
        let card: Vec<usize> = scope.iter().map(|&n| net.space(n).len()).collect();
        let size: usize = card.iter().product();
        let pos: Vec<Vec<usize>> = fs
            .iter()
            .map(|f| {
                f.scope
                    .iter()
                    .map(|v| scope.iter().position(|s| s == v).unwrap())
                    .collect()
            })
            .collect();
        let mut assign = vec![0usize; scope.len()];
        let mut values = Vec::with_capacity(size);
        for _ in 0..size {
            values.push(
                fs.iter()
                    .zip(&pos)
                    .map(|(f, p)| f.values[f.index(&assign, p)])
                    .product(),
            );
            for k in (0..assign.len()).rev() {
                assign[k] += 1;
                if assign[k] < card[k] {
                    break;
                }
                assign[k] = 0;
            }
        }
        Factor { scope, card, values }
    }

    fn sum_out(&self, var: usize) -> Factor {
        let k = self.scope.iter().position(|&v| v == var).unwrap();
        let inner: usize = self.card[k + 1..].iter().product();
        let outer = self.values.len() / (inner * self.card[k]);
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..self.card[k] {
                for i in 0..inner {
                    values[o * inner + i] += self.values[(o * self.card[k] + s) * inner + i];
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut card = self.card.clone();
        scope.remove(k);
        card.remove(k);
        Factor { scope, card, values }
    }
}

/// Marginal over `keep` as a fully connected net in chronological order.
///
/// Nodes outside `keep` are summed out by variable elimination in reverse
/// chronological order. Columns whose parent marginal is zero are filled
/// with a uniform distribution so the result stays a valid net.
pub fn coarsen(net: &CbNet, keep: &[&str]) -> Result<CbNet> {
    let order = net.require_acyclic()?;
    let mut keep_idx = Vec::new();
    for k in keep {
        let i = net.node_index(k)?;
        if keep_idx.contains(&i) {
            return Err(Error::InvalidQuery(format!("node `{k}` listed twice")));
        }
        keep_idx.push(i);
    }
    if keep_idx.is_empty() {
        return Err(Error::InvalidQuery("coarsening must keep at least one node".into()));
    }
    let kept: Vec<usize> = order.iter().copied().filter(|i| keep_idx.contains(i)).collect();

    let mut factors: Vec<Factor> = (0..net.len()).map(|i| Factor::of_node(net, i)).collect();
    for &v in order.iter().rev().filter(|v| !keep_idx.contains(v)) {
        let (with, without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = without;
        factors.push(Factor::product(&with, net).sum_out(v));
    }
    let joint = Factor::product(&factors, net);

    // Reorder the marginal's scope into chronological order of the kept nodes.
    let card: Vec<usize> = kept.iter().map(|&n| net.space(n).len()).collect();
    let pos: Vec<usize> = kept
        .iter()
        .map(|v| joint.scope.iter().position(|s| s == v).unwrap())
        .collect();
    let size: usize = card.iter().product();
    let mut marginal = vec![0.0; size];
    let mut assign = vec![0usize; joint.scope.len()];
    for (flat, m) in marginal.iter_mut().enumerate() {
        let mut rem = flat;
        for k in (0..kept.len()).rev() {
            assign[pos[k]] = rem % card[k];
            rem /= card[k];
        }
        let jpos: Vec<usize> = (0..joint.scope.len()).collect();
        *m = joint.values[joint.index(&assign, &jpos)];
    }

    // marginals over each chronological prefix
    let mut prefix: Vec<Vec<f64>> = vec![marginal];
    for k in (0..kept.len()).rev() {
        let last = prefix.last().unwrap();
        let c = card[k];
        prefix.push(last.chunks(c).map(|ch| ch.iter().sum()).collect());
    }
    prefix.reverse(); // prefix[k] covers the first k kept nodes

    let names: Vec<String> = kept.iter().map(|&n| net.node_name(n).to_string()).collect();
    let mut decls = Vec::with_capacity(kept.len());
    for (k, &node) in kept.iter().enumerate() {
        let rows = card[k];
        let cols = prefix[k].len();
        let mut values = Vec::with_capacity(rows * cols);
        for col in 0..cols {
            let parent_mass = prefix[k][col];
            for row in 0..rows {
                values.push(if parent_mass > 0.0 {
                    prefix[k + 1][col * rows + row] / parent_mass
                } else {
                    1.0 / rows as f64
                });
            }
        }
        let parents: Vec<&str> = names[..k].iter().map(String::as_str).collect();
        decls.push(NodeDecl::dense(&names[k], &parents, net.space(node).clone(), values));
    }
    Net::build(decls)
}

/// Convenience for building a scalar-component classical node from a rule.
pub fn scalar_node(
    name: &str,
    parents: &[&str],
    values: impl IntoIterator<Item = i32>,
    f: impl Fn(&[i32], &[i32]) -> f64 + 'static,
) -> Result<NodeDecl<f64>> {
    Ok(NodeDecl::rule(name, parents, NodeSpace::scalar(name, values)?, f))
}
