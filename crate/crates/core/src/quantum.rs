//! Quantum nets: joint amplitudes, the characteristic function `chi`,
//! quantum conditionals and the non-additivity factor.
//!
//! External components are squared-then-summed, internal components are
//! summed-then-squared:
//! `chi[f] = sum_ext | sum_int A f |^2`.

use std::collections::BTreeMap;

use crate::classical::{structural_violations, Distribution, Violation, EPS_NORM};
use crate::error::{Error, Result};
use crate::fuzzy::DirectProductSet;
use crate::net::{Assignment, CbNet, Complex, QbNet, CONTRADICTION_EPS};

/// Tolerance for the whole-net normalization laws.
pub const EPS_NET: f64 = 1e-9;

pub fn joint_amplitude(net: &QbNet, full: &Assignment) -> Result<Complex> {
    net.joint_value(&net.resolve(full)?)
}

/// Coherent amplitude sums keyed by (extra key, external node states).
fn coherent_sums<K: Ord>(
    net: &QbNet,
    constraint: &DirectProductSet,
    key: impl Fn(&[usize]) -> K,
) -> Result<BTreeMap<(K, Vec<usize>), Complex>> {
    net.require_acyclic()?;
    let ext = net.external_nodes();
    let allowed = net.mask(constraint)?;
    let mut sums = BTreeMap::new();
    net.for_each_state(&allowed, |s, a| {
        let e: Vec<usize> = ext.iter().map(|&i| s[i]).collect();
        *sums.entry((key(s), e)).or_insert(Complex::new(0.0, 0.0)) += a;
    })?;
    Ok(sums)
}

/// `chi[f]` for a direct product filter `f`.
pub fn chi(net: &QbNet, fixed: &DirectProductSet) -> Result<f64> {
    Ok(coherent_sums(net, fixed, |_| ())?.values().map(|a| a.norm_sqr()).sum())
}

/// `P(H = h | E)` for every value combination `h` of `hypothesis`.
pub fn quantum_distribution(net: &QbNet, hypothesis: &[&str], evidence: &DirectProductSet) -> Result<Distribution> {
    net.check_disjoint(hypothesis, evidence)?;
    let keys = hypothesis
        .iter()
        .map(|h| net.component(h))
        .collect::<Result<Vec<_>>>()?;
    let sums = coherent_sums(net, evidence, |s| {
        keys.iter().map(|&c| net.component_value(s, c)).collect::<Vec<i32>>()
    })?;
    let mut weights: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
    let mut by_ext: BTreeMap<&Vec<usize>, Complex> = BTreeMap::new();
    for ((h, e), a) in &sums {
        *weights.entry(h.clone()).or_insert(0.0) += a.norm_sqr();
        *by_ext.entry(e).or_insert(Complex::new(0.0, 0.0)) += a;
    }
    let evidence_weight: f64 = by_ext.values().map(|a| a.norm_sqr()).sum();
    Distribution::from_weights(hypothesis, net.value_grid(hypothesis)?, &weights, evidence_weight)
}

/// `chi[H, E] / sum_m chi[m, E]`, the sum running over every value
/// combination of the hypothesis components.
pub fn quantum_conditional(net: &QbNet, hypothesis: &Assignment, evidence: &Assignment) -> Result<f64> {
    let comps: Vec<&str> = hypothesis.keys().map(String::as_str).collect();
    let values: Vec<i32> = hypothesis.values().copied().collect();
    let d = quantum_distribution(net, &comps, &DirectProductSet::from_assignment(evidence))?;
    Ok(d.probability(&values).unwrap_or(0.0))
}

/// `sum_m chi[m, E] / chi[E]`.
pub fn f_qna(net: &QbNet, hypothesis: &[&str], evidence: &Assignment) -> Result<f64> {
    Ok(quantum_distribution(net, hypothesis, &DirectProductSet::from_assignment(evidence))?.f_qna)
}

/// Same graph and spaces with every amplitude replaced by `|A|^2`.
pub fn parent_cb_net(net: &QbNet) -> CbNet {
    net.map_values(|a: Complex| a.norm_sqr())
}

pub fn validate_quantum(net: &QbNet) -> Vec<Violation> {
    let mut out = structural_violations(net);
    for i in 0..net.len() {
        let space = net.space(i);
        for (k, c) in space.components().iter().enumerate() {
            if let Some(&v) = space.domain(k).first().filter(|v| **v < 0) {
                out.push(Violation::NegativeOccupation {
                    component: c.clone(),
                    value: v,
                });
            }
        }
        let t = net.table(i);
        for col in 0..t.cols() {
            let sum: f64 = t.column(col).iter().map(|a| a.norm_sqr()).sum();
            if (sum - 1.0).abs() > EPS_NORM {
                out.push(Violation::ColumnSum {
                    node: net.node_name(i).to_string(),
                    col,
                    sum,
                });
            }
        }
    }
    if net.order().is_none() {
        return out;
    }
    match chi(net, &DirectProductSet::full()) {
        Ok(sum) if (sum - 1.0).abs() > EPS_NET => out.push(Violation::ExternalNormalization { sum }),
        Ok(_) => {}
        Err(e) => out.push(Violation::Unchecked { reason: e.to_string() }),
    }
    match crate::classical::total_mass(&parent_cb_net(net)) {
        Ok(sum) if (sum - 1.0).abs() > EPS_NET => out.push(Violation::JointNormalization { sum }),
        Ok(_) => {}
        Err(e) => out.push(Violation::Unchecked { reason: e.to_string() }),
    }
    out
}

/// Evidence weight `chi[E]`, failing when it vanishes.
pub fn evidence_weight(net: &QbNet, evidence: &DirectProductSet) -> Result<f64> {
    let w = chi(net, evidence)?;
    if w <= CONTRADICTION_EPS {
        return Err(Error::ContradictoryEvidence);
    }
    Ok(w)
}
