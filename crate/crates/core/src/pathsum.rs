//! Path-sum formulation.
//!
//! A path is a joint assignment with nonzero net value. Paths are grouped by
//! their final state (the values of the external components), and every
//! query is recomputed from the grouped paths alone. This is a second,
//! independent route to the numbers produced by the state-sum code in
//! [`crate::classical`] and [`crate::quantum`].

use std::collections::BTreeMap;

use crate::classical::Distribution;
use crate::error::{Error, Result};
use crate::fuzzy::{DirectProductSet, Partition};
use crate::net::{Assignment, CbNet, Complex, Net, QbNet, Value, CONTRADICTION_EPS};

#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    /// State index per node, in node declaration order.
    pub states: Vec<usize>,
    pub assignment: Assignment,
    pub value: T,
}

/// External component values of a path.
pub type FinalState = Assignment;

#[derive(Debug, Clone, PartialEq)]
pub struct PathClassification<T> {
    pub classes: BTreeMap<FinalState, Vec<Path<T>>>,
}

impl<T: Value> PathClassification<T> {
    pub fn num_paths(&self) -> usize {
        self.classes.values().map(Vec::len).sum()
    }

    pub fn final_states(&self) -> impl Iterator<Item = &FinalState> {
        self.classes.keys()
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path<T>> {
        self.classes.values().flatten()
    }
}

impl PathClassification<Complex> {
    /// Coherent sum of path amplitudes per final state.
    pub fn feynman_integrals(&self) -> BTreeMap<FinalState, Complex> {
        self.classes
            .iter()
            .map(|(s, ps)| (s.clone(), ps.iter().map(|p| p.value).sum()))
            .collect()
    }

    /// `sum_sigma | sum_{paths in sigma} A f |^2`.
    fn chi_bar(&self, f: &DirectProductSet) -> f64 {
        self.classes
            .values()
            .map(|ps| {
                ps.iter()
                    .filter(|p| f.filter(&p.assignment))
                    .map(|p| p.value)
                    .sum::<Complex>()
                    .norm_sqr()
            })
            .sum()
    }
}

impl PathClassification<f64> {
    fn chi_c_bar(&self, f: &DirectProductSet) -> f64 {
        self.paths().filter(|p| f.filter(&p.assignment)).map(|p| p.value).sum()
    }
}

/// All nonzero-value joint assignments, grouped by external projection.
pub fn enumerate_paths<T: Value>(net: &Net<T>) -> Result<PathClassification<T>> {
    let ext: Vec<&str> = net.external_components();
    let allowed = net.mask(&DirectProductSet::full())?;
    let mut classes: BTreeMap<FinalState, Vec<Path<T>>> = BTreeMap::new();
    net.for_each_path(&allowed, |s, v| {
        let assignment = net.assignment_of(s);
        let sigma: FinalState = ext.iter().map(|c| (c.to_string(), assignment[*c])).collect();
        classes.entry(sigma).or_default().push(Path {
            states: s.to_vec(),
            assignment,
            value: v,
        });
    })?;
    Ok(PathClassification { classes })
}

/// `FI_sigma`: the sum of the amplitudes of every path ending in `sigma`.
/// Unreachable final states give zero.
pub fn feynman_integral(net: &QbNet, sigma: &FinalState) -> Result<Complex> {
    for c in sigma.keys() {
        net.component(c)?;
    }
    let paths = enumerate_paths(net)?;
    Ok(paths
        .classes
        .get(sigma)
        .map(|ps| ps.iter().map(|p| p.value).sum())
        .unwrap_or(Complex::new(0.0, 0.0)))
}

fn hypothesis_blocks<T: Value>(
    net: &Net<T>,
    hypothesis: &[&str],
    evidence: &DirectProductSet,
) -> Result<Vec<(Vec<i32>, DirectProductSet)>> {
    net.require_acyclic()?;
    net.check_disjoint(hypothesis, evidence)?;
    net.value_grid(hypothesis)?
        .into_iter()
        .map(|vals| {
            let mut b = evidence.clone();
            for (c, v) in hypothesis.iter().zip(&vals) {
                b.insert(c, [*v])?;
            }
            Ok((vals, b))
        })
        .collect()
}

pub fn pathsum_classical_distribution(
    net: &CbNet,
    hypothesis: &[&str],
    evidence: &DirectProductSet,
) -> Result<Distribution> {
    let blocks = hypothesis_blocks(net, hypothesis, evidence)?;
    let paths = enumerate_paths(net)?;
    let weights: BTreeMap<Vec<i32>, f64> = blocks.iter().map(|(v, b)| (v.clone(), paths.chi_c_bar(b))).collect();
    let grid = blocks.into_iter().map(|(v, _)| v).collect();
    Distribution::from_weights(hypothesis, grid, &weights, paths.chi_c_bar(evidence))
}

pub fn pathsum_quantum_distribution(
    net: &QbNet,
    hypothesis: &[&str],
    evidence: &DirectProductSet,
) -> Result<Distribution> {
    let blocks = hypothesis_blocks(net, hypothesis, evidence)?;
    let paths = enumerate_paths(net)?;
    let weights: BTreeMap<Vec<i32>, f64> = blocks.iter().map(|(v, b)| (v.clone(), paths.chi_bar(b))).collect();
    let grid = blocks.into_iter().map(|(v, _)| v).collect();
    Distribution::from_weights(hypothesis, grid, &weights, paths.chi_bar(evidence))
}

/// Sharp classical conditional by path sums.
pub fn pathsum_classical_conditional(net: &CbNet, hypothesis: &Assignment, evidence: &Assignment) -> Result<f64> {
    let comps: Vec<&str> = hypothesis.keys().map(String::as_str).collect();
    let values: Vec<i32> = hypothesis.values().copied().collect();
    let d = pathsum_classical_distribution(net, &comps, &DirectProductSet::from_assignment(evidence))?;
    Ok(d.probability(&values).unwrap_or(0.0))
}

/// Sharp quantum conditional by path sums.
pub fn pathsum_quantum_conditional(net: &QbNet, hypothesis: &Assignment, evidence: &Assignment) -> Result<f64> {
    let comps: Vec<&str> = hypothesis.keys().map(String::as_str).collect();
    let values: Vec<i32> = hypothesis.values().copied().collect();
    let d = pathsum_quantum_distribution(net, &comps, &DirectProductSet::from_assignment(evidence))?;
    Ok(d.probability(&values).unwrap_or(0.0))
}

/// Fuzzy classical conditional by path sums.
pub fn pathsum_classical_fuzzy(net: &CbNet, h: &DirectProductSet, e: &DirectProductSet) -> Result<f64> {
    net.require_acyclic()?;
    let paths = enumerate_paths(net)?;
    let den = paths.chi_c_bar(e);
    if den <= CONTRADICTION_EPS {
        return Err(Error::ContradictoryEvidence);
    }
    Ok(h.intersect(e).map_or(0.0, |he| paths.chi_c_bar(&he)) / den)
}

/// Fuzzy quantum conditionals of every partition block by path sums.
pub fn pathsum_quantum_fuzzy(net: &QbNet, p: &Partition, e: &DirectProductSet) -> Result<Vec<f64>> {
    net.require_acyclic()?;
    let paths = enumerate_paths(net)?;
    let w: Vec<f64> = p
        .blocks()
        .iter()
        .map(|b| b.intersect(e).map_or(0.0, |be| paths.chi_bar(&be)))
        .collect();
    let total: f64 = w.iter().sum();
    if total <= CONTRADICTION_EPS {
        return Err(Error::ContradictoryEvidence);
    }
    Ok(w.into_iter().map(|x| x / total).collect())
}
