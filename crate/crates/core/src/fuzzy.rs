//! Fuzzy evidence: direct product sets, partitions and filtered conditionals.
//!
//! A [`DirectProductSet`] constrains some components to value subsets and
//! leaves the rest free. Sharp evidence is the special case where every
//! constrained component has a single allowed value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::classical;
use crate::error::{Error, Result};
use crate::net::{Assignment, CbNet, Net, QbNet, Value, CONTRADICTION_EPS};
use crate::quantum;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectProductSet {
    sets: BTreeMap<String, BTreeSet<i32>>,
}

impl DirectProductSet {
    /// No constraint at all.
    pub fn full() -> Self {
        Self::default()
    }

    pub fn from_assignment(a: &Assignment) -> Self {
        DirectProductSet {
            sets: a.iter().map(|(c, v)| (c.clone(), BTreeSet::from([*v]))).collect(),
        }
    }

    /// Adds (or replaces) the allowed values of one component.
    pub fn with(mut self, component: &str, values: impl IntoIterator<Item = i32>) -> Result<Self> {
        self.insert(component, values)?;
        Ok(self)
    }

    pub fn insert(&mut self, component: &str, values: impl IntoIterator<Item = i32>) -> Result<()> {
        let set: BTreeSet<i32> = values.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidQuery(format!(
                "component `{component}` given an empty value set"
            )));
        }
        self.sets.insert(component.to_string(), set);
        Ok(())
    }

    pub fn get(&self, component: &str) -> Option<&BTreeSet<i32>> {
        self.sets.get(component)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<i32>)> {
        self.sets.iter().map(|(c, s)| (c.as_str(), s))
    }

    pub fn is_unconstrained(&self) -> bool {
        self.sets.is_empty()
    }

    /// `Some` when every constrained component has exactly one value.
    pub fn as_sharp(&self) -> Option<Assignment> {
        self.sets
            .iter()
            .map(|(c, s)| (s.len() == 1).then(|| (c.clone(), *s.iter().next().unwrap())))
            .collect()
    }

    /// Componentwise intersection; `None` when some component ends up empty.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let mut sets = self.sets.clone();
        for (c, s) in &other.sets {
            let merged: BTreeSet<i32> = match sets.get(c) {
                Some(mine) => mine.intersection(s).copied().collect(),
                None => s.clone(),
            };
            if merged.is_empty() {
                return None;
            }
            sets.insert(c.clone(), merged);
        }
        Some(DirectProductSet { sets })
    }

    /// Filter function: 1 when every constrained component of `point` lies
    /// in its allowed set. Components missing from `point` fail the filter.
    pub fn filter(&self, point: &Assignment) -> bool {
        self.sets
            .iter()
            .all(|(c, s)| point.get(c).is_some_and(|v| s.contains(v)))
    }
}

impl fmt::Display for DirectProductSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sets.is_empty() {
            return f.write_str("(all)");
        }
        let parts: Vec<String> = self
            .sets
            .iter()
            .map(|(c, s)| {
                if s.len() == 1 {
                    format!("{c}={}", s.iter().next().unwrap())
                } else {
                    let v: Vec<String> = s.iter().map(i32::to_string).collect();
                    format!("{c} in {{{}}}", v.join(" "))
                }
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Blocks meant to be pairwise disjoint and jointly exhaustive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Partition {
    blocks: Vec<DirectProductSet>,
}

impl Partition {
    pub fn new(blocks: Vec<DirectProductSet>) -> Self {
        Partition { blocks }
    }

    /// The one-block partition.
    pub fn whole() -> Self {
        Partition {
            blocks: vec![DirectProductSet::full()],
        }
    }

    /// One singleton block per value combination of `components`.
    pub fn singletons<T: Value>(net: &Net<T>, components: &[&str]) -> Result<Self> {
        let blocks = net
            .value_grid(components)?
            .into_iter()
            .map(|vals| {
                let mut b = DirectProductSet::full();
                for (c, v) in components.iter().zip(vals) {
                    b.insert(c, [v])?;
                }
                Ok(b)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition { blocks })
    }

    pub fn blocks(&self) -> &[DirectProductSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionViolation {
    UnknownComponent(String),
    OutOfRange {
        block: usize,
        component: String,
        value: i32,
    },
    Overlap {
        first: usize,
        second: usize,
    },
    Gap {
        point: Assignment,
    },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::UnknownComponent(c) => write!(f, "unknown component `{c}`"),
            PartitionViolation::OutOfRange {
                block,
                component,
                value,
            } => {
                write!(f, "block {block}: `{component}` cannot take value {value}")
            }
            PartitionViolation::Overlap { first, second } => {
                write!(f, "blocks {first} and {second} overlap")
            }
            PartitionViolation::Gap { point } => write!(f, "no block covers {point:?}"),
        }
    }
}

/// Reports overlapping block pairs and uncovered points of the lattice
/// spanned by the components the blocks mention.
pub fn validate_partition<T: Value>(p: &Partition, net: &Net<T>) -> Vec<PartitionViolation> {
    let mut out = Vec::new();
    let mut mentioned = BTreeSet::new();
    for (i, b) in p.blocks.iter().enumerate() {
        for (c, s) in b.iter() {
            match net.domain(c) {
                Err(_) => out.push(PartitionViolation::UnknownComponent(c.to_string())),
                Ok(d) => {
                    mentioned.insert(c.to_string());
                    for v in s.iter().filter(|v| !d.contains(v)) {
                        out.push(PartitionViolation::OutOfRange {
                            block: i,
                            component: c.to_string(),
                            value: *v,
                        });
                    }
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for i in 0..p.blocks.len() {
        for j in i + 1..p.blocks.len() {
            if p.blocks[i].intersect(&p.blocks[j]).is_some() {
                out.push(PartitionViolation::Overlap { first: i, second: j });
            }
        }
    }
    let comps: Vec<&str> = mentioned.iter().map(String::as_str).collect();
    let grid = net.value_grid(&comps).unwrap_or_default();
    for vals in grid {
        let point: Assignment = comps.iter().map(|c| c.to_string()).zip(vals).collect();
        if !p.blocks.iter().any(|b| b.filter(&point)) {
            out.push(PartitionViolation::Gap { point });
        }
    }
    out
}

/// `chi_c[f_{H and E}] / chi_c[f_E]`.
pub fn classical_fuzzy_conditional(net: &CbNet, h: &DirectProductSet, e: &DirectProductSet) -> Result<f64> {
    let den = classical::chi_c(net, e)?;
    if den <= CONTRADICTION_EPS {
        return Err(Error::ContradictoryEvidence);
    }
    match h.intersect(e) {
        None => Ok(0.0),
        Some(he) => Ok(classical::chi_c(net, &he)? / den),
    }
}

/// Conditional probability of every block of `p` given `e`.
pub fn quantum_fuzzy_distribution(net: &QbNet, p: &Partition, e: &DirectProductSet) -> Result<Vec<f64>> {
    let weights = p
        .blocks
        .iter()
        .map(|b| match b.intersect(e) {
            None => Ok(0.0),
            Some(be) => quantum::chi(net, &be),
        })
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = weights.iter().sum();
    if total <= CONTRADICTION_EPS {
        return Err(Error::ContradictoryEvidence);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// `chi[f_{H^i and E}] / sum_j chi[f_{H^j and E}]`.
pub fn quantum_fuzzy_conditional(net: &QbNet, p: &Partition, i: usize, e: &DirectProductSet) -> Result<f64> {
    if i >= p.len() {
        return Err(Error::InvalidQuery(format!(
            "block {i} out of range for a {}-block partition",
            p.len()
        )));
    }
    Ok(quantum_fuzzy_distribution(net, p, e)?[i])
}
