//! Net representation shared by classical and quantum nets.
//!
//! Every node owns a finite list of states. A state is a vector of
//! occupation numbers, one per named component. Component names are unique
//! across the whole net, so evidence and hypotheses can address them directly.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fuzzy::DirectProductSet;
use crate::graph::{LabelledGraph, NodeClass};
use crate::spin::Generator;

pub type Complex = Complex64;

/// Partial assignment of component values, keyed by component name.
pub type Assignment = BTreeMap<String, i32>;

/// Builds an [`Assignment`] from `(component, value)` pairs.
pub fn assignment(pairs: &[(&str, i32)]) -> Assignment {
    pairs.iter().map(|(c, v)| (c.to_string(), *v)).collect()
}

const DEFAULT_MAX_STATES: u64 = 1 << 20;

/// Enumeration cap. `QBNET_MAX_STATES` overrides the default of 2^20.
pub fn max_states() -> u64 {
    std::env::var("QBNET_MAX_STATES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STATES)
}

/// Scalar stored in node tables.
pub trait Value:
    Copy + Debug + PartialEq + Add<Output = Self> + Mul<Output = Self> + AddAssign + Send + Sync + 'static
{
    const ZERO: Self;
    const ONE: Self;
    fn is_finite(self) -> bool;
}

impl Value for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Value for Complex {
    const ZERO: Self = Complex::new(0.0, 0.0);
    const ONE: Self = Complex::new(1.0, 0.0);
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// The states of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpace {
    components: Vec<String>,
    states: Vec<Vec<i32>>,
}

impl NodeSpace {
    pub fn new(components: Vec<String>, states: Vec<Vec<i32>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidNet("a node needs at least one component".into()));
        }
        if states.is_empty() {
            return Err(Error::InvalidNet(format!(
                "node with components {components:?} has no states"
            )));
        }
        for s in &states {
            if s.len() != components.len() {
                return Err(Error::InvalidNet(format!(
                    "state {s:?} does not match components {components:?}"
                )));
            }
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::InvalidNet(format!("duplicate state {s:?}")));
            }
        }
        Ok(NodeSpace { components, states })
    }

    /// One component taking the listed values.
    pub fn scalar(component: &str, values: impl IntoIterator<Item = i32>) -> Result<Self> {
        Self::new(
            vec![component.to_string()],
            values.into_iter().map(|v| vec![v]).collect(),
        )
    }

    pub fn binary(component: &str) -> Result<Self> {
        Self::scalar(component, [0, 1])
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn states(&self) -> &[Vec<i32>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, state: &[i32]) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    /// Distinct values component `k` takes, ascending.
    pub fn domain(&self, k: usize) -> Vec<i32> {
        let mut d: Vec<i32> = self.states.iter().map(|s| s[k]).collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

/// Dense conditional table. Columns run over parent state combinations in
/// mixed radix, last parent fastest; rows run over the node's own states.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTable<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
    origin: Option<Generator>,
}

impl<T: Value> NodeTable<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[T] {
        &self.values[col * self.rows..(col + 1) * self.rows]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// The factory that produced this table, kept so emission stays symbolic.
    pub fn origin(&self) -> Option<&Generator> {
        self.origin.as_ref()
    }

    pub(crate) fn map<U: Value>(&self, f: impl Fn(T) -> U) -> NodeTable<U> {
        NodeTable {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
            origin: None,
        }
    }
}

/// Rule computing an entry from the node's own state and the concatenated
/// component values of its parents.
pub type TableRule<T> = Box<dyn Fn(&[i32], &[i32]) -> T>;

pub enum TableDef<T> {
    /// Column-major values, `rows * cols` long.
    Dense(Vec<T>),
    Rule(TableRule<T>),
}

/// Declaration of one node, consumed by [`Net::build`].
pub struct NodeDecl<T> {
    pub name: String,
    pub parents: Vec<String>,
    pub space: NodeSpace,
    pub table: TableDef<T>,
    pub origin: Option<Generator>,
}

impl<T: Value> NodeDecl<T> {
    pub fn rule(name: &str, parents: &[&str], space: NodeSpace, f: impl Fn(&[i32], &[i32]) -> T + 'static) -> Self {
        NodeDecl {
            name: name.to_string(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            space,
            table: TableDef::Rule(Box::new(f)),
            origin: None,
        }
    }

    pub fn dense(name: &str, parents: &[&str], space: NodeSpace, values: Vec<T>) -> Self {
        NodeDecl {
            name: name.to_string(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            space,
            table: TableDef::Dense(values),
            origin: None,
        }
    }
}

impl NodeDecl<Complex> {
    pub fn generated(name: &str, parents: &[&str], space: NodeSpace, generator: Generator) -> Self {
        let g = generator.clone();
        NodeDecl {
            name: name.to_string(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            space,
            table: TableDef::Rule(Box::new(move |own, input| g.amplitude(own, input))),
            origin: Some(generator),
        }
    }
}

/// A labelled graph plus per-node state spaces and tables.
///
/// `Net<f64>` is a classical net, `Net<Complex>` a quantum one. Cyclic
/// pre-nets can be built but most queries refuse them.
#[derive(Debug, Clone, PartialEq)]
pub struct Net<T> {
    graph: LabelledGraph,
    spaces: Vec<NodeSpace>,
    tables: Vec<NodeTable<T>>,
    strides: Vec<Vec<usize>>,
    components: BTreeMap<String, (usize, usize)>,
    order: Option<Vec<usize>>,
}

pub type CbNet = Net<f64>;
pub type QbNet = Net<Complex>;

impl<T: Value> Net<T> {
    pub fn build(decls: Vec<NodeDecl<T>>) -> Result<Self> {
        let spec: Vec<(&str, Vec<&str>)> = decls
            .iter()
            .map(|d| (d.name.as_str(), d.parents.iter().map(String::as_str).collect()))
            .collect();
        let graph = LabelledGraph::from_parents(&spec)?;

        let mut components = BTreeMap::new();
        for (i, d) in decls.iter().enumerate() {
            for (k, c) in d.space.components().iter().enumerate() {
                if c.is_empty() {
                    return Err(Error::InvalidNet("empty component name".into()));
                }
                if components.insert(c.clone(), (i, k)).is_some() {
                    return Err(Error::InvalidNet(format!("component `{c}` declared twice")));
                }
            }
        }

        let spaces: Vec<NodeSpace> = decls.iter().map(|d| d.space.clone()).collect();
        let mut strides = Vec::with_capacity(decls.len());
        for i in 0..decls.len() {
            let ps = graph.parents(i);
            let mut s = vec![1usize; ps.len()];
            for j in (0..ps.len().saturating_sub(1)).rev() {
                s[j] = s[j + 1]
                    .checked_mul(spaces[ps[j + 1]].len())
                    .ok_or_else(|| Error::InvalidNet("table too large".into()))?;
            }
            strides.push(s);
        }

        let mut tables = Vec::with_capacity(decls.len());
        for (i, d) in decls.into_iter().enumerate() {
            let ps = graph.parents(i);
            let rows = spaces[i].len();
            let cols = ps.iter().try_fold(1usize, |acc, &p| acc.checked_mul(spaces[p].len()));
            let cols = cols.ok_or_else(|| Error::InvalidNet("table too large".into()))?;
            if let Some(g) = &d.origin {
                let arity = ps.iter().map(|&p| spaces[p].components().len()).sum();
                g.check(&spaces[i], arity).map_err(|e| match e {
                    Error::InvalidNet(m) => Error::InvalidNet(format!("node `{}`: {m}", d.name)),
                    e => e,
                })?;
            }
            let values = match d.table {
                TableDef::Dense(v) => {
                    if v.len() != rows * cols {
                        return Err(Error::InvalidNet(format!(
                            "node `{}` table has {} entries, expected {}",
                            d.name,
                            v.len(),
                            rows * cols
                        )));
                    }
                    v
                }
                TableDef::Rule(f) => {
                    let mut v = Vec::with_capacity(rows * cols);
                    let mut input = Vec::new();
                    for col in 0..cols {
                        input.clear();
                        let mut rem = col;
                        for (j, &p) in ps.iter().enumerate() {
                            let idx = rem / strides[i][j];
                            rem %= strides[i][j];
                            input.extend_from_slice(&spaces[p].states()[idx]);
                        }
                        for row in 0..rows {
                            v.push(f(&spaces[i].states()[row], &input));
                        }
                    }
                    v
                }
            };
            if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidNet(format!(
                    "node `{}` has a non-finite entry {bad:?}",
                    d.name
                )));
            }
            tables.push(NodeTable {
                rows,
                cols,
                values,
                origin: d.origin,
            });
        }

        let order = graph.chronological_order().ok();
        Ok(Net {
            graph,
            spaces,
            tables,
            strides,
            components,
            order,
        })
    }

    pub fn graph(&self) -> &LabelledGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn space(&self, node: usize) -> &NodeSpace {
        &self.spaces[node]
    }

    pub fn table(&self, node: usize) -> &NodeTable<T> {
        &self.tables[node]
    }

    pub fn node_name(&self, node: usize) -> &str {
        self.graph.node(node).as_str()
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.graph.index_of(name)
    }

    /// Chronological node order, or `None` for a cyclic pre-net.
    pub fn order(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    pub fn require_acyclic(&self) -> Result<&[usize]> {
        self.order().ok_or(Error::CyclicGraph)
    }

    /// `(node, position)` of a component.
    pub fn component(&self, name: &str) -> Result<(usize, usize)> {
        self.components
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownComponent(name.to_string()))
    }

    /// All component names, ascending.
    pub fn component_names(&self) -> impl Iterator<Item = &str> {
        self.components.keys().map(String::as_str)
    }

    /// Component names in node declaration order.
    pub fn components_in_node_order(&self) -> Vec<&str> {
        self.spaces
            .iter()
            .flat_map(|s| s.components().iter().map(String::as_str))
            .collect()
    }

    pub fn external_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.graph.classify(i) == NodeClass::External)
            .collect()
    }

    /// Components owned by external nodes, in node declaration order.
    pub fn external_components(&self) -> Vec<&str> {
        self.external_nodes()
            .into_iter()
            .flat_map(|i| self.spaces[i].components().iter().map(String::as_str))
            .collect()
    }

    pub fn domain(&self, component: &str) -> Result<Vec<i32>> {
        let (node, k) = self.component(component)?;
        Ok(self.spaces[node].domain(k))
    }

    /// Column of `node` selected by the full joint state `states`.
    pub fn column_index(&self, node: usize, states: &[usize]) -> usize {
        self.graph
            .parents(node)
            .iter()
            .zip(&self.strides[node])
            .map(|(&p, &s)| states[p] * s)
            .sum()
    }

    pub fn node_factor(&self, node: usize, states: &[usize]) -> T {
        self.tables[node].get(states[node], self.column_index(node, states))
    }

    /// Product of all node entries for a full joint state (state indices in
    /// node declaration order).
    pub fn joint_value(&self, states: &[usize]) -> Result<T> {
        self.check_states(states)?;
        Ok((0..self.len()).fold(T::ONE, |acc, j| acc * self.node_factor(j, states)))
    }

    fn check_states(&self, states: &[usize]) -> Result<()> {
        if states.len() != self.len() {
            return Err(Error::InvalidQuery(format!(
                "joint state has {} entries for {} nodes",
                states.len(),
                self.len()
            )));
        }
        for (j, &s) in states.iter().enumerate() {
            if s >= self.spaces[j].len() {
                return Err(Error::InvalidState {
                    node: self.node_name(j).to_string(),
                    state: format!("#{s}"),
                });
            }
        }
        Ok(())
    }

    /// Resolves a full component assignment into per-node state indices.
    pub fn resolve(&self, full: &Assignment) -> Result<Vec<usize>> {
        for c in full.keys() {
            self.component(c)?;
        }
        (0..self.len())
            .map(|j| {
                let space = &self.spaces[j];
                let state = space
                    .components()
                    .iter()
                    .map(|c| {
                        full.get(c)
                            .copied()
                            .ok_or_else(|| Error::InvalidQuery(format!("component `{c}` missing from assignment")))
                    })
                    .collect::<Result<Vec<i32>>>()?;
                space.state_index(&state).ok_or_else(|| Error::InvalidState {
                    node: self.node_name(j).to_string(),
                    state: format!("{state:?}"),
                })
            })
            .collect()
    }

    /// Inverse of [`Net::resolve`].
    pub fn assignment_of(&self, states: &[usize]) -> Assignment {
        let mut a = Assignment::new();
        for (j, &s) in states.iter().enumerate() {
            for (c, &v) in self.spaces[j].components().iter().zip(&self.spaces[j].states()[s]) {
                a.insert(c.clone(), v);
            }
        }
        a
    }

    pub fn component_value(&self, states: &[usize], (node, k): (usize, usize)) -> i32 {
        self.spaces[node].states()[states[node]][k]
    }

    /// Allowed state indices per node under a direct product constraint.
    pub fn mask(&self, constraint: &DirectProductSet) -> Result<Vec<Vec<usize>>> {
        let mut allowed: Vec<Vec<usize>> = self.spaces.iter().map(|s| (0..s.len()).collect()).collect();
        for (c, values) in constraint.iter() {
            let (node, k) = self.component(c)?;
            let space = &self.spaces[node];
            allowed[node].retain(|&s| values.contains(&space.states()[s][k]));
        }
        Ok(allowed)
    }

    /// Visits every joint state in `allowed`, zero-valued ones included.
    /// The last declared node varies fastest.
    pub fn for_each_state(&self, allowed: &[Vec<usize>], mut f: impl FnMut(&[usize], T)) -> Result<()> {
        let count = allowed.iter().fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128));
        let cap = max_states();
        if count > cap as u128 {
            return Err(Error::StateSpaceTooLarge { count, cap });
        }
        if count == 0 {
            return Ok(());
        }
        let n = self.len();
        let mut pos = vec![0usize; n];
        let mut states: Vec<usize> = allowed.iter().map(|a| a[0]).collect();
        loop {
            let v = (0..n).fold(T::ONE, |acc, j| acc * self.node_factor(j, &states));
            f(&states, v);
            let mut j = n;
            loop {
                if j == 0 {
                    return Ok(());
                }
                j -= 1;
                pos[j] += 1;
                if pos[j] < allowed[j].len() {
                    states[j] = allowed[j][pos[j]];
                    break;
                }
                pos[j] = 0;
                states[j] = allowed[j][0];
            }
        }
    }

    /// Depth-first walk over joint states with nonzero value, extending
    /// nodes in chronological order and pruning exact zeros.
    pub fn for_each_path(&self, allowed: &[Vec<usize>], mut f: impl FnMut(&[usize], T)) -> Result<()> {
        let order = self.require_acyclic()?.to_vec();
        let cap = max_states();
        let mut found = 0u64;
        let mut states = vec![0usize; self.len()];
        self.dfs(&order, 0, allowed, T::ONE, &mut states, &mut found, cap, &mut f)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        order: &[usize],
        depth: usize,
        allowed: &[Vec<usize>],
        acc: T,
        states: &mut Vec<usize>,
        found: &mut u64,
        cap: u64,
        f: &mut impl FnMut(&[usize], T),
    ) -> Result<()> {
        if depth == order.len() {
            *found += 1;
            if *found > cap {
                return Err(Error::StateSpaceTooLarge {
                    count: *found as u128,
                    cap,
                });
            }
            f(states, acc);
            return Ok(());
        }
        let node = order[depth];
        for &s in &allowed[node] {
            states[node] = s;
            let v = acc * self.node_factor(node, states);
            if v != T::ZERO {
                self.dfs(order, depth + 1, allowed, v, states, found, cap, f)?;
            }
        }
        Ok(())
    }

    /// Applies `f` to every table entry, dropping generator provenance.
    pub(crate) fn map_values<U: Value>(&self, f: impl Fn(T) -> U + Copy) -> Net<U> {
        Net {
            graph: self.graph.clone(),
            spaces: self.spaces.clone(),
            tables: self.tables.iter().map(|t| t.map(f)).collect(),
            strides: self.strides.clone(),
            components: self.components.clone(),
            order: self.order.clone(),
        }
    }

    /// Checks that hypothesis and evidence components are disjoint and known.
    pub(crate) fn check_disjoint(&self, hypothesis: &[&str], evidence: &DirectProductSet) -> Result<()> {
        for (i, h) in hypothesis.iter().enumerate() {
            self.component(h)?;
            if hypothesis[..i].contains(h) {
                return Err(Error::InvalidQuery(format!("component `{h}` repeated in hypothesis")));
            }
            if evidence.get(h).is_some() {
                return Err(Error::OverlappingComponents(h.to_string()));
            }
        }
        for (c, _) in evidence.iter() {
            self.component(c)?;
        }
        Ok(())
    }

    /// All value combinations of the given components, first component slowest.
    pub fn value_grid(&self, comps: &[&str]) -> Result<Vec<Vec<i32>>> {
        let mut grid = vec![Vec::new()];
        for c in comps {
            let d = self.domain(c)?;
            grid = grid
                .into_iter()
                .flat_map(|g| {
                    d.iter().map(move |&v| {
                        let mut g = g.clone();
                        g.push(v);
                        g
                    })
                })
                .collect();
        }
        Ok(grid)
    }
}

/// Parses `re`, `re,im` or `[re, im]`.
pub fn parse_complex(s: &str) -> Option<Complex> {
    let t = s.trim();
    let t = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(t);
    let num = |x: &str| x.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let z = match t.split_once(',') {
        Some((re, im)) => Complex::new(num(re)?, num(im)?),
        None => Complex::new(num(t)?, 0.0),
    };
    Some(z)
}

/// Denominators at or below this count as zero evidence weight.
pub(crate) const CONTRADICTION_EPS: f64 = 1e-24;
