//! Canonical optimal strategies for Player One when every critical column has
//! weight at most two.
//!
//! Below the triple rendezvous time there is always an optimal `q` whose
//! support graph is a disjoint union of singletons, pairs and odd cycles. For
//! such a support the game value is `2/(n + n1)`, `n1` being the number of
//! singletons. [`canonicalize_support`] constructs such a `q` from any optimal
//! solution by recursive decomposition:
//!
//! 1. take a basic optimal solution on the current vertex set (support of at
//!    most as many columns as vertices) and drop support columns greedily,
//!    highest index first, while the value is unchanged;
//! 2. if the support graph is disconnected, solve each component separately
//!    and recombine with the component masses as weights;
//! 3. if it is connected and has a vertex of degree one, move mass onto that
//!    vertex's edge and empty the neighbour's other edges
//!    ([`reassign_leaf`]), which disconnects it;
//! 4. otherwise the support is a single cycle; odd cycles are kept, even
//!    cycles are turned into a perfect matching ([`reassign_even_cycle`]).

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automaton::StateSet;
use crate::reachability::{ComponentKind, SupportGraph};
use crate::spf::{coverage, critical_columns, dot, game_value, solve_game, GameSolution};
use crate::{rat, sum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("critical column {column} has weight {weight} >= 3")]
    WeightTooHigh { column: usize, weight: usize },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("support reduction failed: {0}")]
    Internal(String),
}

/// Role of one support column in a canonical decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportRole {
    Singleton,
    PairEdge,
    CycleEdge { cycle: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportElement {
    pub column: usize,
    pub states: StateSet,
    pub role: SupportRole,
}

/// A column set whose graph is a disjoint union of singletons, pairs and odd
/// cycles covering all states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalSupport {
    pub n: usize,
    pub elements: Vec<SupportElement>,
    /// `n1`, the number of singleton vertices.
    pub singletons: usize,
    pub pairs: usize,
    /// Vertex lists of the odd cycles, in cyclic order.
    pub cycles: Vec<Vec<usize>>,
}

impl CanonicalSupport {
    /// Classifies `(column index, column)` pairs, rejecting anything that is
    /// not a singleton/pair/odd-cycle decomposition of all `n` states.
    pub fn classify(n: usize, columns: &[(usize, StateSet)]) -> Result<Self, CanonicalError> {
        let invalid = |msg: String| Err(CanonicalError::InvalidDecomposition(msg));
        let graph = SupportGraph::from_columns(n, columns.iter().map(|(j, c)| (*j, c)));
        if let Some(&j) = graph.ignored.first() {
            return invalid(format!("column {j} has weight >= 3"));
        }
        if columns.iter().any(|(_, c)| c.is_empty()) {
            return invalid("empty column".into());
        }
        let mut singleton_col: Vec<Option<usize>> = vec![None; n];
        for &(v, j) in &graph.singleton_columns {
            if singleton_col[v].is_some() {
                return invalid(format!("state {} has two singleton columns", v + 1));
            }
            singleton_col[v] = Some(j);
        }
        let mut seen_edges = std::collections::HashSet::new();
        for &(u, v, _) in &graph.edges {
            if !seen_edges.insert((u, v)) {
                return invalid(format!("edge ({}, {}) repeated", u + 1, v + 1));
            }
        }
        let mut elements = Vec::new();
        let mut cycles = Vec::new();
        let (mut singletons, mut pairs) = (0, 0);
        for comp in graph.components() {
            let attached = comp.vertices.iter().filter(|&&v| singleton_col[v].is_some()).count();
            match comp.kind {
                ComponentKind::Singleton => {
                    let v = comp.vertices[0];
                    let Some(j) = singleton_col[v] else {
                        return invalid(format!("state {} is not covered", v + 1));
                    };
                    singletons += 1;
                    elements.push(SupportElement {
                        column: j,
                        states: StateSet::singleton(n, v),
                        role: SupportRole::Singleton,
                    });
                }
                ComponentKind::Pair if attached == 0 => {
                    pairs += 1;
                    let (u, v, j) = graph.edges[comp.edges[0]];
                    elements.push(SupportElement {
                        column: j,
                        states: StateSet::from_states(n, [u, v]),
                        role: SupportRole::PairEdge,
                    });
                }
                ComponentKind::Cycle { len } if len % 2 == 1 && attached == 0 => {
                    let id = cycles.len();
                    cycles.push(cycle_order(&graph, &comp.edges));
                    for &e in &comp.edges {
                        let (u, v, j) = graph.edges[e];
                        elements.push(SupportElement {
                            column: j,
                            states: StateSet::from_states(n, [u, v]),
                            role: SupportRole::CycleEdge { cycle: id },
                        });
                    }
                }
                _ => {
                    let labels: Vec<usize> = comp.vertices.iter().map(|v| v + 1).collect();
                    return invalid(format!(
                        "component {labels:?} is not a singleton, pair or odd cycle"
                    ));
                }
            }
        }
        elements.sort_by_key(|e| e.column);
        Ok(CanonicalSupport {
            n,
            elements,
            singletons,
            pairs,
            cycles,
        })
    }

    /// Column indices of the support, ascending.
    pub fn columns(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.column).collect()
    }
}

/// Vertices of a cycle component in cyclic order, starting at its smallest vertex.
fn cycle_order(graph: &SupportGraph, edges: &[usize]) -> Vec<usize> {
    let ends: Vec<(usize, usize)> = edges.iter().map(|&e| (graph.edges[e].0, graph.edges[e].1)).collect();
    let start = ends.iter().map(|&(u, _)| u).min().expect("nonempty cycle");
    let mut order = vec![start];
    let mut used = vec![false; ends.len()];
    let mut cur = start;
    while order.len() < ends.len() {
        let (idx, next) = ends
            .iter()
            .enumerate()
            .find_map(|(i, &(u, v))| {
                if used[i] {
                    None
                } else if u == cur {
                    Some((i, v))
                } else if v == cur {
                    Some((i, u))
                } else {
                    None
                }
            })
            .expect("cycle is connected");
        used[idx] = true;
        order.push(next);
        cur = next;
    }
    order
}

/// Value and strategies attached to a canonical decomposition:
/// `K = n + n1`, `k = 2/K`; `p` puts `2/K` on singleton states and `1/K`
/// elsewhere; `q` puts `2/K` on singleton and pair columns and `1/K` on odd
/// cycle edges. Both are checked to be feasible with objective `k`.
#[allow(clippy::type_complexity)]
pub fn k_from_decomposition(
    support: &CanonicalSupport,
) -> Result<(Rational, Vec<Rational>, Vec<(usize, Rational)>), CanonicalError> {
    let n = support.n;
    let big_k = (n + support.singletons) as i64;
    let k = rat(2, big_k);
    let one = rat(1, big_k);
    let mut p = vec![one.clone(); n];
    for e in &support.elements {
        if e.role == SupportRole::Singleton {
            p[e.states.iter().next().expect("weight one")] = k.clone();
        }
    }
    let q: Vec<(usize, Rational)> = support
        .elements
        .iter()
        .map(|e| {
            let w = match e.role {
                SupportRole::Singleton | SupportRole::PairEdge => k.clone(),
                SupportRole::CycleEdge { .. } => one.clone(),
            };
            (e.column, w)
        })
        .collect();

    let cols: Vec<StateSet> = support.elements.iter().map(|e| e.states.clone()).collect();
    let weights: Vec<Rational> = q.iter().map(|(_, w)| w.clone()).collect();
    let feasible = sum(&p).is_one()
        && sum(&weights).is_one()
        && cols.iter().all(|c| dot(&p, c) <= k)
        && coverage(n, &cols, &weights).iter().all(|c| c >= &k);
    if !feasible {
        return Err(CanonicalError::InvalidDecomposition(
            "closed-form strategies are not feasible".into(),
        ));
    }
    Ok((k, p, q))
}

/// A Player One strategy over global column indices.
pub type Strategy = BTreeMap<usize, Rational>;

/// Index of the weight-one and weight-two columns of a column list.
#[derive(Clone, Debug)]
pub struct ColumnLookup {
    pub n: usize,
    singleton: Vec<Option<usize>>,
    edge: std::collections::HashMap<(usize, usize), usize>,
}

impl ColumnLookup {
    pub fn new(n: usize, columns: &[StateSet]) -> Self {
        let mut singleton = vec![None; n];
        let mut edge = std::collections::HashMap::new();
        for (j, c) in columns.iter().enumerate() {
            let states: Vec<usize> = c.iter().collect();
            match states.as_slice() {
                [v] => {
                    singleton[*v].get_or_insert(j);
                }
                [u, v] => {
                    edge.entry((*u, *v)).or_insert(j);
                }
                _ => {}
            }
        }
        ColumnLookup { n, singleton, edge }
    }

    pub fn singleton(&self, v: usize) -> Option<usize> {
        self.singleton[v]
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edge.get(&key).copied()
    }
}

fn take(q: &mut Strategy, j: Option<usize>) -> Rational {
    j.and_then(|j| q.remove(&j)).unwrap_or_else(Rational::zero)
}

fn give(q: &mut Strategy, j: usize, mass: Rational) {
    if mass.is_zero() {
        return;
    }
    *q.entry(j).or_insert_with(Rational::zero) += mass;
}

/// Leaf reassignment. `leaf` has degree one in the support graph of `q`, its
/// only neighbour is `hub`. The edge `(hub, leaf)` absorbs the singleton
/// masses of both endpoints; every other edge `(hub, v)` is emptied into the
/// singleton column of `v`. Coverage stays at least the old minimum on every
/// state, total mass is unchanged, and `(hub, leaf)` becomes an isolated pair.
pub fn reassign_leaf(
    q: &Strategy,
    columns: &[StateSet],
    lookup: &ColumnLookup,
    hub: usize,
    leaf: usize,
) -> Result<Strategy, CanonicalError> {
    let mut out = q.clone();
    let edge = lookup
        .edge(hub, leaf)
        .ok_or_else(|| CanonicalError::Internal("leaf edge missing".into()))?;
    let gathered = take(&mut out, lookup.singleton(hub)) + take(&mut out, lookup.singleton(leaf));
    give(&mut out, edge, gathered);
    let hub_edges: Vec<usize> = q
        .keys()
        .copied()
        .filter(|&j| j != edge && columns[j].weight() == 2 && columns[j].contains(hub))
        .collect();
    for j in hub_edges {
        let other = columns[j].iter().find(|&v| v != hub).expect("weight two");
        let target = lookup
            .singleton(other)
            .ok_or_else(|| CanonicalError::Internal(format!("no singleton column for state {}", other + 1)))?;
        let mass = take(&mut out, Some(j));
        give(&mut out, target, mass);
    }
    Ok(out)
}

/// Even-cycle reassignment. `cycle` lists the vertices `v_1..v_c` (c even) of
/// a cycle in the support graph in cyclic order. Edge `(v_{2j-1}, v_{2j})`
/// collects the singleton masses of its endpoints, its own mass and the mass
/// of the following edge `(v_{2j}, v_{2j+1})` (for the last one, `(v_c, v_1)`);
/// the other edges and the singletons are emptied, leaving a perfect matching.
pub fn reassign_even_cycle(
    q: &Strategy,
    lookup: &ColumnLookup,
    cycle: &[usize],
) -> Result<Strategy, CanonicalError> {
    let c = cycle.len();
    if c < 4 || c % 2 == 1 {
        return Err(CanonicalError::Internal(format!("not an even cycle: {c} vertices")));
    }
    let edge = |a: usize, b: usize| {
        lookup
            .edge(cycle[a], cycle[b])
            .ok_or_else(|| CanonicalError::Internal("cycle edge missing".into()))
    };
    let mut out = q.clone();
    let mut matched = Vec::with_capacity(c / 2);
    for j in 0..c / 2 {
        let (a, b) = (2 * j, 2 * j + 1);
        let next = (b + 1) % c;
        let mass = take(&mut out, lookup.singleton(cycle[a]))
            + take(&mut out, lookup.singleton(cycle[b]))
            + take(&mut out, Some(edge(a, b)?))
            + take(&mut out, Some(edge(b, next)?));
        matched.push((edge(a, b)?, mass));
    }
    for (j, mass) in matched {
        give(&mut out, j, mass);
    }
    Ok(out)
}

/// Sub-game on a vertex subset, with local column copies.
struct SubGame<'a> {
    columns: &'a [StateSet],
    vertices: Vec<usize>,
    local_of: Vec<Option<usize>>,
}

impl<'a> SubGame<'a> {
    fn new(n: usize, columns: &'a [StateSet], vertices: Vec<usize>) -> Self {
        let mut local_of = vec![None; n];
        for (i, &v) in vertices.iter().enumerate() {
            local_of[v] = Some(i);
        }
        SubGame {
            columns,
            vertices,
            local_of,
        }
    }

    fn local(&self, cand: &[usize]) -> Vec<StateSet> {
        cand.iter()
            .map(|&j| {
                StateSet::from_states(
                    self.vertices.len(),
                    self.columns[j].iter().map(|v| self.local_of[v].expect("column inside subgame")),
                )
            })
            .collect()
    }

    fn value(&self, cand: &[usize]) -> Rational {
        game_value(self.vertices.len(), &self.local(cand))
    }

    /// Basic optimal strategy over `cand`.
    fn solve(&self, cand: &[usize]) -> (Rational, Strategy) {
        let (k, _, q) = solve_game(self.vertices.len(), &self.local(cand));
        let strat = cand
            .iter()
            .zip(q)
            .filter(|(_, w)| w.is_positive())
            .map(|(&j, w)| (j, w))
            .collect();
        (k, strat)
    }
}

struct Reducer<'a> {
    n: usize,
    columns: &'a [StateSet],
    lookup: ColumnLookup,
}

impl Reducer<'_> {
    /// Optimal strategy for the sub-game on `vertices` over `cand` whose
    /// support is canonical.
    fn reduce(&self, vertices: Vec<usize>, cand: Vec<usize>) -> Result<(Rational, Strategy), CanonicalError> {
        let sub = SubGame::new(self.n, self.columns, vertices);
        let (k, basic) = sub.solve(&cand);
        // greedy minimal subset, highest column index first
        let mut keep: Vec<usize> = basic.keys().copied().collect();
        for &j in basic.keys().rev() {
            let trial: Vec<usize> = keep.iter().copied().filter(|&c| c != j).collect();
            if !trial.is_empty() && sub.value(&trial) == k {
                keep = trial;
            }
        }
        let (k_min, q) = sub.solve(&keep);
        if k_min != k {
            return Err(CanonicalError::Internal("minimal subset changed the value".into()));
        }
        let graph = self.graph_of(&q);
        let comps: Vec<_> = graph
            .components()
            .into_iter()
            .filter(|c| sub.vertices.contains(&c.vertices[0]))
            .collect();
        if comps.len() > 1 {
            return self.split(&sub, &q, k);
        }
        let nv = sub.vertices.len();
        if nv <= 2 {
            return Ok((k, q));
        }
        let leaf = sub.vertices.iter().copied().find(|&v| graph.degree(v) == 1);
        if let Some(leaf) = leaf {
            let &(u, v, _) = graph
                .edges
                .iter()
                .find(|&&(u, v, _)| u == leaf || v == leaf)
                .expect("leaf has an edge");
            let hub = if u == leaf { v } else { u };
            let moved = reassign_leaf(&q, self.columns, &self.lookup, hub, leaf)?;
            return self.split(&sub, &moved, k);
        }
        let comp = &comps[0];
        match comp.kind {
            ComponentKind::Cycle { len } if len == nv && graph.singleton_columns.is_empty() => {
                if len % 2 == 1 {
                    Ok((k, q))
                } else {
                    let order = cycle_order(&graph, &comp.edges);
                    let moved = reassign_even_cycle(&q, &self.lookup, &order)?;
                    self.split(&sub, &moved, k)
                }
            }
            _ => Err(CanonicalError::Internal(
                "connected minimal support without leaves is not a cycle".into(),
            )),
        }
    }

    fn graph_of(&self, q: &Strategy) -> SupportGraph {
        SupportGraph::from_columns(self.n, q.keys().map(|&j| (j, &self.columns[j])))
    }

    /// Solves each component of `q`'s support separately and recombines the
    /// results, weighting each by the mass `q` gives the component.
    fn split(&self, sub: &SubGame, q: &Strategy, k: Rational) -> Result<(Rational, Strategy), CanonicalError> {
        let graph = self.graph_of(q);
        let mut out = Strategy::new();
        for comp in graph.components() {
            if !sub.vertices.contains(&comp.vertices[0]) {
                continue;
            }
            let inside = |j: usize| self.columns[j].iter().all(|v| comp.vertices.contains(&v));
            let mass: Rational = q.iter().filter(|(&j, _)| inside(j)).map(|(_, w)| w.clone()).sum();
            let mut cand: Vec<usize> = q.keys().copied().filter(|&j| inside(j)).collect();
            cand.extend(comp.vertices.iter().filter_map(|&v| self.lookup.singleton(v)));
            cand.sort_unstable();
            cand.dedup();
            let (_, r) = self.reduce(comp.vertices.clone(), cand)?;
            for (j, w) in r {
                give(&mut out, j, w * &mass);
            }
        }
        Ok((k, out))
    }
}

/// Turns an optimal solution into one whose support is a disjoint union of
/// singletons, pairs and odd cycles, with the same value. Returns the new
/// `q` over all columns and the classified support.
///
/// Fails with [`CanonicalError::WeightTooHigh`] when a critical column has
/// weight three or more.
pub fn canonicalize_support(
    columns: &[StateSet],
    sol: &GameSolution,
) -> Result<(Vec<Rational>, CanonicalSupport), CanonicalError> {
    let n = sol.p.len();
    let critical = if sol.critical_columns.is_empty() {
        critical_columns(n, columns, &sol.k)
    } else {
        sol.critical_columns.clone()
    };
    if let Some(&j) = critical.iter().find(|&&j| columns[j].weight() >= 3) {
        return Err(CanonicalError::WeightTooHigh {
            column: j,
            weight: columns[j].weight(),
        });
    }
    let reducer = Reducer {
        n,
        columns,
        lookup: ColumnLookup::new(n, columns),
    };
    let cand: Vec<usize> = (0..columns.len()).filter(|&j| columns[j].weight() <= 2).collect();
    let (k, strat) = reducer.reduce((0..n).collect(), cand)?;
    if k != sol.k {
        return Err(CanonicalError::Internal("value changed after dropping heavy columns".into()));
    }
    let mut q = vec![Rational::zero(); columns.len()];
    for (&j, w) in &strat {
        q[j] = w.clone();
    }
    if !sum(&q).is_one() || coverage(n, columns, &q).iter().any(|c| c < &k) {
        return Err(CanonicalError::Internal("canonical strategy is not optimal".into()));
    }
    let support: Vec<(usize, StateSet)> = strat.keys().map(|&j| (j, columns[j].clone())).collect();
    let classified = CanonicalSupport::classify(n, &support)?;
    Ok((q, classified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cerny, tr};
    use crate::reachability::ColumnTable;
    use crate::spf::{polytope_dimension, spf_at, Side};

    fn set(n: usize, labels: &[usize]) -> StateSet {
        StateSet::from_labels(n, labels.iter().copied())
    }

    #[test]
    fn cerny_four_support_is_two_pairs() {
        let c4 = cerny(4).unwrap();
        let table = ColumnTable::build(&c4, 3);
        let sol = spf_at(&c4, &table);
        let (q, support) = canonicalize_support(table.columns(), &sol).unwrap();
        assert_eq!(support.pairs, 2);
        assert_eq!(support.singletons, 0);
        assert_eq!(support.columns(), vec![4, 6]);
        assert_eq!(q[4], rat(1, 2));
        assert_eq!(q[6], rat(1, 2));
        let (k, _, _) = k_from_decomposition(&support).unwrap();
        assert_eq!(k, rat(1, 2));
    }

    #[test]
    fn identity_support_is_all_singletons() {
        let table = ColumnTable::identity(5);
        let sol = crate::spf::spf_at_columns(5, table.columns(), 0);
        let (q, support) = canonicalize_support(table.columns(), &sol).unwrap();
        assert_eq!(support.singletons, 5);
        assert!(q.iter().all(|w| *w == rat(1, 5)));
    }

    #[test]
    fn leaf_reassignment_on_a_path() {
        // path 1-2-3-4 with singleton columns available
        let n = 4;
        let columns: Vec<StateSet> = (1..=4)
            .map(|v| set(n, &[v]))
            .chain([set(n, &[1, 2]), set(n, &[2, 3]), set(n, &[3, 4])])
            .collect();
        let lookup = ColumnLookup::new(n, &columns);
        let q: Strategy = [(4, rat(2, 5)), (5, rat(1, 5)), (6, rat(2, 5))].into_iter().collect();
        let before = coverage(n, &columns, &dense(&q, columns.len()));
        let min_before = before.iter().min().unwrap().clone();
        assert_eq!(min_before, rat(2, 5));
        let moved = reassign_leaf(&q, &columns, &lookup, 1, 0).unwrap();
        let after = coverage(n, &columns, &dense(&moved, columns.len()));
        assert!(after.iter().all(|c| c >= &min_before));
        assert_eq!(sum(&dense(&moved, columns.len())), rat(1, 1));
        assert_eq!(moved.get(&5), None);
        assert_eq!(moved.get(&2), Some(&rat(1, 5)));
        let graph = SupportGraph::from_columns(n, moved.keys().map(|&j| (j, &columns[j])));
        assert!(graph.components().len() > 1);
    }

    #[test]
    fn even_cycle_becomes_a_matching() {
        let n = 4;
        let columns: Vec<StateSet> = (1..=4)
            .map(|v| set(n, &[v]))
            .chain([set(n, &[1, 2]), set(n, &[2, 3]), set(n, &[3, 4]), set(n, &[1, 4])])
            .collect();
        let lookup = ColumnLookup::new(n, &columns);
        let q: Strategy = (4..8).map(|j| (j, rat(1, 4))).collect();
        let moved = reassign_even_cycle(&q, &lookup, &[0, 1, 2, 3]).unwrap();
        let d = dense(&moved, columns.len());
        assert_eq!(d[4], rat(1, 2));
        assert_eq!(d[6], rat(1, 2));
        assert!(coverage(n, &columns, &d).iter().all(|c| c >= &rat(1, 2)));
    }

    #[test]
    fn pair_plus_triangle_value() {
        let n = 5;
        let cols = vec![
            (0, set(n, &[1, 2])),
            (1, set(n, &[3, 4])),
            (2, set(n, &[4, 5])),
            (3, set(n, &[3, 5])),
        ];
        let support = CanonicalSupport::classify(n, &cols).unwrap();
        assert_eq!((support.pairs, support.singletons, support.cycles.len()), (1, 0, 1));
        let (k, p, q) = k_from_decomposition(&support).unwrap();
        assert_eq!(k, rat(2, 5));
        assert_eq!(p, vec![rat(1, 5); 5]);
        assert_eq!(q[0].1, rat(2, 5));
        let plain: Vec<StateSet> = cols.into_iter().map(|(_, c)| c).collect();
        assert_eq!(game_value(n, &plain), k);
    }

    #[test]
    fn classify_rejects_non_canonical_shapes() {
        let n = 4;
        let path = vec![(0, set(n, &[1, 2])), (1, set(n, &[2, 3])), (2, set(n, &[3, 4]))];
        assert!(CanonicalSupport::classify(n, &path).is_err());
        let square = vec![
            (0, set(n, &[1, 2])),
            (1, set(n, &[2, 3])),
            (2, set(n, &[3, 4])),
            (3, set(n, &[1, 4])),
        ];
        assert!(CanonicalSupport::classify(n, &square).is_err());
        let uncovered = vec![(0, set(n, &[1, 2])), (1, set(n, &[3, 4])), (2, set(n, &[3]))];
        assert!(CanonicalSupport::classify(n, &uncovered).is_err());
        let heavy = vec![(0, set(n, &[1, 2, 3])), (1, set(n, &[4]))];
        assert!(CanonicalSupport::classify(n, &heavy).is_err());
    }

    #[test]
    fn weight_three_critical_column_is_rejected() {
        let t9 = tr(9).unwrap();
        let table = ColumnTable::build(&t9, 12);
        let sol = spf_at(&t9, &table);
        let heavy_critical = sol.critical_columns.iter().any(|&j| table.column(j).weight() >= 3);
        let res = canonicalize_support(table.columns(), &sol);
        if heavy_critical {
            assert!(matches!(res, Err(CanonicalError::WeightTooHigh { .. })));
        } else {
            assert!(res.is_ok());
        }
    }

    #[test]
    fn builtins_below_t3() {
        for (aut, t3) in [(cerny(5).unwrap(), 6), (tr(9).unwrap(), 12)] {
            let n = aut.n();
            let mut table = ColumnTable::identity(n);
            for t in 0..t3 {
                if t > 0 {
                    table.extend(&aut);
                }
                let sol = spf_at(&aut, &table);
                let (q, support) = canonicalize_support(table.columns(), &sol).unwrap();
                let (k, _, _) = k_from_decomposition(&support).unwrap();
                assert_eq!(k, sol.k, "t = {t}");
                assert_eq!(coverage(n, table.columns(), &q).iter().min().unwrap(), &sol.k);
                let dim = polytope_dimension(n, table.columns(), &sol.k, Side::Primal);
                assert!(dim <= support.pairs, "t = {t}: dim {dim} > pairs {}", support.pairs);
            }
        }
    }

    fn dense(q: &Strategy, m: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); m];
        for (&j, w) in q {
            out[j] = w.clone();
        }
        out
    }
}
