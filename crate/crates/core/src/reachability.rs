//! Reachable columns `A(t)`, rendezvous times `T_l`, and the support graph
//! `G(t)` of weight-two columns.

use std::collections::HashMap;
use std::ops::Range;

use crate::automaton::{Automaton, SearchError, StateSet, Word};

/// Provenance of one column of a [`ColumnTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMeta {
    /// Smallest `t` with the column in `A(t)`.
    pub first_time: usize,
    /// The state that the witness word sends every member of the column to.
    pub target: usize,
    /// Parent column and letter: this column is the preimage of the parent
    /// under the letter. `None` for the identity columns.
    pub induced_from: Option<(usize, usize)>,
}

/// The set `A(t)` of reachable columns with its canonical ordering.
///
/// The first `n` columns are the identity basis `e_1..e_n`; after that the
/// columns come in blocks by first time, each block sorted in ascending
/// lexicographic order (see [`StateSet`]'s `Ord`).
#[derive(Clone, Debug)]
pub struct ColumnTable {
    n: usize,
    time: usize,
    columns: Vec<StateSet>,
    meta: Vec<ColumnMeta>,
    index: HashMap<StateSet, usize>,
    /// `block_ends[t]` is the number of columns in `A(t)`.
    block_ends: Vec<usize>,
}

impl ColumnTable {
    /// `A(0)`: the identity matrix.
    pub fn identity(n: usize) -> Self {
        let columns: Vec<StateSet> = (0..n).map(|q| StateSet::singleton(n, q)).collect();
        let meta = (0..n)
            .map(|q| ColumnMeta {
                first_time: 0,
                target: q,
                induced_from: None,
            })
            .collect();
        let index = columns.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        ColumnTable {
            n,
            time: 0,
            columns,
            meta,
            index,
            block_ends: vec![n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `t` this table describes.
    pub fn time(&self) -> usize {
        self.time
    }

    /// `m(t)`.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[StateSet] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &StateSet {
        &self.columns[j]
    }

    pub fn meta(&self, j: usize) -> &ColumnMeta {
        &self.meta[j]
    }

    pub fn position(&self, column: &StateSet) -> Option<usize> {
        self.index.get(column).copied()
    }

    /// Columns of `A(t)` for `t <= self.time()`: always a prefix of the table.
    pub fn columns_at(&self, t: usize) -> &[StateSet] {
        &self.columns[..self.len_at(t)]
    }

    /// `m(t)` for `t <= self.time()`; saturated tables answer for any `t`.
    pub fn len_at(&self, t: usize) -> usize {
        self.block_ends[t.min(self.time)]
    }

    /// Index range of the columns first reached at time `t`.
    pub fn block(&self, t: usize) -> Range<usize> {
        if t == 0 {
            0..self.block_ends[0]
        } else if t > self.time {
            self.columns.len()..self.columns.len()
        } else {
            self.block_ends[t - 1]..self.block_ends[t]
        }
    }

    /// Columns induced at the current time; only these can induce new ones.
    pub fn frontier(&self) -> Range<usize> {
        self.block(self.time)
    }

    /// True once an extension step added nothing: the table is then final.
    pub fn is_saturated(&self) -> bool {
        self.time > 0 && self.frontier().is_empty()
    }

    /// A shortest word having column `j`, letters in application order.
    pub fn witness(&self, j: usize) -> Word {
        let mut letters = Vec::with_capacity(self.meta[j].first_time);
        let mut cur = j;
        while let Some((parent, letter)) = self.meta[cur].induced_from {
            letters.push(letter);
            cur = parent;
        }
        Word(letters)
    }

    /// Advances from `A(t)` to `A(t+1)`: preimages of the frontier columns
    /// under every letter (letter order), new nonzero vectors only, sorted
    /// lexicographically. Returns the number of new columns.
    pub fn extend(&mut self, aut: &Automaton) -> usize {
        assert_eq!(aut.n(), self.n, "automaton and table disagree on n");
        let mut fresh: Vec<(StateSet, usize, usize)> = Vec::new();
        let mut seen: HashMap<StateSet, ()> = HashMap::new();
        for parent in self.frontier() {
            for l in 0..aut.m() {
                let col = aut.preimage(&self.columns[parent], l);
                if col.is_empty() || self.index.contains_key(&col) || seen.contains_key(&col) {
                    continue;
                }
                seen.insert(col.clone(), ());
                fresh.push((col, parent, l));
            }
        }
        fresh.sort_by(|a, b| a.0.cmp(&b.0));
        let t = self.time + 1;
        let added = fresh.len();
        for (col, parent, letter) in fresh {
            self.index.insert(col.clone(), self.columns.len());
            self.meta.push(ColumnMeta {
                first_time: t,
                target: self.meta[parent].target,
                induced_from: Some((parent, letter)),
            });
            self.columns.push(col);
        }
        self.time = t;
        self.block_ends.push(self.columns.len());
        added
    }

    /// Builds `A(t)` from scratch.
    pub fn build(aut: &Automaton, t: usize) -> Self {
        let mut table = ColumnTable::identity(aut.n());
        for _ in 0..t {
            table.extend(aut);
        }
        table
    }

    /// First column (in table order) of weight at least `weight`.
    fn first_heavy(&self, range: Range<usize>, weight: usize) -> Option<usize> {
        range.into_iter().find(|&j| self.columns[j].weight() >= weight)
    }

    /// The 0/1 matrix, one row per state.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|q| self.columns.iter().map(|c| c.contains(q) as u8).collect())
            .collect()
    }
}

/// `A(t)` for the given automaton.
pub fn columns_at(aut: &Automaton, t: usize) -> ColumnTable {
    ColumnTable::build(aut, t)
}

/// Result of a rendezvous-time search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrtResult {
    /// The rendezvous time `T_l`.
    pub t: usize,
    /// A word of length `t` merging `merged_states`.
    pub witness: Word,
    pub merged_states: StateSet,
    pub target: usize,
}

/// Default cap for `T_3` searches: `n(n+4)/4 + 1`.
pub fn default_t3_cap(n: usize) -> usize {
    n * (n + 4) / 4 + 1
}

/// Default cap for `T_l` searches: `(n^3 - n)/6`.
pub fn default_t_ell_cap(n: usize) -> usize {
    (n * n * n - n) / 6
}

/// `T_l`: the smallest `t <= cap` such that `A(t)` has a column of weight at
/// least `ell`, i.e. the length of a shortest word merging `ell` states.
pub fn t_ell(aut: &Automaton, ell: usize, cap: usize) -> Result<TrtResult, SearchError> {
    if ell < 2 || ell > aut.n() {
        return Err(SearchError::InvalidArgument(format!(
            "need 2 <= l <= n = {}, got l = {ell}",
            aut.n()
        )));
    }
    let mut table = ColumnTable::identity(aut.n());
    loop {
        if table.time() >= cap {
            return Err(SearchError::CapReached { cap });
        }
        if table.extend(aut) == 0 {
            return Err(SearchError::Saturated { at: table.time() - 1 });
        }
        if let Some(j) = table.first_heavy(table.frontier(), ell) {
            return Ok(TrtResult {
                t: table.time(),
                witness: table.witness(j),
                merged_states: table.column(j).clone(),
                target: table.meta(j).target,
            });
        }
    }
}

/// The triple rendezvous time `T_3`.
pub fn triple_rendezvous_time(aut: &Automaton, cap: usize) -> Result<TrtResult, SearchError> {
    t_ell(aut, 3, cap)
}

/// How a connected component of a [`SupportGraph`] looks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    /// A vertex with no incident edge.
    Singleton,
    /// Two vertices joined by one edge, nothing else attached.
    Pair,
    /// A simple cycle through all vertices of the component.
    Cycle { len: usize },
    /// Anything else (trees, paths, vertices of degree three or more, ...).
    Other,
}

/// One connected component of a [`SupportGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    /// Indices (into the graph's edge list) of the edges inside the component.
    pub edges: Vec<usize>,
    pub kind: ComponentKind,
}

/// Graph on the states whose edges are weight-two columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGraph {
    pub n: usize,
    /// `(u, v, column index)` with `u < v`.
    pub edges: Vec<(usize, usize, usize)>,
    /// `(state, column index)` for each weight-one column present.
    pub singleton_columns: Vec<(usize, usize)>,
    /// Column indices of weight three or more, which the graph ignores.
    pub ignored: Vec<usize>,
}

impl SupportGraph {
    /// Builds the graph from `(column index, column)` pairs.
    pub fn from_columns<'a, I>(n: usize, columns: I) -> Self
    where
        I: IntoIterator<Item = (usize, &'a StateSet)>,
    {
        let mut graph = SupportGraph {
            n,
            edges: Vec::new(),
            singleton_columns: Vec::new(),
            ignored: Vec::new(),
        };
        for (j, col) in columns {
            let states: Vec<usize> = col.iter().collect();
            match states.as_slice() {
                [] => {}
                [q] => graph.singleton_columns.push((*q, j)),
                [u, v] => graph.edges.push((*u, *v, j)),
                _ => graph.ignored.push(j),
            }
        }
        graph
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b, _)| a == v || b == v).count()
    }

    /// Connected components in order of their smallest vertex.
    pub fn components(&self) -> Vec<Component> {
        let n = self.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v, _) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut by_root: Vec<Option<usize>> = vec![None; n];
        let mut comps: Vec<Component> = Vec::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            let idx = *by_root[r].get_or_insert_with(|| {
                comps.push(Component {
                    vertices: Vec::new(),
                    edges: Vec::new(),
                    kind: ComponentKind::Other,
                });
                comps.len() - 1
            });
            comps[idx].vertices.push(v);
        }
        for (e, &(u, _, _)) in self.edges.iter().enumerate() {
            let r = find(&mut parent, u);
            comps[by_root[r].expect("root registered")].edges.push(e);
        }
        for comp in &mut comps {
            comp.kind = self.classify(comp);
        }
        comps
    }

    fn classify(&self, comp: &Component) -> ComponentKind {
        let (nv, ne) = (comp.vertices.len(), comp.edges.len());
        match (nv, ne) {
            (1, 0) => ComponentKind::Singleton,
            (2, 1) => ComponentKind::Pair,
            _ if nv >= 3
                && ne == nv
                && comp.vertices.iter().all(|&v| self.degree(v) == 2) =>
            {
                ComponentKind::Cycle { len: nv }
            }
            _ => ComponentKind::Other,
        }
    }
}

/// `G(t)` for the table's current time.
pub fn support_graph(table: &ColumnTable) -> SupportGraph {
    SupportGraph::from_columns(table.n(), table.columns().iter().enumerate())
}
