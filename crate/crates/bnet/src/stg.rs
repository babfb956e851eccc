//! State-transition graphs as functional digraphs, plus the weighted
//! digraphs produced by quotient and shrink operations.
//!
//! A Boolean network's state-transition graph (STG) has one vertex per
//! state and the single out-edge `v → Mv`, so it is a *functional* graph:
//! every vertex has out-degree exactly one, and every weakly connected
//! component contains exactly one directed cycle (possibly a self-loop),
//! reached from every vertex of the component. [`Stg`] stores just the
//! successor array and builds a reverse (in-neighbor) index lazily, since
//! the partition algorithms lean heavily on in-neighborhoods.
//!
//! Vertices are 1-based throughout, matching the δ-notation for states.
//!
//! [`WeightedDigraph`] is the general form needed for two derived
//! constructions that leave the functional world:
//!
//! - *quotients* of a graph under an equitable partition (see the
//!   `partition` module), whose adjacency matrix has per-representative
//!   edge weights, and
//! - *shrinking* ([`WeightedDigraph::shrink`]): merging a vertex set into
//!   one vertex, where parallel edges collapse into a single edge carrying
//!   the summed weight.
//!
//! Vertex labels on [`WeightedDigraph`] track which original vertices a
//! merged vertex stands for, so shrunk graphs stay readable in DOT output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, LogicalMatrix};

// ============================================================================
// Stg
// ============================================================================

/// A functional digraph on vertices `1..=n`: every vertex has exactly one
/// out-neighbor, `succ(v)`.
#[derive(Debug, Clone)]
pub struct Stg {
    succ: Vec<usize>,
    rev: OnceLock<Vec<Vec<usize>>>,
}

impl PartialEq for Stg {
    fn eq(&self, other: &Self) -> bool {
        self.succ == other.succ
    }
}

impl Eq for Stg {}

/// Serialized form: `{"n": 16, "succ": [11, 1, ...]}`.
#[derive(Serialize, Deserialize)]
struct StgJson {
    n: usize,
    succ: Vec<usize>,
}

impl Stg {
    /// Builds a graph from a 1-based successor array.
    ///
    /// # Errors
    ///
    /// Rejects an empty array and successor values outside `1..=n`.
    pub fn new(succ: Vec<usize>) -> Result<Self> {
        let n = succ.len();
        if n == 0 {
            return Err(Error::InvalidStructure(
                "functional graph needs at least one vertex".into(),
            ));
        }
        if let Some(&bad) = succ.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::InvalidStructure(format!(
                "successor {bad} out of range 1..={n}"
            )));
        }
        Ok(Stg {
            succ,
            rev: OnceLock::new(),
        })
    }

    /// Reads the graph off a square logical matrix: `succ(v) = m.col(v)`.
    ///
    /// # Errors
    ///
    /// Rejects non-square matrices.
    pub fn from_matrix(m: &LogicalMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Dimension(format!(
                "transition matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Self::new(m.col_indices().to_vec())
    }

    /// The adjacency/transition matrix: column v is `δ_n^{succ(v)}`.
    pub fn to_matrix(&self) -> LogicalMatrix {
        LogicalMatrix::new(self.n(), self.succ.clone())
            .expect("successors validated on construction")
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.succ.len()
    }

    /// The unique out-neighbor of `v` (1-based).
    ///
    /// # Panics
    ///
    /// Panics if `v` is out of range.
    pub fn succ(&self, v: usize) -> usize {
        assert!(
            v >= 1 && v <= self.n(),
            "vertex {v} out of range 1..={}",
            self.n()
        );
        self.succ[v - 1]
    }

    /// The successor array (entry v−1 is `succ(v)`).
    pub fn succ_slice(&self) -> &[usize] {
        &self.succ
    }

    fn reverse_index(&self) -> &Vec<Vec<usize>> {
        self.rev.get_or_init(|| {
            let mut rev = vec![Vec::new(); self.n()];
            for (v0, &s) in self.succ.iter().enumerate() {
                rev[s - 1].push(v0 + 1);
            }
            rev
        })
    }

    /// All vertices with an edge into `v`, ascending. Includes `v` itself
    /// when `v` carries a self-loop.
    ///
    /// # Panics
    ///
    /// Panics if `v` is out of range.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        assert!(
            v >= 1 && v <= self.n(),
            "vertex {v} out of range 1..={}",
            self.n()
        );
        &self.reverse_index()[v - 1]
    }

    /// The `k`-th successor of `v` (the only vertex at out-distance `k`
    /// along the successor walk).
    fn nth_successor(&self, v: usize, k: usize) -> usize {
        let mut cur = v;
        for _ in 0..k {
            cur = self.succ[cur - 1];
        }
        cur
    }

    /// Weakly connected components, each sorted ascending, listed by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n + 1];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                let s = self.succ[v - 1];
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
                for &u in self.in_neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether the graph is weakly connected.
    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// The unique directed cycle of a component, in successor order
    /// starting from its smallest vertex. A self-loop yields a length-1
    /// list.
    ///
    /// # Panics
    ///
    /// Panics if `component` is empty or contains an out-of-range vertex.
    pub fn cycle_of(&self, component: &[usize]) -> Vec<usize> {
        let &start = component.iter().min().expect("component must be nonempty");
        // n steps are always enough to land on the cycle.
        let on_cycle = self.nth_successor(start, self.n());
        let mut cycle = vec![on_cycle];
        let mut cur = self.succ(on_cycle);
        while cur != on_cycle {
            cycle.push(cur);
            cur = self.succ(cur);
        }
        // Rotate so the smallest cycle vertex leads.
        let lead = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .map(|(i, _)| i)
            .expect("cycle is nonempty");
        cycle.rotate_left(lead);
        cycle
    }

    /// In-distance layers of a target set: `layers[d]` holds the vertices
    /// at shortest-path distance exactly `d` *to* the set (distance to a
    /// set is the minimum over its members), so `layers[0]` is the set
    /// itself. Vertices that cannot reach the set appear in no layer.
    ///
    /// # Panics
    ///
    /// Panics if `c` contains an out-of-range vertex.
    pub fn in_distance_layers(&self, c: &[usize]) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut dist = vec![usize::MAX; n + 1];
        let mut frontier: Vec<usize> = c.to_vec();
        frontier.sort_unstable();
        frontier.dedup();
        for &v in &frontier {
            assert!(v >= 1 && v <= n, "vertex {v} out of range 1..={n}");
            dist[v] = 0;
        }
        let mut layers = Vec::new();
        let mut d = 0;
        while !frontier.is_empty() {
            layers.push(frontier.clone());
            let mut next = Vec::new();
            for &v in &frontier {
                for &u in self.in_neighbors(v) {
                    if dist[u] == usize::MAX {
                        dist[u] = d + 1;
                        next.push(u);
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
            d += 1;
        }
        layers
    }

    /// Vertices at in-distance exactly `k` from the set `c` (empty when no
    /// vertex is that far).
    pub fn n_in_k(&self, c: &[usize], k: usize) -> Vec<usize> {
        self.in_distance_layers(c)
            .into_iter()
            .nth(k)
            .unwrap_or_default()
    }

    /// Vertices from which `c` is unreachable.
    pub fn n_in_infinity(&self, c: &[usize]) -> Vec<usize> {
        let mut reaches = vec![false; self.n() + 1];
        for layer in self.in_distance_layers(c) {
            for v in layer {
                reaches[v] = true;
            }
        }
        (1..=self.n()).filter(|&v| !reaches[v]).collect()
    }

    /// Length of the successor walk from `u` to `v`, or `None` when `v` is
    /// never reached. `dist(u, u) = 0`.
    ///
    /// # Panics
    ///
    /// Panics if `u` or `v` is out of range.
    pub fn dist(&self, u: usize, v: usize) -> Option<usize> {
        assert!(
            v >= 1 && v <= self.n(),
            "vertex {v} out of range 1..={}",
            self.n()
        );
        let mut cur = u;
        for d in 0..=self.n() {
            if cur == v {
                return Some(d);
            }
            cur = self.succ(cur);
        }
        None
    }

    /// A spanning branching of a component: drops the cycle edge leaving
    /// the smallest cycle vertex, which becomes the root; every remaining
    /// vertex then reaches the root by a unique path. Returns the root and
    /// the kept edges, sorted by tail.
    ///
    /// # Panics
    ///
    /// Panics if `component` is empty or contains an out-of-range vertex.
    pub fn spanning_branching(&self, component: &[usize]) -> (usize, Vec<(usize, usize)>) {
        let cycle = self.cycle_of(component);
        let root = cycle[0];
        let mut edges: Vec<(usize, usize)> = component
            .iter()
            .filter(|&&v| v != root)
            .map(|&v| (v, self.succ(v)))
            .collect();
        edges.sort_unstable();
        (root, edges)
    }

    /// DOT rendering of the graph (one edge per vertex).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph stg {\n");
        for v in 1..=self.n() {
            let _ = writeln!(out, "  {} -> {};", v, self.succ(v));
        }
        out.push_str("}\n");
        out
    }

    /// JSON rendering: `{"n": ..., "succ": [...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StgJson {
            n: self.n(),
            succ: self.succ.clone(),
        })
        .expect("plain struct always serializes")
    }

    /// Parses the JSON form produced by [`Stg::to_json`].
    ///
    /// # Errors
    ///
    /// Malformed JSON is a parse error with position; a `succ` array that
    /// disagrees with `n` or holds out-of-range values is rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StgJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if raw.succ.len() != raw.n {
            return Err(Error::InvalidStructure(format!(
                "declared n = {} but succ has {} entries",
                raw.n,
                raw.succ.len()
            )));
        }
        Self::new(raw.succ)
    }
}

// ============================================================================
// WeightedDigraph
// ============================================================================

/// A digraph with positive integer edge weights and per-vertex labels
/// recording which original vertices each vertex stands for (singletons
/// until a shrink merges them).
///
/// Parallel edges never exist: inserting an edge that already exists adds
/// to its weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    edges: BTreeMap<(usize, usize), i64>,
    labels: Vec<BTreeSet<usize>>,
}

impl WeightedDigraph {
    /// Builds a graph on `1..=n` from `(tail, head, weight)` triples;
    /// repeated pairs accumulate weight.
    ///
    /// # Errors
    ///
    /// Rejects `n = 0`, endpoints out of range, and non-positive weights.
    pub fn new(n: usize, edge_list: impl IntoIterator<Item = (usize, usize, i64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStructure(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut edges = BTreeMap::new();
        for (t, h, w) in edge_list {
            if t == 0 || t > n || h == 0 || h > n {
                return Err(Error::InvalidStructure(format!(
                    "edge ({t}, {h}) out of range 1..={n}"
                )));
            }
            if w <= 0 {
                return Err(Error::InvalidStructure(format!(
                    "edge ({t}, {h}) has non-positive weight {w}"
                )));
            }
            *edges.entry((t, h)).or_insert(0) += w;
        }
        Ok(WeightedDigraph {
            n,
            edges,
            labels: (1..=n).map(|v| BTreeSet::from([v])).collect(),
        })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// All edges as `(tail, head, weight)`, ordered by tail then head.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.edges.iter().map(|(&(t, h), &w)| (t, h, w))
    }

    /// The out-edges of `v` as `(head, weight)`, ordered by head.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.edges
            .range((v, 1)..=(v, self.n))
            .map(|(&(_, h), &w)| (h, w))
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> i64 {
        self.edges.values().sum()
    }

    /// The original vertices this vertex stands for.
    ///
    /// # Panics
    ///
    /// Panics if `v` is out of range.
    pub fn label(&self, v: usize) -> &BTreeSet<usize> {
        assert!(
            v >= 1 && v <= self.n,
            "vertex {v} out of range 1..={}",
            self.n
        );
        &self.labels[v - 1]
    }

    /// Replaces all vertex labels at once (used by quotient construction,
    /// where every quotient vertex stands for a whole cell).
    pub(crate) fn set_labels(&mut self, labels: Vec<BTreeSet<usize>>) {
        assert_eq!(labels.len(), self.n, "one label set per vertex");
        self.labels = labels;
    }

    /// The adjacency matrix with columns indexed by tails: entry (i, j) is
    /// the weight of the edge j → i, zero when absent.
    pub fn adjacency(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for (t, h, w) in self.edges() {
            a.set(h - 1, t - 1, w);
        }
        a
    }

    /// Merges the vertices of `c` into a single vertex (numbered where the
    /// smallest member of `c` sat): edges inside `c` become a loop,
    /// parallel edges collapse with weights summed, and the merged vertex's
    /// label is the union of the members' labels.
    ///
    /// # Errors
    ///
    /// `c` must be a nonempty proper subset of the vertices.
    pub fn shrink(&self, c: &[usize]) -> Result<WeightedDigraph> {
        let cset: BTreeSet<usize> = c.iter().copied().collect();
        if let Some(&bad) = cset.iter().find(|&&v| v == 0 || v > self.n) {
            return Err(Error::InvalidIndexSet(format!(
                "vertex {bad} out of range 1..={}",
                self.n
            )));
        }
        if cset.is_empty() {
            return Err(Error::InvalidIndexSet("cannot shrink the empty set".into()));
        }
        if cset.len() == self.n {
            return Err(Error::InvalidIndexSet(
                "cannot shrink the whole vertex set".into(),
            ));
        }
        let rep = *cset.iter().next().expect("nonempty");
        // Renumber: every surviving vertex keeps its relative order; the
        // merged set occupies its smallest member's slot.
        let mut map = vec![0usize; self.n + 1];
        let mut next = 0;
        for (v, slot) in map.iter_mut().enumerate().skip(1) {
            if !cset.contains(&v) || v == rep {
                next += 1;
                *slot = next;
            }
        }
        for &v in &cset {
            map[v] = map[rep];
        }
        let new_n = next;
        let mut edges = BTreeMap::new();
        for (t, h, w) in self.edges() {
            *edges.entry((map[t], map[h])).or_insert(0) += w;
        }
        let mut labels = vec![BTreeSet::new(); new_n];
        for v in 1..=self.n {
            labels[map[v] - 1].extend(self.labels[v - 1].iter().copied());
        }
        Ok(WeightedDigraph {
            n: new_n,
            edges,
            labels,
        })
    }

    /// DOT rendering with merged-set labels and weight labels on edges of
    /// weight greater than one.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph g {\n");
        for v in 1..=self.n {
            let label: Vec<String> = self.labels[v - 1].iter().map(|x| x.to_string()).collect();
            let text = if label.len() == 1 {
                label[0].clone()
            } else {
                format!("{{{}}}", label.join(","))
            };
            let _ = writeln!(out, "  {v} [label=\"{text}\"];");
        }
        for (t, h, w) in self.edges() {
            if w > 1 {
                let _ = writeln!(out, "  {t} -> {h} [label={w}];");
            } else {
                let _ = writeln!(out, "  {t} -> {h};");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl From<&Stg> for WeightedDigraph {
    fn from(g: &Stg) -> Self {
        WeightedDigraph::new(g.n(), (1..=g.n()).map(|v| (v, g.succ(v), 1)))
            .expect("a functional graph is always a valid weighted digraph")
    }
}
