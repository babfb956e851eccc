//! The partition lattice over `{1..n}`: refinement order, join and meet,
//! characteristic matrices, the equitable test, and quotient graphs.
//!
//! # Canonical form
//!
//! A [`Partition`] stores, for every element, the id of its cell. Cell ids
//! are contiguous `1..=k` and canonically numbered *in order of each
//! cell's smallest element*, so partition equality is a plain sequence
//! comparison and every constructor yields the same representation for the
//! same set-of-sets. All orderings printed or serialized elsewhere follow
//! this numbering.
//!
//! # Refinement order
//!
//! `p ⪯ q` ("q refines p", q is finer) when every cell of `q` sits inside
//! a cell of `p`. [`Partition::is_finer`] tests the relation;
//! [`Partition::join`] is the coarsest common refinement (elements share a
//! join cell exactly when they share a cell in both arguments) and
//! [`Partition::meet`] the finest common coarsening (connected components
//! of the cell-overlap relation). Under `⪯` the singleton partition is the
//! greatest element and the one-cell partition the least.
//!
//! # Equitable partitions and quotients
//!
//! A partition of a weighted digraph is *equitable* when any two vertices
//! of a cell send the same total edge weight into every cell
//! ([`is_equitable`]). Writing `P` for the characteristic matrix (columns
//! index vertices here, so [`Partition::to_characteristic`] returns the
//! k × n transposed form `Pᵀ`) and `A` for the adjacency matrix with
//! columns indexed by tails, equitability is exactly solvability of
//! `Pᵀ·A = H·Pᵀ`, and the solution `H` is the adjacency matrix of the
//! quotient digraph returned by [`quotient`].

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, LogicalMatrix};
use crate::stg::WeightedDigraph;

/// A partition of `{1..n}` in canonical form (see the module docs).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    cell_of: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Groups elements by arbitrary labels: elements share a cell exactly
    /// when their labels are equal. The result is canonical regardless of
    /// the label values.
    ///
    /// # Errors
    ///
    /// Rejects an empty label list.
    pub fn from_labels<T: Eq + Hash>(labels: &[T]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidStructure(
                "partition needs at least one element".into(),
            ));
        }
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let mut cell_of = Vec::with_capacity(labels.len());
        for label in labels {
            let next = ids.len() + 1;
            let id = *ids.entry(label).or_insert(next);
            cell_of.push(id);
        }
        let k = ids.len();
        Ok(Partition { cell_of, k })
    }

    /// Builds a partition from explicit cells, which must disjointly cover
    /// `1..=n`.
    ///
    /// # Errors
    ///
    /// Rejects out-of-range members, repeated members, missing elements,
    /// and `n = 0`.
    pub fn from_cells(n: usize, cells: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStructure(
                "partition needs at least one element".into(),
            ));
        }
        let mut owner = vec![0usize; n + 1];
        for (i, cell) in cells.iter().enumerate() {
            for &v in cell {
                if v == 0 || v > n {
                    return Err(Error::InvalidStructure(format!(
                        "element {v} out of range 1..={n}"
                    )));
                }
                if owner[v] != 0 {
                    return Err(Error::InvalidStructure(format!(
                        "element {v} appears in more than one cell"
                    )));
                }
                owner[v] = i + 1;
            }
        }
        if let Some(missing) = (1..=n).find(|&v| owner[v] == 0) {
            return Err(Error::InvalidStructure(format!(
                "element {missing} belongs to no cell"
            )));
        }
        Self::from_labels(&owner[1..])
    }

    /// The all-singletons partition of `{1..n}` (the finest one).
    ///
    /// # Panics
    ///
    /// Panics when `n = 0`.
    pub fn singletons(n: usize) -> Self {
        assert!(n >= 1, "partition needs at least one element");
        Partition {
            cell_of: (1..=n).collect(),
            k: n,
        }
    }

    /// The one-cell partition of `{1..n}` (the coarsest one).
    ///
    /// # Panics
    ///
    /// Panics when `n = 0`.
    pub fn one_cell(n: usize) -> Self {
        assert!(n >= 1, "partition needs at least one element");
        Partition {
            cell_of: vec![1; n],
            k: 1,
        }
    }

    /// The 2-partition `{c, complement}` of `{1..n}` — or the one-cell
    /// partition when `c` is empty or all of `{1..n}`.
    ///
    /// # Errors
    ///
    /// Rejects out-of-range members and `n = 0`.
    pub fn from_subset(c: &[usize], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStructure(
                "partition needs at least one element".into(),
            ));
        }
        let mut inside = vec![false; n + 1];
        for &v in c {
            if v == 0 || v > n {
                return Err(Error::InvalidIndexSet(format!(
                    "element {v} out of range 1..={n}"
                )));
            }
            inside[v] = true;
        }
        let labels: Vec<bool> = (1..=n).map(|v| inside[v]).collect();
        Self::from_labels(&labels)
    }

    /// Reads a partition off a characteristic matrix: elements share a cell
    /// exactly when their columns are equal. Inverse of
    /// [`Partition::to_characteristic`] on canonical inputs.
    pub fn from_characteristic(m: &LogicalMatrix) -> Self {
        Self::from_labels(m.col_indices()).expect("a logical matrix has at least one row")
    }

    /// The k × n characteristic matrix in transposed form: column v is
    /// `δ_k^{cell_of(v)}`.
    pub fn to_characteristic(&self) -> LogicalMatrix {
        LogicalMatrix::new(self.k, self.cell_of.clone())
            .expect("cell ids are contiguous and in range")
    }

    /// Number of elements.
    pub fn n(&self) -> usize {
        self.cell_of.len()
    }

    /// Number of cells.
    pub fn num_cells(&self) -> usize {
        self.k
    }

    /// Cell id of element `v` (both 1-based).
    ///
    /// # Panics
    ///
    /// Panics if `v` is out of range.
    pub fn cell_of(&self, v: usize) -> usize {
        assert!(
            v >= 1 && v <= self.n(),
            "element {v} out of range 1..={}",
            self.n()
        );
        self.cell_of[v - 1]
    }

    /// Cell ids for all elements (entry v−1 is the cell of v).
    pub fn cell_assignment(&self) -> &[usize] {
        &self.cell_of
    }

    /// The cells in canonical order, each sorted ascending.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.k];
        for (v0, &c) in self.cell_of.iter().enumerate() {
            cells[c - 1].push(v0 + 1);
        }
        cells
    }

    /// Whether every cell is a singleton.
    pub fn is_singletons(&self) -> bool {
        self.k == self.n()
    }

    /// Whether there is just one cell.
    pub fn is_one_cell(&self) -> bool {
        self.k == 1
    }

    /// True when `self` is finer than (or equal to) `other`: every cell of
    /// `self` lies inside a cell of `other` (so `other ⪯ self`).
    ///
    /// # Errors
    ///
    /// The partitions must cover the same number of elements.
    pub fn is_finer(&self, other: &Partition) -> Result<bool> {
        self.check_same_n(other)?;
        // Finer ⟺ the map (cell of self) → (cell of other) is well defined.
        let mut image = vec![0usize; self.k + 1];
        for v0 in 0..self.n() {
            let mine = self.cell_of[v0];
            let theirs = other.cell_of[v0];
            if image[mine] == 0 {
                image[mine] = theirs;
            } else if image[mine] != theirs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coarsest common refinement: elements share a cell exactly when they
    /// share a cell in both arguments (the least upper bound under ⪯).
    ///
    /// # Errors
    ///
    /// The partitions must cover the same number of elements.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.check_same_n(other)?;
        let labels: Vec<(usize, usize)> = self
            .cell_of
            .iter()
            .zip(&other.cell_of)
            .map(|(&a, &b)| (a, b))
            .collect();
        Self::from_labels(&labels)
    }

    /// Finest common coarsening: connected components of the
    /// "share a cell in either argument" relation (the greatest lower
    /// bound under ⪯).
    ///
    /// # Errors
    ///
    /// The partitions must cover the same number of elements.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.check_same_n(other)?;
        let n = self.n();
        let mut dsu = Dsu::new(n);
        for p in [self, other] {
            // Union every element with its cell's first member.
            let mut first = vec![0usize; p.k + 1];
            for v in 1..=n {
                let c = p.cell_of[v - 1];
                if first[c] == 0 {
                    first[c] = v;
                } else {
                    dsu.union(first[c], v);
                }
            }
        }
        let labels: Vec<usize> = (1..=n).map(|v| dsu.find(v)).collect();
        Self::from_labels(&labels)
    }

    /// Lifts a partition `rho` of this partition's cells back to the
    /// elements: the result's cells are unions of this partition's cells,
    /// grouped per cell of `rho`.
    ///
    /// # Errors
    ///
    /// `rho` must partition exactly `self.num_cells()` items.
    pub fn compose(&self, rho: &Partition) -> Result<Partition> {
        if rho.n() != self.k {
            return Err(Error::Dimension(format!(
                "composition needs a partition of the {} cells, got one of {} elements",
                self.k,
                rho.n()
            )));
        }
        let labels: Vec<usize> = self.cell_of.iter().map(|&c| rho.cell_of[c - 1]).collect();
        Self::from_labels(&labels)
    }

    fn check_same_n(&self, other: &Partition) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::Dimension(format!(
                "partitions cover different element counts: {} vs {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }
}

/// Plain union-find with path halving.
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..=n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Per-vertex signature: total out-weight into each cell.
fn out_signature(g: &WeightedDigraph, p: &Partition, v: usize) -> BTreeMap<usize, i64> {
    let mut sig = BTreeMap::new();
    for (head, w) in g.out_edges(v) {
        *sig.entry(p.cell_of(head)).or_insert(0) += w;
    }
    sig
}

/// Whether `p` is equitable on `g`: within every cell, all vertices send
/// identical total weight into each cell. Exact integer comparison.
///
/// # Errors
///
/// The partition must cover exactly `g`'s vertices.
pub fn is_equitable(g: &WeightedDigraph, p: &Partition) -> Result<bool> {
    if p.n() != g.n() {
        return Err(Error::Dimension(format!(
            "partition covers {} elements but the graph has {} vertices",
            p.n(),
            g.n()
        )));
    }
    for cell in p.cells() {
        let reference = out_signature(g, p, cell[0]);
        for &v in &cell[1..] {
            if out_signature(g, p, v) != reference {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The quotient digraph of `g` under an equitable partition, together with
/// its adjacency matrix `H` (columns indexed by tail cells), which
/// satisfies `Pᵀ·A = H·Pᵀ` exactly. Quotient vertices follow the
/// partition's canonical cell order and carry the merged vertex labels.
///
/// # Errors
///
/// Size mismatches, and partitions that are not equitable on `g`.
pub fn quotient(g: &WeightedDigraph, p: &Partition) -> Result<(WeightedDigraph, DenseMatrix)> {
    if !is_equitable(g, p)? {
        return Err(Error::Precondition(
            "quotient requires an equitable partition".into(),
        ));
    }
    let k = p.num_cells();
    let cells = p.cells();
    let mut h = DenseMatrix::zeros(k, k);
    let mut edges = Vec::new();
    for (c0, cell) in cells.iter().enumerate() {
        // Equitability makes any member representative.
        for (i, w) in out_signature(g, p, cell[0]) {
            h.set(i - 1, c0, w);
            edges.push((c0 + 1, i, w));
        }
    }
    let mut q = WeightedDigraph::new(k, edges)?;
    let labels: Vec<BTreeSet<usize>> = cells
        .iter()
        .map(|cell| {
            cell.iter()
                .flat_map(|&v| g.label(v).iter().copied())
                .collect()
        })
        .collect();
    q.set_labels(labels);
    debug_assert!({
        let pt = p.to_characteristic().to_dense();
        pt.mul(&g.adjacency()).unwrap() == h.mul(&pt).unwrap()
    });
    Ok((q, h))
}
