//! Brute-force oracles and random generators shared by the integration
//! suites. Everything here is deliberately naive and independent of the
//! library's own algorithms, so agreement between the two is meaningful
//! evidence rather than an echo.
#![allow(dead_code)]

use bnet::{DenseMatrix, LogicalMatrix, Partition, Stg};
use rand::seq::SliceRandom;
use rand::Rng;

/// Every partition of `{1..=n}`, one per restricted-growth string (the
/// label of each element is at most one more than the largest label used
/// before it). The count is the Bell number of `n`.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn extend(labels: &mut Vec<usize>, max_used: usize, n: usize, out: &mut Vec<Partition>) {
        if labels.len() == n {
            out.push(Partition::from_labels(labels).expect("element list is nonempty"));
            return;
        }
        for label in 0..=max_used + 1 {
            labels.push(label);
            extend(labels, max_used.max(label), n, out);
            labels.pop();
        }
    }
    assert!(n >= 1, "partitions of the empty set are out of scope");
    let mut out = Vec::new();
    extend(&mut vec![0], 0, n, &mut out);
    out
}

/// Equitability straight from the definition: all members of a cell send
/// their successors into one common cell.
pub fn equitable_by_definition(g: &Stg, p: &Partition) -> bool {
    let mut target = vec![0usize; p.num_cells() + 1];
    for v in 1..=g.n() {
        let cell = p.cell_of(v);
        let succ_cell = p.cell_of(g.succ(v));
        if target[cell] == 0 {
            target[cell] = succ_cell;
        } else if target[cell] != succ_cell {
            return false;
        }
    }
    true
}

/// Coarsest equitable partition finer than `p0`, found by scanning the
/// full catalogue of partitions (`all` must be `all_partitions(g.n())`).
/// Asserts that the winner is coarser than every other candidate, i.e.
/// that the coarsest refinement is unique.
pub fn coarsest_equitable_by_enumeration(g: &Stg, p0: &Partition, all: &[Partition]) -> Partition {
    let candidates: Vec<&Partition> = all
        .iter()
        .filter(|p| p.is_finer(p0).expect("same ground set") && equitable_by_definition(g, p))
        .collect();
    let best = candidates
        .iter()
        .min_by_key(|p| p.num_cells())
        .expect("the singleton partition always qualifies");
    for candidate in &candidates {
        assert!(
            candidate.is_finer(best).expect("same ground set"),
            "coarsest equitable refinement is not unique"
        );
    }
    (*best).clone()
}

/// Uniformly random functional graph on `n` vertices.
pub fn random_functional<R: Rng>(rng: &mut R, n: usize) -> Stg {
    Stg::new((0..n).map(|_| rng.gen_range(1..=n)).collect()).expect("successors in range")
}

/// Random connected functional graph: a directed cycle through a random
/// prefix of a shuffled vertex list, every later vertex attached to an
/// earlier one.
pub fn random_connected_functional<R: Rng>(rng: &mut R, n: usize) -> Stg {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let cycle_len = rng.gen_range(1..=n);
    let mut succ = vec![0usize; n];
    for i in 0..cycle_len {
        succ[order[i] - 1] = order[(i + 1) % cycle_len];
    }
    for i in cycle_len..n {
        succ[order[i] - 1] = order[rng.gen_range(0..i)];
    }
    Stg::new(succ).expect("successors in range")
}

/// Random subset of `1..=n`, possibly empty or full.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (1..=n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random partition of `{1..=n}` with at most `max_cells` cells.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize, max_cells: usize) -> Partition {
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_cells)).collect();
    Partition::from_labels(&labels).expect("element list is nonempty")
}

/// Random logical matrix of the given shape.
pub fn random_logical<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> LogicalMatrix {
    LogicalMatrix::new(rows, (0..cols).map(|_| rng.gen_range(1..=rows)).collect())
        .expect("column indices in range")
}

/// Random small dense integer matrix with entries in `-3..=3`.
pub fn random_dense<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.gen_range(-3..=3)).collect(),
    )
    .expect("data sized to the shape")
}
