//! Observability analysis of Boolean networks with outputs.
//!
//! # Background
//!
//! An observed Boolean network pairs the state dynamics `M` with an output
//! map `E` ([`ObservedBn`]): at each step the observer sees `y = E·x`, not
//! the state itself. Two initial states are *distinguishable* when their
//! output sequences differ at some time, and the network is *observable*
//! when every pair of distinct states is distinguishable.
//!
//! Stacking the outputs of the first `r` steps gives the observability
//! stack `O_r = E * (E·M) * … * (E·M^{r−1})` (Khatri-Rao products,
//! [`observability_matrix`]); two states are distinguishable within `r`
//! steps exactly when their columns differ. The stack's column classes
//! stabilize at the observability index `r₀`
//! ([`observability_index`]), and the stabilized classes are precisely the
//! cells of the smallest invariant dual subspace containing the output —
//! the coarsest equitable refinement of the output partition on the state
//! transition graph ([`unobservable_partition`]). Observability is
//! therefore a partition computation, no stacking required.
//!
//! # Sufficient conditions and construction
//!
//! [`check_observability_conditions`] tests two easily-audited conditions
//! on the colored state graph (color = output value):
//!
//! 1. every vertex's in-neighborhood is *rainbow* — no two in-neighbors
//!    share a color (a loop vertex counts among its own in-neighbors);
//! 2. all cycle vertices, across **all** components, have pairwise
//!    distinct colors.
//!
//! Together these imply observability: if two distinct states had equal
//! output sequences, their trajectories either stay forever apart —
//! eventually landing on two same-colored cycle vertices, impossible
//! by (2) — or merge at some first moment, where the two predecessors are
//! same-colored in-neighbors of one vertex, impossible by (1). The
//! converse fails: condition (2) is not necessary (a 4-cycle colored
//! 1,2,2,1 is observable), so the check is sound but not complete.
//!
//! [`construct_observable_output`] builds an output map satisfying both
//! conditions by greedy graph coloring, giving an observable output for
//! any dynamics.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::invariant::{
    coarsest_equitable_refinement, partition_of_dual, smallest_invariant_algebraic,
};
use crate::matrix::LogicalMatrix;
use crate::partition::Partition;
use crate::stg::Stg;

// ============================================================================
// Domain types
// ============================================================================

/// A Boolean network with outputs: state dynamics `M` and output map `E`,
/// both in logical-matrix form over the `2^n` (or any `n ≥ 1`) states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedBn {
    m: LogicalMatrix,
    e: LogicalMatrix,
}

impl ObservedBn {
    /// Pairs dynamics with an output map.
    ///
    /// # Errors
    ///
    /// `m` must be square and `e` must have one column per state.
    pub fn new(m: LogicalMatrix, e: LogicalMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Dimension(format!(
                "transition matrix must be square, got {}×{}",
                m.rows(),
                m.cols()
            )));
        }
        if e.cols() != m.cols() {
            return Err(Error::Dimension(format!(
                "output matrix has {} columns but the dynamics act on {} states",
                e.cols(),
                m.cols()
            )));
        }
        Ok(Self { m, e })
    }

    /// The state transition matrix.
    pub fn m(&self) -> &LogicalMatrix {
        &self.m
    }

    /// The output matrix.
    pub fn e(&self) -> &LogicalMatrix {
        &self.e
    }

    /// The state transition graph of the dynamics.
    pub fn stg(&self) -> Stg {
        Stg::from_matrix(&self.m).expect("transition matrix is square")
    }
}

/// Everything the observability analysis produces at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservabilityReport {
    /// The observability index `r₀`: outputs beyond the first `r₀` steps
    /// distinguish no further states.
    pub index_r0: usize,
    /// Whether every pair of distinct states is distinguishable.
    pub observable: bool,
    /// Indistinguishability classes: states share a cell exactly when
    /// their output sequences agree forever.
    pub classes: Partition,
    /// Quotient dynamics on the classes (canonical cell numbering).
    pub quotient_h: LogicalMatrix,
}

/// Verdict of the sufficient-condition check, with human-readable notes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCheck {
    /// Whether both conditions hold (which guarantees observability).
    pub satisfied: bool,
    /// First violation found per condition, plus interpretation notes.
    pub diagnostics: Vec<String>,
}

// ============================================================================
// Observability stack and index
// ============================================================================

/// The observability stack `O_r = E * (E·M) * … * (E·M^{r−1})`, carried as
/// one label per state: rows are numbered by first occurrence of each
/// distinct `r`-step output sequence, so column distinctness (and hence
/// logical rank) matches the literal Khatri-Rao product exactly without
/// its exponential height. For `r = 1` the output matrix itself is
/// returned verbatim.
///
/// # Panics
///
/// Panics when `r = 0`.
pub fn observability_matrix(bn: &ObservedBn, r: usize) -> LogicalMatrix {
    assert!(r >= 1, "the stack needs at least one block");
    if r == 1 {
        return bn.e.clone();
    }
    let n = bn.m.cols();
    let succ = bn.m.col_indices();
    let out = bn.e.col_indices();
    let mut tuples: Vec<Vec<usize>> = vec![Vec::with_capacity(r); n];
    let mut cur: Vec<usize> = (1..=n).collect();
    for _ in 0..r {
        for (j, c) in cur.iter_mut().enumerate() {
            tuples[j].push(out[*c - 1]);
            *c = succ[*c - 1];
        }
    }
    Partition::from_labels(&tuples)
        .expect("state list is nonempty")
        .to_characteristic()
}

/// The observability index `r₀`: the least `r` for which the stack's
/// column classes at `r` and `r + 1` coincide. Outputs observed past the
/// first `r₀` steps distinguish no further states.
pub fn observability_index(bn: &ObservedBn) -> usize {
    smallest_invariant_algebraic(&bn.m, &bn.e)
        .expect("dimensions agree by construction")
        .iterations
        + 1
}

// ============================================================================
// Indistinguishability
// ============================================================================

/// Partition of the states into indistinguishability classes: the
/// coarsest equitable refinement of the output partition on the state
/// transition graph. Two states are distinguishable exactly when they lie
/// in different cells.
pub fn unobservable_partition(bn: &ObservedBn) -> Partition {
    coarsest_equitable_refinement(&bn.stg(), &partition_of_dual(&bn.e))
        .expect("dimensions agree by construction")
        .partition
}

/// Whether every pair of distinct states is distinguishable.
pub fn is_observable(bn: &ObservedBn) -> bool {
    unobservable_partition(bn).is_singletons()
}

/// Whether the output sequences from `x0` and `x0_alt` differ at some
/// time. Equal states are never distinguishable.
///
/// # Errors
///
/// Both states must lie in `1..=n` for `n` the state count.
pub fn distinguishable(bn: &ObservedBn, x0: usize, x0_alt: usize) -> Result<bool> {
    let n = bn.m.cols();
    for x in [x0, x0_alt] {
        if x == 0 || x > n {
            return Err(Error::InvalidIndexSet(format!(
                "state {x} out of range 1..={n}"
            )));
        }
    }
    if x0 == x0_alt {
        return Ok(false);
    }
    let classes = unobservable_partition(bn);
    Ok(classes.cell_of(x0) != classes.cell_of(x0_alt))
}

// ============================================================================
// Sufficient conditions
// ============================================================================

/// Checks the two sufficient conditions for observability on the colored
/// state graph (color of a state = its output value):
///
/// 1. every vertex's in-neighborhood is rainbow (a loop vertex counts
///    among its own in-neighbors, so it must differ from all others);
/// 2. all cycle vertices across all components have pairwise distinct
///    colors.
///
/// A satisfied check guarantees observability; a failed check proves
/// nothing (the conditions are not necessary). Diagnostics name the first
/// violating pair per condition and, for graphs with several components,
/// note that condition 2 is enforced across component boundaries.
pub fn check_observability_conditions(bn: &ObservedBn) -> ConditionCheck {
    let g = bn.stg();
    let color = bn.e.col_indices();
    let mut diagnostics = Vec::new();
    let components = g.components();
    if components.len() > 1 {
        diagnostics.push(format!(
            "note: the graph has {} components; cycle vertices must take pairwise distinct output values across all of them",
            components.len()
        ));
    }
    let mut satisfied = true;
    // Condition 1: rainbow in-neighborhoods.
    'vertices: for v in 1..=g.n() {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for &u in g.in_neighbors(v) {
            if let Some(&w) = seen.get(&color[u - 1]) {
                diagnostics.push(format!(
                    "vertex {v}: in-neighbors {w} and {u} share output value {}",
                    color[u - 1]
                ));
                satisfied = false;
                break 'vertices;
            }
            seen.insert(color[u - 1], u);
        }
    }
    // Condition 2: globally distinct cycle colors.
    let mut cycle_vertices: Vec<usize> = components
        .iter()
        .flat_map(|comp| g.cycle_of(comp))
        .collect();
    cycle_vertices.sort_unstable();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for &v in &cycle_vertices {
        if let Some(&w) = seen.get(&color[v - 1]) {
            diagnostics.push(format!(
                "cycle vertices {w} and {v} share output value {}",
                color[v - 1]
            ));
            satisfied = false;
            break;
        }
        seen.insert(color[v - 1], v);
    }
    ConditionCheck {
        satisfied,
        diagnostics,
    }
}

// ============================================================================
// Output construction
// ============================================================================

/// Builds an output matrix that makes the given dynamics observable, by
/// greedy coloring of the conflict graph whose edges join (a) distinct
/// states with a common successor and (b) every pair of cycle vertices,
/// across components. Vertices are colored in order of decreasing
/// conflict degree (ties by index) with the smallest free color, so the
/// used colors are exactly `1..=p` for the returned `p`-row matrix. The
/// result always satisfies [`check_observability_conditions`] and is
/// observable; the alphabet is not claimed minimal.
///
/// # Panics
///
/// Panics when `m` is not square.
pub fn construct_observable_output(m: &LogicalMatrix) -> LogicalMatrix {
    assert_eq!(m.rows(), m.cols(), "transition matrix must be square");
    let g = Stg::from_matrix(m).expect("matrix is square");
    let n = g.n();
    let mut conflicts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n + 1];
    let connect = |a: usize, b: usize, conflicts: &mut Vec<BTreeSet<usize>>| {
        if a != b {
            conflicts[a].insert(b);
            conflicts[b].insert(a);
        }
    };
    for v in 1..=n {
        let nb = g.in_neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                connect(a, b, &mut conflicts);
            }
        }
    }
    let cycle_vertices: Vec<usize> = g
        .components()
        .iter()
        .flat_map(|comp| g.cycle_of(comp))
        .collect();
    for (i, &a) in cycle_vertices.iter().enumerate() {
        for &b in &cycle_vertices[i + 1..] {
            connect(a, b, &mut conflicts);
        }
    }
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(conflicts[v].len()), v));
    let mut colors = vec![0usize; n + 1];
    for &v in &order {
        let taken: BTreeSet<usize> = conflicts[v].iter().map(|&u| colors[u]).collect();
        colors[v] = (1..)
            .find(|c| !taken.contains(c))
            .expect("a free color exists");
    }
    let p = colors.iter().copied().max().expect("at least one state");
    LogicalMatrix::new(p, colors[1..].to_vec()).expect("colors lie in 1..=p")
}

// ============================================================================
// Combined report
// ============================================================================

/// Runs the full analysis: observability index, indistinguishability
/// classes, quotient dynamics, and the observability verdict.
pub fn analyze(bn: &ObservedBn) -> ObservabilityReport {
    let refinement = coarsest_equitable_refinement(&bn.stg(), &partition_of_dual(&bn.e))
        .expect("dimensions agree by construction");
    ObservabilityReport {
        index_r0: observability_index(bn),
        observable: refinement.partition.is_singletons(),
        classes: refinement.partition,
        quotient_h: refinement.quotient_h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 16-state dynamics of the running 4-variable example network.
    fn demo_m() -> LogicalMatrix {
        LogicalMatrix::new(
            16,
            vec![11, 1, 11, 1, 11, 13, 15, 9, 1, 2, 1, 2, 9, 15, 13, 11],
        )
        .unwrap()
    }

    /// 32-state dynamics of the 5-variable phage-decision network.
    fn phage_m() -> LogicalMatrix {
        LogicalMatrix::new(
            32,
            vec![
                32, 24, 32, 24, 32, 24, 32, 24, 26, 2, 26, 2, 25, 9, 25, 9, 32, 24, 32, 24, 32, 24,
                32, 24, 28, 4, 32, 8, 27, 11, 31, 15,
            ],
        )
        .unwrap()
    }

    /// The known observable output map for the phage network.
    fn phage_e() -> LogicalMatrix {
        LogicalMatrix::new(
            16,
            vec![
                9, 2, 2, 3, 3, 4, 4, 5, 1, 1, 2, 2, 2, 2, 1, 1, 5, 6, 6, 7, 7, 8, 8, 1, 1, 1, 1, 1,
                1, 1, 2, 1,
            ],
        )
        .unwrap()
    }

    fn phage() -> ObservedBn {
        ObservedBn::new(phage_m(), phage_e()).unwrap()
    }

    /// Last-state indicator output on the running example.
    fn demo() -> ObservedBn {
        let e = LogicalMatrix::new(2, vec![2; 15].into_iter().chain([1]).collect()).unwrap();
        ObservedBn::new(demo_m(), e).unwrap()
    }

    #[test]
    fn constructor_validates_dimensions() {
        let rect = LogicalMatrix::new(3, vec![1, 2]).unwrap();
        let e = LogicalMatrix::new(1, vec![1, 1]).unwrap();
        assert!(matches!(
            ObservedBn::new(rect, e.clone()).unwrap_err(),
            Error::Dimension(_)
        ));
        let m = LogicalMatrix::new(2, vec![1, 1]).unwrap();
        let e3 = LogicalMatrix::new(1, vec![1, 1, 1]).unwrap();
        assert!(matches!(
            ObservedBn::new(m, e3).unwrap_err(),
            Error::Dimension(_)
        ));
    }

    #[test]
    fn stack_returns_the_output_map_at_depth_one() {
        let bn = demo();
        assert_eq!(observability_matrix(&bn, 1), *bn.e());
        // Identity output: all columns distinct immediately.
        let id = ObservedBn::new(demo_m(), LogicalMatrix::identity(16)).unwrap();
        assert_eq!(observability_matrix(&id, 1).logical_rank(), 16);
    }

    #[test]
    fn stack_grows_until_the_index_then_stabilizes() {
        // Path 4 → 3 → 2 → 1 ⟲ observed through the root indicator: each
        // extra step separates one more distance layer.
        let m = LogicalMatrix::new(4, vec![1, 1, 2, 3]).unwrap();
        let e = LogicalMatrix::new(2, vec![1, 2, 2, 2]).unwrap();
        let bn = ObservedBn::new(m, e).unwrap();
        assert_eq!(observability_matrix(&bn, 1).logical_rank(), 2);
        assert_eq!(observability_matrix(&bn, 2).logical_rank(), 3);
        assert_eq!(observability_matrix(&bn, 3).logical_rank(), 4);
        assert_eq!(observability_matrix(&bn, 4).logical_rank(), 4);
        assert_eq!(observability_index(&bn), 3);
        // Stabilized column classes match the indistinguishability classes.
        let r0 = observability_index(&bn);
        assert_eq!(
            partition_of_dual(&observability_matrix(&bn, r0)),
            unobservable_partition(&bn)
        );
        assert_eq!(
            partition_of_dual(&observability_matrix(&bn, r0 + 1)),
            unobservable_partition(&bn)
        );
    }

    #[test]
    fn index_is_one_when_the_output_already_stabilizes() {
        let id = ObservedBn::new(demo_m(), LogicalMatrix::identity(16)).unwrap();
        assert_eq!(observability_index(&id), 1);
        let constant =
            ObservedBn::new(demo_m(), LogicalMatrix::new(1, vec![1; 16]).unwrap()).unwrap();
        assert_eq!(observability_index(&constant), 1);
        assert_eq!(observability_index(&demo()), 1);
    }

    #[test]
    fn indistinguishability_classes_on_the_worked_example() {
        let bn = demo();
        let classes = unobservable_partition(&bn);
        assert_eq!(
            classes.cells(),
            vec![(1..=15).collect::<Vec<_>>(), vec![16]]
        );
        assert!(!is_observable(&bn));
        // States inside the big cell are mutually indistinguishable; the
        // last state is distinguishable from all of them.
        assert!(!distinguishable(&bn, 1, 2).unwrap());
        assert!(distinguishable(&bn, 1, 16).unwrap());
        assert!(!distinguishable(&bn, 3, 3).unwrap());
        assert!(matches!(
            distinguishable(&bn, 0, 5).unwrap_err(),
            Error::InvalidIndexSet(_)
        ));
        assert!(matches!(
            distinguishable(&bn, 1, 17).unwrap_err(),
            Error::InvalidIndexSet(_)
        ));
    }

    #[test]
    fn phage_network_with_the_known_output_is_observable() {
        let bn = phage();
        assert!(is_observable(&bn));
        assert!(unobservable_partition(&bn).is_singletons());
        let r0 = observability_index(&bn);
        assert_eq!(observability_matrix(&bn, r0).logical_rank(), 32);
        let check = check_observability_conditions(&bn);
        assert!(check.satisfied);
        let report = analyze(&bn);
        assert!(report.observable);
        assert_eq!(report.index_r0, r0);
        assert!(report.classes.is_singletons());
    }

    #[test]
    fn checker_names_the_first_violation() {
        // 1 ⟲ with 2 → 1, both emitting the same value: the merge at
        // vertex 1 is invisible.
        let m = LogicalMatrix::new(2, vec![1, 1]).unwrap();
        let e = LogicalMatrix::new(1, vec![1, 1]).unwrap();
        let check = check_observability_conditions(&ObservedBn::new(m, e).unwrap());
        assert!(!check.satisfied);
        assert!(check.diagnostics.iter().any(|d| d.contains("vertex 1")));
        // Two same-colored fixed points: rainbow in-neighborhoods, but the
        // cycle colors collide across components.
        let m = LogicalMatrix::new(2, vec![1, 2]).unwrap();
        let e = LogicalMatrix::new(1, vec![1, 1]).unwrap();
        let check = check_observability_conditions(&ObservedBn::new(m, e).unwrap());
        assert!(!check.satisfied);
        assert!(check
            .diagnostics
            .iter()
            .any(|d| d.contains("cycle vertices 1 and 2")));
        assert!(check.diagnostics.iter().any(|d| d.starts_with("note:")));
    }

    #[test]
    fn checker_is_sound_but_not_complete() {
        // A 4-cycle colored 1,2,2,1 is observable (the four output
        // sequences have distinct phase patterns) yet fails the distinct-
        // cycle-colors condition.
        let m = LogicalMatrix::new(4, vec![2, 3, 4, 1]).unwrap();
        let e = LogicalMatrix::new(2, vec![1, 2, 2, 1]).unwrap();
        let bn = ObservedBn::new(m, e).unwrap();
        assert!(is_observable(&bn));
        assert!(!check_observability_conditions(&bn).satisfied);
    }

    #[test]
    fn constructed_outputs_make_small_systems_observable() {
        // Two fixed points need two colors.
        let e = construct_observable_output(&LogicalMatrix::identity(2));
        assert_eq!(e, LogicalMatrix::new(2, vec![1, 2]).unwrap());
        // Path into a loop: the loop vertex must differ from its other
        // in-neighbor; two colors suffice and greedy finds that.
        let m = LogicalMatrix::new(3, vec![1, 1, 2]).unwrap();
        let e = construct_observable_output(&m);
        assert_eq!(e, LogicalMatrix::new(2, vec![1, 2, 1]).unwrap());
        let bn = ObservedBn::new(m, e).unwrap();
        assert!(check_observability_conditions(&bn).satisfied);
        assert!(is_observable(&bn));
    }

    #[test]
    fn constructed_output_for_the_phage_network() {
        // One state has nine in-neighbors, so at least nine output values
        // are forced; the construction succeeds and is observable.
        let m = phage_m();
        let e = construct_observable_output(&m);
        assert!(e.rows() >= 9);
        // Every color in 1..=p is actually used.
        assert_eq!(e.logical_rank(), e.rows());
        let bn = ObservedBn::new(m, e).unwrap();
        assert!(check_observability_conditions(&bn).satisfied);
        assert!(is_observable(&bn));
    }

    #[test]
    fn report_bundles_the_component_queries() {
        let bn = demo();
        let report = analyze(&bn);
        assert_eq!(report.index_r0, 1);
        assert!(!report.observable);
        assert_eq!(
            report.classes.cells(),
            vec![(1..=15).collect::<Vec<_>>(), vec![16]]
        );
        // Both cells feed the big cell (state 16 maps to state 11).
        assert_eq!(
            report.quotient_h,
            LogicalMatrix::new(2, vec![1, 1]).unwrap()
        );
    }
}
