//! Exhaustive enumeration and isomorphism classification of smoothing
//! diagrams on projective space, plus the closed-form germ families: triple
//! points of the affine triangle and the two-edge chain law.
//!
//! Candidate graphs are the max-degree-2 subgraphs of the complete graph on
//! 2n+1 vertices, enumerated as lexicographically minimal orbit
//! representatives; decorations assign each edge order 2 at one opposite
//! vertex or order 1 at two. Each surviving candidate is decided by the
//! exact arrangement solver and classes are deduplicated by canonical form.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::{is_realizable, ArrangementError, Stratum, Verdict};
use crate::complex::{DualComplex, LogClass};
use crate::diagram::{validate_combinatorial, CanonicalForm, DiagramError, SmoothingDiagram};
use crate::rational::{is_nonneg_integer, q, qi};
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("n = {0} outside the supported range 1..=3")]
    SizeGuard(usize),
    #[error("single-edge classes need n >= 2 (got {0})")]
    NeedsLargerSpace(usize),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub use_combinatorial_pruning: bool,
    pub parallel: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            use_combinatorial_pruning: true,
            parallel: false,
        }
    }
}

/// One isomorphism class of realizable smoothing diagrams.
#[derive(Debug, Clone)]
pub struct ClassEntry {
    pub canonical: CanonicalForm,
    pub representative: SmoothingDiagram,
    pub dimension: usize,
    pub witness: LogClass,
    pub orbit_size: usize,
}

/// A max-degree-2 subgraph orbit of the complete graph, as its
/// lexicographically minimal labeled representative.
#[derive(Debug, Clone)]
pub struct GraphOrbit {
    pub edges: Vec<(usize, usize)>,
    pub orbit_size: usize,
}

/// All max-degree-2 edge sets on `v` labeled vertices, in lexicographic
/// order of their sorted edge lists.
pub fn max_degree_two_graphs(v: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..v)
        .flat_map(|a| ((a + 1)..v).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    let mut degrees = vec![0usize; v];
    let mut current = Vec::new();
    subsets_with_degree_cap(&pairs, 0, &mut degrees, &mut current, &mut out);
    out
}

fn subsets_with_degree_cap(
    pairs: &[(usize, usize)],
    idx: usize,
    degrees: &mut Vec<usize>,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if idx == pairs.len() {
        out.push(current.clone());
        return;
    }
    subsets_with_degree_cap(pairs, idx + 1, degrees, current, out);
    let (a, b) = pairs[idx];
    if degrees[a] < 2 && degrees[b] < 2 {
        degrees[a] += 1;
        degrees[b] += 1;
        current.push((a, b));
        subsets_with_degree_cap(pairs, idx + 1, degrees, current, out);
        current.pop();
        degrees[a] -= 1;
        degrees[b] -= 1;
    }
}

fn relabel_edges(edges: &[(usize, usize)], perm: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
        .collect();
    out.sort_unstable();
    out
}

/// Orbit representatives of max-degree-2 graphs under vertex relabeling:
/// a graph is kept iff no relabeling is lexicographically smaller.
pub fn graph_orbit_reps(v: usize) -> Vec<GraphOrbit> {
    let perms: Vec<Vec<usize>> = (0..v).permutations(v).collect();
    let mut reps = Vec::new();
    for edges in max_degree_two_graphs(v) {
        let mut is_min = true;
        let mut stabilizer = 0usize;
        for perm in &perms {
            let relabeled = relabel_edges(&edges, perm);
            if relabeled < edges {
                is_min = false;
                break;
            }
            if relabeled == edges {
                stabilizer += 1;
            }
        }
        if is_min {
            let orbit_size = factorial(v) / stabilizer;
            reps.push(GraphOrbit { edges, orbit_size });
        }
    }
    reps
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All decorations of one edge in SumEqualsTwo mode: order 2 at one
/// opposite vertex, or order 1 at two distinct ones.
fn edge_decorations(opposite: &[usize]) -> Vec<BTreeMap<usize, u64>> {
    let mut out = Vec::new();
    for &k in opposite {
        out.push(BTreeMap::from([(k, 2u64)]));
    }
    for i in 0..opposite.len() {
        for j in i + 1..opposite.len() {
            out.push(BTreeMap::from([(opposite[i], 1u64), (opposite[j], 1u64)]));
        }
    }
    out
}

/// Enumerates one graph orbit's decorated diagrams, returning the canonical
/// encodings (with a member diagram each) of those that are realizable.
fn enumerate_graph(
    complex: &DualComplex,
    graph: &GraphOrbit,
    options: ClassifyOptions,
) -> Result<Vec<(Vec<u8>, SmoothingDiagram)>, ClassifyError> {
    let space = crate::arrangement::AmbientSpace::for_complex(complex)?;
    let edges = &graph.edges;
    let per_edge: Vec<Vec<BTreeMap<usize, u64>>> = edges
        .iter()
        .map(|&(i, j)| edge_decorations(&complex.opposite_vertices(i, j)))
        .collect();

    let mut found = Vec::new();
    let mut choice: Vec<usize> = Vec::new();
    decorate_rec(
        complex,
        &space,
        edges,
        &per_edge,
        &mut choice,
        options,
        &mut found,
    )?;
    Ok(found)
}

/// Depth-first decoration search. Two always-on prunings are exactness
/// preserving because the solution space only shrinks as constraints are
/// added: a graph edge whose biresidue form already vanishes identically can
/// only end in EdgeForcedZero, and an identically vanishing restricted
/// Pfaffian can only end in EmptyOrDegenerate.
#[allow(clippy::too_many_arguments)]
fn decorate_rec(
    complex: &DualComplex,
    space: &crate::arrangement::AmbientSpace,
    edges: &[(usize, usize)],
    per_edge: &[Vec<BTreeMap<usize, u64>>],
    choice: &mut Vec<usize>,
    options: ClassifyOptions,
    found: &mut Vec<(Vec<u8>, SmoothingDiagram)>,
) -> Result<(), ClassifyError> {
    let depth = choice.len();
    if depth == edges.len() {
        let d = build_diagram(complex.num_vertices(), edges, per_edge, choice);
        if options.use_combinatorial_pruning && !validate_combinatorial(&d, complex).is_empty() {
            return Ok(());
        }
        let stratum = is_realizable(&d, complex)?;
        if stratum.verdict == Verdict::Realizable {
            found.push((d.canonical_form()?.encoding, d));
        }
        return Ok(());
    }
    for c in 0..per_edge[depth].len() {
        choice.push(c);
        if !prune_partial(complex, space, edges, per_edge, choice)? {
            decorate_rec(complex, space, edges, per_edge, choice, options, found)?;
        }
        choice.pop();
    }
    Ok(())
}

fn build_diagram(
    num_vertices: usize,
    edges: &[(usize, usize)],
    per_edge: &[Vec<BTreeMap<usize, u64>>],
    choice: &[usize],
) -> SmoothingDiagram {
    let mut d = SmoothingDiagram::empty(num_vertices);
    for (t, &(i, j)) in edges.iter().take(choice.len()).enumerate() {
        d.insert_edge((i, j), per_edge[t][choice[t]].clone());
    }
    d
}

/// True if the partial decoration provably cannot extend to a realizable
/// diagram.
fn prune_partial(
    complex: &DualComplex,
    space: &crate::arrangement::AmbientSpace,
    edges: &[(usize, usize)],
    per_edge: &[Vec<BTreeMap<usize, u64>>],
    choice: &[usize],
) -> Result<bool, ClassifyError> {
    let partial = build_diagram(complex.num_vertices(), edges, per_edge, choice);
    let basis = crate::arrangement::solve_stratum_coords_public(&partial, complex)?;
    // Any graph edge (decorated or not) forced to zero biresidue dooms the
    // whole subtree.
    for &(i, j) in edges {
        if space.restricted_entry_form(i, j, &basis).iter().all(|x| {
            use num_traits::Zero;
            x.is_zero()
        }) {
            return Ok(true);
        }
    }
    // The Pfaffian certificate is cheap once the subspace is small.
    if basis.len() <= 6 {
        if let Some(pf) = space.restricted_chart_pfaffian(&basis)? {
            use num_traits::Zero;
            if pf.is_zero() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// One entry per isomorphism class of realizable smoothing diagram on
/// P^{2n}. Results are independent of pruning and parallelism settings:
/// classes are re-verified on their canonical representatives and sorted by
/// (edge count, dimension, encoding).
pub fn enumerate_smoothing_diagrams(
    n: usize,
    options: ClassifyOptions,
) -> Result<Vec<ClassEntry>, ClassifyError> {
    if !(1..=3).contains(&n) {
        return Err(ClassifyError::SizeGuard(n));
    }
    let complex = DualComplex::projective_space(n);
    let reps = graph_orbit_reps(2 * n + 1);

    let per_rep: Result<Vec<Vec<(Vec<u8>, SmoothingDiagram)>>, ClassifyError> = if options.parallel
    {
        reps.par_iter()
            .map(|g| enumerate_graph(&complex, g, options))
            .collect()
    } else {
        reps.iter()
            .map(|g| enumerate_graph(&complex, g, options))
            .collect()
    };

    let mut classes: BTreeMap<Vec<u8>, SmoothingDiagram> = BTreeMap::new();
    for batch in per_rep? {
        for (encoding, diagram) in batch {
            classes.entry(encoding).or_insert(diagram);
        }
    }

    let mut entries = Vec::new();
    for (_, diagram) in classes {
        entries.push(class_entry_for(&diagram, &complex)?);
    }
    entries.sort_by(|a, b| {
        (
            a.representative.num_edges(),
            a.dimension,
            &a.canonical.encoding,
        )
            .cmp(&(
                b.representative.num_edges(),
                b.dimension,
                &b.canonical.encoding,
            ))
    });
    Ok(entries)
}

/// Builds the class entry from the canonical representative, re-running the
/// arrangement solver on it so output does not depend on which orbit member
/// was found first.
fn class_entry_for(
    diagram: &SmoothingDiagram,
    complex: &DualComplex,
) -> Result<ClassEntry, ClassifyError> {
    let (canonical, representative) = diagram.canonicalize()?;
    let stratum = is_realizable(&representative, complex)?;
    debug_assert_eq!(stratum.verdict, Verdict::Realizable);
    let witness = stratum
        .witness
        .expect("realizable representatives carry a witness");
    Ok(ClassEntry {
        orbit_size: canonical.orbit_size,
        canonical,
        representative,
        dimension: stratum.dimension,
        witness,
    })
}

/// The classes with exactly one edge: the order-(2) and order-(1,1)
/// decorations, for any n >= 2.
pub fn single_edge_classes(n: usize) -> Result<Vec<ClassEntry>, ClassifyError> {
    if !(1..=3).contains(&n) {
        return Err(ClassifyError::SizeGuard(n));
    }
    if n < 2 {
        return Err(ClassifyError::NeedsLargerSpace(n));
    }
    let complex = DualComplex::projective_space(n);
    let v = 2 * n + 1;
    let mut out = Vec::new();
    for orders in [
        BTreeMap::from([(2usize, 2u64)]),
        BTreeMap::from([(2usize, 1u64), (3usize, 1u64)]),
    ] {
        let mut d = SmoothingDiagram::empty(v);
        d.insert_edge((0, 1), orders);
        out.push(class_entry_for(&d, &complex)?);
    }
    out.sort_by(|a, b| a.canonical.encoding.cmp(&b.canonical.encoding));
    Ok(out)
}

/// Singularity labels of the fully smoothable triangle germs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TripleLabel {
    E6Tilde,
    E7Tilde,
    E8Tilde,
}

impl TripleLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            TripleLabel::E6Tilde => "E~6",
            TripleLabel::E7Tilde => "E~7",
            TripleLabel::E8Tilde => "E~8",
        }
    }
}

/// A projective point of the germ-triangle arrangement where all three
/// edges are smoothable: biresidues b_i = 1/(m_i + 1) normalized to sum 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePoint {
    pub biresidues: (Q, Q, Q),
    pub orders: (u64, u64, u64),
    pub label: TripleLabel,
    pub orbit_size: usize,
}

/// All triple points of the affine-germ triangle: the ordered solutions of
/// 1/(m1+1) + 1/(m2+1) + 1/(m3+1) = 1 in nonnegative integers, i.e. the
/// order triples (2,2,2), (1,3,3), (1,2,5) up to permutation — 10 points in
/// orbits of sizes 1, 3, 6.
pub fn triple_points_c4() -> Vec<TriplePoint> {
    let mut solutions: Vec<(u64, u64, u64)> = Vec::new();
    // 1/(m+1) >= 1/65 for m <= 64, which bounds all solutions comfortably.
    for m1 in 0u64..=64 {
        for m2 in 0u64..=64 {
            for m3 in 0u64..=64 {
                let sum = q(1, (m1 + 1) as i64) + q(1, (m2 + 1) as i64) + q(1, (m3 + 1) as i64);
                if sum == qi(1) {
                    solutions.push((m1, m2, m3));
                }
            }
        }
    }
    let sorted_orders = |t: &(u64, u64, u64)| {
        let mut v = [t.0, t.1, t.2];
        v.sort_unstable();
        v
    };
    let mut points: Vec<TriplePoint> = solutions
        .iter()
        .map(|&(m1, m2, m3)| {
            let key = sorted_orders(&(m1, m2, m3));
            let label = match key {
                [2, 2, 2] => TripleLabel::E6Tilde,
                [1, 3, 3] => TripleLabel::E7Tilde,
                [1, 2, 5] => TripleLabel::E8Tilde,
                other => unreachable!("unexpected order triple {other:?}"),
            };
            let orbit_size = solutions
                .iter()
                .filter(|s| sorted_orders(s) == key)
                .count();
            TriplePoint {
                biresidues: (
                    q(1, (m1 + 1) as i64),
                    q(1, (m2 + 1) as i64),
                    q(1, (m3 + 1) as i64),
                ),
                orders: (m1, m2, m3),
                label,
                orbit_size,
            }
        })
        .collect();
    points.sort_by_key(|p| (p.label, p.orders));
    points
}

/// The forced biresidues (n+1, m+1, nm-1) of a triangle with two smoothable
/// edges of orders m <= n, and whether the third edge is then smoothable
/// (equivalently, (m,n) is one of the six exceptional pairs).
pub fn two_edge_chain_family(m: u64, n: u64) -> ((Q, Q, Q), bool) {
    assert!(m <= n, "chain orders are normalized to m <= n");
    let b = (qi((n + 1) as i64), qi((m + 1) as i64), qi(n as i64 * m as i64 - 1));
    let third = &b.2;
    let smoothable = if num_traits::Zero::is_zero(third) {
        false
    } else {
        let order = (b.0.clone() + b.1.clone()) / third.clone();
        is_nonneg_integer(&order)
    };
    (b, smoothable)
}

/// The germ-triangle diagram of the two-edge chain with orders (m, n):
/// edge {0,1} of order m at vertex 2, edge {1,2} of order n at vertex 0.
/// On its stratum, (B01, B12, B02) = ((n+1)t, (m+1)t, (1-nm)t).
pub fn germ_two_chain_diagram(m: u64, n: u64) -> SmoothingDiagram {
    let mut d = SmoothingDiagram::empty(3);
    let edge_orders = |k: usize, order: u64| {
        let mut map = BTreeMap::new();
        if order > 0 {
            map.insert(k, order);
        }
        map
    };
    d.insert_edge((0, 1), edge_orders(2, m));
    d.insert_edge((1, 2), edge_orders(0, n));
    d
}

/// One record of the double-line (two smoothable edges) family, labeled by
/// its stem singularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRecord {
    pub m: u64,
    pub n: u64,
    pub biresidues: (Q, Q, Q),
    pub third_edge_smoothable: bool,
    pub label: String,
}

/// Closed-form records for all 0 <= m <= n <= max_order.
pub fn chain_records(max_order: u64) -> Vec<ChainRecord> {
    let mut out = Vec::new();
    for m in 0..=max_order {
        for n in m..=max_order {
            let (biresidues, third_edge_smoothable) = two_edge_chain_family(m, n);
            out.push(ChainRecord {
                m,
                n,
                biresidues,
                third_edge_smoothable,
                label: format!("T_{{inf,{},{}}}", m + 1, n + 1),
            });
        }
    }
    out
}

/// The verdict of the arrangement solver on the decorated two-edge chain,
/// for cross-validating the closed form.
pub fn germ_two_chain_stratum(m: u64, n: u64) -> Result<Stratum, ClassifyError> {
    let germ = DualComplex::affine_germ(3);
    Ok(is_realizable(&germ_two_chain_diagram(m, n), &germ)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_counts_small() {
        // 3 vertices: empty, 3 single edges, 3 paths, 1 triangle.
        assert_eq!(max_degree_two_graphs(3).len(), 8);
        let reps = graph_orbit_reps(3);
        // Shapes: empty, edge, path, triangle.
        assert_eq!(reps.len(), 4);
        let total: usize = reps.iter().map(|r| r.orbit_size).sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn graph_orbit_bookkeeping_p4() {
        let all = max_degree_two_graphs(5);
        let reps = graph_orbit_reps(5);
        let total: usize = reps.iter().map(|r| r.orbit_size).sum();
        assert_eq!(total, all.len());
        // 12 shapes on 5 vertices: empty, e, 2e, P3, P3+e, P4, C3, P5,
        // C3+e, C4, C5, P4 is counted once... enumerate and trust the sum.
        assert_eq!(reps.len(), 12);
    }

    #[test]
    fn p2_enumeration() {
        let entries = enumerate_smoothing_diagrams(1, ClassifyOptions::default()).unwrap();
        assert_eq!(entries.len(), 1);
        let e = &entries[0];
        assert_eq!(e.representative.num_edges(), 3);
        assert_eq!(e.dimension, 1);
        for edge in [(0, 1), (0, 2), (1, 2)] {
            let orders = e.representative.orders_of(edge);
            assert_eq!(orders.values().copied().collect::<Vec<_>>(), vec![2]);
        }
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            enumerate_smoothing_diagrams(4, ClassifyOptions::default()),
            Err(ClassifyError::SizeGuard(4))
        ));
        assert!(matches!(
            enumerate_smoothing_diagrams(0, ClassifyOptions::default()),
            Err(ClassifyError::SizeGuard(0))
        ));
        assert!(matches!(
            single_edge_classes(1),
            Err(ClassifyError::NeedsLargerSpace(1))
        ));
    }

    #[test]
    fn single_edge_classes_p4() {
        let classes = single_edge_classes(2).unwrap();
        assert_eq!(classes.len(), 2);
        for c in &classes {
            assert_eq!(c.dimension, 4);
            assert_eq!(c.representative.num_edges(), 1);
            // The witness has exactly one smoothable edge.
            let d = crate::leaf::smoothing_diagram_of(&c.witness).unwrap();
            assert_eq!(d.num_edges(), 1);
        }
        // One class of each decoration shape.
        let shapes: Vec<usize> = classes
            .iter()
            .map(|c| {
                let e = c.representative.edges().next().unwrap();
                c.representative.orders_of(e).len()
            })
            .collect();
        assert!(shapes.contains(&1) && shapes.contains(&2));
    }

    #[test]
    fn single_edge_classes_p6() {
        let classes = single_edge_classes(3).unwrap();
        assert_eq!(classes.len(), 2);
        for c in &classes {
            assert_eq!(c.representative.num_edges(), 1);
        }
    }

    #[test]
    fn triple_points() {
        let points = triple_points_c4();
        assert_eq!(points.len(), 10);
        let mut orbit_sizes: Vec<usize> = points.iter().map(|p| p.orbit_size).collect();
        orbit_sizes.sort_unstable();
        orbit_sizes.dedup();
        assert_eq!(orbit_sizes, vec![1, 3, 6]);

        // (2,2,2): biresidues (1/3, 1/3, 1/3), label E~6.
        let e6 = points.iter().find(|p| p.orders == (2, 2, 2)).unwrap();
        assert_eq!(e6.label, TripleLabel::E6Tilde);
        assert_eq!(e6.biresidues, (q(1, 3), q(1, 3), q(1, 3)));
        assert_eq!(e6.orbit_size, 1);

        // (1,2,5): biresidues (1/2, 1/3, 1/6), label E~8.
        let e8 = points.iter().find(|p| p.orders == (1, 2, 5)).unwrap();
        assert_eq!(e8.label, TripleLabel::E8Tilde);
        assert_eq!(e8.biresidues, (q(1, 2), q(1, 3), q(1, 6)));
        assert_eq!(e8.orbit_size, 6);

        // Each point's biresidues sum to one.
        for p in &points {
            let sum = p.biresidues.0.clone() + p.biresidues.1.clone() + p.biresidues.2.clone();
            assert_eq!(sum, qi(1));
        }

        // Label counts: 1 + 3 + 6.
        assert_eq!(
            points
                .iter()
                .filter(|p| p.label == TripleLabel::E7Tilde)
                .count(),
            3
        );
    }

    #[test]
    fn two_edge_chain_examples() {
        let ((b1, b2, b3), smoothable) = two_edge_chain_family(1, 1);
        assert_eq!((b1, b2, b3), (qi(2), qi(2), qi(0)));
        assert!(!smoothable);

        let ((b1, b2, b3), smoothable) = two_edge_chain_family(2, 2);
        assert_eq!((b1, b2, b3), (qi(3), qi(3), qi(3)));
        assert!(smoothable);

        let ((b1, b2, b3), smoothable) = two_edge_chain_family(1, 4);
        assert_eq!((b1, b2, b3), (qi(5), qi(2), qi(3)));
        assert!(!smoothable);

        let six: Vec<(u64, u64)> = (0..=10)
            .flat_map(|m| (m..=10).map(move |n| (m, n)))
            .filter(|&(m, n)| two_edge_chain_family(m, n).1)
            .collect();
        assert_eq!(six, vec![(1, 2), (1, 3), (1, 5), (2, 2), (2, 5), (3, 3)]);
    }

    #[test]
    fn chain_records_shape() {
        let records = chain_records(3);
        assert_eq!(records.len(), 10);
        assert_eq!(records[0].label, "T_{inf,1,1}");
        let r22 = records.iter().find(|r| (r.m, r.n) == (2, 2)).unwrap();
        assert!(r22.third_edge_smoothable);
    }
}
