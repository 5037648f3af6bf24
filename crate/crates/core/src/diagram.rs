//! Smoothing diagrams as decorated graphs: a set of edges on the complex's
//! vertices, each carrying nonnegative integer orders at opposite vertices
//! (zero orders are not stored). Provides validation against the proven
//! combinatorial constraints, canonical forms under vertex permutations,
//! chain/cycle decomposition, and DOT rendering.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::complex::{ChernMode, DualComplex};

/// Canonicalization is brute force over all vertex permutations; this guard
/// keeps the factorial in check (10! is the largest tolerated).
pub const CANONICAL_VERTEX_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("diagrams have different vertex counts ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("vertex {0} has valency {1} > 2")]
    ValencyTooHigh(usize, usize),
    #[error("{0} vertices exceed the canonicalization cap {1}")]
    TooManyVertices(usize, usize),
}

/// Combinatorial violations found by [`validate_combinatorial`]; these are
/// data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// An order key does not reference a diagram edge and a valid opposite
    /// vertex of the complex.
    InvalidOrderKey { edge: (usize, usize), vertex: usize },
    /// A vertex meets more than two edges (no 3-horn may be fully
    /// smoothable).
    Valency { vertex: usize, valency: usize },
    /// A cycle of even length.
    EvenCycle(Vec<usize>),
    /// An edge of a cycle carries nonzero order at a vertex outside the
    /// cycle.
    OrderOutsideCycle { edge: (usize, usize), vertex: usize },
    /// Orders of an edge do not sum to two (SumEqualsTwo mode).
    OrderSum { edge: (usize, usize), sum: u64 },
    /// Order pattern is neither (2 at one vertex) nor (1 at two distinct
    /// vertices) (SumEqualsTwo mode).
    OrderPattern { edge: (usize, usize) },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothingDiagram {
    num_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
    orders: BTreeMap<((usize, usize), usize), u64>,
}

/// Lexicographically minimal encoding over all vertex relabelings, plus the
/// size of the S_n orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub encoding: Vec<u8>,
    pub orbit_size: usize,
}

impl SmoothingDiagram {
    pub fn empty(num_vertices: usize) -> Self {
        SmoothingDiagram {
            num_vertices,
            edges: BTreeSet::new(),
            orders: BTreeMap::new(),
        }
    }

    /// Adds an edge with its nonzero orders.
    pub fn insert_edge(&mut self, edge: (usize, usize), orders: BTreeMap<usize, u64>) {
        let e = normalize(edge);
        assert!(e.1 < self.num_vertices, "edge vertex out of range");
        self.edges.insert(e);
        for (k, m) in orders {
            assert!(k != e.0 && k != e.1, "order vertex must be opposite");
            if m > 0 {
                self.orders.insert((e, k), m);
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, edge: (usize, usize)) -> bool {
        self.edges.contains(&normalize(edge))
    }

    /// The stored order of (edge, opposite vertex); zero when absent.
    pub fn order(&self, edge: (usize, usize), k: usize) -> u64 {
        *self.orders.get(&(normalize(edge), k)).unwrap_or(&0)
    }

    /// Nonzero orders of an edge.
    pub fn orders_of(&self, edge: (usize, usize)) -> BTreeMap<usize, u64> {
        let e = normalize(edge);
        self.orders
            .range((e, 0)..=(e, usize::MAX))
            .map(|(&(_, k), &m)| (k, m))
            .collect()
    }

    /// The diagram with one edge (and its orders) removed.
    pub fn without_edge(&self, edge: (usize, usize)) -> Self {
        let e = normalize(edge);
        let mut out = self.clone();
        out.edges.remove(&e);
        out.orders.retain(|&(ee, _), _| ee != e);
        out
    }

    pub fn valency(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| i == v || j == v)
            .count()
    }

    /// Relabels vertices by a permutation in image form.
    pub fn apply_perm(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.num_vertices);
        let mut out = Self::empty(self.num_vertices);
        for &(i, j) in &self.edges {
            out.edges.insert(normalize((perm[i], perm[j])));
        }
        for (&((i, j), k), &m) in &self.orders {
            out.orders
                .insert((normalize((perm[i], perm[j])), perm[k]), m);
        }
        out
    }

    /// Deterministic byte serialization (vertex count, then edges with their
    /// sorted order lists).
    pub fn encode(&self) -> Vec<u8> {
        assert!(self.num_vertices < 256, "encoding uses one byte per vertex");
        let mut out = vec![self.num_vertices as u8, self.edges.len() as u8];
        for &(i, j) in &self.edges {
            out.push(i as u8);
            out.push(j as u8);
            let orders = self.orders_of((i, j));
            out.push(orders.len() as u8);
            for (k, m) in orders {
                out.push(k as u8);
                out.extend_from_slice(&(m as u32).to_be_bytes());
            }
        }
        out
    }

    /// Minimum encoding over all vertex permutations, with the orbit size
    /// (orbit_size * |Aut| = n!).
    pub fn canonical_form(&self) -> Result<CanonicalForm, DiagramError> {
        Ok(self.canonicalize()?.0)
    }

    /// Canonical form together with the relabeled representative realizing
    /// it.
    pub fn canonicalize(&self) -> Result<(CanonicalForm, SmoothingDiagram), DiagramError> {
        let n = self.num_vertices;
        if n > CANONICAL_VERTEX_CAP {
            return Err(DiagramError::TooManyVertices(n, CANONICAL_VERTEX_CAP));
        }
        let mut best: Option<(Vec<u8>, SmoothingDiagram)> = None;
        let mut aut = 0usize;
        for perm in (0..n).permutations(n) {
            let relabeled = self.apply_perm(&perm);
            let enc = relabeled.encode();
            match &mut best {
                Some((b, _)) if *b < enc => {}
                Some((b, _)) if *b == enc => aut += 1,
                _ => {
                    best = Some((enc, relabeled));
                    aut = 1;
                }
            }
        }
        let (encoding, representative) = best.expect("at least the identity permutation");
        let orbit_size = factorial(n) / aut;
        Ok((
            CanonicalForm {
                encoding,
                orbit_size,
            },
            representative,
        ))
    }

    /// Connected components split into open chains and cycles, vertices in
    /// traversal order. Requires valency at most two.
    pub fn decompose(&self) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>), DiagramError> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.num_vertices];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for v in 0..self.num_vertices {
            adj[v].sort_unstable();
            if adj[v].len() > 2 {
                return Err(DiagramError::ValencyTooHigh(v, adj[v].len()));
            }
        }
        let mut visited = vec![false; self.num_vertices];
        let mut chains = Vec::new();
        let mut cycles = Vec::new();
        // Chains start at degree-one vertices, smallest endpoint first.
        for start in 0..self.num_vertices {
            if visited[start] || adj[start].len() != 1 {
                continue;
            }
            let mut path = vec![start];
            visited[start] = true;
            let mut prev = start;
            let mut cur = adj[start][0];
            loop {
                visited[cur] = true;
                path.push(cur);
                let next = adj[cur].iter().copied().find(|&x| x != prev);
                match next {
                    Some(nx) if !visited[nx] => {
                        prev = cur;
                        cur = nx;
                    }
                    _ => break,
                }
            }
            chains.push(path);
        }
        // Remaining unvisited degree-two vertices lie on cycles.
        for start in 0..self.num_vertices {
            if visited[start] || adj[start].len() != 2 {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut prev = start;
            let mut cur = adj[start][0];
            while cur != start {
                visited[cur] = true;
                cycle.push(cur);
                let next = adj[cur]
                    .iter()
                    .copied()
                    .find(|&x| x != prev)
                    .expect("cycle vertices have two neighbours");
                prev = cur;
                cur = next;
            }
            cycles.push(cycle);
        }
        Ok((chains, cycles))
    }

    /// Graphviz rendering: every complex vertex as a node, diagram edges
    /// highlighted with their orders as labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph smoothing_diagram {\n");
        for v in 0..self.num_vertices {
            out.push_str(&format!("  v{v};\n"));
        }
        for &(i, j) in &self.edges {
            let orders = self.orders_of((i, j));
            let label = orders
                .iter()
                .map(|(k, m)| format!("{m}@v{k}"))
                .collect::<Vec<_>>()
                .join(",");
            if label.is_empty() {
                out.push_str(&format!("  v{i} -- v{j} [style=bold, color=blue];\n"));
            } else {
                out.push_str(&format!(
                    "  v{i} -- v{j} [style=bold, color=blue, label=\"m={label}\"];\n"
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn normalize(edge: (usize, usize)) -> (usize, usize) {
    assert_ne!(edge.0, edge.1, "an edge needs two distinct vertices");
    (edge.0.min(edge.1), edge.0.max(edge.1))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Isomorphism of diagrams under the vertex relabeling action.
pub fn are_isomorphic(a: &SmoothingDiagram, b: &SmoothingDiagram) -> Result<bool, DiagramError> {
    if a.num_vertices != b.num_vertices {
        return Err(DiagramError::SizeMismatch(a.num_vertices, b.num_vertices));
    }
    Ok(a.canonical_form()?.encoding == b.canonical_form()?.encoding)
}

/// Checks the necessary combinatorial conditions for a smoothing diagram on
/// the given complex: valency at most two, no even cycles, nonzero cycle
/// orders confined to the cycle, and (in SumEqualsTwo mode) per-edge order
/// sums equal to two with the (2) or (1,1) pattern. Violations are returned
/// as data; an empty list means all checks pass.
pub fn validate_combinatorial(d: &SmoothingDiagram, complex: &DualComplex) -> Vec<Violation> {
    let mut out = Vec::new();
    debug_assert!(d.num_vertices() <= complex.num_vertices());

    for (&((i, j), k), _) in &d.orders {
        if !complex.is_order_triangle(i, j, k) {
            out.push(Violation::InvalidOrderKey {
                edge: (i, j),
                vertex: k,
            });
        }
    }

    let mut valency_ok = true;
    for v in 0..d.num_vertices {
        let val = d.valency(v);
        if val > 2 {
            out.push(Violation::Valency {
                vertex: v,
                valency: val,
            });
            valency_ok = false;
        }
    }

    if valency_ok {
        let (_, cycles) = d.decompose().expect("valency checked");
        for cycle in cycles {
            if cycle.len() % 2 == 0 {
                out.push(Violation::EvenCycle(cycle.clone()));
            }
            let in_cycle: BTreeSet<usize> = cycle.iter().copied().collect();
            for w in cycle.windows(2) {
                check_cycle_orders(d, (w[0], w[1]), &in_cycle, &mut out);
            }
            check_cycle_orders(d, (cycle[cycle.len() - 1], cycle[0]), &in_cycle, &mut out);
        }
    }

    if complex.chern_mode == ChernMode::SumEqualsTwo {
        for (i, j) in d.edges() {
            let orders = d.orders_of((i, j));
            let sum: u64 = orders.values().sum();
            if sum != 2 {
                out.push(Violation::OrderSum { edge: (i, j), sum });
            }
            let pattern_ok = match orders.len() {
                1 => orders.values().next() == Some(&2),
                2 => orders.values().all(|&m| m == 1),
                _ => false,
            };
            if !pattern_ok {
                out.push(Violation::OrderPattern { edge: (i, j) });
            }
        }
    }
    out
}

fn check_cycle_orders(
    d: &SmoothingDiagram,
    edge: (usize, usize),
    in_cycle: &BTreeSet<usize>,
    out: &mut Vec<Violation>,
) {
    for (k, _) in d.orders_of(edge) {
        if !in_cycle.contains(&k) {
            out.push(Violation::OrderOutsideCycle {
                edge: normalize(edge),
                vertex: k,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(n: usize, edges: &[((usize, usize), &[(usize, u64)])]) -> SmoothingDiagram {
        let mut d = SmoothingDiagram::empty(n);
        for &(e, orders) in edges {
            d.insert_edge(e, orders.iter().copied().collect());
        }
        d
    }

    fn pentagon_order2() -> SmoothingDiagram {
        diagram(
            5,
            &[
                ((0, 1), &[(3, 2)]),
                ((1, 2), &[(4, 2)]),
                ((2, 3), &[(0, 2)]),
                ((3, 4), &[(1, 2)]),
                ((0, 4), &[(2, 2)]),
            ],
        )
    }

    fn pentagon_order11() -> SmoothingDiagram {
        diagram(
            5,
            &[
                ((0, 1), &[(2, 1), (4, 1)]),
                ((1, 2), &[(3, 1), (0, 1)]),
                ((2, 3), &[(4, 1), (1, 1)]),
                ((3, 4), &[(0, 1), (2, 1)]),
                ((0, 4), &[(1, 1), (3, 1)]),
            ],
        )
    }

    #[test]
    fn validate_examples() {
        let p4 = DualComplex::projective_space(2);

        // Two disjoint edges, each order 2 at a shared outside vertex.
        let d = diagram(5, &[((0, 4), &[(1, 2)]), ((2, 3), &[(1, 2)])]);
        assert!(validate_combinatorial(&d, &p4).is_empty());

        // 3-star.
        let d = diagram(
            5,
            &[((0, 1), &[(4, 2)]), ((0, 2), &[(4, 2)]), ((0, 3), &[(4, 2)])],
        );
        assert!(validate_combinatorial(&d, &p4).iter().any(|v| matches!(
            v,
            Violation::Valency {
                vertex: 0,
                valency: 3
            }
        )));

        // 4-cycle on P^6's complex.
        let p6 = DualComplex::projective_space(3);
        let d = diagram(
            7,
            &[
                ((0, 1), &[(2, 2)]),
                ((1, 2), &[(3, 2)]),
                ((2, 3), &[(0, 2)]),
                ((0, 3), &[(1, 2)]),
            ],
        );
        assert!(validate_combinatorial(&d, &p6)
            .iter()
            .any(|v| matches!(v, Violation::EvenCycle(_))));

        // Pentagon with nonzero orders inside the cycle passes.
        assert!(validate_combinatorial(&pentagon_order2(), &p4).is_empty());
        assert!(validate_combinatorial(&pentagon_order11(), &p4).is_empty());

        // Order outside a cycle: a triangle in P^6 with a stray order.
        let d = diagram(
            7,
            &[
                ((0, 1), &[(5, 2)]),
                ((1, 2), &[(0, 2)]),
                ((0, 2), &[(1, 2)]),
            ],
        );
        assert!(validate_combinatorial(&d, &p6)
            .iter()
            .any(|v| matches!(v, Violation::OrderOutsideCycle { vertex: 5, .. })));

        // Order sum / pattern violations in SumEqualsTwo mode.
        let d = diagram(5, &[((0, 1), &[(2, 3)])]);
        let viol = validate_combinatorial(&d, &p4);
        assert!(viol
            .iter()
            .any(|v| matches!(v, Violation::OrderSum { sum: 3, .. })));
        assert!(viol
            .iter()
            .any(|v| matches!(v, Violation::OrderPattern { .. })));

        // Germ mode: arbitrary orders are fine (tilde-E8 pattern).
        let germ = DualComplex::affine_germ(3);
        let d = diagram(
            3,
            &[
                ((1, 2), &[(0, 1)]),
                ((0, 2), &[(1, 2)]),
                ((0, 1), &[(2, 5)]),
            ],
        );
        assert!(validate_combinatorial(&d, &germ).is_empty());
    }

    #[test]
    fn canonical_form_examples() {
        // Single edge {3,4} order 2 at 1 is isomorphic to {0,1} order 2
        // at 2.
        let a = diagram(5, &[((3, 4), &[(1, 2)])]);
        let b = diagram(5, &[((0, 1), &[(2, 2)])]);
        assert!(are_isomorphic(&a, &b).unwrap());

        // Empty diagram: fixed sentinel, orbit size 1.
        let e = SmoothingDiagram::empty(5);
        let cf = e.canonical_form().unwrap();
        assert_eq!(cf.encoding, vec![5, 0]);
        assert_eq!(cf.orbit_size, 1);

        // The two D5-symmetric pentagons are not isomorphic.
        assert!(!are_isomorphic(&pentagon_order2(), &pentagon_order11()).unwrap());
        // Both have automorphism group D5 (order 10): orbit = 120/10 = 12.
        assert_eq!(pentagon_order2().canonical_form().unwrap().orbit_size, 12);
        assert_eq!(pentagon_order11().canonical_form().unwrap().orbit_size, 12);
    }

    #[test]
    fn isomorphism_examples() {
        let a = diagram(5, &[((1, 3), &[(0, 1), (4, 1)]), ((0, 2), &[(4, 2)])]);
        let perm = [3, 0, 4, 2, 1];
        assert!(are_isomorphic(&a, &a.apply_perm(&perm)).unwrap());

        // Order-(2) vs order-(1,1) single edges differ.
        let two = diagram(5, &[((3, 4), &[(1, 2)])]);
        let oneone = diagram(5, &[((3, 4), &[(0, 1), (2, 1)])]);
        assert!(!are_isomorphic(&two, &oneone).unwrap());

        // Empty vs single edge differ.
        assert!(!are_isomorphic(&SmoothingDiagram::empty(5), &two).unwrap());

        // Size mismatch is an error.
        assert!(matches!(
            are_isomorphic(&SmoothingDiagram::empty(4), &SmoothingDiagram::empty(5)),
            Err(DiagramError::SizeMismatch(4, 5))
        ));
    }

    #[test]
    fn decompose_examples() {
        let (chains, cycles) = pentagon_order2().decompose().unwrap();
        assert!(chains.is_empty());
        assert_eq!(cycles, vec![vec![0, 1, 2, 3, 4]]);

        let d = diagram(5, &[((0, 4), &[]), ((2, 3), &[])]);
        let (chains, cycles) = d.decompose().unwrap();
        assert_eq!(chains, vec![vec![0, 4], vec![2, 3]]);
        assert!(cycles.is_empty());

        let d = diagram(5, &[((1, 2), &[]), ((2, 3), &[]), ((3, 4), &[])]);
        let (chains, cycles) = d.decompose().unwrap();
        assert_eq!(chains, vec![vec![1, 2, 3, 4]]);
        assert!(cycles.is_empty());

        let star = diagram(5, &[((0, 1), &[]), ((0, 2), &[]), ((0, 3), &[])]);
        assert!(matches!(
            star.decompose(),
            Err(DiagramError::ValencyTooHigh(0, 3))
        ));
    }

    #[test]
    fn dot_examples() {
        let e = SmoothingDiagram::empty(3);
        let dot = e.to_dot();
        assert!(dot.contains("v0;") && dot.contains("v2;"));
        assert!(!dot.contains("--"));

        let d = diagram(5, &[((3, 4), &[(2, 2)])]);
        assert!(d.to_dot().contains("v3 -- v4"));
        assert!(d.to_dot().contains("m=2@v2"));

        let p = pentagon_order2();
        assert_eq!(p.to_dot().matches("--").count(), 5);
    }

    #[test]
    fn decompose_edge_partition() {
        let d = diagram(
            7,
            &[
                ((0, 1), &[]),
                ((1, 2), &[]),
                ((3, 4), &[]),
                ((4, 5), &[]),
                ((3, 5), &[]),
            ],
        );
        let (chains, cycles) = d.decompose().unwrap();
        let chain_edges: usize = chains.iter().map(|c| c.len() - 1).sum();
        let cycle_edges: usize = cycles.iter().map(Vec::len).sum();
        assert_eq!(chain_edges + cycle_edges, d.num_edges());
    }

    #[test]
    fn size_guard() {
        let d = SmoothingDiagram::empty(11);
        assert!(matches!(
            d.canonical_form(),
            Err(DiagramError::TooManyVertices(11, 10))
        ));
    }
}
