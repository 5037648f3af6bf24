//! Pointwise criteria on a class: characteristic leaves, holonomicity,
//! determinant-connection residues, resonance, smoothable edges, and the
//! smoothing diagram cut out by a class.
//!
//! All tests reduce to exact linear algebra on principal submatrices of the
//! biresidue matrix. The monodromy condition for smoothability is never
//! computed from periods: complexes carry a `simply_connected_strata` flag
//! under which the nondegeneracy and integrality conditions already imply
//! it, and other complexes are rejected.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::complex::{ChernMode, ComplexError, ComplexKind, LogClass};
use crate::diagram::SmoothingDiagram;
use crate::matrix::MatrixError;
use crate::rational::{is_negative_integer, is_nonneg_integer, to_u64};
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeafError {
    #[error("{0:?} is not a face of the complex")]
    NotAFace(Vec<usize>),
    #[error("triangle {0:?} does not carry an order for this edge")]
    NotATriangle(Vec<usize>),
    #[error("edge ({0}, {1}) has zero biresidue")]
    ZeroBiresidue(usize, usize),
    #[error("biresidue form along {0:?} is degenerate")]
    DegenerateStratum(Vec<usize>),
    #[error("complex does not support this operation: {0}")]
    UnsupportedComplex(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Per-edge data for reports: the biresidue, the order at every opposite
/// vertex, and the derived flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrderReport {
    pub edge: (usize, usize),
    pub biresidue: Q,
    pub orders: BTreeMap<usize, Q>,
    pub resonant: bool,
    pub smoothable: bool,
}

/// Whether the stratum of a face carries characteristic symplectic leaves:
/// the all-ones vector lies in the image of the biresidue form. The empty
/// simplex (the open stratum) is always characteristic.
pub fn is_characteristic(class: &LogClass, simplex: &[usize]) -> Result<bool, LeafError> {
    let b = class.biresidue(simplex)?;
    if simplex.is_empty() {
        return Ok(true);
    }
    let ones = vec![Q::from_integer(1.into()); simplex.len()];
    Ok(b.in_column_space(&ones)?)
}

/// Holonomicity: no face of odd cardinality may have the all-ones vector in
/// the image of its biresidue form. Returns the sorted list of violators.
pub fn is_holonomic(class: &LogClass) -> (bool, Vec<Vec<usize>>) {
    let mut violators: Vec<Vec<usize>> = Vec::new();
    for face in class.complex.faces() {
        if face.len() % 2 == 0 {
            continue;
        }
        if is_characteristic(class, face).expect("faces of the class's own complex") {
            violators.push(face.clone());
        }
    }
    violators.sort_by_key(|f| (f.len(), f.clone()));
    (violators.is_empty(), violators)
}

/// All characteristic faces, sorted by (size, lexicographic).
pub fn characteristic_census(class: &LogClass) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = class
        .complex
        .faces()
        .filter(|f| is_characteristic(class, f).expect("faces of the class's own complex"))
        .cloned()
        .collect();
    out.sort_by_key(|f| (f.len(), f.clone()));
    out
}

fn require_edge(class: &LogClass, i: usize, j: usize) -> Result<(), LeafError> {
    let edge = if i < j { vec![i, j] } else { vec![j, i] };
    if i == j || !class.complex.is_face(&edge) {
        return Err(LeafError::NotAFace(edge));
    }
    Ok(())
}

/// The order of the pair (edge, triangle): (B_jk + B_ki) / B_ij for the
/// triangle {i, j, k}. Swapping i and j negates numerator and denominator,
/// so the result is orientation-invariant.
pub fn edge_order(class: &LogClass, edge: (usize, usize), k: usize) -> Result<Q, LeafError> {
    let (i, j) = edge;
    require_edge(class, i, j)?;
    if !class.complex.is_order_triangle(i.min(j), i.max(j), k) {
        let mut t = vec![i, j, k];
        t.sort_unstable();
        return Err(LeafError::NotATriangle(t));
    }
    let b = class.entry(i, j);
    if num_traits::Zero::is_zero(&b) {
        return Err(LeafError::ZeroBiresidue(i.min(j), i.max(j)));
    }
    Ok((class.entry(j, k) + class.entry(k, i)) / b)
}

/// Residue data of the flat connection on the normal bundle of the stratum
/// of `simplex`, along the boundary component toward `k`: the vector
/// B^{-1} A and the determinant residue (1,...,1) B^{-1} A, where A is the
/// column (B_{ik})_{i in simplex}.
pub fn residue_vector(
    class: &LogClass,
    simplex: &[usize],
    k: usize,
) -> Result<(Vec<Q>, Q), LeafError> {
    let mut bigger = simplex.to_vec();
    bigger.push(k);
    bigger.sort_unstable();
    bigger.dedup();
    if bigger.len() != simplex.len() + 1 || !class.complex.is_face(&bigger) {
        return Err(LeafError::NotAFace(bigger));
    }
    let b = class.biresidue(simplex)?;
    let inv = b
        .inverse()
        .map_err(|_| LeafError::DegenerateStratum(simplex.to_vec()))?;
    let a: Vec<Q> = simplex.iter().map(|&i| class.entry(i, k)).collect();
    let vec = inv.mul_vec(&a);
    let det_residue: Q = vec.iter().cloned().sum();
    Ok((vec, det_residue))
}

/// An edge is resonant when the determinant residue along some incident
/// triangle is a positive integer, i.e. some order is a negative integer.
pub fn is_edge_resonant(class: &LogClass, edge: (usize, usize)) -> Result<bool, LeafError> {
    let (i, j) = (edge.0.min(edge.1), edge.0.max(edge.1));
    require_edge(class, i, j)?;
    if num_traits::Zero::is_zero(&class.entry(i, j)) {
        return Err(LeafError::ZeroBiresidue(i, j));
    }
    for k in class.complex.opposite_vertices(i, j) {
        if is_negative_integer(&edge_order(class, (i, j), k)?) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn require_smoothability_support(class: &LogClass) -> Result<(), LeafError> {
    if !class.complex.simply_connected_strata {
        return Err(LeafError::UnsupportedComplex(
            "monodromy is unknown: complex is not flagged simply_connected_strata".into(),
        ));
    }
    if class.complex.chern_mode == ChernMode::Unsupported {
        return Err(LeafError::UnsupportedComplex(
            "no Chern-class data for this complex".into(),
        ));
    }
    Ok(())
}

/// Smoothability of an edge: nonzero biresidue, every incident order a
/// nonnegative integer, and (in SumEqualsTwo mode) orders summing to two.
pub fn is_edge_smoothable(class: &LogClass, edge: (usize, usize)) -> Result<bool, LeafError> {
    require_smoothability_support(class)?;
    let (i, j) = (edge.0.min(edge.1), edge.0.max(edge.1));
    require_edge(class, i, j)?;
    if num_traits::Zero::is_zero(&class.entry(i, j)) {
        return Ok(false);
    }
    let mut total = Q::from_integer(0.into());
    for k in class.complex.opposite_vertices(i, j) {
        let m = edge_order(class, (i, j), k)?;
        if !is_nonneg_integer(&m) {
            return Ok(false);
        }
        total += m;
    }
    match class.complex.chern_mode {
        ChernMode::SumEqualsTwo => Ok(total == Q::from_integer(2.into())),
        ChernMode::Vacuous => Ok(true),
        ChernMode::Unsupported => unreachable!("rejected above"),
    }
}

/// The smoothing diagram of a class: all smoothable edges with their order
/// maps (zero orders omitted).
pub fn smoothing_diagram_of(class: &LogClass) -> Result<SmoothingDiagram, LeafError> {
    require_smoothability_support(class)?;
    let mut diagram = SmoothingDiagram::empty(class.complex.num_vertices());
    for (i, j) in class.complex.edges() {
        if !is_edge_smoothable(class, (i, j))? {
            continue;
        }
        let mut orders = BTreeMap::new();
        for k in class.complex.opposite_vertices(i, j) {
            let m = edge_order(class, (i, j), k)?;
            if let Some(m) = to_u64(&m) {
                if m > 0 {
                    orders.insert(k, m);
                }
            }
        }
        diagram.insert_edge((i, j), orders);
    }
    Ok(diagram)
}

/// Per-edge report rows for every edge of the complex, in sorted order.
/// Edges with zero biresidue get an empty order map and false flags.
pub fn edge_reports(class: &LogClass) -> Result<Vec<EdgeOrderReport>, LeafError> {
    let smoothability_supported = require_smoothability_support(class).is_ok();
    let mut out = Vec::new();
    for (i, j) in class.complex.edges() {
        let biresidue = class.entry(i, j);
        if num_traits::Zero::is_zero(&biresidue) {
            out.push(EdgeOrderReport {
                edge: (i, j),
                biresidue,
                orders: BTreeMap::new(),
                resonant: false,
                smoothable: false,
            });
            continue;
        }
        let mut orders = BTreeMap::new();
        for k in class.complex.opposite_vertices(i, j) {
            orders.insert(k, edge_order(class, (i, j), k)?);
        }
        out.push(EdgeOrderReport {
            edge: (i, j),
            biresidue,
            resonant: is_edge_resonant(class, (i, j))?,
            smoothable: smoothability_supported && is_edge_smoothable(class, (i, j))?,
            orders,
        });
    }
    Ok(out)
}

/// Full analysis of a class, the payload of the `analyze` command.
#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub nondegenerate: bool,
    pub holonomic: bool,
    pub violating_simplices: Vec<Vec<usize>>,
    pub characteristic: Vec<Vec<usize>>,
    pub edges: Vec<EdgeOrderReport>,
    pub diagram: Option<SmoothingDiagram>,
}

/// Assembles the analyze report. `chart_vertex` selects the chart used for
/// the projective nondegeneracy test (the verdict is chart-independent).
pub fn analyze(class: &LogClass, chart_vertex: usize) -> Result<AnalyzeReport, LeafError> {
    let nondegenerate = match class.complex.kind() {
        ComplexKind::ProjectiveSpace(_) => {
            crate::complex::is_nondegenerate_at(class, chart_vertex)?
        }
        // For non-projective complexes the class matrix itself is the only
        // available form; an odd-size skew form is always degenerate.
        _ => {
            class.matrix().rows() % 2 == 0
                && !num_traits::Zero::is_zero(&class.matrix().pfaffian()?)
        }
    };
    let (holonomic, violating_simplices) = is_holonomic(class);
    let diagram = match smoothing_diagram_of(class) {
        Ok(d) => Some(d),
        Err(LeafError::UnsupportedComplex(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AnalyzeReport {
        nondegenerate,
        holonomic,
        violating_simplices,
        characteristic: characteristic_census(class),
        edges: edge_reports(class)?,
        diagram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{chart_to_full, cyclic_triangle_class_i, DualComplex};
    use crate::matrix::skew_from_upper;
    use crate::rational::{q, qi};
    use crate::QMatrix;

    fn block_chart_class() -> LogClass {
        // diag([[0,1],[-1,0]], [[0,2],[-2,0]]) lifted to P^4.
        let chart = skew_from_upper(4, &[qi(1), qi(0), qi(0), qi(0), qi(0), qi(2)]);
        chart_to_full(&chart).unwrap()
    }

    #[test]
    fn characteristic_examples() {
        let germ = cyclic_triangle_class_i(1, 2, 1);
        assert!(is_characteristic(&germ, &[]).unwrap());
        // Edge with nonzero biresidue is characteristic.
        assert!(is_characteristic(&germ, &[0, 1]).unwrap());
        // Matrix entries B01=1, B02=2, B12=1 mean cyclic (1, -2, 1): the
        // cyclic sum B12 - B02 + B01 vanishes, so the triple stratum is
        // characteristic.
        let germ = cyclic_triangle_class_i(1, -2, 1);
        assert_eq!(germ.entry(0, 1), qi(1));
        assert_eq!(germ.entry(0, 2), qi(2));
        assert_eq!(germ.entry(1, 2), qi(1));
        assert!(is_characteristic(&germ, &[0, 1, 2]).unwrap());
        // Singletons are never characteristic.
        for v in 0..3 {
            assert!(!is_characteristic(&germ, &[v]).unwrap());
        }
        // Nonzero cyclic sum: the triple is not characteristic.
        let germ = cyclic_triangle_class_i(1, 1, 1);
        assert!(!is_characteristic(&germ, &[0, 1, 2]).unwrap());
    }

    #[test]
    fn holonomic_examples() {
        let (ok, viol) = is_holonomic(&cyclic_triangle_class_i(1, 1, 1));
        assert!(ok);
        assert!(viol.is_empty());

        let (ok, viol) = is_holonomic(&cyclic_triangle_class_i(1, 1, -2));
        assert!(!ok);
        assert_eq!(viol, vec![vec![0, 1, 2]]);

        // Zero class: every odd biresidue form is zero and (1,...,1) is
        // never in the zero image.
        let zero = LogClass::new(DualComplex::affine_germ(3), QMatrix::zeros(3, 3)).unwrap();
        let (ok, viol) = is_holonomic(&zero);
        assert!(ok);
        assert!(viol.is_empty());
    }

    #[test]
    fn edge_order_examples() {
        // Cyclic (1,1,1): every edge has order 2 at its opposite vertex.
        let germ = cyclic_triangle_class_i(1, 1, 1);
        for (edge, k) in [((1, 2), 0), ((0, 2), 1), ((0, 1), 2)] {
            assert_eq!(edge_order(&germ, edge, k).unwrap(), qi(2));
        }

        // Cyclic (3,2,1): orders 1, 2, 5 at the edges with biresidues
        // 3, 2, 1 respectively.
        let germ = cyclic_triangle_class_i(3, 2, 1);
        assert_eq!(edge_order(&germ, (1, 2), 0).unwrap(), qi(1));
        assert_eq!(edge_order(&germ, (0, 2), 1).unwrap(), qi(2));
        assert_eq!(edge_order(&germ, (0, 1), 2).unwrap(), qi(5));

        // Numerator zero gives order zero.
        let germ = cyclic_triangle_class_i(1, 1, -1);
        assert_eq!(edge_order(&germ, (0, 2), 1).unwrap(), qi(0));

        // Zero biresidue is an error in the scalar operation.
        let germ = cyclic_triangle_class_i(0, 1, 1);
        assert!(matches!(
            edge_order(&germ, (1, 2), 0),
            Err(LeafError::ZeroBiresidue(1, 2))
        ));
    }

    #[test]
    fn edge_order_orientation_invariance() {
        let germ = cyclic_triangle_class_i(3, 2, 1);
        assert_eq!(
            edge_order(&germ, (1, 2), 0).unwrap(),
            edge_order(&germ, (2, 1), 0).unwrap()
        );
    }

    #[test]
    fn residue_vector_examples() {
        // For edges, the determinant residue is minus the order.
        let germ = cyclic_triangle_class_i(1, 1, 1);
        let (_, det_res) = residue_vector(&germ, &[1, 2], 0).unwrap();
        assert_eq!(det_res, -edge_order(&germ, (1, 2), 0).unwrap());

        // A = 0 gives (0, 0).
        let class = block_chart_class();
        let (v, r) = residue_vector(&class, &[1, 2], 3).unwrap();
        assert!(v.iter().all(num_traits::Zero::is_zero));
        assert!(num_traits::Zero::is_zero(&r));

        // Germ with entries B01=1, B02=-1, B12=1 is cyclic (1,1,1); the
        // determinant residue along {1,2} toward 0 is -2, minus the order.
        let germ = cyclic_triangle_class_i(1, 1, 1);
        assert_eq!(germ.entry(0, 1), qi(1));
        assert_eq!(germ.entry(0, 2), qi(-1));
        assert_eq!(germ.entry(1, 2), qi(1));
        let (_, det_res) = residue_vector(&germ, &[1, 2], 0).unwrap();
        assert_eq!(det_res, qi(-2));

        // Odd simplices are degenerate.
        assert!(matches!(
            residue_vector(&germ, &[1], 0),
            Err(LeafError::DegenerateStratum(_))
        ));
    }

    #[test]
    fn resonance_examples() {
        // Cyclic (1,1,-1): the edge with biresidue -1 has order
        // (1+1)/(-1) = -2, hence resonant.
        let germ = cyclic_triangle_class_i(1, 1, -1);
        assert!(is_edge_resonant(&germ, (0, 1)).unwrap());
        // Cyclic (1,1,1): all orders 2, not resonant.
        let germ = cyclic_triangle_class_i(1, 1, 1);
        for edge in [(0, 1), (0, 2), (1, 2)] {
            assert!(!is_edge_resonant(&germ, edge).unwrap());
        }
        // Edge with no incident triangle: vacuous.
        let c = DualComplex::custom(3, &[vec![0, 1], vec![2]], true, ChernMode::Vacuous).unwrap();
        let m = skew_from_upper(3, &[qi(1), qi(0), qi(0)]);
        let class = LogClass::new(c, m).unwrap();
        assert!(!is_edge_resonant(&class, (0, 1)).unwrap());
    }

    #[test]
    fn smoothable_examples() {
        // P^2 class: every edge has single opposite order 2.
        let p2 = chart_to_full(&skew_from_upper(2, &[qi(1)])).unwrap();
        assert!(is_edge_smoothable(&p2, (1, 2)).unwrap());

        let class = block_chart_class();
        // Edge {1,3} has zero biresidue.
        assert!(!is_edge_smoothable(&class, (1, 3)).unwrap());
        // Edge {0,3}: order at vertex 1 is (0 - 1)/2 = -1/2.
        assert_eq!(edge_order(&class, (0, 3), 1).unwrap(), q(-1, 2));
        assert!(!is_edge_smoothable(&class, (0, 3)).unwrap());
        // Edge {1,2}: orders (2, 0, 0) at vertices (0, 3, 4).
        assert_eq!(edge_order(&class, (1, 2), 0).unwrap(), qi(2));
        assert_eq!(edge_order(&class, (1, 2), 3).unwrap(), qi(0));
        assert_eq!(edge_order(&class, (1, 2), 4).unwrap(), qi(0));
        assert!(is_edge_smoothable(&class, (1, 2)).unwrap());
    }

    #[test]
    fn smoothing_diagram_examples() {
        let class = block_chart_class();
        let d = smoothing_diagram_of(&class).unwrap();
        let edges: Vec<(usize, usize)> = d.edges().collect();
        assert_eq!(edges, vec![(1, 2), (3, 4)]);
        assert_eq!(d.order((1, 2), 0), 2);
        assert_eq!(d.order((3, 4), 0), 2);
        assert_eq!(d.order((1, 2), 3), 0);

        // Zero class: zero-biresidue edges are skipped, not errors.
        let zero = chart_to_full(&QMatrix::zeros(4, 4)).unwrap();
        let d = smoothing_diagram_of(&zero).unwrap();
        assert_eq!(d.edges().count(), 0);

        // Cyclic (1,1,1) germ: all three edges, order 2 opposite each.
        let germ = cyclic_triangle_class_i(1, 1, 1);
        let d = smoothing_diagram_of(&germ).unwrap();
        assert_eq!(d.edges().count(), 3);
        assert_eq!(d.order((0, 1), 2), 2);
        assert_eq!(d.order((0, 2), 1), 2);
        assert_eq!(d.order((1, 2), 0), 2);
    }

    #[test]
    fn census_examples() {
        let germ = cyclic_triangle_class_i(1, 1, 1);
        assert_eq!(
            characteristic_census(&germ),
            vec![vec![], vec![0, 1], vec![0, 2], vec![1, 2]]
        );

        let zero = LogClass::new(DualComplex::affine_germ(2), QMatrix::zeros(2, 2)).unwrap();
        assert_eq!(characteristic_census(&zero), vec![Vec::<usize>::new()]);

        let germ = cyclic_triangle_class_i(1, 1, -2);
        assert_eq!(
            characteristic_census(&germ),
            vec![vec![], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
    }

    #[test]
    fn unsupported_complex_is_rejected() {
        let c = DualComplex::custom(3, &[vec![0, 1, 2]], false, ChernMode::Vacuous).unwrap();
        let m = skew_from_upper(3, &[qi(1), qi(1), qi(1)]);
        let class = LogClass::new(c, m).unwrap();
        assert!(matches!(
            is_edge_smoothable(&class, (0, 1)),
            Err(LeafError::UnsupportedComplex(_))
        ));
        assert!(matches!(
            smoothing_diagram_of(&class),
            Err(LeafError::UnsupportedComplex(_))
        ));
    }

    #[test]
    fn analyze_report_shape() {
        let germ = cyclic_triangle_class_i(1, 1, 1);
        let report = analyze(&germ, 0).unwrap();
        assert!(report.holonomic);
        assert_eq!(report.diagram.as_ref().unwrap().edges().count(), 3);
        assert_eq!(report.edges.len(), 3);
        // A 3x3 skew matrix is degenerate as a form.
        assert!(!report.nondegenerate);

        let class = block_chart_class();
        let report = analyze(&class, 0).unwrap();
        assert!(report.nondegenerate);
    }
}
