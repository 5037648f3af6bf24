//! Dual complexes of normal crossings divisors and cohomology classes of log
//! symplectic type, stored through their full biresidue matrices.
//!
//! A vertex is an irreducible component of the divisor; a k-subset that is a
//! face corresponds to a codimension-k stratum. Two families are built in:
//! the boundary of a 2n-simplex (projective space P^{2n}, 2n+1 hyperplanes)
//! and the full simplex on d vertices (an affine germ with d coordinate
//! hyperplanes). Arbitrary complexes can be loaded from file but support
//! fewer operations.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::MatrixError;
use crate::rational::qi;
use crate::{Q, QMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("matrix size {got} does not match vertex count {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("row {0} of a projective-space class must sum to zero")]
    RowSumNonzero(usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("{0:?} is not a face of the complex")]
    NotAFace(Vec<usize>),
    #[error("operation requires a projective-space complex")]
    NotProjective,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexKind {
    /// Boundary divisor of P^{2n}: 2n+1 vertices, all subsets of size <= 2n.
    ProjectiveSpace(usize),
    /// Affine germ with d coordinate hyperplanes: the full (d-1)-simplex.
    AffineGerm,
    Custom,
}

/// How first Chern class data constrains the total order of a smoothable
/// edge over its incident triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChernMode {
    /// Orders must sum to exactly two (projective space).
    SumEqualsTwo,
    /// No constraint (contractible strata).
    Vacuous,
    /// Unknown fundamental-class data; smoothability queries are refused.
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualComplex {
    num_vertices: usize,
    faces: BTreeSet<Vec<usize>>,
    kind: ComplexKind,
    pub simply_connected_strata: bool,
    pub chern_mode: ChernMode,
}

/// All subsets of `0..n` of size at most `max_size`, as sorted vectors.
fn subsets_up_to(n: usize, max_size: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if subset.len() <= max_size {
            out.insert(subset);
        }
    }
    out
}

impl DualComplex {
    /// Dual complex of the toric boundary of P^{2n}: the boundary of a
    /// 2n-simplex on 2n+1 vertices.
    pub fn projective_space(n: usize) -> Self {
        assert!(n >= 1, "projective space needs n >= 1");
        let v = 2 * n + 1;
        DualComplex {
            num_vertices: v,
            faces: subsets_up_to(v, 2 * n),
            kind: ComplexKind::ProjectiveSpace(n),
            simply_connected_strata: true,
            chern_mode: ChernMode::SumEqualsTwo,
        }
    }

    /// Dual complex of d coordinate hyperplanes in affine space: the full
    /// simplex on d vertices.
    pub fn affine_germ(d: usize) -> Self {
        assert!(d >= 1, "germ needs at least one divisor component");
        DualComplex {
            num_vertices: d,
            faces: subsets_up_to(d, d),
            kind: ComplexKind::AffineGerm,
            simply_connected_strata: true,
            chern_mode: ChernMode::Vacuous,
        }
    }

    /// Custom complex from facets; faces are closed downward.
    pub fn custom(
        num_vertices: usize,
        facets: &[Vec<usize>],
        simply_connected_strata: bool,
        chern_mode: ChernMode,
    ) -> Result<Self, ComplexError> {
        let mut faces = BTreeSet::new();
        faces.insert(Vec::new());
        for facet in facets {
            let mut f = facet.clone();
            f.sort_unstable();
            f.dedup();
            if f.iter().any(|&v| v >= num_vertices) {
                return Err(ComplexError::BadVertex(*f.iter().max().unwrap()));
            }
            for mask in 0u64..(1u64 << f.len()) {
                let sub: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                faces.insert(sub);
            }
        }
        Ok(DualComplex {
            num_vertices,
            faces,
            kind: ComplexKind::Custom,
            simply_connected_strata,
            chern_mode,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    pub fn is_face(&self, simplex: &[usize]) -> bool {
        debug_assert!(simplex.windows(2).all(|w| w[0] < w[1]));
        self.faces.contains(simplex)
    }

    pub fn faces(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.faces.iter()
    }

    /// Size-2 faces in sorted order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.faces
            .iter()
            .filter(|f| f.len() == 2)
            .map(|f| (f[0], f[1]))
            .collect()
    }

    /// Vertices k that carry an order for the edge {i, j}. For the built-in
    /// projective family this is every other vertex: all 3-subsets are faces
    /// when n >= 2, and for P^2 the unique outside vertex still carries the
    /// (vacuous Chern constraint) order even though the boundary-of-simplex
    /// complex has no 2-faces. Custom complexes use their triangle list.
    pub fn opposite_vertices(&self, i: usize, j: usize) -> Vec<usize> {
        match self.kind {
            ComplexKind::ProjectiveSpace(_) | ComplexKind::AffineGerm => (0..self.num_vertices)
                .filter(|&k| k != i && k != j)
                .collect(),
            ComplexKind::Custom => (0..self.num_vertices)
                .filter(|&k| {
                    if k == i || k == j {
                        return false;
                    }
                    let mut t = vec![i, j, k];
                    t.sort_unstable();
                    self.is_face(&t)
                })
                .collect(),
        }
    }

    /// Whether {i, j, k} is a valid (edge, opposite vertex) triangle for
    /// order bookkeeping.
    pub fn is_order_triangle(&self, i: usize, j: usize, k: usize) -> bool {
        self.opposite_vertices(i, j).contains(&k)
    }
}

/// A degree-two cohomology class on the divisor complement, stored as the
/// full skew matrix of biresidues indexed by pairs of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogClass {
    pub complex: DualComplex,
    matrix: QMatrix,
}

impl LogClass {
    /// Validates skew symmetry, the size, and (for projective space) the
    /// zero-row-sum normalization.
    pub fn new(complex: DualComplex, matrix: QMatrix) -> Result<Self, ComplexError> {
        if matrix.rows() != complex.num_vertices || matrix.cols() != complex.num_vertices {
            return Err(ComplexError::SizeMismatch {
                got: matrix.rows(),
                want: complex.num_vertices,
            });
        }
        if !matrix.is_skew() {
            return Err(ComplexError::NotSkew);
        }
        if matches!(complex.kind, ComplexKind::ProjectiveSpace(_)) {
            for i in 0..matrix.rows() {
                let sum: Q = matrix.row(i).iter().cloned().sum();
                if !num_traits::Zero::is_zero(&sum) {
                    return Err(ComplexError::RowSumNonzero(i));
                }
            }
        }
        Ok(LogClass { complex, matrix })
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    /// Biresidue entry B_ij (antisymmetric in the arguments).
    pub fn entry(&self, i: usize, j: usize) -> Q {
        self.matrix[(i, j)].clone()
    }

    pub fn scale(&self, s: &Q) -> Self {
        LogClass {
            complex: self.complex.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    /// Relabels vertices by a permutation (entry (i,j) moves to
    /// (perm[i], perm[j])). Valid for the symmetric vertex actions of the
    /// built-in families.
    pub fn apply_perm(&self, perm: &[usize]) -> Self {
        LogClass {
            complex: self.complex.clone(),
            matrix: self.matrix.apply_perm(perm),
        }
    }

    /// Principal biresidue submatrix along a face, in ascending vertex order.
    pub fn biresidue(&self, simplex: &[usize]) -> Result<QMatrix, ComplexError> {
        if !self.complex.is_face(simplex) {
            return Err(ComplexError::NotAFace(simplex.to_vec()));
        }
        Ok(self.matrix.principal_submatrix(simplex))
    }
}

/// Extends a skew 2n x 2n chart matrix to the full (2n+1) x (2n+1) class on
/// P^{2n}: expanding the form in dlog(x_i/x_0) coordinates gives
/// B_{0k} = sum_j chart_{kj}, after which every row sums to zero.
pub fn chart_to_full(chart: &QMatrix) -> Result<LogClass, ComplexError> {
    if chart.rows() != chart.cols() {
        return Err(ComplexError::SizeMismatch {
            got: chart.rows(),
            want: chart.cols(),
        });
    }
    if !chart.is_skew() {
        return Err(ComplexError::NotSkew);
    }
    let two_n = chart.rows();
    if two_n == 0 || two_n % 2 != 0 {
        return Err(ComplexError::Matrix(MatrixError::OddSize(two_n)));
    }
    let n = two_n / 2;
    let mut full = QMatrix::zeros(two_n + 1, two_n + 1);
    for i in 0..two_n {
        for j in 0..two_n {
            full[(i + 1, j + 1)] = chart[(i, j)].clone();
        }
    }
    for k in 0..two_n {
        let row_sum: Q = (0..two_n).map(|j| chart[(k, j)].clone()).sum();
        full[(0, k + 1)] = row_sum.clone();
        full[(k + 1, 0)] = -row_sum;
    }
    LogClass::new(DualComplex::projective_space(n), full)
}

/// The 2n x 2n chart submatrix deleting the given vertex.
pub fn full_to_chart(class: &LogClass, deleted_vertex: usize) -> Result<QMatrix, ComplexError> {
    if !matches!(class.complex.kind, ComplexKind::ProjectiveSpace(_)) {
        return Err(ComplexError::NotProjective);
    }
    if deleted_vertex >= class.complex.num_vertices {
        return Err(ComplexError::BadVertex(deleted_vertex));
    }
    Ok(class.matrix.delete_row_col(deleted_vertex))
}

/// Whether a projective-space class is log symplectic: the chart Pfaffian is
/// nonzero (independent of the deleted vertex).
pub fn is_nondegenerate(class: &LogClass) -> Result<bool, ComplexError> {
    is_nondegenerate_at(class, 0)
}

/// Same test in the chart deleting an arbitrary vertex.
pub fn is_nondegenerate_at(class: &LogClass, vertex: usize) -> Result<bool, ComplexError> {
    let chart = full_to_chart(class, vertex)?;
    Ok(!num_traits::Zero::is_zero(&chart.pfaffian()?))
}

/// Builds the affine-germ triangle class with cyclically labelled biresidues
/// (b1, b2, b3): B_{12} = b1, B_{20} = b2, B_{01} = b3.
pub fn cyclic_triangle_class(b1: Q, b2: Q, b3: Q) -> LogClass {
    let mut m = QMatrix::zeros(3, 3);
    let assign = |m: &mut QMatrix, i: usize, j: usize, v: Q| {
        m[(i, j)] = v.clone();
        m[(j, i)] = -v;
    };
    assign(&mut m, 1, 2, b1);
    assign(&mut m, 2, 0, b2);
    assign(&mut m, 0, 1, b3);
    LogClass::new(DualComplex::affine_germ(3), m).expect("cyclic triangle class is valid")
}

/// Integer-entry convenience wrapper for [`cyclic_triangle_class`].
pub fn cyclic_triangle_class_i(b1: i64, b2: i64, b3: i64) -> LogClass {
    cyclic_triangle_class(qi(b1), qi(b2), qi(b3))
}
