//! The linear stratum attached to a decorated smoothing diagram: its
//! defining equations in cohomology coordinates, exact kernel bases,
//! symbolic genericity certificates, and integer witness classes.
//!
//! The ambient space is the zero-row-sum skew matrices for projective space
//! (coordinatized by a chart on vertices 1..2n) and all skew matrices for an
//! affine germ. Genericity is certified symbolically: the chart Pfaffian and
//! the edge biresidue forms are restricted to the solved subspace as
//! polynomials and tested for identical vanishing, never sampled.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::complex::{ChernMode, ComplexError, ComplexKind, DualComplex, LogClass};
use crate::diagram::{DiagramError, SmoothingDiagram};
use crate::leaf::{smoothing_diagram_of, LeafError};
use crate::matrix::MatrixError;
use crate::poly::MPoly;
use crate::rational::{is_nonneg_integer, qi, to_u64};
use crate::{Q, QMatrix, QPoly};

/// Witness search enumerates integer boxes of doubling radius up to this
/// cap; hitting it yields NotAStratum rather than a silent claim.
pub const WITNESS_RADIUS_CAP: i64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("complex not supported by the arrangement: {0}")]
    UnsupportedComplex(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Leaf(#[from] LeafError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Realizability verdict for a decorated diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Realizable,
    /// The restricted chart Pfaffian vanishes identically: no log symplectic
    /// class lies on the subspace.
    EmptyOrDegenerate,
    /// The biresidue of a diagram edge restricts to the zero form.
    EdgeForcedZero((usize, usize)),
    /// A non-diagram edge is smoothable (with the recorded decoration) at
    /// every point of the subspace, so the generic diagram is strictly
    /// larger.
    ExtraSmoothableEdge((usize, usize), BTreeMap<usize, u64>),
    /// The verdict could not be completed (witness search exhausted).
    NotAStratum(String),
}

/// The solved stratum of a decorated diagram.
#[derive(Debug, Clone)]
pub struct Stratum {
    pub diagram: SmoothingDiagram,
    pub subspace_basis: Vec<QMatrix>,
    pub dimension: usize,
    pub witness: Option<LogClass>,
    pub verdict: Verdict,
}

/// Coordinates on the space of classes: one coordinate per vertex pair of a
/// chart (projective space, chart on vertices 1..2n) or per vertex pair
/// (affine germ).
pub struct AmbientSpace {
    complex: DualComplex,
    pairs: Vec<(usize, usize)>,
}

impl AmbientSpace {
    pub fn for_complex(complex: &DualComplex) -> Result<Self, ArrangementError> {
        let pairs = match complex.kind() {
            ComplexKind::ProjectiveSpace(n) => pair_list(1, 2 * n + 1),
            ComplexKind::AffineGerm => pair_list(0, complex.num_vertices()),
            ComplexKind::Custom => {
                return Err(ArrangementError::UnsupportedComplex(
                    "arrangement solving needs a projective-space or affine-germ complex".into(),
                ))
            }
        };
        Ok(AmbientSpace {
            complex: complex.clone(),
            pairs,
        })
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn pair_index(&self, a: usize, b: usize) -> usize {
        self.pairs
            .iter()
            .position(|&p| p == (a.min(b), a.max(b)))
            .expect("valid coordinate pair")
    }

    /// The biresidue entry B_ij as a linear form in ambient coordinates.
    pub fn entry_form(&self, i: usize, j: usize) -> Vec<Q> {
        let mut form = vec![Q::zero(); self.dim()];
        if i == j {
            return form;
        }
        match self.complex.kind() {
            ComplexKind::AffineGerm => {
                let idx = self.pair_index(i, j);
                form[idx] = if i < j { qi(1) } else { qi(-1) };
            }
            ComplexKind::ProjectiveSpace(_) => {
                if i >= 1 && j >= 1 {
                    let idx = self.pair_index(i, j);
                    form[idx] = if i < j { qi(1) } else { qi(-1) };
                } else {
                    // B_{0j} = sum_k chart_{jk}; B_{j0} is its negative.
                    let (j, sign) = if i == 0 { (j, 1) } else { (i, -1) };
                    for k in 1..self.complex.num_vertices() {
                        if k == j {
                            continue;
                        }
                        let idx = self.pair_index(j, k);
                        form[idx] = if j < k { qi(sign) } else { qi(-sign) };
                    }
                }
            }
            ComplexKind::Custom => unreachable!("rejected in constructor"),
        }
        form
    }

    /// The class at a coordinate vector.
    pub fn class_at(&self, coords: &[Q]) -> LogClass {
        assert_eq!(coords.len(), self.dim());
        match self.complex.kind() {
            ComplexKind::AffineGerm => {
                let d = self.complex.num_vertices();
                let mut m = QMatrix::zeros(d, d);
                for (idx, &(a, b)) in self.pairs.iter().enumerate() {
                    m[(a, b)] = coords[idx].clone();
                    m[(b, a)] = -coords[idx].clone();
                }
                LogClass::new(self.complex.clone(), m).expect("skew by construction")
            }
            ComplexKind::ProjectiveSpace(_) => {
                let two_n = self.complex.num_vertices() - 1;
                let mut chart = QMatrix::zeros(two_n, two_n);
                for (idx, &(a, b)) in self.pairs.iter().enumerate() {
                    chart[(a - 1, b - 1)] = coords[idx].clone();
                    chart[(b - 1, a - 1)] = -coords[idx].clone();
                }
                crate::complex::chart_to_full(&chart).expect("skew by construction")
            }
            ComplexKind::Custom => unreachable!(),
        }
    }

    /// Coordinates of a class (inverse of [`Self::class_at`]).
    pub fn coords_of(&self, class: &LogClass) -> Vec<Q> {
        self.pairs
            .iter()
            .map(|&(a, b)| class.entry(a, b))
            .collect()
    }

    /// The full class matrix of a coordinate vector.
    fn basis_matrix(&self, coords: &[Q]) -> QMatrix {
        self.class_at(coords).matrix().clone()
    }

    /// The biresidue entry B_ij restricted to the span of a coordinate
    /// kernel basis.
    pub fn restricted_entry_form(&self, i: usize, j: usize, basis: &[Vec<Q>]) -> Vec<Q> {
        restrict(&self.entry_form(i, j), basis)
    }

    /// The restricted chart Pfaffian certificate (None for affine germs).
    pub fn restricted_chart_pfaffian(
        &self,
        basis: &[Vec<Q>],
    ) -> Result<Option<QPoly>, ArrangementError> {
        restricted_pfaffian(self, basis)
    }
}

fn pair_list(from: usize, to: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for a in from..to {
        for b in a + 1..to {
            pairs.push((a, b));
        }
    }
    pairs
}

/// The linear system cut out by a decorated diagram: one row per (edge of
/// the diagram, opposite vertex), stating B_jk + B_ki - m B_ij = 0 with m
/// the decorated order (zero when absent).
pub fn constraint_matrix(
    d: &SmoothingDiagram,
    complex: &DualComplex,
) -> Result<QMatrix, ArrangementError> {
    let space = AmbientSpace::for_complex(complex)?;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (i, j) in d.edges() {
        for k in complex.opposite_vertices(i, j) {
            let m = qi(d.order((i, j), k) as i64);
            let form_jk = space.entry_form(j, k);
            let form_ki = space.entry_form(k, i);
            let form_ij = space.entry_form(i, j);
            let row: Vec<Q> = (0..space.dim())
                .map(|c| form_jk[c].clone() + form_ki[c].clone() - m.clone() * form_ij[c].clone())
                .collect();
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(QMatrix::zeros(0, space.dim()));
    }
    Ok(QMatrix::from_rows(rows))
}

/// Solves the stratum subspace: kernel basis (as full class matrices) and
/// its dimension.
pub fn solve_stratum(
    d: &SmoothingDiagram,
    complex: &DualComplex,
) -> Result<(Vec<QMatrix>, usize), ArrangementError> {
    let space = AmbientSpace::for_complex(complex)?;
    let coords = solve_stratum_coords(d, complex)?;
    let dim = coords.len();
    Ok((coords.iter().map(|v| space.basis_matrix(v)).collect(), dim))
}

/// Kernel basis of the constraint system in ambient coordinates.
pub fn solve_stratum_coords_public(
    d: &SmoothingDiagram,
    complex: &DualComplex,
) -> Result<Vec<Vec<Q>>, ArrangementError> {
    solve_stratum_coords(d, complex)
}

fn solve_stratum_coords(
    d: &SmoothingDiagram,
    complex: &DualComplex,
) -> Result<Vec<Vec<Q>>, ArrangementError> {
    let cm = constraint_matrix(d, complex)?;
    if cm.rows() == 0 {
        let space = AmbientSpace::for_complex(complex)?;
        // No constraints: the kernel is the whole ambient space.
        return Ok((0..space.dim())
            .map(|i| {
                let mut v = vec![Q::zero(); space.dim()];
                v[i] = qi(1);
                v
            })
            .collect());
    }
    Ok(cm.kernel_basis())
}

/// Restriction of a linear ambient form to the span of `basis`: one
/// coefficient per basis vector.
fn restrict(form: &[Q], basis: &[Vec<Q>]) -> Vec<Q> {
    basis
        .iter()
        .map(|b| {
            form.iter()
                .zip(b)
                .map(|(f, x)| f.clone() * x.clone())
                .fold(Q::zero(), |acc, t| acc + t)
        })
        .collect()
}

/// If `u = c * v` identically with `v != 0`, returns `c`.
fn proportionality(u: &[Q], v: &[Q]) -> Option<Q> {
    let p = v.iter().position(|x| !x.is_zero())?;
    let c = u[p].clone() / v[p].clone();
    for (a, b) in u.iter().zip(v) {
        if *a != c.clone() * b.clone() {
            return None;
        }
    }
    Some(c)
}

/// The chart Pfaffian (projective space) restricted to the span of `basis`,
/// as a polynomial in the basis coordinates. None for affine germs: every
/// skew biresidue matrix there is realized by a log symplectic germ, so no
/// nondegeneracy certificate is required.
fn restricted_pfaffian(
    space: &AmbientSpace,
    basis: &[Vec<Q>],
) -> Result<Option<QPoly>, ArrangementError> {
    let ComplexKind::ProjectiveSpace(n) = space.complex.kind() else {
        return Ok(None);
    };
    let two_n = 2 * n;
    // Chart entry (a,b) (vertices a+1, b+1) as a linear polynomial in the
    // basis coordinates.
    let mut chart: crate::matrix::Matrix<QPoly> = crate::matrix::Matrix::zeros(two_n, two_n);
    for a in 0..two_n {
        for b in 0..two_n {
            if a == b {
                continue;
            }
            let form = space.entry_form(a + 1, b + 1);
            let coeffs = restrict(&form, basis);
            chart[(a, b)] = MPoly::linear(&coeffs);
        }
    }
    Ok(Some(chart.pfaffian_expansion()?))
}

/// Decides realizability of a decorated diagram, with an exact witness on
/// success.
pub fn is_realizable(
    d: &SmoothingDiagram,
    complex: &DualComplex,
) -> Result<Stratum, ArrangementError> {
    if d.num_vertices() != complex.num_vertices() {
        return Err(ArrangementError::InconsistentInput(format!(
            "diagram on {} vertices vs complex on {}",
            d.num_vertices(),
            complex.num_vertices()
        )));
    }
    let space = AmbientSpace::for_complex(complex)?;
    let basis = solve_stratum_coords(d, complex)?;
    let dimension = basis.len();
    let subspace_basis: Vec<QMatrix> = basis.iter().map(|v| space.basis_matrix(v)).collect();
    let stratum = |verdict, witness| Stratum {
        diagram: d.clone(),
        subspace_basis: subspace_basis.clone(),
        dimension,
        witness,
        verdict,
    };

    // (1) Nondegeneracy certificate: the restricted chart Pfaffian must not
    // vanish identically.
    let pf = restricted_pfaffian(&space, &basis)?;
    if let Some(ref pf) = pf {
        if pf.is_zero() {
            return Ok(stratum(Verdict::EmptyOrDegenerate, None));
        }
    }

    // (2) Diagram edges must keep a nonzero biresidue form on the subspace.
    let restricted_entry =
        |i: usize, j: usize| -> Vec<Q> { restrict(&space.entry_form(i, j), &basis) };
    for (i, j) in d.edges() {
        if restricted_entry(i, j).iter().all(Q::is_zero) {
            return Ok(stratum(Verdict::EdgeForcedZero((i, j)), None));
        }
    }

    // (3) A non-diagram edge whose smoothability equations are implied by
    // the diagram's makes the generic diagram strictly larger.
    let diagram_edges: Vec<(usize, usize)> = d.edges().collect();
    for (i, j) in complex.edges() {
        if diagram_edges.contains(&(i, j)) {
            continue;
        }
        let r = restricted_entry(i, j);
        if r.iter().all(Q::is_zero) {
            continue;
        }
        let mut decoration: BTreeMap<usize, u64> = BTreeMap::new();
        let mut forced = true;
        for k in complex.opposite_vertices(i, j) {
            let num = add_forms(&restricted_entry(j, k), &restricted_entry(k, i));
            match proportionality(&num, &r) {
                Some(c) if is_nonneg_integer(&c) => {
                    if let Some(m) = to_u64(&c) {
                        if m > 0 {
                            decoration.insert(k, m);
                        }
                    }
                }
                _ => {
                    forced = false;
                    break;
                }
            }
        }
        if forced {
            if complex.chern_mode == ChernMode::SumEqualsTwo {
                let total: u64 = decoration.values().sum();
                debug_assert_eq!(total, 2, "sum identity on the zero-row-sum space");
            }
            return Ok(stratum(
                Verdict::ExtraSmoothableEdge((i, j), decoration),
                None,
            ));
        }
    }

    // (4) Witness: an integer point of the subspace avoiding the Pfaffian
    // locus, the diagram-edge zero loci, and every fixed extra-edge
    // decoration subspace; re-verified against the diagram.
    let mut avoid: Vec<QPoly> = Vec::new();
    if let Some(pf) = pf {
        avoid.push(pf);
    }
    for (i, j) in d.edges() {
        avoid.push(MPoly::linear(&restricted_entry(i, j)));
    }
    if complex.chern_mode == ChernMode::SumEqualsTwo {
        for (i, j) in complex.edges() {
            if diagram_edges.contains(&(i, j)) {
                continue;
            }
            let r = restricted_entry(i, j);
            if r.iter().all(Q::is_zero) {
                continue;
            }
            let opposite = complex.opposite_vertices(i, j);
            let nums: Vec<Vec<Q>> = opposite
                .iter()
                .map(|&k| add_forms(&restricted_entry(j, k), &restricted_entry(k, i)))
                .collect();
            for pattern in sum_two_patterns(opposite.len()) {
                // Bad subspace: all orders match the pattern; for rational
                // points it is avoided iff the sum of squares of the
                // defining forms is nonzero there.
                let mut sos = QPoly::zero_poly(basis.len());
                for (t, num) in nums.iter().enumerate() {
                    let diff_coeffs: Vec<Q> = num
                        .iter()
                        .zip(&r)
                        .map(|(a, b)| a.clone() - qi(pattern[t] as i64) * b.clone())
                        .collect();
                    let diff = MPoly::linear(&diff_coeffs);
                    sos = sos + diff.clone() * diff;
                }
                if !sos.is_zero() {
                    avoid.push(sos);
                }
            }
        }
    }

    let found = search_witness(&space, &basis, &avoid, |class| {
        smoothing_diagram_of(class).ok().as_ref() == Some(d)
    });
    match found {
        Some(class) => Ok(stratum(Verdict::Realizable, Some(class))),
        None => Ok(stratum(
            Verdict::NotAStratum("witness search exhausted".into()),
            None,
        )),
    }
}

fn add_forms(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

/// All order patterns with total two over `n` slots: 2 in one slot, or 1 in
/// two distinct slots.
fn sum_two_patterns(n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for i in 0..n {
        let mut p = vec![0u64; n];
        p[i] = 2;
        out.push(p);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut p = vec![0u64; n];
            p[i] = 1;
            p[j] = 1;
            out.push(p);
        }
    }
    out
}

/// Integer-coordinate search over the span of `basis` (given as full class
/// matrices) for a point where every avoid-polynomial is nonzero. The
/// polynomials are in the basis coordinates. Enumeration starts with the
/// standard basis vectors and proceeds through integer boxes of doubling
/// radius; each avoid locus is a proper subvariety, so a box of side
/// exceeding the total degree contains a good point.
pub fn find_witness(
    complex: &DualComplex,
    basis: &[QMatrix],
    avoid: &[QPoly],
) -> Result<LogClass, ArrangementError> {
    for p in avoid {
        if p.is_zero() {
            return Err(ArrangementError::InconsistentInput(
                "an avoid-polynomial vanishes identically on the span".into(),
            ));
        }
    }
    let w = basis.len();
    let mut found = None;
    enumerate_coords(w, |coords| {
        if avoid.iter().all(|p| !p.eval(coords).is_zero()) {
            found = Some(coords.to_vec());
            true
        } else {
            false
        }
    });
    let Some(coords) = found else {
        return Err(ArrangementError::InconsistentInput(
            "witness search exhausted".into(),
        ));
    };
    let mut m = QMatrix::zeros(complex.num_vertices(), complex.num_vertices());
    for (c, b) in coords.iter().zip(basis) {
        m = m.add(&b.scale(c));
    }
    Ok(LogClass::new(complex.clone(), m)?)
}

fn search_witness(
    space: &AmbientSpace,
    basis: &[Vec<Q>],
    avoid: &[QPoly],
    extra_check: impl Fn(&LogClass) -> bool,
) -> Option<LogClass> {
    let w = basis.len();
    let mut found = None;
    enumerate_coords(w, |coords| {
        if !avoid.iter().all(|p| !p.eval(coords).is_zero()) {
            return false;
        }
        let mut point = vec![Q::zero(); space.dim()];
        for (c, b) in coords.iter().zip(basis) {
            for (x, y) in point.iter_mut().zip(b) {
                *x += c.clone() * y.clone();
            }
        }
        let class = space.class_at(&point);
        if extra_check(&class) {
            found = Some(class);
            true
        } else {
            false
        }
    });
    found
}

/// Calls `visit` on integer coordinate vectors (as rationals) in a
/// deterministic order: the zero vector is skipped for w > 0, the first
/// candidates are the standard basis vectors, and boxes of radius
/// 1, 2, 4, ... are exhausted in odometer order (first coordinate fastest,
/// values ordered 0, 1, -1, 2, -2, ...). Stops when `visit` returns true or
/// the radius cap is exceeded.
fn enumerate_coords(w: usize, mut visit: impl FnMut(&[Q]) -> bool) {
    if w == 0 {
        visit(&[]);
        return;
    }
    let mut radius: i64 = 1;
    let mut prev: i64 = 0;
    while radius <= WITNESS_RADIUS_CAP {
        let values: Vec<i64> = value_order(radius);
        let mut idx = vec![0usize; w];
        loop {
            let coords: Vec<i64> = idx.iter().map(|&i| values[i]).collect();
            let max_norm = coords.iter().map(|c| c.abs()).max().unwrap();
            if max_norm > prev {
                let point: Vec<Q> = coords.iter().map(|&c| qi(c)).collect();
                if visit(&point) {
                    return;
                }
            }
            // Odometer with the first coordinate fastest.
            let mut pos = 0;
            loop {
                if pos == w {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < values.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == w {
                break;
            }
        }
        prev = radius;
        radius *= 2;
    }
}

/// 0, 1, -1, 2, -2, ..., r, -r.
fn value_order(r: i64) -> Vec<i64> {
    let mut v = vec![0];
    for x in 1..=r {
        v.push(x);
        v.push(-x);
    }
    v
}
