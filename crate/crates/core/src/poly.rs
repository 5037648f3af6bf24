//! Sparse multivariate polynomials over a generic scalar, with dense
//! exponent vectors ordered graded-lexicographically for canonical
//! serialization.
//!
//! Zero coefficients are never stored. Polynomials with different variable
//! counts can be combined; the smaller exponent vectors are padded, so the
//! nullary `Zero::zero`/`One::one` constructors (0 variables) act as
//! constants in any arity.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Exponent vector with graded-lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly<T> {
    nvars: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> MPoly<T> {
    pub fn zero_poly(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero_poly(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    /// The variable `x_i` among `nvars`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut exp = vec![0u32; nvars];
        exp[i] = 1;
        let mut p = Self::zero_poly(nvars);
        p.terms.insert(Monomial(exp), T::one());
        p
    }

    /// Linear form sum_i coeffs[i] * x_i.
    pub fn linear(coeffs: &[T]) -> Self {
        let nvars = coeffs.len();
        let mut p = Self::zero_poly(nvars);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut exp = vec![0u32; nvars];
                exp[i] = 1;
                p.terms.insert(Monomial(exp), c.clone());
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    fn pad_to(&self, nvars: usize) -> Self {
        if self.nvars == nvars {
            return self.clone();
        }
        assert!(self.nvars <= nvars);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exp = m.0.clone();
                exp.resize(nvars, 0);
                (Monomial(exp), c.clone())
            })
            .collect();
        MPoly { nvars, terms }
    }

    fn insert_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero_poly(self.nvars);
        for (m, c) in &self.terms {
            out.insert_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    /// Evaluates at a point (one coordinate per variable).
    pub fn eval(&self, point: &[T]) -> T {
        assert!(point.len() >= self.nvars, "point has too few coordinates");
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term * point[i].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }
}

impl<T: Scalar> Add for MPoly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let nvars = self.nvars.max(rhs.nvars);
        let mut out = self.pad_to(nvars);
        for (m, c) in rhs.pad_to(nvars).terms {
            out.insert_term(m, c);
        }
        out
    }
}

impl<T: Scalar> Sub for MPoly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for MPoly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<T: Scalar> Mul for MPoly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let nvars = self.nvars.max(rhs.nvars);
        let a = self.pad_to(nvars);
        let b = rhs.pad_to(nvars);
        let mut out = MPoly::zero_poly(nvars);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let exp: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                out.insert_term(Monomial(exp), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Scalar> Zero for MPoly<T> {
    fn zero() -> Self {
        Self::zero_poly(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: Scalar> One for MPoly<T> {
    fn one() -> Self {
        Self::constant(0, T::one())
    }
}
