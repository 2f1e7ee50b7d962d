//! Householder reflectors and matrix-free products of them.

use nalgebra::{DMatrix, DVector};

use crate::orthogonal::DenseOrthogonal;
use crate::{Error, Result};

/// Entries at or below this magnitude are skipped when choosing the sign.
const SIGN_THRESHOLD: f64 = 1e-12;

/// A Householder reflector `H = I - 2uuᵀ`, stored as its unit direction `u`.
///
/// `u` and `-u` describe the same matrix. The stored direction is always the
/// representative whose first entry with `|uᵢ| > 1e-12` is positive, so two
/// reflectors are equal exactly when their directions are.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflector {
    u: DVector<f64>,
}

impl Reflector {
    /// Normalizes `u` and fixes its sign.
    pub fn new(mut u: DVector<f64>) -> Result<Self> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = u.norm();
        if norm == 0.0 || u.is_empty() {
            return Err(Error::DegenerateReflector);
        }
        u /= norm;
        if let Some(lead) = u.iter().find(|v| v.abs() > SIGN_THRESHOLD) {
            if *lead < 0.0 {
                u.neg_mut();
            }
        }
        Ok(Self { u })
    }

    pub fn from_slice(u: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(u))
    }

    /// The reflector `e_i` in dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut u = DVector::zeros(n);
        u[i] = 1.0;
        Self { u }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn direction(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn into_direction(self) -> DVector<f64> {
        self.u
    }

    /// `x ← x - 2u(uᵀx)`.
    #[inline]
    pub fn apply_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.u.len());
        let u = self.u.as_slice();
        let dot: f64 = u.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let scale = 2.0 * dot;
        for (xi, ui) in x.iter_mut().zip(u) {
            *xi -= scale * ui;
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(self.dim(), x.len())?;
        let mut y = x.clone();
        self.apply_in_place(y.as_mut_slice());
        Ok(y)
    }

    /// `M ← HM`.
    pub fn apply_left(&self, m: &mut DMatrix<f64>) {
        debug_assert_eq!(m.nrows(), self.dim());
        for mut col in m.column_iter_mut() {
            self.apply_in_place(col.as_mut_slice());
        }
    }

    /// `M ← MH`.
    pub fn apply_right(&self, m: &mut DMatrix<f64>) {
        debug_assert_eq!(m.ncols(), self.dim());
        // MH = M - 2(Mu)uᵀ
        let mu = &*m * &self.u;
        m.ger(-2.0, &mu, &self.u, 1.0);
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut h = DMatrix::identity(n, n);
        h.ger(-2.0, &self.u, &self.u, 1.0);
        h
    }

    /// Distance between the directions modulo sign, `min(‖u - v‖, ‖u + v‖)`.
    pub fn distance(&self, other: &Reflector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let minus = (&self.u - &other.u).norm();
        let plus = (&self.u + &other.u).norm();
        minus.min(plus)
    }

    pub fn approx_eq(&self, other: &Reflector, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

/// Builds a canonical reflector from an arbitrary nonzero direction.
pub fn make_reflector(u: &[f64]) -> Result<Reflector> {
    Reflector::from_slice(u)
}

/// The ordered product `H₁H₂…Hₘ`. An empty product is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderProduct {
    n: usize,
    factors: Vec<Reflector>,
}

impl HouseholderProduct {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            factors: Vec::new(),
        }
    }

    pub fn new(n: usize, factors: Vec<Reflector>) -> Result<Self> {
        for f in &factors {
            check_len(n, f.dim())?;
        }
        Ok(Self { n, factors })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of factors `m`.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Reflector] {
        &self.factors
    }

    /// Appends `H` on the right: `P ← PH`.
    pub fn push(&mut self, h: Reflector) -> Result<()> {
        check_len(self.n, h.dim())?;
        self.factors.push(h);
        Ok(())
    }

    /// Computes `H₁(H₂(…(Hₘx)))` with `m` rank-one updates, in place.
    pub fn apply_in_place(&self, x: &mut [f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        for h in self.factors.iter().rev() {
            h.apply_in_place(x);
        }
        Ok(())
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let mut y = x.clone();
        self.apply_in_place(y.as_mut_slice())?;
        Ok(y)
    }

    /// Computes `Pᵀx = Hₘ(…(H₁x))`.
    pub fn apply_transpose(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(self.n, x.len())?;
        let mut y = x.clone();
        for h in &self.factors {
            h.apply_in_place(y.as_mut_slice());
        }
        Ok(y)
    }

    /// The dense matrix `H₁H₂…Hₘ`, accumulated left to right.
    pub fn materialize(&self) -> DenseOrthogonal {
        let mut m = DMatrix::identity(self.n, self.n);
        for h in &self.factors {
            h.apply_right(&mut m);
        }
        DenseOrthogonal::from_trusted(m)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
