//! Recovering `H = I - 2uuᵀ` and a binary `X` from `Y = HX`.
//!
//! For a data column `y` and a guessed binary column `x`, the reflector
//! mapping `x` to `y` exists iff `‖x‖ = ‖y‖` and is then unique up to sign:
//! `u = (x - y)/‖x - y‖`. Since `‖y‖² = ‖x‖²` equals the number of ones in
//! `x`, only guesses with that popcount need to be tried. Intersecting the
//! candidate sets of two distinct columns leaves exactly one reflector.

use nalgebra::{DMatrix, DVector};

use crate::reflector::{check_len, Reflector};
use crate::{Error, Result};

/// Largest `n` for which candidates are enumerated by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// `|‖x‖² - ‖y‖²|` above this means `x` cannot map to `y`.
pub const NORM_TOL: f64 = 1e-6;

/// Post-check on `‖(I - 2uuᵀ)x - y‖`.
pub const SOLVE_TOL: f64 = 1e-9;

/// Two candidates are the same reflector when `min(‖u - u'‖, ‖u + u'‖)` is below this.
pub const MATCH_TOL: f64 = 1e-8;

/// Entries of a decoded `Hy` must be this close to 0 or 1.
const BINARY_TOL: f64 = 1e-6;

/// Data matrix `Y`, `n × p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    y: DMatrix<f64>,
}

impl DataMatrix {
    pub fn new(y: DMatrix<f64>) -> Result<Self> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if y.nrows() == 0 {
            return Err(Error::InvalidArgument("data matrix has no rows".into()));
        }
        Ok(Self { y })
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn p(&self) -> usize {
        self.y.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.y.column(j).into_owned()
    }
}

/// What solving `(I - 2uuᵀ)x = y` for unit `u` yields.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnSolution {
    /// The unique (up to sign) solution.
    Unique(Reflector),
    /// `x = y`: every `u ⟂ y` works; carries no finite candidate.
    AnyOrthogonal,
    NoSolution,
}

impl ColumnSolution {
    pub fn reflector(&self) -> Option<&Reflector> {
        match self {
            ColumnSolution::Unique(r) => Some(r),
            _ => None,
        }
    }
}

/// Solves `(I - 2uuᵀ)x = y` for a unit `u`, with `x` binary (entries 0/1).
pub fn solve_column(y: &DVector<f64>, x: &[u8]) -> Result<ColumnSolution> {
    check_len(y.len(), x.len())?;
    let x = DVector::from_iterator(x.len(), x.iter().map(|&b| f64::from(b)));
    let diff = &x - y;
    if diff.norm() <= SOLVE_TOL {
        return Ok(ColumnSolution::AnyOrthogonal);
    }
    if (x.norm_squared() - y.norm_squared()).abs() > NORM_TOL {
        return Ok(ColumnSolution::NoSolution);
    }
    let r = Reflector::new(diff)?;
    let mapped = r.apply(&x)?;
    if (mapped - y).norm() > SOLVE_TOL {
        return Ok(ColumnSolution::NoSolution);
    }
    Ok(ColumnSolution::Unique(r))
}

/// A reflector consistent with one column and the binary guess producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub reflector: Reflector,
    pub x: Vec<u8>,
}

/// All reflectors consistent with one data column.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CandidateSet {
    /// Distinct (modulo sign) finite candidates in enumeration order.
    pub candidates: Vec<Candidate>,
    /// `Some(x)` when `y` is itself binary, so `x = y` with any `u ⟂ y`.
    pub fixed_point: Option<Vec<u8>>,
    /// `y ≈ 0`: only `x = 0` fits and it says nothing about `u`.
    pub zero_column: bool,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn contains(&self, r: &Reflector) -> bool {
        self.candidates
            .iter()
            .any(|c| c.reflector.approx_eq(r, MATCH_TOL))
    }
}

/// Candidate reflectors for `y`, trying only binary `x` whose popcount equals
/// `round(‖y‖²)`. Guesses are visited in lexicographic order of `x` read as
/// a bit string with `x₁` most significant.
pub fn enumerate_candidates(y: &DVector<f64>) -> Result<CandidateSet> {
    enumerate_candidates_with(y, DEFAULT_ENUMERATION_CAP, true)
}

/// Like [`enumerate_candidates`]; with `prune = false` all `2ⁿ` guesses are tried.
pub fn enumerate_candidates_with(
    y: &DVector<f64>,
    cap: usize,
    prune: bool,
) -> Result<CandidateSet> {
    let n = y.len();
    if n > cap || n >= 64 {
        return Err(Error::TooLarge { n, cap });
    }
    let mut set = CandidateSet::default();
    let norm_sq = y.norm_squared();
    let ones = norm_sq.round();
    if (norm_sq - ones).abs() <= NORM_TOL && ones == 0.0 {
        set.zero_column = true;
        return Ok(set);
    }

    let mut visit = |mask: u64| -> Result<()> {
        let x = unpack(mask, n);
        match solve_column(y, &x)? {
            // distinct guesses give distinct reflectors, since x = Hy
            ColumnSolution::Unique(reflector) => set.candidates.push(Candidate { reflector, x }),
            ColumnSolution::AnyOrthogonal => set.fixed_point = Some(x),
            ColumnSolution::NoSolution => {}
        }
        Ok(())
    };

    if prune {
        if (norm_sq - ones).abs() > NORM_TOL || ones > n as f64 {
            return Ok(set);
        }
        for mask in SamePopcount::new(n, ones as u32) {
            visit(mask)?;
        }
    } else {
        for mask in 0..(1u64 << n) {
            visit(mask)?;
        }
    }
    Ok(set)
}

/// `x` with `x₁` taken from the most significant of the low `n` bits.
fn unpack(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u8).collect()
}

/// `n`-bit masks with exactly `k` ones, ascending (Gosper's hack).
struct SamePopcount {
    next: Option<u64>,
    limit: u64,
}

impl SamePopcount {
    fn new(n: usize, k: u32) -> Self {
        let limit = 1u64 << n;
        let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
        Self {
            next: (first < limit).then_some(first),
            limit,
        }
    }
}

impl Iterator for SamePopcount {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            (succ < self.limit).then_some(succ)
        };
        Some(cur)
    }
}

/// A recovered reflector and coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub reflector: Reflector,
    /// Binary `n × p` coefficients.
    pub x: DMatrix<u8>,
    /// `‖(I - 2uuᵀ)X - Y‖_F`.
    pub residual: f64,
}

/// Recovers `u` and binary `X` from `Y = (I - 2uuᵀ)X`.
pub fn recover(y: &DataMatrix) -> Result<RecoveryResult> {
    recover_with(y, DEFAULT_ENUMERATION_CAP)
}

pub fn recover_with(y: &DataMatrix, cap: usize) -> Result<RecoveryResult> {
    let (n, p) = (y.n(), y.p());
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 columns, got {p}"
        )));
    }
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }

    // zero columns and columns that are already binary (possibly fixed by H)
    // do not pin down u
    let informative: Vec<usize> = (0..p)
        .filter(|&j| {
            let col = y.matrix().column(j);
            col.norm_squared() > 0.5 && !col.iter().all(|&v| nearest_bit(v).is_some())
        })
        .take(2)
        .collect();

    let common: Vec<Reflector> = match informative.as_slice() {
        [] => return Err(Error::Underdetermined),
        [only] => enumerate_candidates_with(&y.column(*only), cap, true)?
            .candidates
            .into_iter()
            .map(|c| c.reflector)
            .collect(),
        [first, second, ..] => {
            // u is a candidate for the second column iff it maps that column
            // back to a binary vector, which is cheaper than enumerating it
            let a = enumerate_candidates_with(&y.column(*first), cap, true)?;
            let second = y.column(*second);
            a.candidates
                .into_iter()
                .map(|c| c.reflector)
                .filter(|r| maps_to_binary(r, &second))
                .collect()
        }
    };

    let reflector = match common.len() {
        0 => return Err(Error::NoSolution),
        1 => common.into_iter().next().unwrap(),
        k => return Err(Error::Ambiguous { candidates: k }),
    };
    decode(y, reflector)
}

/// Given `u`, each column's coefficients are `x = Hy` (H is an involution).
fn decode(y: &DataMatrix, reflector: Reflector) -> Result<RecoveryResult> {
    let (n, p) = (y.n(), y.p());
    let mut x = DMatrix::<u8>::zeros(n, p);
    for j in 0..p {
        let col = y.column(j);
        let hx = reflector.apply(&col)?;
        for i in 0..n {
            x[(i, j)] = nearest_bit(hx[i]).ok_or(Error::NoSolution)?;
        }
        let bits: Vec<u8> = x.column(j).iter().copied().collect();
        match solve_column(&col, &bits)? {
            ColumnSolution::Unique(r) if r.approx_eq(&reflector, MATCH_TOL) => {}
            ColumnSolution::AnyOrthogonal => {}
            _ => return Err(Error::NoSolution),
        }
    }
    let xf = x.map(f64::from);
    let mut hx = xf.clone();
    reflector.apply_left(&mut hx);
    let residual = (hx - y.matrix()).norm();
    if residual > 1e-8 * ((n * p) as f64).sqrt() {
        return Err(Error::NoSolution);
    }
    Ok(RecoveryResult {
        reflector,
        x,
        residual,
    })
}

fn maps_to_binary(r: &Reflector, y: &DVector<f64>) -> bool {
    let mut x = y.clone();
    r.apply_in_place(x.as_mut_slice());
    x.iter().all(|&v| nearest_bit(v).is_some())
}

fn nearest_bit(v: f64) -> Option<u8> {
    if v.abs() <= BINARY_TOL {
        Some(0)
    } else if (v - 1.0).abs() <= BINARY_TOL {
        Some(1)
    } else {
        None
    }
}

/// Two different reflector/coefficient pairs with `H₁X₁ = H₂X₂` in 2-D,
/// showing that without the binary constraint recovery is not unique.
#[derive(Debug, Clone, PartialEq)]
pub struct NonUniqueExample {
    pub h1: Reflector,
    pub x1: DMatrix<f64>,
    pub h2: Reflector,
    pub x2: DMatrix<f64>,
}

impl NonUniqueExample {
    /// `u₁ = (√(1/3), √(2/3))` and `u₂ = (1/√2, 1/√2)`.
    pub fn reflectors() -> (Reflector, Reflector) {
        let h1 = Reflector::from_slice(&[(1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt()])
            .expect("nonzero");
        let h2 = Reflector::from_slice(&[std::f64::consts::FRAC_1_SQRT_2; 2]).expect("nonzero");
        (h1, h2)
    }

    /// Completes a pair from chosen second coefficients: `X₁ = H₁H₂X₂`.
    pub fn from_second(x2: DMatrix<f64>) -> Result<Self> {
        check_len(2, x2.nrows())?;
        let (h1, h2) = Self::reflectors();
        let mut x1 = x2.clone();
        h2.apply_left(&mut x1);
        h1.apply_left(&mut x1);
        Ok(Self { h1, x1, h2, x2 })
    }

    /// Completes a pair from chosen first coefficients: `X₂ = H₂H₁X₁`.
    pub fn from_first(x1: DMatrix<f64>) -> Result<Self> {
        check_len(2, x1.nrows())?;
        let (h1, h2) = Self::reflectors();
        let mut x2 = x1.clone();
        h1.apply_left(&mut x2);
        h2.apply_left(&mut x2);
        Ok(Self { h1, x1, h2, x2 })
    }

    pub fn y1(&self) -> DMatrix<f64> {
        let mut y = self.x1.clone();
        self.h1.apply_left(&mut y);
        y
    }

    pub fn y2(&self) -> DMatrix<f64> {
        let mut y = self.x2.clone();
        self.h2.apply_left(&mut y);
        y
    }

    /// `‖H₁X₁ - H₂X₂‖_F`.
    pub fn mismatch(&self) -> f64 {
        (self.y1() - self.y2()).norm()
    }
}

/// `p` columns with `X₂` column `j` equal to `(1, j)`; the first column is
/// `X₁ = (2√2/3, 1/3)`, `X₂ = (1, 0)`, both giving `Y = (0, -1)`.
pub fn non_uniqueness_example(p: usize) -> Result<NonUniqueExample> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let x2 = DMatrix::from_fn(2, p, |i, j| if i == 0 { 1.0 } else { j as f64 });
    NonUniqueExample::from_second(x2)
}
