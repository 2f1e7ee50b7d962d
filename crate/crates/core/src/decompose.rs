//! Factoring orthogonal matrices into products of Householder reflectors.
//!
//! The greedy loop repeatedly replaces the remainder `V_k` by `H_k V_k`, where
//! `H_k` is the single reflector closest to `V_k` in Frobenius norm. That
//! reflector's direction is a unit eigenvector for the smallest eigenvalue of
//! `(V_k + V_kᵀ)/2`, and each step raises the dimension of the fixed space
//! of the remainder by exactly one. Started from `V ∈ H_p` the loop therefore
//! stops after exactly `p` steps, the minimum possible.

use nalgebra::DMatrix;

use crate::eigen::{symmetric_eigendecomposition, SymmetricSpectrum};
use crate::orthogonal::{
    default_rank_tolerance, eigenspace_one_dimension, symmetric_part, symmetrize, DenseOrthogonal,
};
use crate::reflector::{HouseholderProduct, Reflector};
use crate::{Error, Result};

/// Tolerance on `‖V - Vᵀ‖_F / n` for the symmetric fast path.
pub const SYMMETRIC_INPUT_TOL: f64 = 1e-8;

/// The reflector nearest to `V` and its distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub reflector: Reflector,
    /// `‖V - (I - 2uuᵀ)‖_F`.
    pub residual: f64,
    /// Smallest eigenvalue of `V_sym`.
    pub lambda_min: f64,
}

/// Closest single reflector to `V` in Frobenius norm.
///
/// `‖V - H‖²_F = 2n - 2tr(V) + 4uᵀVu`, minimized over unit `u` by a minimum
/// eigenvector of `V_sym`, giving `2n - 2tr(V) + 4λ_min(V_sym)`. The
/// reported residual is measured entrywise, which stays accurate near zero
/// where the closed form loses half its digits to the square root.
pub fn nearest_reflector(v: &DenseOrthogonal) -> Result<Projection> {
    let spectrum = symmetric_eigendecomposition(&symmetric_part(v))?;
    let reflector = Reflector::new(spectrum.eigenvectors.column(0).into_owned())?;
    let lambda_min = spectrum.min();
    let u = reflector.direction();
    let n = v.n();
    let mut sq = 0.0;
    for j in 0..n {
        for i in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            let d = v.matrix()[(i, j)] - id + 2.0 * u[i] * u[j];
            sq += d * d;
        }
    }
    let residual = sq.sqrt();
    Ok(Projection {
        reflector,
        residual,
        lambda_min,
    })
}

/// Why the greedy loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `‖V̂ - V‖_F ≤ ε`.
    Converged,
    /// Used the caller's `max_m` factors without converging.
    FactorCap,
    /// Used `n` factors without converging.
    DimensionCap,
}

/// State of one greedy iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `λ_min((V_k)_sym)`, the eigenvalue whose eigenvector became `H_k`.
    pub lambda_min: f64,
    /// `‖V̂ - V‖_F` after `H_k` was appended to `V̂`.
    pub residual: f64,
    /// `tr(V_k)`.
    pub trace: f64,
    /// `dim E¹(V_k)`.
    pub dim_e1: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTrace {
    pub records: Vec<IterationRecord>,
    /// `‖V̂ - V‖_F` for the returned product.
    pub final_residual: f64,
    /// `tr(V_m)` of the final remainder.
    pub final_trace: f64,
    /// `dim E¹(V_m)` of the final remainder.
    pub final_dim_e1: usize,
    pub termination: Termination,
}

impl DecompositionTrace {
    pub fn factors(&self) -> usize {
        self.records.len()
    }

    /// `dim E¹(V_k)` for `k = 0..=m`.
    pub fn dim_e1_sequence(&self) -> Vec<usize> {
        self.records
            .iter()
            .map(|r| r.dim_e1)
            .chain(std::iter::once(self.final_dim_e1))
            .collect()
    }

    /// `tr(V_k)` for `k = 0..=m`.
    pub fn trace_sequence(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.trace)
            .chain(std::iter::once(self.final_trace))
            .collect()
    }
}

/// Greedy factorization of `V` into at most `min(max_m, n)` reflectors.
///
/// Returns `H₁…H_m` in application order, so that `materialize()` is the
/// approximation `V̂`, together with the per-iteration record. Stops as soon
/// as `‖V̂ - V‖_F ≤ eps`.
pub fn greedy_decompose(
    v: &DenseOrthogonal,
    max_m: usize,
    eps: f64,
) -> Result<(HouseholderProduct, DecompositionTrace)> {
    if eps.is_nan() || eps <= 0.0 || eps.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive and finite, got {eps}"
        )));
    }
    let n = v.n();
    let cap = max_m.min(n);
    let rank_tol = default_rank_tolerance(n);
    let target = v.matrix();

    let mut remainder = target.clone();
    let mut approx = DMatrix::<f64>::identity(n, n);
    let mut product = HouseholderProduct::identity(n);
    let mut records = Vec::new();
    let mut residual = (&approx - target).norm();

    while residual > eps && records.len() < cap {
        let k = records.len();
        let spectrum = symmetric_eigendecomposition(&symmetrize(&remainder))?;
        let lambda_min = spectrum.min();
        let trace = remainder.trace();
        let dim_e1 = dim_e1_from_spectrum(&spectrum, rank_tol);

        let h = Reflector::new(spectrum.eigenvectors.column(0).into_owned())?;
        h.apply_left(&mut remainder);
        h.apply_right(&mut approx);
        residual = (&approx - target).norm();
        product.push(h)?;

        records.push(IterationRecord {
            iteration: k,
            lambda_min,
            residual,
            trace,
            dim_e1,
        });
    }

    let final_spectrum = symmetric_eigendecomposition(&symmetrize(&remainder))?;
    let termination = if residual <= eps {
        Termination::Converged
    } else if max_m < n {
        Termination::FactorCap
    } else {
        Termination::DimensionCap
    };
    let trace = DecompositionTrace {
        records,
        final_residual: residual,
        final_trace: remainder.trace(),
        final_dim_e1: dim_e1_from_spectrum(&final_spectrum, rank_tol),
        termination,
    };
    Ok((product, trace))
}

/// `dim E¹(V)` from the spectrum of `V_sym`.
///
/// For orthogonal `V`, `(V - I)ᵀ(V - I) = 2I - 2V_sym`, so the singular values
/// of `V - I` are `√(2 - 2λᵢ)`.
fn dim_e1_from_spectrum(spectrum: &SymmetricSpectrum, tol: f64) -> usize {
    spectrum
        .eigenvalues
        .iter()
        .filter(|&&l| (2.0 - 2.0 * l).max(0.0).sqrt() < tol)
        .count()
}

/// Exact factorization of a symmetric orthogonal `V = I - 2Σvᵢvᵢᵀ`.
///
/// The factors are the eigenvectors for eigenvalue -1. They are mutually
/// orthogonal, so the reflectors commute; they are returned in ascending
/// eigen-index order.
pub fn symmetric_decompose(v: &DenseOrthogonal) -> Result<HouseholderProduct> {
    let n = v.n();
    let asym = (v.matrix() - v.matrix().transpose()).norm();
    let tolerance = SYMMETRIC_INPUT_TOL * n.max(1) as f64;
    if asym > tolerance {
        return Err(Error::NotSymmetric {
            residual: asym,
            tolerance,
        });
    }
    let spectrum = symmetric_eigendecomposition(&symmetric_part(v))?;
    let factors = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l < 0.0)
        .map(|(i, _)| Reflector::new(spectrum.eigenvectors.column(i).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    HouseholderProduct::new(n, factors)
}

/// Output of the column-wise Householder QR baseline: `V = H₁…H_k·diag(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrBaseline {
    pub product: HouseholderProduct,
    /// Diagonal of `R`, entries `±1` for orthogonal input.
    pub diagonal: Vec<f64>,
}

impl QrBaseline {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut m = self.product.materialize().into_matrix();
        for (mut col, &r) in m.column_iter_mut().zip(&self.diagonal) {
            col *= r;
        }
        m
    }
}

/// Classic column-by-column Householder QR applied to an orthogonal matrix.
///
/// Column `j` is reduced with the reflector mapping its trailing part to
/// `-sign(x₁)‖x‖e₁`. A column that is already `(+‖x‖, 0, …, 0)` needs no
/// reflector and is skipped; nothing else is optimized.
pub fn qr_baseline(v: &DenseOrthogonal) -> Result<QrBaseline> {
    let n = v.n();
    let mut r = v.matrix().clone();
    let mut product = HouseholderProduct::identity(n);
    let mut diagonal = vec![0.0; n];

    for j in 0..n {
        let x: Vec<f64> = (j..n).map(|i| r[(i, j)]).collect();
        let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
        if tail <= f64::EPSILON * norm && x[0] > 0.0 {
            diagonal[j] = x[0];
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut u = nalgebra::DVector::zeros(n);
        u[j] = x[0] - alpha;
        for (i, xi) in x.iter().enumerate().skip(1) {
            u[j + i] = *xi;
        }
        let h = Reflector::new(u)?;
        h.apply_left(&mut r);
        diagonal[j] = r[(j, j)];
        product.push(h)?;
    }

    Ok(QrBaseline { product, diagonal })
}

/// Error bound for the greedy factorization truncated at `m` steps:
/// `√(2(n - tr(V) - 2⌊m/2⌋ + Σᵢ₌₁ᵐ λᵢ))` with `λ₁ ≤ λ₂ ≤ …` the eigenvalues
/// of `V_sym`. The radicand is clamped at zero.
pub fn error_bound(v: &DenseOrthogonal, m: usize) -> Result<f64> {
    let n = v.n();
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "m = {m} exceeds dimension n = {n}"
        )));
    }
    let spectrum = symmetric_eigendecomposition(&symmetric_part(v))?;
    let partial: f64 = spectrum.eigenvalues[..m].iter().sum();
    let radicand = n as f64 - v.trace() - 2.0 * (m / 2) as f64 + partial;
    Ok((2.0 * radicand).max(0.0).sqrt())
}

/// Smallest number of reflectors whose product is `V`: `n - dim E¹(V)`.
pub fn min_factors(v: &DenseOrthogonal) -> usize {
    v.n() - eigenspace_one_dimension(v, default_rank_tolerance(v.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_reflector;
    use nalgebra::DVector;

    fn example_matrix() -> DenseOrthogonal {
        #[rustfmt::skip]
        let v = DMatrix::from_row_slice(3, 3, &[
            1.0 / 9.0, -4.0 / 9.0, -8.0 / 9.0,
            -4.0 / 9.0, 7.0 / 9.0, -4.0 / 9.0,
            -8.0 / 9.0, -4.0 / 9.0, 1.0 / 9.0,
        ]);
        DenseOrthogonal::new(v).unwrap()
    }

    fn two_reflectors(n: usize) -> (Reflector, Reflector, DenseOrthogonal) {
        let u1 = make_reflector(
            &(0..n)
                .map(|i| (i as f64 * 0.7).sin() + 0.3)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let u2 =
            make_reflector(&(0..n).map(|i| (i as f64 * 1.3).cos()).collect::<Vec<_>>()).unwrap();
        let v = HouseholderProduct::new(n, vec![u1.clone(), u2.clone()])
            .unwrap()
            .materialize();
        (u1, u2, v)
    }

    #[test]
    fn nearest_reflector_of_reflector() {
        let p = nearest_reflector(&example_matrix()).unwrap();
        let u = make_reflector(&[2.0, 1.0, 2.0]).unwrap();
        assert!(p.reflector.distance(&u) < 1e-12);
        assert!(p.residual < 1e-7);
    }

    #[test]
    fn nearest_reflector_of_identity() {
        let p = nearest_reflector(&DenseOrthogonal::identity(5)).unwrap();
        assert!((p.residual - 2.0).abs() < 1e-12);
        assert!((p.lambda_min - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nearest_reflector_of_pair_has_residual_two() {
        // tr = n - 4 + 4k², λ_min = -1 + 2k² ⇒ residual² = 4 for any k
        let n = 7;
        let (u1, u2, v) = two_reflectors(n);
        let k = u1.direction().dot(u2.direction());
        let spectrum = symmetric_eigendecomposition(&symmetric_part(&v)).unwrap();
        assert!((v.trace() - (n as f64 - 4.0 + 4.0 * k * k)).abs() < 1e-12);
        assert!((spectrum.min() - (-1.0 + 2.0 * k * k)).abs() < 1e-12);
        let p = nearest_reflector(&v).unwrap();
        assert!((p.residual - 2.0).abs() < 1e-8);
        let direct = (v.matrix() - p.reflector.to_matrix()).norm();
        assert!((direct - p.residual).abs() < 1e-8);
    }

    #[test]
    fn pair_spectrum_is_doubly_degenerate() {
        let (u1, u2, v) = two_reflectors(6);
        let k = u1.direction().dot(u2.direction());
        let s = symmetric_eigendecomposition(&symmetric_part(&v)).unwrap();
        let expected = -1.0 + 2.0 * k * k;
        assert!((s.eigenvalues[0] - expected).abs() < 1e-12);
        assert!((s.eigenvalues[1] - expected).abs() < 1e-12);
        assert!(s.eigenvalues[2..].iter().all(|&l| (l - 1.0).abs() < 1e-12));

        // V_sym = I - 2u₁u₁ᵀ - 2u₂u₂ᵀ + 2k(u₁u₂ᵀ + u₂u₁ᵀ)
        let (a, b) = (u1.direction(), u2.direction());
        let closed =
            DMatrix::<f64>::identity(6, 6) - 2.0 * a * a.transpose() - 2.0 * b * b.transpose()
                + 2.0 * k * (a * b.transpose() + b * a.transpose());
        assert!((symmetric_part(&v) - closed).norm() < 1e-14);
    }

    #[test]
    fn greedy_finds_single_reflector() {
        let (p, trace) = greedy_decompose(&example_matrix(), 3, 1e-8).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.termination, Termination::Converged);
        let u = make_reflector(&[2.0, 1.0, 2.0]).unwrap();
        assert!(p.factors()[0].distance(&u) < 1e-12);
        assert!(trace.final_residual <= 1e-10);
    }

    #[test]
    fn greedy_on_identity_is_empty() {
        let (p, trace) = greedy_decompose(&DenseOrthogonal::identity(4), 4, 1e-8).unwrap();
        assert!(p.is_empty());
        assert!(trace.records.is_empty());
        assert_eq!(trace.final_dim_e1, 4);
        assert_eq!(trace.termination, Termination::Converged);
    }

    #[test]
    fn greedy_on_minus_identity_needs_n() {
        let n = 8;
        let v = DenseOrthogonal::new(-DMatrix::<f64>::identity(n, n)).unwrap();
        let (p, trace) = greedy_decompose(&v, n, 1e-8).unwrap();
        assert_eq!(p.len(), n);
        assert_eq!(min_factors(&v), n);
        assert_eq!(trace.dim_e1_sequence(), (0..=n).collect::<Vec<_>>());
    }

    #[test]
    fn greedy_pair_recovers_two() {
        let (_, _, v) = two_reflectors(9);
        let (p, trace) = greedy_decompose(&v, 9, 1e-8).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p.materialize().matrix() - v.matrix()).norm() < 1e-10);
        assert_eq!(trace.dim_e1_sequence(), vec![7, 8, 9]);
    }

    #[test]
    fn greedy_caps() {
        let n = 6;
        let v = DenseOrthogonal::new(-DMatrix::<f64>::identity(n, n)).unwrap();
        let (p, trace) = greedy_decompose(&v, 3, 1e-8).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(trace.termination, Termination::FactorCap);
        // truncated at 3: three -1 eigenvalues flipped, residual² = 2·2·3
        assert!((trace.final_residual - 12f64.sqrt()).abs() < 1e-10);
        let (_, trace) = greedy_decompose(&v, 10, 1e-8).unwrap();
        assert_eq!(trace.termination, Termination::Converged);
        assert!(greedy_decompose(&v, 3, 0.0).is_err());
    }

    #[test]
    fn symmetric_fast_path() {
        let v = DenseOrthogonal::new(Reflector::basis(5, 0).to_matrix()).unwrap();
        let p = symmetric_decompose(&v).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.factors()[0].distance(&Reflector::basis(5, 0)) < 1e-14);

        let v = DenseOrthogonal::new(-DMatrix::<f64>::identity(4, 4)).unwrap();
        let p = symmetric_decompose(&v).unwrap();
        assert_eq!(p.len(), 4);
        let dirs = DMatrix::from_columns(
            &p.factors()
                .iter()
                .map(|f| f.direction().clone())
                .collect::<Vec<_>>(),
        );
        assert!((dirs.transpose() * &dirs - DMatrix::<f64>::identity(4, 4)).norm() < 1e-12);
        assert!((p.materialize().matrix() - v.matrix()).norm() < 1e-12);
    }

    #[test]
    fn symmetric_fast_path_rejects_asymmetric() {
        let (_, _, v) = two_reflectors(5);
        assert!(matches!(
            symmetric_decompose(&v),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn qr_baseline_on_example_matrix() {
        let v = example_matrix();
        let qr = qr_baseline(&v).unwrap();
        assert_eq!(qr.product.len(), 3);
        let expected_r = [-1.0, -1.0, 1.0];
        for (r, e) in qr.diagonal.iter().zip(expected_r) {
            assert!((r - e).abs() < 1e-14);
        }
        #[rustfmt::skip]
        let h1 = DMatrix::from_row_slice(3, 3, &[
            -1.0 / 9.0, 4.0 / 9.0, 8.0 / 9.0,
            4.0 / 9.0, 37.0 / 45.0, -16.0 / 45.0,
            8.0 / 9.0, -16.0 / 45.0, 13.0 / 45.0,
        ]);
        #[rustfmt::skip]
        let h2 = DMatrix::from_row_slice(3, 3, &[
            1.0, 0.0, 0.0,
            0.0, -3.0 / 5.0, 4.0 / 5.0,
            0.0, 4.0 / 5.0, 3.0 / 5.0,
        ]);
        let h3 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0]));
        for (f, e) in qr.product.factors().iter().zip([h1, h2, h3]) {
            assert!((f.to_matrix() - e).norm() < 1e-14);
        }
        assert!((qr.reconstruct() - v.matrix()).norm() < 1e-12);
    }

    #[test]
    fn qr_baseline_on_identity() {
        let qr = qr_baseline(&DenseOrthogonal::identity(4)).unwrap();
        assert!(qr.product.is_empty());
        assert_eq!(qr.diagonal, vec![1.0; 4]);
    }

    #[test]
    fn error_bound_basics() {
        assert_eq!(error_bound(&DenseOrthogonal::identity(5), 0).unwrap(), 0.0);
        let (_, _, v) = two_reflectors(8);
        assert!(error_bound(&v, 2).unwrap() < 1e-6);
        // a single reflector: the odd-m bound is √2 although the error is 0
        let b = error_bound(&example_matrix(), 1).unwrap();
        assert!((b - 2f64.sqrt()).abs() < 1e-12);
        assert!(error_bound(&example_matrix(), 4).is_err());
    }

    #[test]
    fn min_factors_basics() {
        assert_eq!(min_factors(&DenseOrthogonal::identity(6)), 0);
        assert_eq!(min_factors(&example_matrix()), 1);
        let (_, _, v) = two_reflectors(6);
        assert_eq!(min_factors(&v), 2);
    }
}
