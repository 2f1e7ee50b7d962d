//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! Kept separate from the symmetric eigensolver so rank decisions about
//! `V - I` do not share a code path with the greedy decomposition.

use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 60;

/// Singular values of `a`, sorted descending.
///
/// Columns are rotated pairwise until all are mutually orthogonal; the
/// singular values are then the column norms.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let (rows, cols) = a.shape();
    // column-major: column j is cols[j*rows..(j+1)*rows]
    let mut w: Vec<f64> = a.as_slice().to_vec();
    let mut norms: Vec<f64> = (0..cols).map(|j| sq_norm(col(&w, rows, j))).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = norms[i];
                let beta = norms[j];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(col(&w, rows, i), col(&w, rows, j));
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = w.split_at_mut(j * rows);
                let ci = &mut lo[i * rows..(i + 1) * rows];
                let cj = &mut hi[..rows];
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let (p, q) = (*x, *y);
                    *x = c * p - s * q;
                    *y = s * p + c * q;
                }
                norms[i] = sq_norm(ci);
                norms[j] = sq_norm(cj);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = norms.into_iter().map(f64::sqrt).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn col(w: &[f64], rows: usize, j: usize) -> &[f64] {
    &w[j * rows..(j + 1) * rows]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_norm(a: &[f64]) -> f64 {
    dot(a, a)
}
