//! Dense linear-algebra helpers shared by the phase-space and Fock modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_c(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_c(&(m - m.adjoint()))
}

/// `‖U†U − 1‖_max`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_c(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Symmetric eigen-decomposition with eigenvalues sorted ascending.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Replace eigenvalues that agree within `tol` (relative to the largest
/// magnitude) by their cluster mean. Input must be sorted ascending.
pub fn group_degenerate(values: &DVector<f64>, tol: f64) -> DVector<f64> {
    let n = values.len();
    let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let mut out = values.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end] - values[end - 1]).abs() <= tol * scale {
            end += 1;
        }
        let mean = values.rows(start, end - start).sum() / (end - start) as f64;
        for k in start..end {
            out[k] = mean;
        }
        start = end;
    }
    out
}

/// `f(M)` for symmetric `M`, applied through the eigen-decomposition after
/// degenerate eigenvalues have been grouped.
pub fn symmetric_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (values, vectors) = sorted_symmetric_eigen(m);
    let values = group_degenerate(&values, 1e-10);
    let diag = DMatrix::from_diagonal(&values.map(f));
    &vectors * diag * vectors.transpose()
}

/// Hermitian eigen-decomposition with eigenvalues sorted ascending.
pub fn sorted_hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let n = m.nrows();
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// `exp(factor · H)` for Hermitian `H`.
pub fn hermitian_exp(h: &CMatrix, factor: Complex64) -> CMatrix {
    let (values, vectors) = sorted_hermitian_eigen(h);
    let diag = CMatrix::from_diagonal(&values.map(|v| (factor * v).exp()));
    &vectors * diag * vectors.adjoint()
}

/// `exp(factor · M) v` by truncated Taylor series on `s` substeps, with `s`
/// chosen so each substep has norm at most one. Avoids forming the dense
/// exponential when only its action on one vector is needed.
pub fn exp_action(m: &CMatrix, factor: Complex64, v: &CVector) -> CVector {
    let row_sum = m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let steps = (row_sum * factor.norm()).ceil().max(1.0);
    let scaled = m * (factor / steps);
    let mut out = v.clone();
    for _ in 0..steps as usize {
        let mut term = out.clone();
        for k in 1..=60 {
            term = &scaled * term / Complex64::new(f64::from(k), 0.0);
            out += &term;
            if term.norm() <= f64::EPSILON * 1e-3 * out.norm() {
                break;
            }
        }
    }
    out
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    let (values, _) = sorted_hermitian_eigen(m);
    values[0]
}

/// Real matrix exponential (scaling and squaring with a Padé approximant).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().exp()
}

pub fn expm_c(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_action_matches_dense_exponential() {
        let h = CMatrix::from_fn(5, 5, |i, j| {
            let x = (i * 7 + j * 3) as f64 * 0.37;
            Complex64::new(x.sin() + x.cos(), if i == j { 0.0 } else { (i as f64 - j as f64) * 0.4 })
        });
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let v = CVector::from_fn(5, |i, _| Complex64::new(1.0 / (i + 1) as f64, 0.3));
        let factor = Complex64::new(0.0, 2.5);
        let dense = hermitian_exp(&h, factor) * &v;
        assert!((exp_action(&h, factor, &v) - dense).norm() < 1e-13);
    }

    #[test]
    fn expm_rotation_closed_form() {
        let t = 0.7_f64;
        let gen = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]) * t;
        let u = expm(&gen);
        let expected = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        assert!(max_abs(&(u - expected)) < 1e-14);
    }

    #[test]
    fn grouping_merges_close_values() {
        let v = DVector::from_vec(vec![1.0, 1.0 + 1e-13, 2.0]);
        let g = group_degenerate(&v, 1e-10);
        assert_eq!(g[0], g[1]);
        assert_eq!(g[2], 2.0);
    }

    #[test]
    fn symmetric_sqrt_squares_back() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let s = symmetric_function(&m, f64::sqrt);
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
    }

    #[test]
    fn hermitian_exp_is_unitary() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.3, -0.2),
                Complex64::new(0.3, 0.2),
                Complex64::new(-0.5, 0.0),
            ],
        );
        let u = hermitian_exp(&h, Complex64::new(0.0, 1.3));
        assert!(unitarity_residual(&u) < 1e-14);
        let direct = expm_c(&(h * Complex64::new(0.0, 1.3)));
        assert!(max_abs_c(&(u - direct)) < 1e-13);
    }
}
