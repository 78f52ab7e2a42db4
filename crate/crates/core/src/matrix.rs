//! Dense square complex matrices, sized for tensor products up to the cap.
//!
//! The only nontrivial numerics here are the Hermitian eigensolver and the
//! positive-semidefinite square root. Both work on the real symmetric
//! embedding of `M = A + iB`,
//!
//! ```text
//!     E = [ A  -B ]
//!         [ B   A ]
//! ```
//!
//! which has the same spectrum as `M` with every eigenvalue doubled, and is
//! diagonalized by cyclic Jacobi rotations. Matrix functions computed on `E`
//! stay inside the embedding algebra, so the square root of `M` can be read
//! back off the blocks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Builds a matrix from rows, which must form a square array.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Rank-one projector-like outer product `|v><v|` (no normalization).
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = v[r] * v[c].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// In-place `self += s * rhs`, used when accumulating moment sums.
    pub fn add_scaled_assign(&mut self, rhs: &Self, s: f64) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * s;
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == Complex64::ZERO {
                    continue;
                }
                let lhs_row = &mut out.data[i * n..(i + 1) * n];
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in lhs_row.iter_mut().zip(rhs_row) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        let mut out = ComplexMatrix::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let aij = self.data[i * n + j];
                if aij == Complex64::ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * dim + (j * m + l)] = aij * rhs.data[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[r * n + c] = (self.data[r * n + c] + self.data[c * n + r].conj()) * 0.5;
            }
        }
        out
    }

    /// Max-entry norm of `M - M^dagger`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let diff = self.data[r * n + c] - self.data[c * n + r].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Quadratic form `<v|M|v>`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut acc = Complex64::ZERO;
        for r in 0..n {
            let mut row = Complex64::ZERO;
            for (c, vc) in v.iter().enumerate() {
                row += self.data[r * n + c] * vc;
            }
            acc += v[r].conj() * row;
        }
        acc
    }

    /// Smallest and largest eigenvalue of the Hermitian part of `self`.
    pub fn eigenvalue_range(&self) -> (f64, f64) {
        let herm = self.hermitian_part();
        let n = 2 * self.dim;
        let mut e = herm.real_embedding();
        let evals = jacobi_eigenvalues(&mut e, n);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in &evals {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    }

    /// Positive-semidefinite square root.
    ///
    /// Rejects matrices that fail the Hermiticity tolerance or have an
    /// eigenvalue below `-tol::EIG_SLACK`; eigenvalues in the slack window
    /// are clamped to zero before the root is taken.
    pub fn sqrt_psd(&self) -> Result<Self> {
        let residual = self.hermiticity_residual();
        if residual > tol::HERMITICITY {
            return Err(Error::NotHermitian { residual });
        }
        let herm = self.hermitian_part();
        let n = self.dim;
        let nn = 2 * n;
        let mut e = herm.real_embedding();
        let (evals, vecs) = jacobi_eigen_with_vectors(&mut e, nn);
        // Eigenvalues that should be exactly zero come back as O(1e-16)
        // noise, which the square root would amplify to O(1e-8). Snap
        // everything below a relative cutoff to zero before rooting.
        let lam_max = evals.iter().cloned().fold(0.0f64, f64::max);
        let cutoff = 1e-13 * lam_max;
        let mut roots = Vec::with_capacity(nn);
        for &lam in &evals {
            if lam < -tol::EIG_SLACK {
                return Err(Error::NotPositive {
                    min_eigenvalue: lam,
                });
            }
            roots.push(if lam <= cutoff { 0.0 } else { lam.sqrt() });
        }
        // S_E = V sqrt(Lambda) V^T, then average the two redundant copies of
        // each block to keep the embedding structure exact.
        let mut se = vec![0.0f64; nn * nn];
        for r in 0..nn {
            for c in 0..nn {
                let mut acc = 0.0;
                for k in 0..nn {
                    acc += vecs[r * nn + k] * roots[k] * vecs[c * nn + k];
                }
                se[r * nn + c] = acc;
            }
        }
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let re = 0.5 * (se[r * nn + c] + se[(n + r) * nn + (n + c)]);
                let im = 0.5 * (se[(n + r) * nn + c] - se[r * nn + (n + c)]);
                out.data[r * n + c] = Complex64::new(re, im);
            }
        }
        Ok(out)
    }

    /// Real symmetric embedding `[[A, -B], [B, A]]` of `self = A + iB`.
    /// Only meaningful when `self` is Hermitian.
    fn real_embedding(&self) -> Vec<f64> {
        let n = self.dim;
        let nn = 2 * n;
        let mut e = vec![0.0f64; nn * nn];
        for r in 0..n {
            for c in 0..n {
                let z = self.data[r * n + c];
                e[r * nn + c] = z.re;
                e[(n + r) * nn + (n + c)] = z.re;
                e[(n + r) * nn + c] = z.im;
                e[r * nn + (n + c)] = -z.im;
            }
        }
        e
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            acc += a[p * n + q] * a[p * n + q];
        }
    }
    (2.0 * acc).sqrt()
}

/// One cyclic Jacobi pass; `v` accumulates rotations when present.
fn jacobi_sweep(a: &mut [f64], v: Option<&mut [f64]>, n: usize) {
    let mut v = v;
    for p in 0..n.saturating_sub(1) {
        for q in (p + 1)..n {
            let apq = a[p * n + q];
            if apq.abs() < f64::MIN_POSITIVE {
                continue;
            }
            let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                1.0 / (tau - (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            for i in 0..n {
                let aip = a[i * n + p];
                let aiq = a[i * n + q];
                a[i * n + p] = c * aip - s * aiq;
                a[i * n + q] = s * aip + c * aiq;
            }
            for i in 0..n {
                let api = a[p * n + i];
                let aqi = a[q * n + i];
                a[p * n + i] = c * api - s * aqi;
                a[q * n + i] = s * api + c * aqi;
            }
            if let Some(vv) = v.as_deref_mut() {
                for i in 0..n {
                    let vip = vv[i * n + p];
                    let viq = vv[i * n + q];
                    vv[i * n + p] = c * vip - s * viq;
                    vv[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }
}

fn jacobi_converged(a: &[f64], n: usize) -> bool {
    let diag_norm: f64 = (0..n)
        .map(|i| a[i * n + i] * a[i * n + i])
        .sum::<f64>()
        .sqrt();
    off_diagonal_norm(a, n) <= 1e-14 * (1.0 + diag_norm)
}

/// Eigenvalues of a real symmetric matrix, unsorted.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    for _ in 0..JACOBI_MAX_SWEEPS {
        if jacobi_converged(a, n) {
            break;
        }
        jacobi_sweep(a, None, n);
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Eigenvalues and eigenvectors (columns of the returned matrix) of a real
/// symmetric matrix: `A = V diag(evals) V^T`.
fn jacobi_eigen_with_vectors(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        if jacobi_converged(a, n) {
            break;
        }
        jacobi_sweep(a, Some(&mut v), n);
    }
    let evals = (0..n).map(|i| a[i * n + i]).collect();
    (evals, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    // ===== basic algebra =====

    #[test]
    fn identity_is_multiplicative_unit() {
        let y = pauli_y();
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(y.mul(&i2), y);
        assert_eq!(i2.mul(&y), y);
    }

    #[test]
    fn dagger_of_pauli_y_is_itself() {
        let y = pauli_y();
        assert!(y.max_abs_diff(&y.dagger()) == 0.0);
        assert!(y.hermiticity_residual() == 0.0);
    }

    #[test]
    fn trace_of_outer_product_is_norm_squared() {
        let v = [c(1.0, 0.0), c(0.0, 2.0)];
        let p = ComplexMatrix::outer(&v);
        let tr = p.trace();
        assert!((tr.re - 5.0).abs() < 1e-15);
        assert!(tr.im.abs() < 1e-15);
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let i2 = ComplexMatrix::identity(2);
        let y = pauli_y();
        let k = i2.kron(&y);
        assert_eq!(k.dim(), 4);
        assert_eq!(k.at(0, 1), c(0.0, -1.0));
        assert_eq!(k.at(2, 3), c(0.0, -1.0));
        assert_eq!(k.at(0, 3), Complex64::ZERO);
    }

    #[test]
    fn quadratic_form_matches_direct_computation() {
        let y = pauli_y();
        // <+|Y|+> = 0 for |+> = (1,1)/sqrt(2); <v|Y|v> = 1 for v = (1,i)/sqrt(2).
        let plus = [c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)];
        let circ = [c(1.0 / 2f64.sqrt(), 0.0), c(0.0, 1.0 / 2f64.sqrt())];
        assert!(y.quadratic_form(&plus).norm() < 1e-15);
        assert!((y.quadratic_form(&circ).re - 1.0).abs() < 1e-15);
    }

    // ===== eigenvalues =====

    #[test]
    fn eigenvalue_range_of_pauli_y() {
        let (lo, hi) = pauli_y().eigenvalue_range();
        assert!((lo + 1.0).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_range_of_diagonal_matrix() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(3.0, 0.0), Complex64::ZERO, Complex64::ZERO],
            vec![Complex64::ZERO, c(-0.5, 0.0), Complex64::ZERO],
            vec![Complex64::ZERO, Complex64::ZERO, c(1.25, 0.0)],
        ])
        .unwrap();
        let (lo, hi) = m.eigenvalue_range();
        assert!((lo + 0.5).abs() < 1e-12);
        assert!((hi - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_range_survives_degenerate_spectrum() {
        let m = ComplexMatrix::identity(4).scale(0.25);
        let (lo, hi) = m.eigenvalue_range();
        assert!((lo - 0.25).abs() < 1e-13);
        assert!((hi - 0.25).abs() < 1e-13);
    }

    // ===== square root =====

    #[test]
    fn sqrt_of_projector_is_projector() {
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let p = ComplexMatrix::outer(&v);
        let s = p.sqrt_psd().unwrap();
        assert!(s.mul(&s).max_abs_diff(&p) < 1e-12);
        assert!(s.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn sqrt_squares_back_to_input_on_random_psd() {
        // A fixed Gram matrix G = X X^dagger is PSD by construction.
        let x = ComplexMatrix::from_rows(vec![
            vec![c(0.3, 0.1), c(-0.7, 0.4), c(0.2, 0.0)],
            vec![c(1.1, -0.2), c(0.05, 0.3), c(-0.4, 0.9)],
            vec![c(0.0, 0.8), c(0.6, -0.5), c(0.33, 0.21)],
        ])
        .unwrap();
        let g = x.mul(&x.dagger());
        let s = g.sqrt_psd().unwrap();
        assert!(s.hermiticity_residual() < 1e-13);
        assert!(s.mul(&s).max_abs_diff(&g) < 1e-11);
        let (lo, _) = s.eigenvalue_range();
        assert!(lo > -1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite_matrix() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), Complex64::ZERO],
            vec![Complex64::ZERO, c(-0.2, 0.0)],
        ])
        .unwrap();
        match m.sqrt_psd() {
            Err(Error::NotPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.2).abs() < 1e-12)
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn sqrt_rejects_non_hermitian_matrix() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.5, 0.0)],
            vec![Complex64::ZERO, c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(m.sqrt_psd(), Err(Error::NotHermitian { .. })));
    }
}
