//! Dense complex linear algebra for the quantization backends.
//!
//! Everything numeric in the crate funnels through [`CMatrix`], a row-major
//! dense matrix over `Complex64`. Operator norms are computed by exact SVD up
//! to [`SVD_DIM_LIMIT`] and by power iteration on A†A (relative tolerance
//! [`POWER_ITER_REL_TOL`]) above it; [`NormResult`] records which path ran.
//! Ranks come from singular values against an absolute tolerance, with an
//! ambiguity warning when some singular value lands in the grey zone around
//! the threshold. Positive semidefiniteness is decided by attempting a
//! Cholesky factorization of the Hermitian part shifted by `tol·I`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest dimension for which operator norms use a full SVD; beyond this,
/// power iteration on A†A is used instead.
pub const SVD_DIM_LIMIT: usize = 512;

/// Relative convergence tolerance for the power-iteration fallback.
pub const POWER_ITER_REL_TOL: f64 = 1e-10;

/// Iteration cap for the power-iteration fallback.
const POWER_ITER_MAX: usize = 20_000;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build a matrix entry-by-entry from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Build a square diagonal matrix from the given diagonal entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, *d);
        }
        m
    }

    /// Build from a row-major slice; `data.len()` must equal `rows * cols`.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Domain(format!(
                "matrix data length {} does not match shape {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(CMatrix {
            rows,
            cols,
            data: data.to_vec(),
        })
    }

    /// Number of rows.
    pub fn nrows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// True for square matrices.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry accessor (panics out of range, like slice indexing).
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Entry mutator (panics out of range, like slice indexing).
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    /// Row-major view of the underlying storage.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Entrywise sum; shapes must match.
    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Entrywise difference; shapes must match.
    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &CMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Domain(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Matrix product; inner dimensions must agree.
    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Domain(format!(
                "matmul shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::Domain(format!(
                "trace of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// Frobenius norm √Σ|a_ij|².
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius inner product ⟨A, B⟩ = Σ conj(a_ij) b_ij.
    pub fn frobenius_inner(&self, other: &CMatrix) -> Result<Complex64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Domain("frobenius_inner shape mismatch".into()));
        }
        Ok(self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest entry magnitude max |a_ij|.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of A − A† (0 exactly when Hermitian).
    pub fn hermiticity_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::Domain("hermiticity of non-square matrix".into()));
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        Ok(worst)
    }

    /// True when ‖A − A†‖_max ≤ tol.
    pub fn is_hermitian(&self, tol: f64) -> Result<bool> {
        Ok(self.hermiticity_defect()? <= tol)
    }

    /// Apply A to a vector.
    pub fn apply_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Domain("apply_vec length mismatch".into()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    fn to_na(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// Commutator [A, B] = AB − BA.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// Anticommutator {A, B} = AB + BA.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.matmul(b)?.add(&b.matmul(a)?)
}

/// Which algorithm produced an operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    /// Full singular value decomposition.
    ExactSvd,
    /// Power iteration on A†A.
    PowerIteration,
}

/// Operator norm together with provenance.
#[derive(Debug, Clone, Copy)]
pub struct NormResult {
    /// The spectral norm ‖A‖ = σ_max(A).
    pub value: f64,
    /// Which algorithm ran.
    pub method: NormMethod,
    /// Iteration count for the power-iteration path.
    pub iterations: Option<usize>,
}

/// Spectral norm ‖A‖.
///
/// Full SVD for max(rows, cols) ≤ [`SVD_DIM_LIMIT`]; power iteration on A†A
/// with relative tolerance [`POWER_ITER_REL_TOL`] otherwise.
pub fn operator_norm(a: &CMatrix) -> NormResult {
    if a.rows == 0 || a.cols == 0 {
        return NormResult {
            value: 0.0,
            method: NormMethod::ExactSvd,
            iterations: None,
        };
    }
    if a.rows.max(a.cols) <= SVD_DIM_LIMIT {
        let sv = a.to_na().singular_values();
        let value = sv.iter().fold(0.0f64, |m, s| m.max(*s));
        NormResult {
            value,
            method: NormMethod::ExactSvd,
            iterations: None,
        }
    } else {
        let (value, iterations) = power_iteration_norm(a);
        NormResult {
            value,
            method: NormMethod::PowerIteration,
            iterations: Some(iterations),
        }
    }
}

/// ‖A‖ via power iteration on A†A, deterministic start vector.
fn power_iteration_norm(a: &CMatrix) -> (f64, usize) {
    let n = a.cols;
    // Deterministic pseudo-random start vector (splitmix64 stream) so repeated
    // runs agree bit-for-bit.
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z = z ^ (z >> 31);
        (z as f64 / u64::MAX as f64) - 0.5
    };
    let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
    let norm_of = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nv = norm_of(&v);
    if nv == 0.0 {
        return (0.0, 0);
    }
    v.iter_mut().for_each(|c| *c /= nv);

    let adag = a.dagger();
    let mut last = 0.0f64;
    for it in 1..=POWER_ITER_MAX {
        let av = a.apply_vec(&v).expect("shape checked");
        let sigma = norm_of(&av);
        if sigma == 0.0 {
            return (0.0, it);
        }
        let w = adag.apply_vec(&av).expect("shape checked");
        let nw = norm_of(&w);
        if nw == 0.0 {
            return (sigma, it);
        }
        v = w.into_iter().map(|c| c / nw).collect();
        if (sigma - last).abs() <= POWER_ITER_REL_TOL * sigma.max(1e-300) {
            return (sigma, it);
        }
        last = sigma;
    }
    (last, POWER_ITER_MAX)
}

/// All singular values, descending.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.rows == 0 || a.cols == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.to_na().singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Outcome of a numerical rank computation.
#[derive(Debug, Clone)]
pub struct RankResult {
    /// Number of singular values strictly above the tolerance.
    pub rank: usize,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Set when some singular value lies within a factor of 10 of the
    /// tolerance on either side, making the rank decision ambiguous.
    pub ambiguous: Vec<f64>,
}

/// Numerical rank of A: #{σ > tol}, with an ambiguity report for singular
/// values in `[tol/10, 10·tol]`.
pub fn numerical_rank(a: &CMatrix, tol: f64) -> RankResult {
    let sv = singular_values(a);
    let rank = sv.iter().filter(|s| **s > tol).count();
    let ambiguous = sv
        .iter()
        .copied()
        .filter(|s| *s >= tol / 10.0 && *s <= tol * 10.0)
        .collect();
    RankResult {
        rank,
        singular_values: sv,
        ambiguous,
    }
}

/// True when the Hermitian part of A, shifted by `tol·I`, admits a Cholesky
/// factorization with strictly positive pivots — i.e. A is positive
/// semidefinite up to `tol`.
pub fn is_positive_semidefinite(a: &CMatrix, tol: f64) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::Domain("psd check on non-square matrix".into()));
    }
    let n = a.nrows();
    let h = CMatrix::from_fn(n, n, |i, j| {
        let v = (a.get(i, j) + a.get(j, i).conj()) * Complex64::new(0.5, 0.0);
        if i == j {
            v + Complex64::new(tol, 0.0)
        } else {
            v
        }
    });
    // In-place lower Cholesky; a non-positive pivot certifies indefiniteness.
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = h.get(j, j).re;
        for k in 0..j {
            pivot -= l.get(j, k).norm_sqr();
        }
        if pivot <= 0.0 {
            return Ok(false);
        }
        let ljj = pivot.sqrt();
        l.set(j, j, Complex64::new(ljj, 0.0));
        for i in (j + 1)..n {
            let mut v = h.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, v / ljj);
        }
    }
    Ok(true)
}

/// Solve the square linear system A x = b by LU with partial pivoting.
pub fn solve_linear(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if !a.is_square() || a.nrows() != b.len() {
        return Err(Error::Domain("solve_linear shape mismatch".into()));
    }
    let lu = a.to_na().lu();
    let rhs = nalgebra::DVector::from_column_slice(b);
    match lu.solve(&rhs) {
        Some(x) => Ok(x.iter().copied().collect()),
        None => Err(Error::Consistency(
            "linear system is singular to working precision".into(),
        )),
    }
}

/// Orthonormal basis for the column span of A (left singular vectors with
/// σ > tol), returned as the columns of the output matrix.
pub fn column_span_basis(a: &CMatrix, tol: f64) -> CMatrix {
    if a.rows == 0 || a.cols == 0 {
        return CMatrix::zeros(a.rows, 0);
    }
    let svd = a.to_na().svd(true, false);
    let u = svd.u.expect("u requested");
    let sv = svd.singular_values;
    let keep: Vec<usize> = (0..sv.len()).filter(|i| sv[*i] > tol).collect();
    CMatrix::from_fn(a.rows, keep.len(), |i, j| u[(i, keep[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    fn pauli_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap()
    }

    #[test]
    fn pauli_commutator_is_2i_sigma_z() {
        let lhs = commutator(&pauli_x(), &pauli_y()).unwrap();
        let rhs = pauli_z().scale(c(0., 2.));
        assert_eq!(lhs.sub(&rhs).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn operator_norm_of_pauli_is_one() {
        let r = operator_norm(&pauli_x());
        assert_eq!(r.method, NormMethod::ExactSvd);
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn operator_norm_matches_largest_singular_value() {
        let a = CMatrix::from_row_slice(
            2,
            3,
            &[c(1., 0.), c(0., 2.), c(0., 0.), c(0., 0.), c(3., 0.), c(0., 0.)],
        )
        .unwrap();
        // Columns have norms 1, √13, 0; σ_max of this matrix is computed by
        // hand from A A† = [[5, 6i], [-6i, 9]]: eigenvalues 7 ± √40.
        let expect = (7.0 + 40.0f64.sqrt()).sqrt();
        assert!((operator_norm(&a).value - expect).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        // Build a 30x30 matrix and compare the two codepaths directly.
        let a = CMatrix::from_fn(30, 30, |i, j| {
            c(((i * 7 + j * 3) % 11) as f64 / 11.0, ((i + 2 * j) % 5) as f64 / 5.0)
        });
        let svd = operator_norm(&a).value;
        let (pi, iters) = power_iteration_norm(&a);
        assert!(iters < POWER_ITER_MAX);
        assert!((svd - pi).abs() <= 1e-8 * svd);
    }

    #[test]
    fn zero_matrix_norm_is_zero_on_both_paths() {
        let z = CMatrix::zeros(4, 4);
        assert_eq!(operator_norm(&z).value, 0.0);
        assert_eq!(power_iteration_norm(&z).0, 0.0);
    }

    #[test]
    fn rank_counts_values_above_tolerance() {
        let a = CMatrix::from_diag(&[c(1., 0.), c(0.5, 0.), c(1e-13, 0.), c(0., 0.)]);
        let r = numerical_rank(&a, 1e-10);
        assert_eq!(r.rank, 2);
        // 1e-13 is inside [tol/10, 10 tol]? tol/10 = 1e-11, so no: below the
        // grey zone, no ambiguity expected.
        assert!(r.ambiguous.is_empty());
        // 1e-13 is below tol = 1e-12 but inside the grey zone [tol/10, 10 tol].
        let r2 = numerical_rank(&a, 1e-12);
        assert_eq!(r2.rank, 2);
        assert_eq!(r2.ambiguous.len(), 1);
    }

    #[test]
    fn psd_accepts_gram_and_rejects_indefinite() {
        let g = CMatrix::from_row_slice(2, 2, &[c(2., 0.), c(1., 0.), c(1., 0.), c(2., 0.)])
            .unwrap();
        assert!(is_positive_semidefinite(&g, 1e-12).unwrap());
        assert!(!is_positive_semidefinite(&pauli_z(), 1e-12).unwrap());
        // Rank-deficient PSD matrix passes thanks to the tol shift.
        let s = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(1., 0.), c(1., 0.)])
            .unwrap();
        assert!(is_positive_semidefinite(&s, 1e-12).unwrap());
    }

    #[test]
    fn hermiticity_defect_detects_asymmetry() {
        assert_eq!(pauli_y().hermiticity_defect().unwrap(), 0.0);
        let mut m = pauli_y();
        m.set(0, 1, c(0., -1.0 + 1e-6));
        assert!(m.hermiticity_defect().unwrap() > 1e-7);
    }

    #[test]
    fn solve_linear_roundtrips() {
        let a = CMatrix::from_row_slice(2, 2, &[c(2., 0.), c(1., 1.), c(0., -1.), c(3., 0.)])
            .unwrap();
        let x = vec![c(1., 2.), c(-0.5, 0.25)];
        let b = a.apply_vec(&x).unwrap();
        let got = solve_linear(&a, &b).unwrap();
        for (g, e) in got.iter().zip(x.iter()) {
            assert!((g - e).norm() < 1e-12);
        }
    }

    #[test]
    fn column_span_basis_is_orthonormal() {
        let a = CMatrix::from_row_slice(
            3,
            2,
            &[c(1., 0.), c(1., 0.), c(0., 1.), c(0., 1.), c(0., 0.), c(0., 0.)],
        )
        .unwrap();
        let u = column_span_basis(&a, 1e-12);
        assert_eq!(u.ncols(), 1); // second column is a multiple of the first
        let g = u.dagger().matmul(&u).unwrap();
        assert!((g.get(0, 0) - c(1., 0.)).norm() < 1e-12);
    }

    #[test]
    fn trace_and_frobenius() {
        let a = CMatrix::from_diag(&[c(1., 0.), c(0., 2.)]);
        assert_eq!(a.trace().unwrap(), c(1., 2.));
        assert!((a.frobenius_norm() - 5.0f64.sqrt()).abs() < 1e-15);
    }
}
