//! Small dense complex-matrix kernel.
//!
//! Everything in this crate lives in 2×2 or 4×4 Hilbert spaces, so the
//! matrix type is a plain row-major `Vec<Complex64>` and the Hermitian
//! eigensolver is cyclic Jacobi. Basis order for two qubits is
//! |00⟩, |01⟩, |10⟩, |11⟩.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Residual thresholds used by [`validate_density`].
pub const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-12;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
const TIE_TOL: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n_cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: n_rows,
            cols: n_cols,
            data,
        }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(v, 0.0);
        }
        m
    }

    /// |v⟩⟨v|
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise |m_ij − conj(m_ji)|; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        r
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        (self + &adj).scale_real(0.5)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// A ρ A†
    pub fn conjugate(&self, rho: &Self) -> Self {
        &(self * rho) * &self.adjoint()
    }

    /// ⟨u|M|v⟩
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter()
            .enumerate()
            .map(|(i, ui)| {
                let row: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(j, vj)| self.get(i, j) * vj)
                    .sum();
                ui.conj() * row
            })
            .sum()
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch in elementwise op"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Frobenius distance ‖self − other‖.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on non-conforming shapes; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("non-conforming matrix product")
    }
}

/// Pauli matrix σ_k, k ∈ {0,1,2,3} with σ₀ = I.
pub fn pauli(k: usize) -> ComplexMatrix {
    match k {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        3 => ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("Pauli index out of range: {k}"),
    }
}

/// Kronecker product with block layout `a[i][j] · b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out.data[(i * b.rows + k) * cols + j * b.cols + l] = aij * b.get(k, l);
                }
            }
        }
    }
    out
}

/// Eigenpairs of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, `eigenvectors[i]` pairs with `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl SpectralDecomposition {
    /// Σᵢ λᵢ |ψᵢ⟩⟨ψᵢ|
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            out = &out + &ComplexMatrix::outer(v).scale_real(*lambda);
        }
        out
    }

    /// Eigenvalues with numerical PSD noise in `[-EIGEN_CLAMP, 0)` set to zero.
    pub fn clamped_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .map(|&l| clamp_eigenvalue(l))
            .collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }
}

pub fn clamp_eigenvalue(l: f64) -> f64 {
    if (-EIGEN_CLAMP..0.0).contains(&l) {
        0.0
    } else {
        l
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Ordering is deterministic: eigenvalues descending; within a cluster of
/// eigenvalues closer than 1e-12, eigenvectors are ordered lexicographically
/// by their (re, im) entries after fixing the phase of the first nonzero
/// entry to be real positive.
pub fn eigh(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let mut col: Vec<Complex64> = (0..n).map(|i| v.get(i, k)).collect();
            normalize_phase(&mut col);
            (a.get(k, k).re, col)
        })
        .collect();
    sort_eigenpairs(&mut pairs);

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation zeroing a[p][q]; accumulates the rotation into v.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r < 1e-300 {
        return;
    }
    let phase = apq / r; // e^{iα}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.rows;

    // J = [[c, s e^{iα}], [-s e^{-iα}, c]] on (p, q); A ← J† A J, V ← V J.
    let jpq = phase * s;
    let jqp = -phase.conj() * s;
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c + akq * jqp);
        a.set(k, q, akp * jpq + akq * c);
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c + vkq * jqp);
        v.set(k, q, vkp * jpq + vkq * c);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c + aqk * jqp.conj());
        a.set(q, k, apk * jpq.conj() + aqk * c);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
}

fn normalize_phase(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let lead = v.iter().copied().find(|z| z.norm() > 1e-12).unwrap_or(ONE);
    let fix = lead.conj() / lead.norm() / norm;
    for z in v.iter_mut() {
        *z *= fix;
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn sort_eigenpairs(pairs: &mut [(f64, Vec<Complex64>)]) {
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end - 1].0 - pairs[end].0 <= TIE_TOL {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
        }
        start = end;
    }
}

/// Residuals describing how far a matrix is from a valid density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityDiagnostics {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// Checks Hermiticity, unit trace and positivity. Never fails; a non-square
/// or wildly non-Hermitian input simply reports `passed = false`.
pub fn validate_density(m: &ComplexMatrix) -> DensityDiagnostics {
    if !m.is_square() {
        return DensityDiagnostics {
            hermiticity_residual: f64::INFINITY,
            trace_residual: f64::INFINITY,
            min_eigenvalue: f64::NAN,
            passed: false,
        };
    }
    let hermiticity_residual = m.hermiticity_residual();
    let trace_residual = (m.trace() - ONE).norm();
    // The spectrum of the Hermitian part is still informative when the
    // input is slightly non-Hermitian.
    let h = m.hermitian_part();
    let min_eigenvalue = eigh(&h).map_or(f64::NAN, |s| s.min_eigenvalue());
    let passed = hermiticity_residual <= DENSITY_TOL
        && trace_residual <= DENSITY_TOL
        && min_eigenvalue >= -DENSITY_TOL;
    DensityDiagnostics {
        hermiticity_residual,
        trace_residual,
        min_eigenvalue,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_identity_and_paulis() {
        assert_eq!(tensor(&pauli(0), &pauli(0)), ComplexMatrix::identity(4));
        assert_eq!(
            tensor(&pauli(3), &pauli(3)),
            ComplexMatrix::diag(&[1.0, -1.0, -1.0, 1.0])
        );
        let xx = tensor(&pauli(1), &pauli(1));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { ONE } else { ZERO };
                assert_eq!(xx.get(i, j), expected);
            }
        }
    }

    #[test]
    fn tensor_dimensions_multiply() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(1, 2);
        let t = tensor(&a, &b);
        assert_eq!((t.rows(), t.cols()), (2, 6));
    }

    #[test]
    fn eigh_diagonal() {
        let s = eigh(&ComplexMatrix::diag(&[0.3, 0.7])).unwrap();
        assert!((s.eigenvalues[0] - 0.7).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn eigh_pauli_x() {
        let s = eigh(&pauli(1)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        let v0 = &s.eigenvectors[0];
        let v1 = &s.eigenvectors[1];
        assert!((v0[0] - c(h, 0.0)).norm() < 1e-14 && (v0[1] - c(h, 0.0)).norm() < 1e-14);
        assert!((v1[0] - c(h, 0.0)).norm() < 1e-14 && (v1[1] - c(-h, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigh_pauli_y_phase_convention() {
        let s = eigh(&pauli(2)).unwrap();
        for v in &s.eigenvectors {
            assert!(v[0].im.abs() < 1e-14 && v[0].re > 0.0);
        }
        let rec = s.reconstruct();
        assert!(rec.distance(&pauli(2)) < 1e-12);
    }

    #[test]
    fn eigh_singlet_projector() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ZERO, c(h, 0.0), c(-h, 0.0), ZERO];
        let s = eigh(&ComplexMatrix::outer(&psi)).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (l, e) in s.eigenvalues.iter().zip(expected) {
            assert!((l - e).abs() < 1e-12);
        }
        // Leading eigenvector is the singlet itself, phase-fixed on |01⟩.
        assert!((s.eigenvectors[0][1] - c(h, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_degenerate_order_is_deterministic() {
        let s1 = eigh(&ComplexMatrix::identity(4)).unwrap();
        let s2 = eigh(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(s1.eigenvectors, s2.eigenvectors);
    }

    #[test]
    fn validate_maximally_mixed() {
        let d = validate_density(&ComplexMatrix::identity(4).scale_real(0.25));
        assert!(d.passed);
        assert!((d.min_eigenvalue - 0.25).abs() < 1e-14);
    }

    #[test]
    fn validate_flags_bad_trace_and_shape() {
        assert!(!validate_density(&ComplexMatrix::identity(2)).passed);
        assert!(!validate_density(&ComplexMatrix::zeros(2, 3)).passed);
    }

    #[test]
    fn clamp_only_touches_tiny_negatives() {
        assert_eq!(clamp_eigenvalue(-5e-13), 0.0);
        assert_eq!(clamp_eigenvalue(-1e-9), -1e-9);
        assert_eq!(clamp_eigenvalue(0.2), 0.2);
    }
}
