//! Dense complex matrices and the Hermitian newtype built on top of them.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Entry-wise tolerance for the Hermitian symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            ));
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// `|u><v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.set(i * m + k, j * m + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|A[i][j] - conj(A[j][i])|` together with its position.
    pub fn hermitian_defect(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Complex Hermitian matrix. Construction checks `A = A†` entry-wise to
/// [`HERMITIAN_TOL`] and then symmetrizes exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.dim() == 0 {
            return invalid("Hermitian matrix must have dimension >= 1");
        }
        let (dev, row, col) = m.hermitian_defect();
        if dev > tol {
            return Err(Error::NotHermitian {
                row,
                col,
                deviation: dev,
            });
        }
        Ok(Self::symmetrized(m))
    }

    /// `(A + A†)/2` with no tolerance check; for matrices Hermitian by construction.
    pub fn symmetrized(m: CMatrix) -> Self {
        let n = m.dim();
        let out = CMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(m.get(i, i).re, 0.0)
            } else {
                (m.get(i, j) + m.get(j, i).conj()) * 0.5
            }
        });
        Self(out)
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_vec(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )?)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self(CMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    /// `|ψ><ψ|`
    pub fn projector(psi: &[Complex64]) -> Self {
        Self::symmetrized(CMatrix::outer(psi, psi))
    }

    pub fn pauli_x() -> Self {
        Self::diag(&[0.0, 0.0]).with_entry(0, 1, ONE)
    }

    /// Sets `A[i][j] = v` and `A[j][i] = conj(v)`.
    pub fn with_entry(mut self, i: usize, j: usize, v: Complex64) -> Self {
        if i == j {
            self.0.set(i, i, Complex64::new(v.re, 0.0));
        } else {
            self.0.set(i, j, v);
            self.0.set(j, i, v.conj());
        }
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0.get(i, j)
    }

    pub fn as_cmatrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_cmatrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr(A B)` for Hermitian `A`, `B`, which is real.
    pub fn trace_product(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) * other.get(j, i)).re;
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(Complex64::new(s, 0.0)))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::symmetrized(self.0.kron(&other.0))
    }

    pub fn is_real(&self) -> bool {
        self.0.as_slice().iter().all(|z| z.im == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// `U A U†`
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::symmetrized(u.matmul(&self.0).matmul(&u.adjoint()))
    }

    /// Partial trace over the first tensor factor of `A` on `C^{d_a} ⊗ C^{d_b}`.
    pub fn trace_out_first(&self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return invalid(format!(
                "cannot split dimension {} as {d_a}x{d_b}",
                self.dim()
            ));
        }
        Ok(Self::symmetrized(CMatrix::from_fn(d_b, |i, j| {
            (0..d_a).map(|a| self.get(a * d_b + i, a * d_b + j)).sum()
        })))
    }

    /// Partial trace over the second tensor factor of `A` on `C^{d_a} ⊗ C^{d_b}`.
    pub fn trace_out_second(&self, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a * d_b != self.dim() {
            return invalid(format!(
                "cannot split dimension {} as {d_a}x{d_b}",
                self.dim()
            ));
        }
        Ok(Self::symmetrized(CMatrix::from_fn(d_a, |i, j| {
            (0..d_b).map(|b| self.get(i * d_b + b, j * d_b + b)).sum()
        })))
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            CMatrix::from_vec(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        match HermitianMatrix::new(m) {
            Err(Error::NotHermitian { row: 0, col: 1, .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty() {
        assert!(HermitianMatrix::new(CMatrix::zeros(0)).is_err());
    }

    #[test]
    fn partial_traces_of_product() {
        let a = HermitianMatrix::diag(&[0.25, 0.75]);
        let b = HermitianMatrix::projector(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let ab = a.kron(&b);
        assert!(ab.trace_out_first(2, 2).unwrap().max_abs_diff(&b) < 1e-15);
        assert!(ab.trace_out_second(2, 2).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(ab.trace_out_first(3, 2).is_err());
    }

    #[test]
    fn trace_product_matches_matmul() {
        let a = HermitianMatrix::pauli_x();
        let b = HermitianMatrix::diag(&[1.0, 2.0]).with_entry(0, 1, c(0.5, -0.25));
        let direct = a.as_cmatrix().matmul(b.as_cmatrix()).trace();
        assert!((a.trace_product(&b) - direct.re).abs() < 1e-15);
        assert!(direct.im.abs() < 1e-15);
    }
}
