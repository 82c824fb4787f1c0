//! Small dense complex matrices for one and two qubits.
//!
//! Everything here is sized for dimension 2 or 4 and stored inline, so
//! matrices are `Copy` and every operation is a pure function.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Symmetry tolerance used by [`ComplexMatrix::hermitian_eigenvalues`].
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_DIM: usize = 4;

/// A `dim x dim` complex matrix with `dim` in {2, 4}, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; MAX_DIM * MAX_DIM],
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [ZERO; MAX_DIM * MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        m.data[..dim * dim].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &c)
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(entries.len())?;
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, C64::new(x, 0.0));
        }
        Ok(m)
    }

    /// Outer product `|v><v|` of a state vector of length 2 or 4.
    pub fn projector(v: &[C64]) -> Result<Self> {
        let dim = v.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        debug_assert!(row < self.dim && col < self.dim);
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= factor);
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `u * self * u^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        *u * *self * u.adjoint()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Real part of `Tr(self * other)`.
    pub fn trace_product(&self, other: &ComplexMatrix) -> f64 {
        (*self * *other).trace().re
    }

    /// `Tr(m^2)`, the purity for a density operator.
    pub fn purity(&self) -> f64 {
        self.trace_product(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product with the row-major block convention
    /// `out[(2i+k),(2j+l)] = a[i,j] * b[k,l]`.
    pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        for m in [a, b] {
            if m.dim != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: m.dim,
                });
            }
        }
        let mut out = Self::zeros(4)?;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.set(2 * i + k, 2 * j + l, a.get(i, j) * b.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduced operator on the first qubit of a two-qubit operator.
    pub fn partial_trace_b(&self) -> Result<Self> {
        self.require_dim(4)?;
        let mut out = Self::zeros(2)?;
        for i in 0..2 {
            for j in 0..2 {
                let z = (0..2).map(|k| self.get(2 * i + k, 2 * j + k)).sum();
                out.set(i, j, z);
            }
        }
        Ok(out)
    }

    /// Reduced operator on the second qubit of a two-qubit operator.
    pub fn partial_trace_a(&self) -> Result<Self> {
        self.require_dim(4)?;
        let mut out = Self::zeros(2)?;
        for k in 0..2 {
            for l in 0..2 {
                let z = (0..2).map(|i| self.get(2 * i + k, 2 * i + l)).sum();
                out.set(k, l, z);
            }
        }
        Ok(out)
    }

    pub fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim,
            })
        }
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Uses the closed form for 2x2 and cyclic complex Jacobi rotations for 4x4.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let dev = self.hermitian_deviation();
        // written to also reject NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(dev <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        let mut values = match self.dim {
            2 => eigenvalues_2x2(self),
            _ => jacobi_eigenvalues(self),
        };
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.hermitian_eigenvalues()?[0])
    }

    fn binary_op(self, rhs: Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self;
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o = f(*o, *r);
        }
        out
    }
}

fn eigenvalues_2x2(m: &ComplexMatrix) -> Vec<f64> {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    vec![mean - radius, mean + radius]
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim;
    // symmetrize so rounding in the input does not leak into the rotations
    let mut a = (*m + m.adjoint()).scale_real(0.5);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        if off_diagonal_norm(&a) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // phase on column q makes the (p,q) entry real and positive
                let phase = C64::from_polar(1.0, -apq.arg());
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
                let (s, c) = theta.sin_cos();

                let mut v = ComplexMatrix::identity(n).expect("dim checked");
                v.set(p, p, C64::new(c, 0.0));
                v.set(p, q, C64::new(s, 0.0));
                v.set(q, p, phase * -s);
                v.set(q, q, phase * c);
                a = v.adjoint() * a * v;
            }
        }
    }
    (0..n).map(|i| a.get(i, i).re).collect()
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self {
        self.binary_op(rhs, |x, y| x + y)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        self.binary_op(rhs, |x, y| x - y)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = self;
        for i in 0..n {
            for j in 0..n {
                let z = (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum();
                out.set(i, j, z);
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Sum of a sequence of equally sized matrices.
pub fn sum_matrices<'a>(dim: usize, items: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    items
        .into_iter()
        .fold(ComplexMatrix::zeros(dim).expect("dim 2 or 4"), |acc, m| acc + *m)
}

/// Real 3x3 matrix acting on Bloch vectors, row-major.
pub type Mat3 = [[f64; 3]; 3];

pub const MAT3_IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mat3_apply(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub fn mat3_det(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat3_max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
