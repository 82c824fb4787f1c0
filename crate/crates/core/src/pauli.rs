//! The qubit displacement (Pauli) group, Bell states and Bloch rotations.
//!
//! A [`Label`] `(i, j)` names `sigma_{i,j}`: `(0,0)` is the identity,
//! `(0,1)` is `sigma_z`, `(1,0)` is `sigma_x` and `(1,1)` is `sigma_y`.
//! The same two-bit labels index tetrahedron tops, detectors and
//! phase-point operators, always in the order `(0,0), (0,1), (1,0), (1,1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64, I, ONE, ZERO};

/// A two-bit label `(i, j)`; its linear index is `2i + j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[u8; 2]", try_from = "[u8; 2]")]
pub struct Label {
    i: u8,
    j: u8,
}

/// Index of a displacement operator `sigma_{i,j}`.
pub type PauliIndex = Label;

/// Bell state label: the Pauli applied to qubit b of the singlet.
pub type BellLabel = Label;

impl Label {
    pub const ALL: [Label; 4] = [
        Label { i: 0, j: 0 },
        Label { i: 0, j: 1 },
        Label { i: 1, j: 0 },
        Label { i: 1, j: 1 },
    ];

    pub fn new(i: u8, j: u8) -> Result<Self> {
        if i > 1 || j > 1 {
            return Err(Error::OutOfRange {
                name: "label bit",
                value: f64::from(i.max(j)),
            });
        }
        Ok(Self { i, j })
    }

    /// Label with linear index `2i + j`.
    ///
    /// # Panics
    /// If `index >= 4`.
    pub fn from_index(index: usize) -> Self {
        assert!(index < 4, "label index {index} out of range");
        Self::ALL[index]
    }

    #[inline]
    pub fn i(self) -> u8 {
        self.i
    }

    #[inline]
    pub fn j(self) -> u8 {
        self.j
    }

    #[inline]
    pub fn index(self) -> usize {
        usize::from(2 * self.i + self.j)
    }

    /// Bitwise sum: the label reached by displacing `self` by `other`.
    #[inline]
    pub fn xor(self, other: Label) -> Label {
        Label {
            i: self.i ^ other.i,
            j: self.j ^ other.j,
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}{})", self.i, self.j)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i, self.j)
    }
}

impl From<Label> for [u8; 2] {
    fn from(l: Label) -> Self {
        [l.i, l.j]
    }
}

impl TryFrom<[u8; 2]> for Label {
    type Error = Error;
    fn try_from(v: [u8; 2]) -> Result<Self> {
        Label::new(v[0], v[1])
    }
}

/// `sigma_{i,j} = sqrt((-1)^{ij}) * sum_k (-1)^{kj} |k+i mod 2><k|`, with `sqrt(-1) = i`.
pub fn sigma(idx: PauliIndex) -> ComplexMatrix {
    let prefactor = if idx.i & idx.j == 1 { I } else { ONE };
    let mut m = ComplexMatrix::zeros(2).expect("dim 2");
    for k in 0..2u8 {
        let sign = if (k & idx.j) == 1 { -1.0 } else { 1.0 };
        let row = usize::from(k ^ idx.i);
        m.set(row, usize::from(k), prefactor * sign);
    }
    m
}

pub fn sigma_x() -> ComplexMatrix {
    sigma(Label { i: 1, j: 0 })
}

pub fn sigma_y() -> ComplexMatrix {
    sigma(Label { i: 1, j: 1 })
}

pub fn sigma_z() -> ComplexMatrix {
    sigma(Label { i: 0, j: 1 })
}

/// `v . sigma` for a real 3-vector `(x, y, z)`.
pub fn pauli_dot(v: [f64; 3]) -> ComplexMatrix {
    sigma_x().scale_real(v[0]) + sigma_y().scale_real(v[1]) + sigma_z().scale_real(v[2])
}

/// Bloch vector `(Tr rho sx, Tr rho sy, Tr rho sz)` of a qubit operator.
pub fn bloch_of(rho: &ComplexMatrix) -> Result<[f64; 3]> {
    rho.require_dim(2)?;
    Ok([
        rho.trace_product(&sigma_x()),
        rho.trace_product(&sigma_y()),
        rho.trace_product(&sigma_z()),
    ])
}

/// `(1/2)(I + p . sigma)`.
pub fn qubit_state(p: [f64; 3]) -> ComplexMatrix {
    (ComplexMatrix::identity(2).expect("dim 2") + pauli_dot(p)).scale_real(0.5)
}

/// A unit-trace Hermitian operator on one or two qubits.
///
/// It need not be positive; [`DensityOperator::is_physical`] decides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub const TRACE_TOL: f64 = 1e-9;
    pub const HERMITIAN_TOL: f64 = 1e-10;

    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let dev = m.hermitian_deviation();
        if dev > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        // exact Hermitian part, so the eigenvalue kernel's tighter check always passes
        Ok(Self((m + m.adjoint()).scale_real(0.5)))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(Self(ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64)))
    }

    /// Pure state `|v><v|` of a normalized vector.
    pub fn pure(v: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::projector(v)?)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.min_eigenvalue().expect("validated Hermitian")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.0.hermitian_eigenvalues().expect("validated Hermitian")
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    pub fn purity(&self) -> f64 {
        self.0.purity()
    }

    /// `(I (x) u) rho (I (x) u)^dagger` for a two-qubit state.
    pub fn apply_local_b(&self, u: &ComplexMatrix) -> Result<Self> {
        let id = ComplexMatrix::identity(2)?;
        let full = ComplexMatrix::tensor(&id, u)?;
        Self::new(self.0.conjugate_by(&full))
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityOperator, w: f64) -> Result<Self> {
        Self::new(self.0.scale_real(w) + other.0.scale_real(1.0 - w))
    }
}

/// The singlet `(|10> - |01>)/sqrt(2)` as a state vector (qubit a first).
pub fn singlet_vector() -> [C64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [ZERO, C64::new(-h, 0.0), C64::new(h, 0.0), ZERO]
}

/// `(I (x) sigma_label) |Psi-><Psi-| (I (x) sigma_label)^dagger`.
pub fn bell_state(label: BellLabel) -> DensityOperator {
    let singlet = DensityOperator::pure(&singlet_vector()).expect("normalized");
    singlet
        .apply_local_b(&sigma(label))
        .expect("unitary conjugation keeps trace")
}

/// `exp(-i angle/2 axis . sigma)`; conjugation rotates Bloch vectors by
/// `angle` about `axis` (right-hand rule).
pub fn rotation_unitary(axis: [f64; 3], angle: f64) -> Result<ComplexMatrix> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::BadAxis(norm));
    }
    let (s, c) = (0.5 * angle).sin_cos();
    let id = ComplexMatrix::identity(2)?;
    Ok(id.scale_real(c) + pauli_dot(axis).scale(C64::new(0.0, -s)))
}
