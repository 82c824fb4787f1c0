//! Shared test helpers: random states and independently written operators.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use proptest::prelude::*;
use sicwig::numerics::ComplexMatrix;
use sicwig::pauli::DensityOperator;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Pauli matrices written out entry by entry.
pub fn px() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
}
pub fn py() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
}
pub fn pz() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap()
}
pub fn id2() -> ComplexMatrix {
    ComplexMatrix::identity(2).unwrap()
}

fn sgn(e: u32) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Phase-point operator at label index `2k + l`:
/// even `(1/2)(I + (-1)^l X + (-1)^(k+l) Y + (-1)^k Z)`, odd with the Bloch part negated.
pub fn phase_point(odd: bool, idx: usize) -> ComplexMatrix {
    let (k, l) = ((idx / 2) as u32, (idx % 2) as u32);
    let s = if odd { -1.0 } else { 1.0 };
    let bloch = px().scale_real(sgn(l)) + py().scale_real(sgn(k + l)) + pz().scale_real(sgn(k));
    (id2() + bloch.scale_real(s)).scale_real(0.5)
}

/// Detector effect `(1/4)(I + t . sigma)` with top `t` aligned to [`phase_point`].
pub fn effect(odd: bool, idx: usize) -> ComplexMatrix {
    let (k, l) = ((idx / 2) as u32, (idx % 2) as u32);
    let s = if odd { -1.0 } else { 1.0 } / 3f64.sqrt();
    let bloch = px().scale_real(sgn(l)) + py().scale_real(sgn(k + l)) + pz().scale_real(sgn(k));
    (id2() + bloch.scale_real(s)).scale_real(0.25)
}

/// `rho = G G^dagger / Tr` from a complex Ginibre-like matrix of given entries.
pub fn state_from_entries(dim: usize, raw: &[f64]) -> DensityOperator {
    let g: Vec<C> = raw.chunks(2).take(dim * dim).map(|p| c(p[0], p[1])).collect();
    let g = ComplexMatrix::from_row_major(dim, &g).unwrap();
    let m = g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr)).unwrap()
}

/// Random two-qubit states: full-rank mixed or pure (rank one).
pub fn two_qubit_state() -> impl Strategy<Value = DensityOperator> {
    prop_oneof![
        prop::collection::vec(-1.0f64..1.0, 32)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| state_from_entries(4, &v)),
        prop::collection::vec(-1.0f64..1.0, 8)
            .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let psi: Vec<C> = v.chunks(2).map(|p| c(p[0] / norm, p[1] / norm)).collect();
                DensityOperator::pure(&psi).unwrap()
            }),
    ]
}

pub fn qubit_state() -> impl Strategy<Value = DensityOperator> {
    prop::collection::vec(-1.0f64..1.0, 8)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| state_from_entries(2, &v))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::tensor(a, b).unwrap()
}
