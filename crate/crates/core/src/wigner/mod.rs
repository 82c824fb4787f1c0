//! Weyl coefficients, discrete Wigner distributions and phase-point operators.
//!
//! Qubit phase-point operators are `(1/2)(I + s_x sx + s_y sy + s_z sz)` with
//! signs `s`; a set is the orbit of one such fiducial under the displacements,
//! `W_{kl} = sigma_{kl} F sigma_{kl}`. The even canonical set lines up with the
//! tetrahedron frame (top `(k,l)` and operator `(k,l)` share a direction), the
//! odd canonical set with the anti-tetrahedron.
//!
//! Two-qubit (quartit) distributions are indexed either by the detector pair
//! `(k, l)` or by the phase-space grid point `(m, n)`; the two never mix.

mod striation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{sum_matrices, ComplexMatrix};
use crate::pauli::{pauli_dot, rotation_unitary, sigma, DensityOperator, Label};
use crate::sic::{swap_middle_labels, Parity, FRAC_1_SQRT_3};
use crate::sim::JointProbabilityTable;

pub use striation::{
    enumerate_quartit_wigner_sets, find_striations, Gf4, Line, QuartitSetReport, Striation,
    StriationKind, StriationStructure,
};

/// `w_{ij} = (1/2) Tr(rho sigma_{ij})`, indexed `[i][j]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylCoefficients(pub [[f64; 2]; 2]);

/// Qubit Wigner distribution `W[k][l]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitWigner(pub [[f64; 2]; 2]);

impl QubitWigner {
    pub fn total(&self) -> f64 {
        self.0.iter().flatten().sum()
    }
}

pub fn weyl_coefficients(rho: &DensityOperator) -> Result<WeylCoefficients> {
    rho.matrix().require_dim(2)?;
    let mut w = [[0.0; 2]; 2];
    for l in Label::ALL {
        w[usize::from(l.i())][usize::from(l.j())] = 0.5 * rho.matrix().trace_product(&sigma(l));
    }
    Ok(WeylCoefficients(w))
}

/// `out[k][l] = (1/2) sum_{ij} (-1)^{il - jk} f[i][j]`; an involution.
pub fn symplectic_transform(f: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for (k, row) in out.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, frow) in f.iter().enumerate() {
                for (j, &v) in frow.iter().enumerate() {
                    let sign = if (i * l + j * k) % 2 == 0 { 1.0 } else { -1.0 };
                    acc += sign * v;
                }
            }
            *cell = 0.5 * acc;
        }
    }
    out
}

pub fn qubit_wigner(rho: &DensityOperator) -> Result<QubitWigner> {
    let w = weyl_coefficients(rho)?;
    Ok(QubitWigner(symplectic_transform(&w.0)))
}

/// `P_{kl} = W_{kl}/sqrt(3) + (1 - 1/sqrt(3))/4`, returned in label order.
pub fn povm_probs_from_qubit_wigner(w: &QubitWigner) -> [f64; 4] {
    Label::ALL.map(|l| {
        FRAC_1_SQRT_3 * w.0[usize::from(l.i())][usize::from(l.j())] + 0.25 * (1.0 - FRAC_1_SQRT_3)
    })
}

/// Inverse of [`povm_probs_from_qubit_wigner`].
pub fn qubit_wigner_from_povm_probs(p: [f64; 4]) -> QubitWigner {
    let mut w = [[0.0; 2]; 2];
    for l in Label::ALL {
        w[usize::from(l.i())][usize::from(l.j())] = 3f64.sqrt() * (p[l.index()] - 0.25 * (1.0 - FRAC_1_SQRT_3));
    }
    QubitWigner(w)
}

/// Four qubit phase-point operators generated from one fiducial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitPhasePointSet {
    fiducial_signs: [i8; 3],
    operators: [ComplexMatrix; 4],
}

impl QubitPhasePointSet {
    /// Set generated by `(1/2)(I + s . sigma)` with `s` in `{+1,-1}^3`.
    pub fn from_fiducial(signs: [i8; 3]) -> Result<Self> {
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::OutOfRange {
                name: "fiducial sign",
                value: f64::from(signs.iter().copied().find(|s| s.abs() != 1).unwrap_or(0)),
            });
        }
        let v = signs.map(f64::from);
        let fid = (ComplexMatrix::identity(2)? + pauli_dot(v)).scale_real(0.5);
        let operators = Label::ALL.map(|l| fid.conjugate_by(&sigma(l)));
        Ok(Self {
            fiducial_signs: signs,
            operators,
        })
    }

    /// Even: `(1/2)(I + sx + sy + sz)`; odd: all three signs flipped.
    pub fn canonical(parity: Parity) -> Self {
        let s = match parity {
            Parity::Even => 1,
            Parity::Odd => -1,
        };
        Self::from_fiducial([s, s, s]).expect("valid signs")
    }

    pub fn fiducial_signs(&self) -> [i8; 3] {
        self.fiducial_signs
    }

    /// Even iff the product of the fiducial signs is `+1`.
    pub fn parity(&self) -> Parity {
        let prod: i8 = self.fiducial_signs.iter().product();
        if prod > 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn operator(&self, label: Label) -> &ComplexMatrix {
        &self.operators[label.index()]
    }

    pub fn operators(&self) -> &[ComplexMatrix; 4] {
        &self.operators
    }

    /// The labeled set obtained by conjugating every operator by `sigma_d`.
    pub fn conjugated(&self, d: Label) -> Self {
        let s = sigma(d);
        let signs = {
            let v = crate::pauli::bloch_of(&self.operators[0].conjugate_by(&s)).expect("dim 2");
            v.map(|x| x.round() as i8)
        };
        Self {
            fiducial_signs: signs,
            operators: self.operators.map(|m| m.conjugate_by(&s)),
        }
    }

    pub fn check_axioms(&self) -> QubitAxiomReport {
        check_qubit_axioms(self)
    }
}

/// The three 2x2 striations: rows (fixed k), columns (fixed l), diagonals (fixed k+l).
pub fn qubit_striations() -> [[[Label; 2]; 2]; 3] {
    let l = Label::from_index;
    [
        [[l(0), l(1)], [l(2), l(3)]],
        [[l(0), l(2)], [l(1), l(3)]],
        [[l(0), l(3)], [l(1), l(2)]],
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QubitAxiomReport {
    pub unit_trace: bool,
    pub orthogonal: bool,
    pub covariant: bool,
    pub resolves_identity: bool,
    /// Line averages are rank-1 projectors, orthogonal along a striation
    /// and unbiased (overlap 1/2) across striations.
    pub striations: bool,
}

impl QubitAxiomReport {
    pub fn all(&self) -> bool {
        self.unit_trace && self.orthogonal && self.covariant && self.resolves_identity && self.striations
    }
}

const AXIOM_TOL: f64 = 1e-10;

fn is_rank_one_projector(m: &ComplexMatrix) -> bool {
    (m.trace().re - 1.0).abs() < AXIOM_TOL && (*m * *m).max_abs_diff(m) < AXIOM_TOL && m.is_hermitian(AXIOM_TOL)
}

fn check_qubit_axioms(set: &QubitPhasePointSet) -> QubitAxiomReport {
    let ops = set.operators();
    let unit_trace = ops.iter().all(|m| (m.trace().re - 1.0).abs() < AXIOM_TOL && m.trace().im.abs() < AXIOM_TOL);
    let orthogonal = (0..4).all(|a| {
        (0..4).all(|b| {
            let expected = if a == b { 2.0 } else { 0.0 };
            (ops[a].trace_product(&ops[b]) - expected).abs() < AXIOM_TOL
        })
    });
    let covariant = Label::ALL
        .iter()
        .all(|&l| ops[0].conjugate_by(&sigma(l)).max_abs_diff(&ops[l.index()]) < AXIOM_TOL);
    let two_id = ComplexMatrix::identity(2).expect("dim 2").scale_real(2.0);
    let resolves_identity = sum_matrices(2, ops.iter()).max_abs_diff(&two_id) < AXIOM_TOL;

    let projectors: Vec<[ComplexMatrix; 2]> = qubit_striations()
        .iter()
        .map(|s| s.map(|line| (*set.operator(line[0]) + *set.operator(line[1])).scale_real(0.5)))
        .collect();
    let mut striations = projectors.iter().flatten().all(is_rank_one_projector);
    for (a, pa) in projectors.iter().enumerate() {
        striations &= pa[0].trace_product(&pa[1]).abs() < AXIOM_TOL;
        for pb in projectors.iter().skip(a + 1) {
            for x in pa {
                for y in pb {
                    striations &= (x.trace_product(y) - 0.5).abs() < AXIOM_TOL;
                }
            }
        }
    }
    QubitAxiomReport {
        unit_trace,
        orthogonal,
        covariant,
        resolves_identity,
        striations,
    }
}

/// All 8 labeled qubit phase-point sets, even parity first, each group in
/// lexicographic order of the fiducial signs (`+` before `-`, x then y then z).
pub fn enumerate_qubit_wigner_sets() -> Vec<QubitPhasePointSet> {
    let mut sets: Vec<QubitPhasePointSet> = [1i8, -1]
        .iter()
        .flat_map(|&x| [1i8, -1].into_iter().flat_map(move |y| [1i8, -1].into_iter().map(move |z| [x, y, z])))
        .map(|s| QubitPhasePointSet::from_fiducial(s).expect("valid signs"))
        .collect();
    sets.sort_by_key(|s| s.parity());
    sets
}

/// Partition of `sets` into orbits under conjugation by the Pauli group,
/// each orbit listed by position in `sets`.
pub fn displacement_orbits(sets: &[QubitPhasePointSet]) -> Vec<Vec<usize>> {
    let same = |a: &QubitPhasePointSet, b: &QubitPhasePointSet| {
        a.operators().iter().zip(b.operators()).all(|(x, y)| x.max_abs_diff(y) < AXIOM_TOL)
    };
    let mut assigned = vec![false; sets.len()];
    let mut orbits = Vec::new();
    for start in 0..sets.len() {
        if assigned[start] {
            continue;
        }
        let mut orbit = Vec::new();
        for (idx, candidate) in sets.iter().enumerate() {
            if !assigned[idx] && Label::ALL.iter().any(|&d| same(&sets[start].conjugated(d), candidate)) {
                assigned[idx] = true;
                orbit.push(idx);
            }
        }
        orbits.push(orbit);
    }
    orbits
}

/// How the 16 cells of a [`QuartitWigner`] are addressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Indexing {
    /// `[k][l]` with detector labels of qubit a and b in label order.
    Detector,
    /// `[m][n]` phase-space grid coordinates.
    Grid,
}

/// Two-qubit Wigner distribution: a 4x4 real quasi-probability table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuartitWigner {
    pub values: [[f64; 4]; 4],
    pub indexing: Indexing,
}

impl QuartitWigner {
    pub fn new(values: [[f64; 4]; 4], indexing: Indexing) -> Self {
        Self { values, indexing }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().flatten().sum()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row][col]
    }

    pub fn max_abs_diff(&self, other: &QuartitWigner) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn require(&self, indexing: Indexing) -> Result<()> {
        if self.indexing == indexing {
            Ok(())
        } else {
            Err(Error::IndexingMismatch {
                expected: indexing,
                found: self.indexing,
            })
        }
    }
}

/// The 16 products `A_k (x) B_l` of two qubit phase-point sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuartitPhasePointSet {
    pub a: QubitPhasePointSet,
    pub b: QubitPhasePointSet,
}

impl QuartitPhasePointSet {
    pub fn new(a: QubitPhasePointSet, b: QubitPhasePointSet) -> Self {
        Self { a, b }
    }

    pub fn canonical(parity_a: Parity, parity_b: Parity) -> Self {
        Self::new(QubitPhasePointSet::canonical(parity_a), QubitPhasePointSet::canonical(parity_b))
    }

    pub fn operator(&self, ka: Label, lb: Label) -> ComplexMatrix {
        ComplexMatrix::tensor(self.a.operator(ka), self.b.operator(lb)).expect("dim 2 factors")
    }

    /// `W_{kl} = (1/4) Tr(rho A_k (x) B_l)`.
    pub fn coefficients(&self, rho: &DensityOperator) -> Result<QuartitWigner> {
        rho.matrix().require_dim(4)?;
        let mut values = [[0.0; 4]; 4];
        for ka in Label::ALL {
            for lb in Label::ALL {
                values[ka.index()][lb.index()] = 0.25 * rho.matrix().trace_product(&self.operator(ka, lb));
            }
        }
        Ok(QuartitWigner::new(values, Indexing::Detector))
    }

    /// `rho = sum_{kl} W_{kl} A_k (x) B_l`.
    pub fn reconstruct(&self, w: &QuartitWigner) -> Result<ComplexMatrix> {
        w.require(Indexing::Detector)?;
        let mut rho = ComplexMatrix::zeros(4)?;
        for ka in Label::ALL {
            for lb in Label::ALL {
                rho = rho + self.operator(ka, lb).scale_real(w.values[ka.index()][lb.index()]);
            }
        }
        Ok(rho)
    }

    pub fn check_axioms(&self) -> QuartitAxiomReport {
        let ops: Vec<ComplexMatrix> = Label::ALL
            .iter()
            .flat_map(|&k| Label::ALL.iter().map(move |&l| (k, l)))
            .map(|(k, l)| self.operator(k, l))
            .collect();
        let unit_trace = ops.iter().all(|m| (m.trace().re - 1.0).abs() < AXIOM_TOL);
        let orthogonal = (0..16).all(|x| {
            (0..16).all(|y| {
                let expected = if x == y { 4.0 } else { 0.0 };
                (ops[x].trace_product(&ops[y]) - expected).abs() < AXIOM_TOL
            })
        });
        let origin = ops[0];
        let covariant = Label::ALL.iter().all(|&k| {
            Label::ALL.iter().all(|&l| {
                let d = ComplexMatrix::tensor(&sigma(k), &sigma(l)).expect("dim 2");
                origin.conjugate_by(&d).max_abs_diff(&ops[4 * k.index() + l.index()]) < AXIOM_TOL
            })
        });
        let four_id = ComplexMatrix::identity(4).expect("dim 4").scale_real(4.0);
        let resolves_identity = sum_matrices(4, ops.iter()).max_abs_diff(&four_id) < AXIOM_TOL;
        QuartitAxiomReport {
            unit_trace,
            orthogonal,
            covariant,
            resolves_identity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuartitAxiomReport {
    pub unit_trace: bool,
    pub orthogonal: bool,
    pub covariant: bool,
    pub resolves_identity: bool,
}

impl QuartitAxiomReport {
    pub fn all(&self) -> bool {
        self.unit_trace && self.orthogonal && self.covariant && self.resolves_identity
    }
}

/// Detector-indexed two-qubit Wigner distribution from joint firing
/// probabilities:
/// `W_{kl} = 3 P_{kl} + sqrt3 (1 - sqrt3)/4 (P^a_k + P^b_l) + ((1 - sqrt3)/4)^2`.
pub fn quartit_wigner_from_joint(table: &JointProbabilityTable) -> QuartitWigner {
    let r3 = 3f64.sqrt();
    let c = (1.0 - r3) / 4.0;
    let p = table.probabilities();
    let pa = table.marginal_a();
    let pb = table.marginal_b();
    let mut values = [[0.0; 4]; 4];
    for k in 0..4 {
        for l in 0..4 {
            values[k][l] = 3.0 * p[k][l] + r3 * c * (pa[k] + pb[l]) + c * c;
        }
    }
    QuartitWigner::new(values, Indexing::Detector)
}

/// `rho = sum W_{kl} A_k (x) B_l` over the canonical phase-point sets of the given parities.
pub fn density_from_quartit_wigner(w: &QuartitWigner, parity_a: Parity, parity_b: Parity) -> Result<ComplexMatrix> {
    QuartitPhasePointSet::canonical(parity_a, parity_b).reconstruct(w)
}

/// `F = 4 sum W_exp W_ref`; equals `Tr(rho_exp rho_ref)` for matching parities.
pub fn fidelity(w_exp: &QuartitWigner, w_ref: &QuartitWigner) -> Result<f64> {
    w_exp.require(w_ref.indexing)?;
    Ok(4.0
        * w_exp
            .values
            .iter()
            .flatten()
            .zip(w_ref.values.iter().flatten())
            .map(|(a, b)| a * b)
            .sum::<f64>())
}

/// `m = i_a + 2 k_b`, `n = j_a + 2 l_b`.
pub fn grid_coordinates(i_a: u8, j_a: u8, k_b: u8, l_b: u8) -> Result<(usize, usize)> {
    if [i_a, j_a, k_b, l_b].iter().any(|&b| b > 1) {
        return Err(Error::OutOfRange {
            name: "grid bit",
            value: f64::from(i_a.max(j_a).max(k_b).max(l_b)),
        });
    }
    Ok((usize::from(i_a + 2 * k_b), usize::from(j_a + 2 * l_b)))
}

/// Grid point of the product operator `A_{ka} (x) B_{lb}`.
pub fn grid_point(ka: Label, lb: Label) -> (usize, usize) {
    grid_coordinates(ka.i(), ka.j(), lb.i(), lb.j()).expect("label bits")
}

fn place_on_grid(set: &QuartitPhasePointSet, rho: &DensityOperator, b_label: impl Fn(Label) -> Label) -> Result<QuartitWigner> {
    rho.matrix().require_dim(4)?;
    let mut values = [[0.0; 4]; 4];
    for ka in Label::ALL {
        for lb in Label::ALL {
            let (m, n) = grid_point(ka, lb);
            values[m][n] = 0.25 * rho.matrix().trace_product(&set.operator(ka, b_label(lb)));
        }
    }
    Ok(QuartitWigner::new(values, Indexing::Grid))
}

/// Grid-indexed distribution `W_{mn} = (1/4) Tr(rho A^tet_{ij} (x) B^antitet_{kl})`.
pub fn grid_distribution(rho: &DensityOperator) -> Result<QuartitWigner> {
    place_on_grid(&QuartitPhasePointSet::canonical(Parity::Even, Parity::Odd), rho, |l| l)
}

/// Unitary on qubit b realizing the frame map `O` (a half turn about `(1,0,-1)/sqrt2`).
pub fn frame_map_unitary() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    rotation_unitary([h, 0.0, -h], std::f64::consts::PI).expect("unit axis")
}

/// Grid distribution obtained from the tetrahedron-tetrahedron coefficients.
///
/// Qubit b is carried onto the anti-tetrahedron by the frame map `O` and its
/// labels `(0,1)`, `(1,0)` are exchanged, so the grid cell of `(k_b, l_b)`
/// holds `(1/4) Tr(rho' A^tet (x) B^antitet_{swap(k_b l_b)})` with
/// `rho' = (I (x) U_O) rho (I (x) U_O)^dagger`.
pub fn relabeled_tt_grid_distribution(rho: &DensityOperator) -> Result<QuartitWigner> {
    let rotated = rho.apply_local_b(&frame_map_unitary())?;
    place_on_grid(&QuartitPhasePointSet::canonical(Parity::Even, Parity::Odd), &rotated, swap_middle_labels)
}
