//! Permutations of the four tetrahedron tops and the states forced by
//! perfect symmetric (anti-)correlations between them.
//!
//! A joint table with uniform marginals fixes the Wigner distribution
//! `W = 3P - 1/8` and therefore a unique unit-trace Hermitian operator.
//! Whether that operator is a state depends on the permutation linking
//! Alice's and Bob's detectors and on the parities of their frames.

use rayon::prelude::*;
use serde::Serialize;

use crate::numerics::{mat3_det, mat3_mul, Mat3, MAT3_IDENTITY};
use crate::pauli::{DensityOperator, Label};
use crate::sic::{Parity, TetrahedronFrame};
use crate::sim::JointProbabilityTable;
use crate::wigner::{density_from_quartit_wigner, quartit_wigner_from_joint, QuartitWigner};

/// Physicality tolerance on the minimum eigenvalue.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Tolerance for purity and reduced-state checks.
pub const STATE_TOL: f64 = 1e-10;

/// Frame parities of the two parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Configuration {
    /// Tetrahedron on both sides.
    Tt,
    /// Tetrahedron for Alice, anti-tetrahedron for Bob.
    Ta,
}

impl Configuration {
    pub const ALL: [Configuration; 2] = [Configuration::Tt, Configuration::Ta];

    pub fn parities(self) -> (Parity, Parity) {
        match self {
            Configuration::Tt => (Parity::Even, Parity::Even),
            Configuration::Ta => (Parity::Even, Parity::Odd),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Configuration::Tt => "TT",
            Configuration::Ta => "TA",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    Correlated,
    Anticorrelated,
}

impl CorrelationMode {
    pub const ALL: [CorrelationMode; 2] = [CorrelationMode::Correlated, CorrelationMode::Anticorrelated];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationClass {
    Identity,
    EvenOrder2,
    OddOrder2,
    EvenOrder3,
    OddOrder4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TopPermutation {
    /// `mapping[L.index()] = pi(L)`.
    pub mapping: [Label; 4],
    pub parity: Parity,
    pub order: u8,
    pub fixed_points: u8,
    /// Real 3x3 matrix sending top `t_L` to `t_{pi(L)}`.
    pub realizer: Mat3,
    pub realizer_det: f64,
}

impl TopPermutation {
    pub fn from_mapping(mapping: [Label; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for l in mapping {
            if std::mem::replace(&mut seen[l.index()], true) {
                return None;
            }
        }
        let frame = TetrahedronFrame::canonical(Parity::Even);
        // sum_L t_L t_L^T = (4/3) I and sum_L t_L = 0, so this maps t_L to t_pi(L)
        let mut realizer = [[0.0; 3]; 3];
        for l in Label::ALL {
            let src = frame.direction(l);
            let dst = frame.direction(mapping[l.index()]);
            for r in 0..3 {
                for c in 0..3 {
                    realizer[r][c] += 0.75 * dst[r] * src[c];
                }
            }
        }
        let realizer_det = mat3_det(&realizer);
        let parity = if realizer_det > 0.0 { Parity::Even } else { Parity::Odd };
        let mut order = 1u8;
        let mut power = mapping;
        while power.iter().enumerate().any(|(x, l)| l.index() != x) {
            power = power.map(|l| mapping[l.index()]);
            order += 1;
        }
        let fixed_points = mapping.iter().enumerate().filter(|(x, l)| l.index() == *x).count() as u8;
        Some(Self {
            mapping,
            parity,
            order,
            fixed_points,
            realizer,
            realizer_det,
        })
    }

    pub fn identity() -> Self {
        Self::from_mapping(Label::ALL).expect("identity is a permutation")
    }

    pub fn apply(&self, l: Label) -> Label {
        self.mapping[l.index()]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = Label::ALL;
        for l in Label::ALL {
            inv[self.apply(l).index()] = l;
        }
        Self::from_mapping(inv).expect("inverse of a permutation")
    }

    /// `(self . other)(L) = self(other(L))`.
    pub fn compose(&self, other: &TopPermutation) -> Self {
        Self::from_mapping(other.mapping.map(|l| self.apply(l))).expect("composition of permutations")
    }

    /// Parity from the cycle decomposition: `(-1)^(4 - cycles)`.
    pub fn transposition_parity(&self) -> Parity {
        let mut visited = [false; 4];
        let mut cycles = 0;
        for start in 0..4 {
            if visited[start] {
                continue;
            }
            cycles += 1;
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                x = self.mapping[x].index();
            }
        }
        if (4 - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn class(&self) -> PermutationClass {
        match (self.parity, self.order) {
            (_, 1) => PermutationClass::Identity,
            (Parity::Even, 2) => PermutationClass::EvenOrder2,
            (Parity::Odd, 2) => PermutationClass::OddOrder2,
            (Parity::Even, 3) => PermutationClass::EvenOrder3,
            (Parity::Odd, 4) => PermutationClass::OddOrder4,
            (p, o) => unreachable!("no permutation of 4 tops has parity {p:?} and order {o}"),
        }
    }

    /// Rotation angle in degrees for an even realizer, `None` for odd ones.
    pub fn rotation_angle_degrees(&self) -> Option<f64> {
        if self.parity == Parity::Odd {
            return None;
        }
        let tr = self.realizer[0][0] + self.realizer[1][1] + self.realizer[2][2];
        Some(((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos().to_degrees())
    }
}

/// The 24 permutations in lexicographic order of their mapping (identity first).
pub fn enumerate_top_permutations() -> Vec<TopPermutation> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mapping = [a, b, c, d].map(Label::from_index);
                    if let Some(p) = TopPermutation::from_mapping(mapping) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Counts per class in the order identity, even order 2, odd order 2, even order 3, odd order 4.
pub fn permutation_census(perms: &[TopPermutation]) -> [usize; 5] {
    let classes = [
        PermutationClass::Identity,
        PermutationClass::EvenOrder2,
        PermutationClass::OddOrder2,
        PermutationClass::EvenOrder3,
        PermutationClass::OddOrder4,
    ];
    classes.map(|c| perms.iter().filter(|p| p.class() == c).count())
}

pub fn mat3_is_identity(m: &Mat3) -> bool {
    crate::numerics::mat3_max_abs_diff(m, &MAT3_IDENTITY) < 1e-12
}

/// Realizer of a composition equals the product of realizers.
pub fn realizer_of_composition(a: &TopPermutation, b: &TopPermutation) -> Mat3 {
    mat3_mul(&a.realizer, &b.realizer)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Physicality {
    Physical,
    Nonphysical,
    /// Minimum eigenvalue within the tolerance band around zero: a
    /// rank-deficient state such as a pure state.
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateOperator {
    #[serde(skip)]
    pub matrix: crate::numerics::ComplexMatrix,
    pub wigner: QuartitWigner,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub physicality: Physicality,
    pub purity: f64,
    /// Both single-qubit reduced operators equal `I/2`.
    pub maximally_mixed_marginals: bool,
}

impl CandidateOperator {
    /// Physical (or at the boundary) in the sense of a nonnegative spectrum.
    pub fn is_state(&self) -> bool {
        self.physicality != Physicality::Nonphysical
    }

    /// Pure and maximally entangled, i.e. locally-unitarily equivalent to the singlet.
    pub fn is_singlet_like(&self) -> bool {
        self.is_state() && (self.purity - 1.0).abs() < STATE_TOL && self.maximally_mixed_marginals
    }
}

/// Joint table of perfect (anti-)correlation along `perm`.
pub fn correlation_table(mode: CorrelationMode, perm: &TopPermutation) -> [[f64; 4]; 4] {
    std::array::from_fn(|k| {
        std::array::from_fn(|l| {
            let hit = perm.mapping[k].index() == l;
            match (mode, hit) {
                (CorrelationMode::Correlated, true) => 0.25,
                (CorrelationMode::Correlated, false) => 0.0,
                (CorrelationMode::Anticorrelated, true) => 0.0,
                (CorrelationMode::Anticorrelated, false) => 1.0 / 12.0,
            }
        })
    })
}

pub fn candidate_state(config: Configuration, mode: CorrelationMode, perm: &TopPermutation) -> CandidateOperator {
    let (pa, pb) = config.parities();
    let table = JointProbabilityTable::new(correlation_table(mode, perm), pa, pb).expect("normalized table");
    let wigner = quartit_wigner_from_joint(&table);
    let m = density_from_quartit_wigner(&wigner, pa, pb).expect("detector indexing");
    let rho = DensityOperator::new(m).expect("unit-trace Hermitian by construction");
    let eigenvalues = rho.eigenvalues();
    let min_eigenvalue = eigenvalues[0];
    let physicality = if min_eigenvalue >= PHYSICAL_TOL {
        Physicality::Physical
    } else if min_eigenvalue <= -PHYSICAL_TOL {
        Physicality::Nonphysical
    } else {
        Physicality::Boundary
    };
    let half = crate::numerics::ComplexMatrix::identity(2).expect("dim 2").scale_real(0.5);
    let maximally_mixed_marginals = rho.matrix().partial_trace_b().expect("dim 4").max_abs_diff(&half) < STATE_TOL
        && rho.matrix().partial_trace_a().expect("dim 4").max_abs_diff(&half) < STATE_TOL;
    CandidateOperator {
        matrix: *rho.matrix(),
        wigner,
        eigenvalues,
        min_eigenvalue,
        physicality,
        purity: rho.purity(),
        maximally_mixed_marginals,
    }
}

/// One row of the 96-candidate sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateRecord {
    pub config: Configuration,
    pub mode: CorrelationMode,
    pub permutation: [Label; 4],
    pub permutation_parity: Parity,
    pub permutation_order: u8,
    /// Parity of the combined detector relabeling: the permutation parity,
    /// flipped once more for an anti-tetrahedron on Bob's side.
    pub relabeling_parity: Parity,
    pub candidate: CandidateOperator,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub holds: bool,
    /// Candidates covered by the property.
    pub considered: usize,
    /// How many of them are physical states.
    pub physical: usize,
    pub violations: Vec<[Label; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertiesReport {
    pub candidates: Vec<CandidateRecord>,
    /// Even-permutation TT anticorrelated candidates: all physical, pure, maximally entangled.
    pub property_a: PropertyCheck,
    /// Odd-permutation TT anticorrelated candidates: none physical.
    pub property_b: PropertyCheck,
    /// Correlated candidates in both configurations: none physical.
    pub property_c: PropertyCheck,
    /// Anticorrelated TA candidates whose combined relabeling is even (odd permutation):
    /// all singlet-like, since they coincide with even TT relabelings.
    pub ta_even_relabeling: PropertyCheck,
    /// Anticorrelated TA candidates with even permutation: none physical.
    pub ta_odd_relabeling: PropertyCheck,
    /// Candidates with a nonnegative spectrum (boundary ones included).
    pub physical_total: usize,
    pub nonphysical_total: usize,
    /// Physical candidates with a zero eigenvalue (e.g. pure states).
    pub boundary_total: usize,
    /// Distinct minimum eigenvalues of nonphysical candidates, rounded to 1e-9.
    pub nonphysical_min_eigenvalues: Vec<f64>,
}

impl PropertiesReport {
    pub fn all_hold(&self) -> bool {
        self.property_a.holds
            && self.property_b.holds
            && self.property_c.holds
            && self.ta_even_relabeling.holds
            && self.ta_odd_relabeling.holds
    }
}

fn check<'a>(
    records: impl Iterator<Item = &'a CandidateRecord>,
    expect_physical: bool,
) -> PropertyCheck {
    let mut considered = 0;
    let mut physical = 0;
    let mut violations = Vec::new();
    for r in records {
        considered += 1;
        let ok = if expect_physical {
            r.candidate.is_singlet_like()
        } else {
            r.candidate.physicality == Physicality::Nonphysical
        };
        if r.candidate.is_state() {
            physical += 1;
        }
        if !ok {
            violations.push(r.permutation);
        }
    }
    PropertyCheck {
        holds: violations.is_empty() && considered > 0,
        considered,
        physical,
        violations,
    }
}

/// Sweeps 24 permutations x 2 configurations x 2 modes, ordered
/// configuration-major, then mode, then permutation.
pub fn verify_properties_abc() -> PropertiesReport {
    let perms = enumerate_top_permutations();
    let jobs: Vec<(Configuration, CorrelationMode, TopPermutation)> = Configuration::ALL
        .iter()
        .flat_map(|&c| CorrelationMode::ALL.iter().map(move |&m| (c, m)))
        .flat_map(|(c, m)| perms.iter().map(move |p| (c, m, *p)))
        .collect();
    let candidates: Vec<CandidateRecord> = jobs
        .par_iter()
        .map(|(config, mode, perm)| {
            let relabeling_parity = match config {
                Configuration::Tt => perm.parity,
                Configuration::Ta => perm.parity.flip(),
            };
            CandidateRecord {
                config: *config,
                mode: *mode,
                permutation: perm.mapping,
                permutation_parity: perm.parity,
                permutation_order: perm.order,
                relabeling_parity,
                candidate: candidate_state(*config, *mode, perm),
            }
        })
        .collect();

    let anti = |config: Configuration, parity: Parity| {
        let cs = &candidates;
        cs.iter().filter(move |r| {
            r.config == config && r.mode == CorrelationMode::Anticorrelated && r.permutation_parity == parity
        })
    };
    let property_a = check(anti(Configuration::Tt, Parity::Even), true);
    let property_b = check(anti(Configuration::Tt, Parity::Odd), false);
    let property_c = check(candidates.iter().filter(|r| r.mode == CorrelationMode::Correlated), false);
    let ta_even_relabeling = check(anti(Configuration::Ta, Parity::Odd), true);
    let ta_odd_relabeling = check(anti(Configuration::Ta, Parity::Even), false);

    let count = |ph: Physicality| candidates.iter().filter(|r| r.candidate.physicality == ph).count();
    let mut nonphysical_min_eigenvalues: Vec<f64> = Vec::new();
    for r in candidates.iter().filter(|r| r.candidate.physicality == Physicality::Nonphysical) {
        let v = (r.candidate.min_eigenvalue * 1e9).round() / 1e9;
        if !nonphysical_min_eigenvalues.iter().any(|&x| (x - v).abs() < 1e-9) {
            nonphysical_min_eigenvalues.push(v);
        }
    }
    nonphysical_min_eigenvalues.sort_by(f64::total_cmp);

    PropertiesReport {
        physical_total: candidates.iter().filter(|r| r.candidate.is_state()).count(),
        nonphysical_total: count(Physicality::Nonphysical),
        boundary_total: count(Physicality::Boundary),
        nonphysical_min_eigenvalues,
        candidates,
        property_a,
        property_b,
        property_c,
        ta_even_relabeling,
        ta_odd_relabeling,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{mat3_apply, mat3_transpose, ComplexMatrix};
    use crate::pauli::{bell_state, singlet_vector};
    use crate::sim::joint_table;

    fn perm(m: [usize; 4]) -> TopPermutation {
        TopPermutation::from_mapping(m.map(Label::from_index)).unwrap()
    }

    #[test]
    fn census_and_parities() {
        let perms = enumerate_top_permutations();
        assert_eq!(perms.len(), 24);
        assert_eq!(permutation_census(&perms), [1, 3, 6, 8, 6]);
        for p in &perms {
            assert_eq!(p.parity, p.transposition_parity());
            assert!((p.realizer_det.abs() - 1.0).abs() < 1e-12);
            let rtr = mat3_mul(&mat3_transpose(&p.realizer), &p.realizer);
            assert!(mat3_is_identity(&rtr));
            let frame = TetrahedronFrame::canonical(Parity::Even);
            for l in Label::ALL {
                let img = mat3_apply(&p.realizer, frame.direction(l));
                let target = frame.direction(p.apply(l));
                assert!(img.iter().zip(target).all(|(a, b)| (a - b).abs() < 1e-12));
            }
            match p.class() {
                PermutationClass::Identity => assert!(mat3_is_identity(&p.realizer)),
                PermutationClass::EvenOrder2 => {
                    assert_eq!(p.fixed_points, 0);
                    assert!((p.rotation_angle_degrees().unwrap() - 180.0).abs() < 1e-9);
                }
                PermutationClass::OddOrder2 => assert_eq!(p.fixed_points, 2),
                PermutationClass::EvenOrder3 => {
                    assert_eq!(p.fixed_points, 1);
                    assert!((p.rotation_angle_degrees().unwrap() - 120.0).abs() < 1e-9);
                }
                PermutationClass::OddOrder4 => assert_eq!(p.fixed_points, 0),
            }
        }
    }

    #[test]
    fn middle_swap_is_odd_involution() {
        let p = perm([0, 2, 1, 3]);
        assert_eq!(p.parity, Parity::Odd);
        assert_eq!(p.order, 2);
        assert_eq!(p.fixed_points, 2);
        let id = TopPermutation::identity();
        assert_eq!(id.parity, Parity::Even);
        assert_eq!(id.order, 1);
        assert!(mat3_is_identity(&id.realizer));
        assert!(TopPermutation::from_mapping([0, 0, 1, 2].map(Label::from_index)).is_none());
    }

    #[test]
    fn even_realizers_form_a_group_of_twelve() {
        let perms = enumerate_top_permutations();
        let even: Vec<_> = perms.iter().filter(|p| p.parity == Parity::Even).collect();
        assert_eq!(even.len(), 12);
        for a in &perms {
            for b in &perms {
                let ab = a.compose(b);
                assert!(crate::numerics::mat3_max_abs_diff(&ab.realizer, &realizer_of_composition(a, b)) < 1e-12);
                assert_eq!(ab.parity, a.parity.combine(b.parity));
                if a.parity == Parity::Even && b.parity == Parity::Even {
                    assert_eq!(ab.parity, Parity::Even);
                }
            }
            assert!(mat3_is_identity(&realizer_of_composition(a, &a.inverse())));
        }
    }

    #[test]
    fn candidate_examples() {
        let id = TopPermutation::identity();
        let singlet = DensityOperator::pure(&singlet_vector()).unwrap();
        let c = candidate_state(Configuration::Tt, CorrelationMode::Anticorrelated, &id);
        assert_eq!(c.physicality, Physicality::Boundary);
        assert!(c.is_singlet_like());
        assert!(c.matrix.max_abs_diff(singlet.matrix()) < 1e-12);

        let c = candidate_state(Configuration::Tt, CorrelationMode::Correlated, &id);
        assert_eq!(c.physicality, Physicality::Nonphysical);
        for (a, b) in c.eigenvalues.iter().zip([-2.0, 1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-9);
        }

        let c = candidate_state(Configuration::Ta, CorrelationMode::Anticorrelated, &id);
        assert_eq!(c.physicality, Physicality::Nonphysical);
        for (a, b) in c.eigenvalues.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((a - b).abs() < 1e-9);
        }
        // (1/4)(I + sum sigma (x) sigma)
        let mut expected = ComplexMatrix::identity(4).unwrap();
        for l in [1, 2, 3].map(Label::from_index) {
            let s = crate::pauli::sigma(l);
            expected = expected + ComplexMatrix::tensor(&s, &s).unwrap();
        }
        assert!(c.matrix.max_abs_diff(&expected.scale_real(0.25)) < 1e-12);
    }

    #[test]
    fn candidates_have_unit_trace_and_uniform_marginals() {
        for p in enumerate_top_permutations() {
            for config in Configuration::ALL {
                for mode in CorrelationMode::ALL {
                    let t = correlation_table(mode, &p);
                    for k in 0..4 {
                        assert!((t[k].iter().sum::<f64>() - 0.25).abs() < 1e-15);
                        assert!((t.iter().map(|r| r[k]).sum::<f64>() - 0.25).abs() < 1e-15);
                    }
                    let c = candidate_state(config, mode, &p);
                    assert!((c.matrix.trace().re - 1.0).abs() < 1e-12);
                    assert!(c.matrix.is_hermitian(1e-12));
                }
            }
        }
    }

    #[test]
    fn bell_states_anticorrelate_along_even_involutions() {
        let perms = enumerate_top_permutations();
        let involutions: Vec<_> = perms
            .iter()
            .filter(|p| matches!(p.class(), PermutationClass::Identity | PermutationClass::EvenOrder2))
            .collect();
        let mut used = Vec::new();
        for c in Label::ALL {
            let t = joint_table(&bell_state(c), Parity::Even, Parity::Even).unwrap();
            let zeros: Vec<_> = involutions
                .iter()
                .filter(|p| (0..4).all(|k| t.probabilities()[k][p.mapping[k].index()] == 0.0))
                .collect();
            assert_eq!(zeros.len(), 1, "bell {c}");
            // the zero sits at l = k xor c
            assert!(Label::ALL.iter().all(|&k| zeros[0].apply(k) == k.xor(c)));
            used.push(zeros[0].mapping);
        }
        used.sort_by_key(|m| m.map(|l| l.index()));
        used.dedup();
        assert_eq!(used.len(), 4);
    }

    #[test]
    fn sweep_report() {
        let r = verify_properties_abc();
        assert_eq!(r.candidates.len(), 96);
        assert!(r.all_hold(), "{r:?}");
        assert_eq!(r.property_a.considered, 12);
        assert_eq!(r.property_a.physical, 12);
        assert_eq!(r.property_b.physical, 0);
        assert_eq!(r.property_c.considered, 48);
        assert_eq!(r.property_c.physical, 0);
        // the TA sweep repeats the TT configurations with Bob's relabeling parity flipped
        assert_eq!(r.ta_even_relabeling.physical, 12);
        assert_eq!(r.physical_total, 24);
        assert_eq!(r.boundary_total, 24);
        assert_eq!(r.nonphysical_total, 72);
        assert_eq!(r.nonphysical_min_eigenvalues, vec![-2.0, -0.5]);
        for rec in &r.candidates {
            let physical = rec.candidate.is_state();
            let expected = rec.mode == CorrelationMode::Anticorrelated && rec.relabeling_parity == Parity::Even;
            assert_eq!(physical, expected);
        }
        assert_eq!(r, verify_properties_abc());
    }
}
