//! Line structures on the 4x4 phase-space grid and their validation.
//!
//! The grid axes are identified with GF(4) by a pair of bijections
//! `phi` (rows `m`) and `psi` (columns `n`); lines are the solutions of
//! `psi(n) = s * phi(m) + c` for a slope `s`, plus the vertical lines
//! `phi(m) = c`. A labeling is accepted when the 16 operators averaged along
//! every one of the 20 lines give rank-1 projectors.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{grid_point, QuartitAxiomReport, QuartitPhasePointSet, QubitPhasePointSet, AXIOM_TOL};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::pauli::Label;
use crate::sic::Parity;

/// Element `b0 + b1 w` of GF(4), stored as the bit pair `b0 | b1 << 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Gf4(pub u8);

impl Gf4 {
    pub const ZERO: Gf4 = Gf4(0);
    pub const ONE: Gf4 = Gf4(1);
    pub const OMEGA: Gf4 = Gf4(2);
    pub const OMEGA_SQ: Gf4 = Gf4(3);
    pub const ALL: [Gf4; 4] = [Gf4(0), Gf4(1), Gf4(2), Gf4(3)];

    /// Multiplication modulo `w^2 = w + 1`.
    fn product(self, other: Gf4) -> Gf4 {
        let mut acc = 0u8;
        let mut a = self.0;
        for bit in 0..2 {
            if other.0 >> bit & 1 == 1 {
                acc ^= a;
            }
            // a <- a * w
            a = ((a >> 1) & 1) | ((((a >> 1) ^ a) & 1) << 1);
        }
        Gf4(acc)
    }

    pub fn name(self) -> &'static str {
        ["0", "1", "w", "w^2"][usize::from(self.0)]
    }
}

impl std::ops::Add for Gf4 {
    type Output = Gf4;

    // characteristic 2
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, other: Gf4) -> Gf4 {
        Gf4(self.0 ^ other.0)
    }
}

impl std::ops::Mul for Gf4 {
    type Output = Gf4;

    fn mul(self, other: Gf4) -> Gf4 {
        self.product(other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "value")]
pub enum StriationKind {
    Vertical,
    Slope(Gf4),
}

impl StriationKind {
    pub const ALL: [StriationKind; 5] = [
        StriationKind::Vertical,
        StriationKind::Slope(Gf4::ZERO),
        StriationKind::Slope(Gf4::ONE),
        StriationKind::Slope(Gf4::OMEGA),
        StriationKind::Slope(Gf4::OMEGA_SQ),
    ];
}

/// One line: four grid points `(m, n)` and the average of their operators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Line {
    pub points: [(usize, usize); 4],
    #[serde(skip)]
    pub projector: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Striation {
    pub kind: StriationKind,
    pub lines: Vec<Line>,
    /// Every projector is a product state.
    pub factorizable: bool,
    /// Every projector has both reduced states equal to `I/2`.
    pub entangled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StriationStructure {
    /// `phi[m]` is the GF(4) coordinate of row `m`.
    pub phi: [Gf4; 4],
    /// `psi[n]` is the GF(4) coordinate of column `n`.
    pub psi: [Gf4; 4],
    pub striations: Vec<Striation>,
    /// Largest `|Tr(P P')|` between different lines of one striation.
    pub max_parallel_overlap: f64,
    /// Largest `|Tr(P P') - 1/4|` across striations.
    pub max_unbiasedness_error: f64,
}

impl StriationStructure {
    pub fn factorizable_count(&self) -> usize {
        self.striations.iter().filter(|s| s.factorizable).count()
    }

    pub fn entangled_count(&self) -> usize {
        self.striations.iter().filter(|s| s.entangled).count()
    }
}

fn permutations4() -> Vec<[Gf4; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..4u8 {
                for d in 0..4u8 {
                    let v = [a, b, c, d];
                    let distinct = (0..4).all(|x| (x + 1..4).all(|y| v[x] != v[y]));
                    if distinct {
                        out.push(v.map(Gf4));
                    }
                }
            }
        }
    }
    out
}

/// Lines of one striation as 16-bit point masks (bit `4m + n`), ordered by intercept.
fn striation_masks(kind: StriationKind, phi: &[Gf4; 4], psi: &[Gf4; 4]) -> [u16; 4] {
    let mut masks = [0u16; 4];
    for m in 0..4 {
        for n in 0..4 {
            let c = match kind {
                StriationKind::Vertical => phi[m],
                StriationKind::Slope(s) => psi[n] + s * phi[m],
            };
            masks[usize::from(c.0)] |= 1 << (4 * m + n);
        }
    }
    masks
}

fn mask_points(mask: u16) -> [(usize, usize); 4] {
    let mut pts = [(0, 0); 4];
    let mut idx = 0;
    for bit in 0..16 {
        if mask >> bit & 1 == 1 {
            pts[idx] = (bit / 4, bit % 4);
            idx += 1;
        }
    }
    pts
}

struct GridOperators([ComplexMatrix; 16]);

impl GridOperators {
    fn new(set: &QuartitPhasePointSet) -> Self {
        let mut ops = [ComplexMatrix::zeros(4).expect("dim 4"); 16];
        for ka in Label::ALL {
            for lb in Label::ALL {
                let (m, n) = grid_point(ka, lb);
                ops[4 * m + n] = set.operator(ka, lb);
            }
        }
        Self(ops)
    }

    fn line_average(&self, mask: u16) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(4).expect("dim 4");
        for bit in 0..16 {
            if mask >> bit & 1 == 1 {
                acc = acc + self.0[bit];
            }
        }
        acc.scale_real(0.25)
    }
}

fn is_rank_one(m: &ComplexMatrix) -> bool {
    (m.trace().re - 1.0).abs() < AXIOM_TOL && (*m * *m).max_abs_diff(m) < AXIOM_TOL
}

/// Exhaustive search over the 576 axis labelings, first valid one in
/// lexicographic `(phi, psi)` order.
pub fn find_striations(set: &QuartitPhasePointSet) -> Result<StriationStructure> {
    let ops = GridOperators::new(set);
    let mut cache: HashMap<u16, bool> = HashMap::new();
    let perms = permutations4();
    for phi in &perms {
        for psi in &perms {
            let valid = StriationKind::ALL.iter().all(|&kind| {
                striation_masks(kind, phi, psi)
                    .iter()
                    .all(|&mask| *cache.entry(mask).or_insert_with(|| is_rank_one(&ops.line_average(mask))))
            });
            if valid {
                return Ok(describe(&ops, *phi, *psi));
            }
        }
    }
    Err(Error::NoValidStriation)
}

fn describe(ops: &GridOperators, phi: [Gf4; 4], psi: [Gf4; 4]) -> StriationStructure {
    let half_id = ComplexMatrix::identity(2).expect("dim 2").scale_real(0.5);
    let striations: Vec<Striation> = StriationKind::ALL
        .iter()
        .map(|&kind| {
            let lines: Vec<Line> = striation_masks(kind, &phi, &psi)
                .iter()
                .map(|&mask| {
                    let projector = ops.line_average(mask);
                    let eigenvalues = projector.hermitian_eigenvalues().expect("Hermitian average");
                    Line {
                        points: mask_points(mask),
                        projector,
                        eigenvalues,
                    }
                })
                .collect();
            let reduced = |l: &Line| {
                (
                    l.projector.partial_trace_b().expect("dim 4"),
                    l.projector.partial_trace_a().expect("dim 4"),
                )
            };
            let factorizable = lines.iter().all(|l| {
                let (ra, rb) = reduced(l);
                (ra.purity() - 1.0).abs() < AXIOM_TOL && (rb.purity() - 1.0).abs() < AXIOM_TOL
            });
            let entangled = lines.iter().all(|l| {
                let (ra, rb) = reduced(l);
                ra.max_abs_diff(&half_id) < AXIOM_TOL && rb.max_abs_diff(&half_id) < AXIOM_TOL
            });
            Striation {
                kind,
                lines,
                factorizable,
                entangled,
            }
        })
        .collect();

    let mut max_parallel_overlap: f64 = 0.0;
    let mut max_unbiasedness_error: f64 = 0.0;
    for (a, sa) in striations.iter().enumerate() {
        for (x, la) in sa.lines.iter().enumerate() {
            for lb in sa.lines.iter().skip(x + 1) {
                max_parallel_overlap = max_parallel_overlap.max(la.projector.trace_product(&lb.projector).abs());
            }
            for sb in striations.iter().skip(a + 1) {
                for lb in &sb.lines {
                    let err = (la.projector.trace_product(&lb.projector) - 0.25).abs();
                    max_unbiasedness_error = max_unbiasedness_error.max(err);
                }
            }
        }
    }
    StriationStructure {
        phi,
        psi,
        striations,
        max_parallel_overlap,
        max_unbiasedness_error,
    }
}

/// Classification of one product of qubit phase-point sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuartitSetReport {
    pub fiducial_a: [i8; 3],
    pub fiducial_b: [i8; 3],
    pub parity_a: Parity,
    pub parity_b: Parity,
    pub axioms: QuartitAxiomReport,
    pub striation: Option<StriationStructure>,
}

impl QuartitSetReport {
    pub fn valid(&self) -> bool {
        self.axioms.all() && self.striation.is_some()
    }
}

/// All 64 ordered products of the 8 qubit sets, in the order of
/// [`super::enumerate_qubit_wigner_sets`] (a outer, b inner).
pub fn enumerate_quartit_wigner_sets() -> Vec<QuartitSetReport> {
    let qubit_sets = super::enumerate_qubit_wigner_sets();
    let pairs: Vec<(QubitPhasePointSet, QubitPhasePointSet)> = qubit_sets
        .iter()
        .flat_map(|a| qubit_sets.iter().map(move |b| (*a, *b)))
        .collect();
    pairs
        .par_iter()
        .map(|(a, b)| {
            let set = QuartitPhasePointSet::new(*a, *b);
            QuartitSetReport {
                fiducial_a: a.fiducial_signs(),
                fiducial_b: b.fiducial_signs(),
                parity_a: a.parity(),
                parity_b: b.parity(),
                axioms: set.check_axioms(),
                striation: find_striations(&set).ok(),
            }
        })
        .collect()
}
