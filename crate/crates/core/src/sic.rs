//! Tetrahedron and anti-tetrahedron SIC-POVM frames.
//!
//! The even frame is the regular tetrahedron whose top `(i, j)` points along
//! `((-1)^j, (-1)^(i+j), (-1)^i) / sqrt(3)`; the odd frame keeps the labels
//! and reflects every top through the origin. A detector with top `t`
//! realizes the effect `(1/4)(I + t . sigma)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dot3, mat3_apply, norm3, ComplexMatrix, Mat3, C64};
use crate::pauli::{bloch_of, pauli_dot, rotation_unitary, Label};

pub const FRAC_1_SQRT_3: f64 = 0.577_350_269_189_625_8;

/// Orientation class of a frame, phase-point set or permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector { px: 0.0, py: 0.0, pz: 0.0 };

    pub fn new(px: f64, py: f64, pz: f64) -> Self {
        Self { px, py, pz }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.px, self.py, self.pz]
    }

    pub fn norm(&self) -> f64 {
        norm3(self.as_array())
    }

    pub fn of_state(rho: &ComplexMatrix) -> Result<Self> {
        let [px, py, pz] = bloch_of(rho)?;
        Ok(Self { px, py, pz })
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// Unnormalized sign pattern of the even top with label `(i, j)`.
pub fn even_top_signs(label: Label) -> [f64; 3] {
    let s = |bit: u8| if bit == 1 { -1.0 } else { 1.0 };
    let (i, j) = (label.i(), label.j());
    [s(j), s(i ^ j), s(i)]
}

/// One detector of a frame: `(1/4)(I + direction . sigma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PovmEffect {
    pub label: Label,
    pub matrix: ComplexMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TetrahedronFrame {
    parity: Parity,
    directions: [[f64; 3]; 4],
}

impl TetrahedronFrame {
    /// The canonical frame of the given parity.
    pub fn canonical(parity: Parity) -> Self {
        let mut directions = [[0.0; 3]; 4];
        for label in Label::ALL {
            let s = even_top_signs(label);
            let scale = parity.sign() * FRAC_1_SQRT_3;
            directions[label.index()] = [s[0] * scale, s[1] * scale, s[2] * scale];
        }
        Self { parity, directions }
    }

    /// Frame with explicit top directions (checked to be a regular tetrahedron).
    pub fn from_directions(parity: Parity, directions: [[f64; 3]; 4]) -> Result<Self> {
        for (a, da) in directions.iter().enumerate() {
            let n = norm3(*da);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::UnphysicalBloch(n));
            }
            for db in directions.iter().skip(a + 1) {
                let d = dot3(*da, *db);
                if (d + 1.0 / 3.0).abs() > 1e-9 {
                    return Err(Error::OutOfRange {
                        name: "top overlap",
                        value: d,
                    });
                }
            }
        }
        Ok(Self { parity, directions })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn directions(&self) -> &[[f64; 3]; 4] {
        &self.directions
    }

    pub fn direction(&self, label: Label) -> [f64; 3] {
        self.directions[label.index()]
    }

    pub fn effect(&self, label: Label) -> PovmEffect {
        let id = ComplexMatrix::identity(2).expect("dim 2");
        PovmEffect {
            label,
            matrix: (id + pauli_dot(self.direction(label))).scale_real(0.25),
        }
    }

    pub fn effects(&self) -> [PovmEffect; 4] {
        Label::ALL.map(|l| self.effect(l))
    }

    /// The same frame after conjugating each effect by the rotation
    /// `exp(-i angle/2 axis . sigma)`.
    pub fn rotated(&self, axis: [f64; 3], angle: f64) -> Result<Self> {
        let u = rotation_unitary(axis, angle)?;
        let mut directions = [[0.0; 3]; 4];
        for label in Label::ALL {
            let rotated = self.effect(label).matrix.conjugate_by(&u);
            // effect = (1/4)(I + t.sigma) so its Bloch vector is t/2
            let b = bloch_of(&rotated)?;
            directions[label.index()] = [2.0 * b[0], 2.0 * b[1], 2.0 * b[2]];
        }
        Self::from_directions(self.parity, directions)
    }

    /// Applies a real 3x3 map to every top.
    pub fn transformed(&self, m: &Mat3) -> Result<Self> {
        Self::from_directions(self.parity, self.directions.map(|d| mat3_apply(m, d)))
    }
}

/// Firing probabilities `P_L = (1/4)(1 + t_L . p)` of the four detectors.
pub fn povm_probabilities(p: BlochVector, frame: &TetrahedronFrame) -> Result<[f64; 4]> {
    let n = p.norm();
    if n > 1.0 + 1e-9 {
        return Err(Error::UnphysicalBloch(n));
    }
    let v = p.as_array();
    Ok(Label::ALL.map(|l| 0.25 * (1.0 + dot3(frame.direction(l), v))))
}

/// Linear inverse of [`povm_probabilities`]: `p = 3 * sum_L P_L t_L`.
///
/// Inputs off the simplex by at most `1e-6` are renormalized. The result
/// may lie outside the Bloch ball for noisy frequencies.
pub fn bloch_from_probabilities(probs: [f64; 4], frame: &TetrahedronFrame) -> Result<BlochVector> {
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-6 || !total.is_finite() {
        return Err(Error::NotNormalized(total));
    }
    let mut p = [0.0; 3];
    for l in Label::ALL {
        let t = frame.direction(l);
        let w = 3.0 * probs[l.index()] / total;
        for k in 0..3 {
            p[k] += w * t[k];
        }
    }
    Ok(p.into())
}

/// The orthogonal map relating the two canonical frames.
pub const FRAME_MAP_O: Mat3 = [[0.0, 0.0, -1.0], [0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]];

/// Label relabeling that accompanies [`FRAME_MAP_O`]: swaps `(0,1)` and `(1,0)`.
pub fn swap_middle_labels(label: Label) -> Label {
    match label.index() {
        1 => Label::from_index(2),
        2 => Label::from_index(1),
        _ => label,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameEquivalenceEntry {
    pub even_label: Label,
    pub odd_label: Label,
    pub image: [f64; 3],
    pub expected: [f64; 3],
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameEquivalenceReport {
    pub entries: Vec<FrameEquivalenceEntry>,
    pub all_pass: bool,
}

/// Checks that `O` maps every even top onto the odd top whose label is
/// obtained by swapping `(0,1)` and `(1,0)`.
pub fn verify_frame_equivalence() -> FrameEquivalenceReport {
    let even = TetrahedronFrame::canonical(Parity::Even);
    let odd = TetrahedronFrame::canonical(Parity::Odd);
    let entries: Vec<_> = Label::ALL
        .iter()
        .map(|&l| {
            let image = mat3_apply(&FRAME_MAP_O, even.direction(l));
            let odd_label = swap_middle_labels(l);
            let expected = odd.direction(odd_label);
            let pass = (0..3).all(|k| (image[k] - expected[k]).abs() < 1e-12);
            FrameEquivalenceEntry {
                even_label: l,
                odd_label,
                image,
                expected,
                pass,
            }
        })
        .collect();
    let all_pass = entries.iter().all(|e| e.pass);
    FrameEquivalenceReport { entries, all_pass }
}

/// Unit-norm fiducial `|phi> = (alpha|0> + beta*|1>)/sqrt(2)` with
/// `alpha = sqrt(1 + 1/sqrt3)` and `beta* = e^{i pi/4} sqrt(1 - 1/sqrt3)`.
///
/// Its Bloch vector is the even top `(1,1,1)/sqrt(3)`.
pub fn fiducial_state() -> [C64; 2] {
    let alpha = (1.0 + FRAC_1_SQRT_3).sqrt();
    let beta_conj = C64::from_polar((1.0 - FRAC_1_SQRT_3).sqrt(), std::f64::consts::FRAC_PI_4);
    let norm = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(alpha * norm, 0.0), beta_conj * norm]
}
