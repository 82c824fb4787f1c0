//! Born-rule joint detector statistics, noise models, seeded finite-shot
//! sampling and the linear tomography estimator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::pauli::{bloch_of, sigma, singlet_vector, DensityOperator, Label};
use crate::sic::{Parity, TetrahedronFrame};
use crate::wigner::{density_from_quartit_wigner, fidelity, quartit_wigner_from_joint, QuartitWigner};

/// Identifier of the sampling stream, recorded in every output.
pub const STREAM_ALGORITHM: &str = "chacha20(rand_chacha 0.9, seed_from_u64)/inverse-cdf-f64/v1";

/// Probabilities below this magnitude produced by the Born rule are round-off
/// and are stored as exact zeros.
const ROUNDOFF_ZERO: f64 = 1e-14;

/// Physicality tolerance on the minimum eigenvalue of input states.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// `P[k][l]`: probability that detector `k` of qubit a and detector `l` of qubit b fire.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointProbabilityTable {
    p: [[f64; 4]; 4],
    parity_a: Parity,
    parity_b: Parity,
}

impl JointProbabilityTable {
    pub fn new(p: [[f64; 4]; 4], parity_a: Parity, parity_b: Parity) -> Result<Self> {
        if p.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(&neg) = p.iter().flatten().find(|&&x| x < 0.0) {
            return Err(Error::NegativeProbability(neg));
        }
        let total: f64 = p.iter().flatten().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { p, parity_a, parity_b })
    }

    pub fn probabilities(&self) -> &[[f64; 4]; 4] {
        &self.p
    }

    pub fn parity_a(&self) -> Parity {
        self.parity_a
    }

    pub fn parity_b(&self) -> Parity {
        self.parity_b
    }

    /// `P^a_k = sum_l P[k][l]`.
    pub fn marginal_a(&self) -> [f64; 4] {
        self.p.map(|row| row.iter().sum())
    }

    /// `P^b_l = sum_k P[k][l]`.
    pub fn marginal_b(&self) -> [f64; 4] {
        std::array::from_fn(|l| self.p.iter().map(|row| row[l]).sum())
    }

    pub fn max_abs_diff(&self, other: &[[f64; 4]; 4]) -> f64 {
        self.p
            .iter()
            .flatten()
            .zip(other.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn require_physical(rho: &DensityOperator) -> Result<()> {
    rho.matrix().require_dim(4)?;
    let min = rho.min_eigenvalue();
    if min < -PHYSICAL_TOL {
        return Err(Error::NonPhysicalState(min));
    }
    Ok(())
}

fn snap(x: f64) -> f64 {
    if x.abs() < ROUNDOFF_ZERO {
        0.0
    } else {
        x
    }
}

/// `P[k][l] = Tr(rho E^a_k (x) E^b_l)` for arbitrary (possibly misaligned) frames.
pub fn joint_table_in_frames(
    rho: &DensityOperator,
    frame_a: &TetrahedronFrame,
    frame_b: &TetrahedronFrame,
) -> Result<JointProbabilityTable> {
    require_physical(rho)?;
    let ea = frame_a.effects();
    let eb = frame_b.effects();
    let mut p = [[0.0; 4]; 4];
    for k in 0..4 {
        for l in 0..4 {
            let e = ComplexMatrix::tensor(&ea[k].matrix, &eb[l].matrix)?;
            p[k][l] = snap(rho.matrix().trace_product(&e));
        }
    }
    JointProbabilityTable::new(p, frame_a.parity(), frame_b.parity())
}

/// Born table in the canonical frames of the given parities.
pub fn joint_table(rho: &DensityOperator, parity_a: Parity, parity_b: Parity) -> Result<JointProbabilityTable> {
    joint_table_in_frames(rho, &TetrahedronFrame::canonical(parity_a), &TetrahedronFrame::canonical(parity_b))
}

/// Local Bloch vectors `a`, `b` and correlation matrix `T`.
pub type CorrelationData = ([f64; 3], [f64; 3], [[f64; 3]; 3]);

/// Local Bloch vectors `a`, `b` and correlation matrix `T_uv = Tr(rho sigma_u (x) sigma_v)`
/// (components ordered x, y, z).
pub fn correlation_data(rho: &DensityOperator) -> Result<CorrelationData> {
    rho.matrix().require_dim(4)?;
    let a = bloch_of(&rho.matrix().partial_trace_b()?)?;
    let b = bloch_of(&rho.matrix().partial_trace_a()?)?;
    // x = (1,0), y = (1,1), z = (0,1)
    let xyz = [Label::from_index(2), Label::from_index(3), Label::from_index(1)];
    let mut t = [[0.0; 3]; 3];
    for (u, &lu) in xyz.iter().enumerate() {
        for (v, &lv) in xyz.iter().enumerate() {
            let s = ComplexMatrix::tensor(&sigma(lu), &sigma(lv))?;
            t[u][v] = rho.matrix().trace_product(&s);
        }
    }
    Ok((a, b, t))
}

/// `P[k][l] = (1/16)(1 + t_k.a + s_l.b + t_k^T T s_l)`; agrees with [`joint_table_in_frames`].
pub fn joint_table_from_correlations(
    rho: &DensityOperator,
    frame_a: &TetrahedronFrame,
    frame_b: &TetrahedronFrame,
) -> Result<[[f64; 4]; 4]> {
    let (a, b, t) = correlation_data(rho)?;
    let mut p = [[0.0; 4]; 4];
    for (k, row) in p.iter_mut().enumerate() {
        let tk = frame_a.directions()[k];
        for (l, cell) in row.iter_mut().enumerate() {
            let sl = frame_b.directions()[l];
            let mut acc = 1.0;
            for u in 0..3 {
                acc += tk[u] * a[u] + sl[u] * b[u];
                for v in 0..3 {
                    acc += tk[u] * t[u][v] * sl[v];
                }
            }
            *cell = acc / 16.0;
        }
    }
    Ok(p)
}

/// `v |Psi-><Psi-| + (1 - v) I/4`.
pub fn werner(v: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
        return Err(Error::OutOfRange { name: "visibility", value: v });
    }
    let singlet = DensityOperator::pure(&singlet_vector())?;
    singlet.mix(&DensityOperator::maximally_mixed(4)?, v)
}

/// Independent depolarizing channel of strength `lambda` on each qubit:
/// every local Bloch component and every correlation is scaled by `1 - lambda`.
pub fn depolarize(rho: &DensityOperator, lambda: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(Error::OutOfRange { name: "depolarizing strength", value: lambda });
    }
    rho.matrix().require_dim(4)?;
    let id = ComplexMatrix::identity(2)?;
    let mut out = *rho.matrix();
    for side in 0..2 {
        let mut twirl = ComplexMatrix::zeros(4)?;
        for l in Label::ALL {
            let u = if side == 0 {
                ComplexMatrix::tensor(&sigma(l), &id)?
            } else {
                ComplexMatrix::tensor(&id, &sigma(l))?
            };
            twirl = twirl + out.conjugate_by(&u);
        }
        out = out.scale_real(1.0 - lambda) + twirl.scale_real(0.25 * lambda);
    }
    DensityOperator::new(out)
}

/// Frame of the given parity rotated rigidly by `angle` about `axis`.
pub fn misalign(parity: Parity, axis: [f64; 3], angle: f64) -> Result<TetrahedronFrame> {
    TetrahedronFrame::canonical(parity).rotated(axis, angle)
}

/// Coincidence counts `counts[k][l]` over `shots` detected pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub counts: [[u64; 4]; 4],
    pub shots: u64,
}

impl CountTable {
    pub fn new(counts: [[u64; 4]; 4]) -> Result<Self> {
        let shots = counts.iter().flatten().sum();
        if shots == 0 {
            return Err(Error::InvalidShots);
        }
        Ok(Self { counts, shots })
    }

    pub fn frequencies(&self) -> [[f64; 4]; 4] {
        let n = self.shots as f64;
        self.counts.map(|row| row.map(|c| c as f64 / n))
    }
}

/// Index of the cell hit by `u` in `[0, 1)` by inverse CDF over the 16 cells in row-major order.
fn inverse_cdf(cumulative: &[f64; 16], probs: &[f64; 16], u: f64) -> usize {
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).expect("normalized table");
    cumulative
        .iter()
        .zip(probs)
        .position(|(&c, &p)| p > 0.0 && u < c)
        .unwrap_or(last_nonzero)
}

/// Multinomial draw of `shots` pairs, one uniform `f64` per pair from a
/// ChaCha20 stream seeded with `seed`.
pub fn sample_counts(table: &JointProbabilityTable, shots: u64, seed: u64) -> Result<CountTable> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let probs: [f64; 16] = std::array::from_fn(|x| table.p[x / 4][x % 4]);
    let mut cumulative = [0.0; 16];
    let mut acc = 0.0;
    for (c, p) in cumulative.iter_mut().zip(&probs) {
        acc += p;
        *c = acc;
    }
    let mut counts = [[0u64; 4]; 4];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let cell = inverse_cdf(&cumulative, &probs, u);
        counts[cell / 4][cell % 4] += 1;
    }
    CountTable::new(counts)
}

/// Independent samples for each seed, computed in parallel, returned in seed order.
pub fn sample_many(table: &JointProbabilityTable, shots: u64, seeds: &[u64]) -> Result<Vec<CountTable>> {
    seeds.par_iter().map(|&s| sample_counts(table, shots, s)).collect()
}

/// Output of the linear estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub w_hat: QuartitWigner,
    /// Linear reconstruction; may have negative eigenvalues.
    pub rho_hat: ComplexMatrix,
    pub min_eigenvalue: f64,
}

impl Estimate {
    pub fn fidelity_vs(&self, w_ref: &QuartitWigner) -> Result<f64> {
        fidelity(&self.w_hat, w_ref)
    }
}

/// Frequencies, then the joint-statistics Wigner map, then the linear reconstruction.
pub fn estimate(counts: &CountTable, parity_a: Parity, parity_b: Parity) -> Result<Estimate> {
    let table = JointProbabilityTable::new(counts.frequencies(), parity_a, parity_b)?;
    estimate_from_table(&table)
}

/// Estimator applied to an exact probability table.
pub fn estimate_from_table(table: &JointProbabilityTable) -> Result<Estimate> {
    let w_hat = quartit_wigner_from_joint(table);
    let rho_hat = density_from_quartit_wigner(&w_hat, table.parity_a(), table.parity_b())?;
    let herm = (rho_hat + rho_hat.adjoint()).scale_real(0.5);
    let min_eigenvalue = herm.min_eigenvalue()?;
    Ok(Estimate {
        w_hat,
        rho_hat: herm,
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::bell_state;

    const R: f64 = 1.0 / 12.0;

    #[test]
    fn singlet_tables() {
        let s = werner(1.0).unwrap();
        let tt = joint_table(&s, Parity::Even, Parity::Even).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let expected = if k == l { 0.0 } else { R };
                assert!((tt.probabilities()[k][l] - expected).abs() < 1e-12);
            }
            assert_eq!(tt.probabilities()[k][k], 0.0);
        }
        let ta = joint_table(&s, Parity::Even, Parity::Odd).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let expected = if k == l { 1.0 / 8.0 } else { 1.0 / 24.0 };
                assert!((ta.probabilities()[k][l] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_plus_zeros_on_antidiagonal() {
        // i Phi+ differs from Phi+ by a global phase
        let phi = bell_state(Label::from_index(3));
        let t = joint_table(&phi, Parity::Even, Parity::Even).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let expected = if k + l == 3 { 0.0 } else { R };
                assert!((t.probabilities()[k][l] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_and_correlation_forms_agree() {
        let rho = depolarize(&bell_state(Label::from_index(1)), 0.3).unwrap();
        let fa = misalign(Parity::Even, [0.0, 0.6, 0.8], 0.4).unwrap();
        let fb = TetrahedronFrame::canonical(Parity::Odd);
        let born = joint_table_in_frames(&rho, &fa, &fb).unwrap();
        let corr = joint_table_from_correlations(&rho, &fa, &fb).unwrap();
        assert!(born.max_abs_diff(&corr) < 1e-12);
    }

    #[test]
    fn werner_range() {
        assert!(matches!(werner(1.2), Err(Error::OutOfRange { .. })));
        assert!(matches!(werner(-0.1), Err(Error::OutOfRange { .. })));
        let mixed = werner(0.0).unwrap();
        assert!(mixed.matrix().max_abs_diff(&ComplexMatrix::identity(4).unwrap().scale_real(0.25)) < 1e-15);
        let w = werner(0.947).unwrap();
        let singlet = werner(1.0).unwrap();
        let f = w.matrix().trace_product(singlet.matrix());
        assert!((f - (0.947 + 0.053 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_scales_correlations() {
        let s = werner(1.0).unwrap();
        let d = depolarize(&s, 0.2).unwrap();
        let (_, _, t) = correlation_data(&d).unwrap();
        for u in 0..3 {
            assert!((t[u][u] + 0.64).abs() < 1e-12);
        }
        assert!(matches!(depolarize(&s, 1.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn nonphysical_input_rejected() {
        let m = ComplexMatrix::diagonal(&[1.5, -0.5, 0.0, 0.0]).unwrap();
        let rho = DensityOperator::new(m).unwrap();
        assert!(matches!(
            joint_table(&rho, Parity::Even, Parity::Even),
            Err(Error::NonPhysicalState(_))
        ));
    }

    #[test]
    fn misalignment_examples() {
        let f0 = misalign(Parity::Even, [1.0, 0.0, 0.0], 0.0).unwrap();
        let c = TetrahedronFrame::canonical(Parity::Even);
        for l in Label::ALL {
            for (x, y) in f0.direction(l).iter().zip(c.direction(l)) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let r3 = 1.0 / 3f64.sqrt();
        let turned = misalign(Parity::Even, [r3, r3, r3], 2.0 * std::f64::consts::PI / 3.0).unwrap();
        // (0,0) lies on the axis; the three others are permuted cyclically.
        let d = |f: &TetrahedronFrame, i: usize| f.direction(Label::from_index(i));
        let close = |a: [f64; 3], b: [f64; 3]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(d(&turned, 0), d(&c, 0)));
        let mut images = Vec::new();
        for i in 1..4 {
            let j = (1..4).find(|&j| close(d(&turned, i), d(&c, j))).expect("maps onto a top");
            assert_ne!(i, j);
            images.push(j);
        }
        images.sort();
        assert_eq!(images, vec![1, 2, 3]);
        let sum = sum_effects(&turned);
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(2).unwrap()) < 1e-12);
        assert!(misalign(Parity::Odd, [1.0, 1.0, 0.0], 0.1).is_err());
    }

    fn sum_effects(f: &TetrahedronFrame) -> ComplexMatrix {
        f.effects().iter().fold(ComplexMatrix::zeros(2).unwrap(), |acc, e| acc + e.matrix)
    }

    #[test]
    fn sampling_basics() {
        let s = werner(1.0).unwrap();
        let tt = joint_table(&s, Parity::Even, Parity::Even).unwrap();
        assert_eq!(sample_counts(&tt, 0, 1), Err(Error::InvalidShots));
        let one = sample_counts(&tt, 1, 7).unwrap();
        assert_eq!(one.counts.iter().flatten().filter(|&&c| c > 0).count(), 1);
        let many = sample_counts(&tt, 50_000, 3).unwrap();
        assert_eq!(many.shots, 50_000);
        for k in 0..4 {
            assert_eq!(many.counts[k][k], 0);
        }
        assert_eq!(many, sample_counts(&tt, 50_000, 3).unwrap());
        assert_ne!(many, sample_counts(&tt, 50_000, 4).unwrap());
    }

    #[test]
    fn sampled_stream_is_pinned() {
        // Guards the documented stream: a change of algorithm must change STREAM_ALGORITHM.
        let uniform = JointProbabilityTable::new([[1.0 / 16.0; 4]; 4], Parity::Even, Parity::Even).unwrap();
        let a = sample_counts(&uniform, 64, 2024).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let mut expected = [[0u64; 4]; 4];
        for _ in 0..64 {
            let cell = ((rng.random::<f64>() * 16.0).floor() as usize).min(15);
            expected[cell / 4][cell % 4] += 1;
        }
        assert_eq!(a.counts, expected);
    }

    #[test]
    fn estimate_exact_table_is_fixed_point() {
        let s = werner(1.0).unwrap();
        let tt = joint_table(&s, Parity::Even, Parity::Even).unwrap();
        let est = estimate_from_table(&tt).unwrap();
        assert!(est.rho_hat.max_abs_diff(s.matrix()) < 1e-12);
        assert!(est.min_eigenvalue.abs() < 1e-12);
        let counts = CountTable::new([[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0]]).unwrap();
        let est = estimate(&counts, Parity::Even, Parity::Even).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let expected = if k == l { -0.125 } else { 0.125 };
                assert!((est.w_hat.values[k][l] - expected).abs() < 1e-12);
            }
        }
        assert!((est.fidelity_vs(&est.w_hat).unwrap() - 1.0).abs() < 1e-12);
    }
}
