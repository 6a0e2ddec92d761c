//! Entanglement of two effective qubits: partial-transpose spectrum and
//! Wootters concurrence, plus reduced states of the four-qubit pure state.
//!
//! The spin flip `σ_y ⊗ σ_y` and the complex conjugation in the concurrence
//! are taken in the fixed ordered basis `{|++⟩, |+−⟩, |−+⟩, |−−⟩}`.

use num_complex::Complex64;

use crate::engine::DensityMatrix4;
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, CMatrix};
use crate::reservoir::WholeState16;

/// Relative eigenvalue floor below which a density matrix eigenvalue is roundoff.
pub const CLIP_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Spectrum of `ρ^{T_A}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityResult {
    /// Smallest eigenvalue; negative iff the state is entangled.
    pub lambda_min: f64,
    /// Sum of the moduli of the negative eigenvalues.
    pub neg_sum: f64,
    /// Ascending.
    pub eigenvalues: [f64; 4],
}

pub fn partial_transpose(rho: &DensityMatrix4, subsystem: Subsystem) -> CMatrix {
    let m = &rho.matrix;
    let mut out = CMatrix::zeros((4, 4));
    for s in 0..2 {
        for p in 0..2 {
            for sp in 0..2 {
                for pp in 0..2 {
                    let (row, col) = match subsystem {
                        Subsystem::A => (2 * sp + p, 2 * s + pp),
                        Subsystem::B => (2 * s + pp, 2 * sp + p),
                    };
                    out[[row, col]] = m[[2 * s + p, 2 * sp + pp]];
                }
            }
        }
    }
    out
}

pub fn negativity(rho: &DensityMatrix4) -> Result<NegativityResult> {
    let pt = partial_transpose(rho, Subsystem::A);
    let values = linalg::hermitian_eigenvalues(&pt)?;
    let eigenvalues = [values[0], values[1], values[2], values[3]];
    Ok(NegativityResult {
        lambda_min: eigenvalues[0],
        neg_sum: eigenvalues.iter().filter(|v| **v < 0.0).map(|v| -v).sum(),
        eigenvalues,
    })
}

/// `(σ_y⊗σ_y) v`: anti-diagonal with signs (−1, 1, 1, −1).
fn spin_flip(v: &[Complex64; 4]) -> [Complex64; 4] {
    [-v[3], v[2], v[1], -v[0]]
}

/// Wootters concurrence `max{0, λ1 − λ2 − λ3 − λ4}`.
///
/// The `λ_k` (square roots of the spectrum of `ρ ρ̃`, equivalently of
/// `√ρ ρ̃ √ρ`) are obtained as the singular values of `τ_kl = w_kᵀ σ_y⊗σ_y w_l`
/// over the eigen-ensemble `w_k = √p_k v_k`. Eigenvalues of ρ at or below
/// `CLIP_TOL·Tr ρ` are dropped, which keeps rank-deficient states exact
/// instead of paying `√ε` for roundoff in the null space.
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64> {
    let eig = hermitian_eigen(&rho.matrix)?;
    let scale = eig.values.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let ensemble: Vec<[Complex64; 4]> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > CLIP_TOL * scale)
        .map(|(k, &p)| {
            let w = p.sqrt();
            [0, 1, 2, 3].map(|i| eig.vectors[[i, k]] * w)
        })
        .collect();
    let r = ensemble.len();
    if r == 0 {
        return Ok(0.0);
    }
    // singular values of τ are the non-negative eigenvalues of [[0, τ], [τ†, 0]]
    let mut dilation = CMatrix::zeros((2 * r, 2 * r));
    for k in 0..r {
        for l in 0..r {
            let flipped = spin_flip(&ensemble[l]);
            let tau: Complex64 = (0..4).map(|i| ensemble[k][i] * flipped[i]).sum();
            dilation[[k, r + l]] = tau;
            dilation[[r + l, k]] = tau.conj();
        }
    }
    let mut lambdas: Vec<f64> = linalg::hermitian_eigenvalues(&dilation)?
        .into_iter()
        .rev()
        .take(r)
        .map(|s| s.max(0.0))
        .collect();
    lambdas.resize(4, 0.0);
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// The four effective qubits of the mode–reservoir picture, in tensor order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    ReservoirA,
    B,
    ReservoirB,
}

impl Party {
    pub const ALL: [Party; 4] = [Party::A, Party::ReservoirA, Party::B, Party::ReservoirB];

    pub fn position(self) -> usize {
        match self {
            Party::A => 0,
            Party::ReservoirA => 1,
            Party::B => 2,
            Party::ReservoirB => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Party::A => "a",
            Party::ReservoirA => "r_a",
            Party::B => "b",
            Party::ReservoirB => "r_b",
        }
    }

    fn shift(self) -> usize {
        3 - self.position()
    }
}

/// Reduced density matrix of the ordered pair `keep`, tracing out the other two.
pub fn partial_trace(psi: &WholeState16, keep: (Party, Party)) -> Result<DensityMatrix4> {
    let (x, y) = keep;
    if x == y {
        return Err(Error::InvalidSubsystemPair(x.label(), y.label()));
    }
    let traced: Vec<Party> = Party::ALL.iter().copied().filter(|p| *p != x && *p != y).collect();
    let index = |qx: usize, qy: usize, q1: usize, q2: usize| {
        (qx << x.shift()) | (qy << y.shift()) | (q1 << traced[0].shift()) | (q2 << traced[1].shift())
    };
    let amps = &psi.amplitudes;
    let mut m = CMatrix::zeros((4, 4));
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for q1 in 0..2 {
                for q2 in 0..2 {
                    acc += amps[index(r >> 1, r & 1, q1, q2)] * amps[index(c >> 1, c & 1, q1, q2)].conj();
                }
            }
            m[[r, c]] = acc;
        }
    }
    Ok(DensityMatrix4::from_matrix(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, kron};
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> DensityMatrix4 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix4::pure([c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)])
    }

    fn random_qubit_state(rng: &mut ChaCha8Rng) -> CMatrix {
        let v = [
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        ];
        let w = [
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        ];
        let mut m = CMatrix::zeros((2, 2));
        let p: f64 = rng.random();
        for (vec, weight) in [(v, p), (w, 1.0 - p)] {
            let n: f64 = vec.iter().map(|z| z.norm_sqr()).sum();
            for i in 0..2 {
                for j in 0..2 {
                    m[[i, j]] += vec[i] * vec[j].conj() * (weight / n);
                }
            }
        }
        m
    }

    fn random_unitary2(rng: &mut ChaCha8Rng) -> CMatrix {
        let (a, b, g, d): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let (a, b, g, d) = (a * 6.3, b * 6.3, g * 6.3, d * 1.6);
        let e = |x: f64| Complex64::from_polar(1.0, x);
        array![[e(a) * d.cos(), e(b) * d.sin()], [-e(g - b + a) * d.sin(), e(g) * d.cos()]]
    }

    fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix4 {
        let mut g = CMatrix::zeros((4, 4));
        for z in g.iter_mut() {
            *z = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let m = g.dot(&dagger(&g));
        let tr = linalg::trace(&m).re;
        DensityMatrix4::from_matrix(m.mapv(|z| z / tr))
    }

    #[test]
    fn bell_state_values() {
        let n = negativity(&bell()).unwrap();
        assert!((n.lambda_min + 0.5).abs() < 1e-14);
        assert!((n.neg_sum - 0.5).abs() < 1e-14);
        assert!((concurrence(&bell()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_states_are_ppt_and_unentangled() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let rho = DensityMatrix4::from_matrix(kron(&random_qubit_state(&mut rng), &random_qubit_state(&mut rng)));
            assert!(negativity(&rho).unwrap().lambda_min >= -1e-14);
            assert!(concurrence(&rho).unwrap() < 1e-7);
        }
        let pure = DensityMatrix4::pure([c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(concurrence(&pure).unwrap() < 1e-15);
    }

    #[test]
    fn double_partial_transpose_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density(&mut rng);
        for sub in [Subsystem::A, Subsystem::B] {
            let once = DensityMatrix4::from_matrix(partial_transpose(&rho, sub));
            let twice = partial_transpose(&once, sub);
            assert_eq!(twice, rho.matrix);
            assert!(linalg::hermiticity_defect(&once.matrix) < 1e-15);
            assert!((linalg::trace(&once.matrix) - rho.trace()).norm() < 1e-15);
        }
        // T_B is the full transpose of T_A
        let ta = partial_transpose(&rho, Subsystem::A);
        let tb = partial_transpose(&rho, Subsystem::B);
        assert_eq!(ta.t().to_owned(), tb);
    }

    #[test]
    fn werner_state_threshold() {
        // p|Bell⟩⟨Bell| + (1−p) I/4 is entangled iff p > 1/3, C = max(0, (3p−1)/2)
        for p in [0.1, 0.3, 0.5, 0.9] {
            let m = bell().matrix.mapv(|z| z * p) + CMatrix::eye(4).mapv(|z| z * ((1.0 - p) / 4.0));
            let rho = DensityMatrix4::from_matrix(m);
            let n = negativity(&rho).unwrap();
            assert!((n.lambda_min - (1.0 - 3.0 * p) / 4.0).abs() < 1e-14);
            let conc = concurrence(&rho).unwrap();
            assert!((conc - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-13, "p={p}: {conc}");
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let rho = random_density(&mut rng);
            let u = kron(&random_unitary2(&mut rng), &random_unitary2(&mut rng));
            let rotated = DensityMatrix4::from_matrix(u.dot(&rho.matrix).dot(&dagger(&u)));
            let n0 = negativity(&rho).unwrap();
            let n1 = negativity(&rotated).unwrap();
            for (a, b) in n0.eigenvalues.iter().zip(n1.eigenvalues.iter()) {
                assert!((a - b).abs() < 1e-10);
            }
            let c0 = concurrence(&rho).unwrap();
            let c1 = concurrence(&rotated).unwrap();
            assert!((c0 - c1).abs() < 1e-10, "{c0} vs {c1}");
        }
    }

    #[test]
    fn partial_trace_of_product_is_product() {
        let singles = [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.6, 0.0), c(0.0, 0.8)],
            [c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.8, 0.0), c(-0.6, 0.0)],
        ];
        let mut amplitudes = [c(0.0, 0.0); 16];
        for (idx, amp) in amplitudes.iter_mut().enumerate() {
            *amp = (0..4).map(|k| singles[k][(idx >> (3 - k)) & 1]).product();
        }
        let psi = WholeState16 { t: 0.0, amplitudes };
        let rho = partial_trace(&psi, (Party::A, Party::ReservoirB)).unwrap();
        let expected = DensityMatrix4::pure([
            singles[0][0] * singles[3][0],
            singles[0][0] * singles[3][1],
            singles[0][1] * singles[3][0],
            singles[0][1] * singles[3][1],
        ]);
        assert!(linalg::max_abs_diff(&rho.matrix, &expected.matrix) < 1e-15);
        assert!(matches!(
            partial_trace(&psi, (Party::B, Party::B)),
            Err(Error::InvalidSubsystemPair("b", "b"))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn partial_trace_has_unit_trace(raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16)) {
            let norm: f64 = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let mut amplitudes = [c(0.0, 0.0); 16];
            for (z, (a, b)) in amplitudes.iter_mut().zip(&raw) {
                *z = c(a / norm, b / norm);
            }
            let psi = WholeState16 { t: 0.0, amplitudes };
            for (x, y) in [(Party::A, Party::B), (Party::ReservoirA, Party::ReservoirB), (Party::B, Party::ReservoirA)] {
                let rho = partial_trace(&psi, (x, y)).unwrap();
                prop_assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
                prop_assert!(rho.eigenvalues().unwrap()[0] > -1e-12);
            }
        }
    }
}
