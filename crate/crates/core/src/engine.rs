//! Exact zero-temperature damping of two-mode coherent-state superpositions.
//!
//! A state `Σ c_i^k |α_i⟩|β_k⟩` stays, at every time, a combination of the
//! dyads `|α_i(t) β_m(t)⟩⟨α_j(t) β_n(t)|` with `α_i(t) = α_i e^{−Γ_a t/2}`.
//! Each dyad picks up the factor `⟨α_j|α_i⟩^{1−e^{−Γ_a t}}` (and likewise for
//! mode b), which is what [`CoefficientTensor::evolve`] applies.
//!
//! Matrices in the effective two-qubit picture use the ordered basis
//! `{|++⟩, |+−⟩, |−+⟩, |−−⟩}` of the time-t orthonormal pairs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::states::{decay_amplitude, Amplitude, Distances, OrthoBasisMap, DEFAULT_MIN_DIST_SQ};

pub type Coeffs2 = [[Complex64; 2]; 2];
pub type Coeffs4 = [[[[Complex64; 2]; 2]; 2]; 2];

/// Tolerance on the Gram norm after normalisation.
pub const NORM_TOL: f64 = 1e-12;

/// Initial condition: four coherent amplitudes, the weights `c[i][k]` of
/// `|α_{i+1}⟩|β_{k+1}⟩`, and the two damping rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatPairState {
    pub alpha1: Amplitude,
    pub alpha2: Amplitude,
    pub beta1: Amplitude,
    pub beta2: Amplitude,
    pub c: Coeffs2,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl CatPairState {
    /// Validates inputs and rescales `c` to unit Gram norm.
    pub fn new(alphas: [Amplitude; 2], betas: [Amplitude; 2], c: Coeffs2, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        for a in alphas.iter().chain(betas.iter()) {
            a.check_finite()?;
        }
        for g in [gamma_a, gamma_b] {
            if !(g >= 0.0) || !g.is_finite() {
                return Err(Error::InvalidRate(g));
            }
        }
        let raw = CatPairState {
            alpha1: alphas[0],
            alpha2: alphas[1],
            beta1: betas[0],
            beta2: betas[1],
            c,
            gamma_a,
            gamma_b,
        };
        normalize_initial(raw)
    }

    /// State `Σ q[s][p] |s⟩_a |p⟩_b` given in the t=0 orthonormal bases of the
    /// two pairs (s, p = 0 for `+`, 1 for `−`).
    pub fn from_qubit_weights(alphas: [Amplitude; 2], betas: [Amplitude; 2], q: Coeffs2, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        let ha = OrthoBasisMap::new(alphas[0], alphas[1])?.basis_in_coherent_states();
        let hb = OrthoBasisMap::new(betas[0], betas[1])?.basis_in_coherent_states();
        let mut c = [[ZERO; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (k, entry) in row.iter_mut().enumerate() {
                for s in 0..2 {
                    for p in 0..2 {
                        *entry += q[s][p] * ha[s][i] * hb[p][k];
                    }
                }
            }
        }
        Self::new(alphas, betas, c, gamma_a, gamma_b)
    }

    pub fn alphas(&self) -> [Amplitude; 2] {
        [self.alpha1, self.alpha2]
    }

    pub fn betas(&self) -> [Amplitude; 2] {
        [self.beta1, self.beta2]
    }

    /// `Σ c_i^m (c_j^n)* ⟨α_j|α_i⟩⟨β_n|β_m⟩`.
    pub fn gram_norm(&self) -> f64 {
        CoefficientTensor::initial(self).gram_trace().re
    }

    pub fn distances(&self) -> Distances {
        distances(self)
    }

    /// Same physical state with both damping rates replaced.
    pub fn with_rates(mut self, gamma_a: f64, gamma_b: f64) -> Self {
        self.gamma_a = gamma_a;
        self.gamma_b = gamma_b;
        self
    }
}

pub fn distances(state: &CatPairState) -> Distances {
    Distances::from_amplitudes(state.alpha1, state.alpha2, state.beta1, state.beta2)
}

/// Rescales the weights so the state has unit norm.
pub fn normalize_initial(mut state: CatPairState) -> Result<CatPairState> {
    if state.c.iter().flatten().all(|z| *z == ZERO) {
        return Err(Error::ZeroState);
    }
    let norm = state.gram_norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroState);
    }
    let scale = 1.0 / norm.sqrt();
    for z in state.c.iter_mut().flatten() {
        *z *= scale;
    }
    Ok(state)
}

/// `ρ(t) = Σ C[i][j][m][n] |α_i(t) β_m(t)⟩⟨α_j(t) β_n(t)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientTensor {
    pub t: f64,
    /// Indexed `[i][j][m][n]`: ket `α_i β_m`, bra `α_j β_n`.
    pub coeffs: Coeffs4,
    pub alpha_t: [Amplitude; 2],
    pub beta_t: [Amplitude; 2],
    pub gamma_a: f64,
    pub gamma_b: f64,
}

/// `e^{(1−η)(ξ_j* ξ_i − |ξ_i|²/2 − |ξ_j|²/2)}`, i.e.
/// `exp{−(1−η)(|ξ_i−ξ_j|² − 2i Im(ξ_i ξ_j*))/2}` with `1−η = 1−e^{−γt}`.
fn dyad_factors(xi: [Amplitude; 2], one_minus_eta: f64) -> Coeffs2 {
    let mut f = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let a = xi[i].value();
            let b = xi[j].value();
            let expo = Complex64::new(-0.5 * (a - b).norm_sqr(), (a * b.conj()).im);
            f[i][j] = (expo * one_minus_eta).exp();
        }
    }
    f
}

impl CoefficientTensor {
    pub fn initial(state: &CatPairState) -> Self {
        let mut coeffs = [[[[ZERO; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for m in 0..2 {
                    for n in 0..2 {
                        coeffs[i][j][m][n] = state.c[i][m] * state.c[j][n].conj();
                    }
                }
            }
        }
        CoefficientTensor {
            t: 0.0,
            coeffs,
            alpha_t: state.alphas(),
            beta_t: state.betas(),
            gamma_a: state.gamma_a,
            gamma_b: state.gamma_b,
        }
    }

    /// Applies the damping map for a further time `dt` to every dyad.
    pub fn evolve(&self, dt: f64) -> Result<CoefficientTensor> {
        if !(dt >= 0.0) {
            return Err(Error::NegativeTime(dt));
        }
        let ka = -(-self.gamma_a * dt).exp_m1();
        let kb = -(-self.gamma_b * dt).exp_m1();
        let fa = dyad_factors(self.alpha_t, ka);
        let fb = dyad_factors(self.beta_t, kb);
        let mut coeffs = self.coeffs;
        for i in 0..2 {
            for j in 0..2 {
                for m in 0..2 {
                    for n in 0..2 {
                        coeffs[i][j][m][n] *= fa[i][j] * fb[m][n];
                    }
                }
            }
        }
        Ok(CoefficientTensor {
            t: self.t + dt,
            coeffs,
            alpha_t: [
                decay_amplitude(self.alpha_t[0], self.gamma_a, dt)?,
                decay_amplitude(self.alpha_t[1], self.gamma_a, dt)?,
            ],
            beta_t: [
                decay_amplitude(self.beta_t[0], self.gamma_b, dt)?,
                decay_amplitude(self.beta_t[1], self.gamma_b, dt)?,
            ],
            gamma_a: self.gamma_a,
            gamma_b: self.gamma_b,
        })
    }

    /// `Σ C ⟨α_j(t)|α_i(t)⟩⟨β_n(t)|β_m(t)⟩`, the trace of ρ(t).
    pub fn gram_trace(&self) -> Complex64 {
        use crate::states::coherent_overlap;
        let mut sum = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                let oa = coherent_overlap(self.alpha_t[i], self.alpha_t[j]);
                for m in 0..2 {
                    for n in 0..2 {
                        let ob = coherent_overlap(self.beta_t[m], self.beta_t[n]);
                        sum += self.coeffs[i][j][m][n] * oa * ob;
                    }
                }
            }
        }
        sum
    }

    /// Projects onto the orthonormal basis built from the current amplitudes.
    pub fn to_qubit_basis(&self, min_dist_sq: f64) -> Result<DensityMatrix4> {
        let basis_a = crate::states::build_ortho_basis(self.alpha_t[0], self.alpha_t[1], min_dist_sq)?;
        let basis_b = crate::states::build_ortho_basis(self.beta_t[0], self.beta_t[1], min_dist_sq)?;
        let ga = &basis_a.expansion;
        let gb = &basis_b.expansion;
        let mut rho = CMatrix::zeros((4, 4));
        for i in 0..2 {
            for j in 0..2 {
                for m in 0..2 {
                    for n in 0..2 {
                        let cijmn = self.coeffs[i][j][m][n];
                        if cijmn == ZERO {
                            continue;
                        }
                        for s in 0..2 {
                            for p in 0..2 {
                                let ket = cijmn * ga[i][s] * gb[m][p];
                                for sp in 0..2 {
                                    for pp in 0..2 {
                                        rho[[2 * s + p, 2 * sp + pp]] += ket * (ga[j][sp] * gb[n][pp]).conj();
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(DensityMatrix4 {
            matrix: rho,
            bases: Some((basis_a, basis_b)),
        })
    }
}

/// `C_{i,j}^{m,n}(t)` for the given initial state.
pub fn evolve_coefficients(state: &CatPairState, t: f64) -> Result<CoefficientTensor> {
    CoefficientTensor::initial(state).evolve(t)
}

/// ρ(t) in the effective two-qubit basis at time `t`.
pub fn density_in_qubit_basis(state: &CatPairState, t: f64) -> Result<DensityMatrix4> {
    evolve_coefficients(state, t)?.to_qubit_basis(DEFAULT_MIN_DIST_SQ)
}

/// 4×4 density matrix of two effective qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    pub matrix: CMatrix,
    /// Mode bases the matrix is written in, when it comes from the engine.
    pub bases: Option<(OrthoBasisMap, OrthoBasisMap)>,
}

impl DensityMatrix4 {
    pub fn from_matrix(matrix: CMatrix) -> Self {
        assert_eq!(matrix.dim(), (4, 4), "two-qubit density matrix must be 4x4");
        DensityMatrix4 { matrix, bases: None }
    }

    /// Projector onto a normalised 4-vector.
    pub fn pure(psi: [Complex64; 4]) -> Self {
        let mut m = CMatrix::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                m[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        Self::from_matrix(m)
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// True when the matrix has zeros outside its diagonal and anti-diagonal.
    pub fn is_x_shaped(&self, tol: f64) -> bool {
        (0..4).all(|i| (0..4).all(|j| i == j || i + j == 3 || self.matrix[[i, j]].norm() <= tol))
    }
}

/// Decoherence time scales of the two modes and their combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicTimes {
    /// `[Γ_a |α1−α2|²/2]^{−1}`.
    pub tau_a: f64,
    pub tau_b: f64,
    /// `1/τ = 1/τ_a + 1/τ_b`.
    pub tau: f64,
}

pub fn characteristic_times(state: &CatPairState) -> CharacteristicTimes {
    let rate_a = 0.5 * state.gamma_a * state.alpha1.dist_sq(&state.alpha2);
    let rate_b = 0.5 * state.gamma_b * state.beta1.dist_sq(&state.beta2);
    let inv = |r: f64| if r > 0.0 { 1.0 / r } else { f64::INFINITY };
    CharacteristicTimes {
        tau_a: inv(rate_a),
        tau_b: inv(rate_b),
        tau: inv(rate_a + rate_b),
    }
}
