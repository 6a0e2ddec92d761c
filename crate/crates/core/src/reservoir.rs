//! Each damped mode together with its reservoir, seen as two effective qubits.
//!
//! For a pair `±α` the joint evolution maps `|±,0⟩|vac⟩_r` to
//!
//! ```text
//! |φ+,t⟩ = p1 |+,t⟩|E+,t⟩ + p2 |−,t⟩|E−,t⟩
//! |φ−,t⟩ = m1 |+,t⟩|E−,t⟩ + m2 |−,t⟩|E+,t⟩
//! ```
//!
//! where `|E±,t⟩` is the normalised even/odd reservoir combination with norm
//! factor `B±(t) = √(2(1 ± e^{−2|α|²(1−e^{−Γt})}))`. Only the collective
//! reservoir overlap enters, so no individual reservoir oscillator is modelled.
//! Component index within a pair is `2·mode + reservoir` with 0 for `+`.

use num_complex::Complex64;

use crate::closed_form::XFamilyParams;
use crate::engine::{Coeffs2, DensityMatrix4};
use crate::error::{Error, Result};
use crate::measures::{concurrence, partial_trace, Party, Subsystem};
use crate::states::DEFAULT_MIN_DIST_SQ;

/// `X = c++|φ+⟩_a|φ+⟩_b + c−−|φ−⟩_a|φ−⟩_b` with real pairs `±α`, `±β` and
/// common rate `Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirParams {
    /// `|α|²`, so that `|α1−α2|² = 4|α|²`.
    pub alpha_abs_sq: f64,
    pub beta_abs_sq: f64,
    pub gamma: f64,
    pub c_pp: f64,
    pub c_mm: f64,
}

impl ReservoirParams {
    /// Rescales the weights to `c++² + c−−² = 1`.
    pub fn new(alpha_abs_sq: f64, beta_abs_sq: f64, gamma: f64, c_pp: f64, c_mm: f64) -> Result<Self> {
        for x in [alpha_abs_sq, beta_abs_sq] {
            check_abs_sq(x)?;
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidRate(gamma));
        }
        let n = c_pp.hypot(c_mm);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(ReservoirParams {
            alpha_abs_sq,
            beta_abs_sq,
            gamma,
            c_pp: c_pp / n,
            c_mm: c_mm / n,
        })
    }

    /// Equal mode distances `D² = |α1−α2|² = |β1−β2|²`.
    pub fn equal(d_eq_sq: f64, gamma: f64, c_pp: f64, c_mm: f64) -> Result<Self> {
        Self::new(0.25 * d_eq_sq, 0.25 * d_eq_sq, gamma, c_pp, c_mm)
    }

    /// `D²` of mode a.
    pub fn d_eq_sq(&self) -> f64 {
        4.0 * self.alpha_abs_sq
    }

    /// Closed-form parameters of the mode pair; meaningful for equal distances.
    pub fn x_family(&self) -> Result<XFamilyParams> {
        XFamilyParams::new(self.c_pp, self.c_mm, self.d_eq_sq(), self.gamma)
    }

    fn weights(&self) -> Coeffs2 {
        let z = Complex64::new(0.0, 0.0);
        [[Complex64::new(self.c_pp, 0.0), z], [z, Complex64::new(self.c_mm, 0.0)]]
    }
}

fn check_abs_sq(x_abs_sq: f64) -> Result<()> {
    let dist_sq = 4.0 * x_abs_sq;
    if !(dist_sq >= DEFAULT_MIN_DIST_SQ) || !dist_sq.is_finite() {
        return Err(Error::DegenerateSuperposition {
            dist_sq,
            threshold: DEFAULT_MIN_DIST_SQ,
        });
    }
    Ok(())
}

fn check_time(gamma: f64, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidRate(gamma));
    }
    Ok(())
}

/// `(B+, B−)`. `B−(0) = 0`: the odd reservoir state does not exist yet.
pub fn b_norms(x_abs_sq: f64, gamma: f64, t: f64) -> (f64, f64) {
    // y = 2|x|²(1 − e^{−Γt})
    let y = -2.0 * x_abs_sq * (-gamma * t).exp_m1();
    ((2.0 * (1.0 + (-y).exp())).sqrt(), (-2.0 * (-y).exp_m1()).sqrt())
}

/// Expansion coefficients of `|φ±,t⟩`; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiCoefficients {
    pub p1: f64,
    pub p2: f64,
    pub m1: f64,
    pub m2: f64,
}

/// Coefficients `N±(0)B(t)/(2N(t))`, evaluated in combined form so that the
/// vanishing `B−(0)` never meets a division.
pub fn phi_coefficients(x_abs_sq: f64, gamma: f64, t: f64) -> Result<PhiCoefficients> {
    check_abs_sq(x_abs_sq)?;
    check_time(gamma, t)?;
    let d_sq = 4.0 * x_abs_sq;
    let eta = (-gamma * t).exp();
    let n0p = 1.0 / (2.0 * (1.0 + (-0.5 * d_sq).exp())).sqrt();
    let n0m = 1.0 / (-2.0 * (-0.5 * d_sq).exp_m1()).sqrt();
    // 1/(2N±(t)) = √(2(1 ± e^{−D²η/2}))/2
    let half_inv_ntp = (2.0 * (1.0 + (-0.5 * d_sq * eta).exp())).sqrt() / 2.0;
    let half_inv_ntm = (-2.0 * (-0.5 * d_sq * eta).exp_m1()).sqrt() / 2.0;
    let (bp, bm) = b_norms(x_abs_sq, gamma, t);
    Ok(PhiCoefficients {
        p1: n0p * bp * half_inv_ntp,
        p2: n0p * bm * half_inv_ntm,
        m1: n0m * bm * half_inv_ntp,
        m2: n0m * bp * half_inv_ntm,
    })
}

/// `(|φ+,t⟩, |φ−,t⟩)` of one mode over `{|±,t⟩} ⊗ {|E±,t⟩}`.
pub fn phi_states(params: &ReservoirParams, mode: Subsystem, t: f64) -> Result<([Complex64; 4], [Complex64; 4])> {
    let x_abs_sq = match mode {
        Subsystem::A => params.alpha_abs_sq,
        Subsystem::B => params.beta_abs_sq,
    };
    Ok(phi_vectors(&phi_coefficients(x_abs_sq, params.gamma, t)?))
}

fn phi_vectors(c: &PhiCoefficients) -> ([Complex64; 4], [Complex64; 4]) {
    let r = |x: f64| Complex64::new(x, 0.0);
    let z = r(0.0);
    ([r(c.p1), z, z, r(c.p2)], [z, r(c.m1), r(c.m2), z])
}

/// Pure state of (mode a, reservoir a, mode b, reservoir b); the component
/// index is `8·a + 4·r_a + 2·b + r_b` with 0 for `+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WholeState16 {
    pub t: f64,
    pub amplitudes: [Complex64; 16],
}

impl WholeState16 {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr(|Ψ⟩⟨Ψ|)²`.
    pub fn purity(&self) -> f64 {
        self.norm_sqr().powi(2)
    }

    pub fn reduced(&self, keep: (Party, Party)) -> Result<DensityMatrix4> {
        partial_trace(self, keep)
    }
}

/// `Σ q[s][p] |φ_s⟩_{a r_a} |φ_p⟩_{b r_b}` for the initial mode state
/// `Σ q[s][p] |s⟩_a |p⟩_b`.
pub fn whole_state_from_weights(alpha_abs_sq: f64, beta_abs_sq: f64, gamma: f64, q: Coeffs2, t: f64) -> Result<WholeState16> {
    let (pa, ma) = phi_vectors(&phi_coefficients(alpha_abs_sq, gamma, t)?);
    let (pb, mb) = phi_vectors(&phi_coefficients(beta_abs_sq, gamma, t)?);
    let a = [pa, ma];
    let b = [pb, mb];
    let mut amplitudes = [Complex64::new(0.0, 0.0); 16];
    for s in 0..2 {
        for p in 0..2 {
            if q[s][p] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..4 {
                for j in 0..4 {
                    amplitudes[4 * i + j] += q[s][p] * a[s][i] * b[p][j];
                }
            }
        }
    }
    Ok(WholeState16 { t, amplitudes })
}

pub fn whole_state(params: &ReservoirParams, t: f64) -> Result<WholeState16> {
    whole_state_from_weights(params.alpha_abs_sq, params.beta_abs_sq, params.gamma, params.weights(), t)
}

/// Concurrences of the six pairs of effective qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteConcurrences {
    pub ab: f64,
    pub rarb: f64,
    pub ara: f64,
    pub arb: f64,
    pub brb: f64,
    pub bra: f64,
}

impl BipartiteConcurrences {
    /// `[ab, r_a r_b, a r_a, a r_b, b r_b, b r_a]`.
    pub fn as_array(&self) -> [f64; 6] {
        [self.ab, self.rarb, self.ara, self.arb, self.brb, self.bra]
    }
}

pub fn bipartite_concurrences(params: &ReservoirParams, t: f64) -> Result<BipartiteConcurrences> {
    let psi = whole_state(params, t)?;
    let c = |x, y| concurrence(&partial_trace(&psi, (x, y))?);
    Ok(BipartiteConcurrences {
        ab: c(Party::A, Party::B)?,
        rarb: c(Party::ReservoirA, Party::ReservoirB)?,
        ara: c(Party::A, Party::ReservoirA)?,
        arb: c(Party::A, Party::ReservoirB)?,
        brb: c(Party::B, Party::ReservoirB)?,
        bra: c(Party::B, Party::ReservoirA)?,
    })
}

/// `[1 − e^{−D²(1−e^{−Γt})}][A2² − A1² e^{−D²e^{−Γt}}]` for the reservoir pair.
pub fn lambda_reservoir(params: &ReservoirParams, t: f64) -> Result<f64> {
    let x = params.x_family()?;
    let d2 = x.d_eq_sq;
    let eta = (-x.gamma * t).exp();
    let (small, large) = (x.a1.abs().min(x.a2.abs()), x.a1.abs().max(x.a2.abs()));
    let first = -(d2 * (-x.gamma * t).exp_m1()).exp_m1();
    Ok(first * (small * small - large * large * (-d2 * eta).exp()))
}

/// When reservoir entanglement appears.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BirthRegime {
    Finite(f64),
    /// Entanglement grows from `t = 0` (outer log argument above 1).
    Immediate,
    /// `|A1| = |A2|` or no damping: the reservoirs never entangle.
    Never,
}

pub fn birth_regime(params: &ReservoirParams) -> Result<BirthRegime> {
    let x = params.x_family()?;
    let (small, large) = (x.a1.abs().min(x.a2.abs()), x.a1.abs().max(x.a2.abs()));
    if !(x.gamma > 0.0) || !(large > small) {
        return Ok(BirthRegime::Never);
    }
    let arg = 2.0 / x.d_eq_sq * (large / small).ln();
    Ok(if arg > 1.0 {
        BirthRegime::Immediate
    } else {
        BirthRegime::Finite(-arg.ln() / x.gamma)
    })
}

/// `−ln((2/D²) ln(|A1|/|A2|)) / Γ` when the log argument lies in `(0, 1]`.
pub fn t_birth(params: &ReservoirParams) -> Result<Option<f64>> {
    Ok(match birth_regime(params)? {
        BirthRegime::Finite(t) => Some(t),
        _ => None,
    })
}
