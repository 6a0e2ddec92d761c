//! Analytic negativities and disentanglement times for symmetric states.
//!
//! Everything here assumes equal damping rates and, apart from the
//! equal-weight formula, equal per-mode distances `D² = |α1−α2|² = |β1−β2|²`
//! with amplitudes placed at `±√D²/2`. The general engine covers the rest.
//!
//! The textbook forms assume non-negative weights, where
//! `|A2| ≤ |A1|`. For signed weights the parity operator `e^{iπ b†b}`
//! exchanges the roles of the two coefficients, so every formula below uses
//! the pair `(small, large)` of their moduli. For non-negative weights this is
//! the textbook expression verbatim.

use num_complex::Complex64;

use crate::engine::CatPairState;
use crate::error::{Error, Result};
use crate::reservoir::phi_coefficients;
use crate::states::{Amplitude, DEFAULT_MIN_DIST_SQ};

/// Below this `d²` the equal-weight formula is flagged as an approximation.
pub const EQUAL_WEIGHT_VALID_D_SQ: f64 = 4.0;

/// `λ₋` of the equal-weight state `(|α1β1⟩+|α1β2⟩+|α2β1⟩−|α2β2⟩)/2`, valid for
/// `d_α², d_β² ≫ 1` (`d² = |ξ1−ξ2|²/2`).
pub fn negativity_equal_weight(d_alpha_sq: f64, d_beta_sq: f64, gamma_a: f64, gamma_b: f64, t: f64) -> f64 {
    let xa = ((-gamma_a * t).exp_m1() * d_alpha_sq).exp();
    let xb = ((-gamma_b * t).exp_m1() * d_beta_sq).exp();
    (1.0 - xa - xb - xa * xb) / 4.0
}

/// True when [`negativity_equal_weight`] is outside its asymptotic regime.
pub fn equal_weight_is_approximate(d_alpha_sq: f64, d_beta_sq: f64) -> bool {
    d_alpha_sq.min(d_beta_sq) < EQUAL_WEIGHT_VALID_D_SQ
}

/// The equal-weight state with real amplitudes at `±√(d²/2)`.
pub fn equal_weight_state(d_alpha_sq: f64, d_beta_sq: f64, gamma_a: f64, gamma_b: f64) -> Result<CatPairState> {
    let a = (0.5 * d_alpha_sq).sqrt();
    let b = (0.5 * d_beta_sq).sqrt();
    let h = Complex64::new(0.5, 0.0);
    CatPairState::new(
        [Amplitude::real(a), Amplitude::real(-a)],
        [Amplitude::real(b), Amplitude::real(-b)],
        [[h, h], [h, -h]],
        gamma_a,
        gamma_b,
    )
}

/// `(N+(0)², N−(0)²)` for a pair at squared distance `d_eq_sq`.
fn squared_norms(d_eq_sq: f64) -> (f64, f64) {
    let s = (-0.5 * d_eq_sq).exp();
    (0.5 / (1.0 + s), -0.5 / (-0.5 * d_eq_sq).exp_m1())
}

/// `A1 = c++ N+² + c−− N−²`, `A2 = c++ N+² − c−− N−²` with `N±` at t=0.
pub fn a_coefficients(c_pp: f64, c_mm: f64, d_eq_sq: f64) -> (f64, f64) {
    let (np2, nm2) = squared_norms(d_eq_sq);
    (c_pp * np2 + c_mm * nm2, c_pp * np2 - c_mm * nm2)
}

fn check_family(d_eq_sq: f64, gamma: f64) -> Result<()> {
    if !(d_eq_sq >= DEFAULT_MIN_DIST_SQ) || !d_eq_sq.is_finite() {
        return Err(Error::DegenerateSuperposition {
            dist_sq: d_eq_sq,
            threshold: DEFAULT_MIN_DIST_SQ,
        });
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidRate(gamma));
    }
    Ok(())
}

fn normalize_pair(x: f64, y: f64) -> Result<(f64, f64)> {
    let n = x.hypot(y);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroState);
    }
    Ok((x / n, y / n))
}

fn ordered_moduli(x: f64, y: f64) -> (f64, f64) {
    let (x, y) = (x.abs(), y.abs());
    (x.min(y), x.max(y))
}

/// `−ln(1 + (2/D²) ln(small/large)) / Γ` when `e^{−D²/2} < small/large`.
fn death_time(small: f64, large: f64, d_eq_sq: f64, gamma: f64) -> Option<f64> {
    if !(large > 0.0) || !(small > 0.0) || !(gamma > 0.0) {
        return None;
    }
    let arg = 1.0 + 2.0 / d_eq_sq * (small / large).ln();
    if arg > 0.0 && arg < 1.0 {
        Some(-arg.ln() / gamma)
    } else {
        None
    }
}

/// Which of the two finite-death conditions applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeathCase {
    /// `c−− > c++`.
    MinusDominant,
    /// `c++ > c−−/f` and `c−− < c++ f²`.
    PlusDominant,
    /// Neither holds: entanglement decays only asymptotically.
    Asymptotic,
}

/// The state `c++|++⟩ + c−−|−−⟩` (real weights, renormalised).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XFamilyParams {
    pub c_pp: f64,
    pub c_mm: f64,
    pub a1: f64,
    pub a2: f64,
    /// `|α1−α2|² = |β1−β2|²`.
    pub d_eq_sq: f64,
    pub gamma: f64,
    /// `(1−e^{−D²/2})/(1+e^{−D²/2})`.
    pub f: f64,
}

impl XFamilyParams {
    pub fn new(c_pp: f64, c_mm: f64, d_eq_sq: f64, gamma: f64) -> Result<Self> {
        check_family(d_eq_sq, gamma)?;
        let (c_pp, c_mm) = normalize_pair(c_pp, c_mm)?;
        let (a1, a2) = a_coefficients(c_pp, c_mm, d_eq_sq);
        let f = -(-0.5 * d_eq_sq).exp_m1() / (1.0 + (-0.5 * d_eq_sq).exp());
        Ok(XFamilyParams {
            c_pp,
            c_mm,
            a1,
            a2,
            d_eq_sq,
            gamma,
            f,
        })
    }

    /// The same initial state for the general engine.
    pub fn state(&self) -> Result<CatPairState> {
        let x = Amplitude::real(0.5 * self.d_eq_sq.sqrt());
        let pair = [x, x.scale(-1.0)];
        let z = Complex64::new(0.0, 0.0);
        let q = [[Complex64::new(self.c_pp, 0.0), z], [z, Complex64::new(self.c_mm, 0.0)]];
        CatPairState::from_qubit_weights(pair, pair, q, self.gamma, self.gamma)
    }

    /// `min(|A1|,|A2|) / max(|A1|,|A2|)`.
    pub fn ratio(&self) -> f64 {
        let (small, large) = ordered_moduli(self.a1, self.a2);
        small / large
    }

    pub fn death_case(&self) -> DeathCase {
        let (cp, cm, f) = (self.c_pp.abs(), self.c_mm.abs(), self.f);
        if cm > cp {
            DeathCase::MinusDominant
        } else if cp > cm / f && cm < cp * f * f {
            DeathCase::PlusDominant
        } else {
            DeathCase::Asymptotic
        }
    }
}

/// `[1 − e^{−D²e^{−Γt}}][A2² − A1² e^{−D²(1−e^{−Γt})}]`.
pub fn lambda_state1(params: &XFamilyParams, t: f64) -> f64 {
    let eta = (-params.gamma * t).exp();
    let d2 = params.d_eq_sq;
    let (small, large) = ordered_moduli(params.a1, params.a2);
    let first = -(-d2 * eta).exp_m1();
    first * (small * small - large * large * (d2 * (-params.gamma * t).exp_m1()).exp())
}

/// Finite disentanglement time, `None` for asymptotic decay.
pub fn t_disentangle_1(params: &XFamilyParams) -> Option<f64> {
    let (small, large) = ordered_moduli(params.a1, params.a2);
    death_time(small, large, params.d_eq_sq, params.gamma)
}

/// Small-distance limit `c−−² e^{−Γt}[1 − c++/c−− − e^{−Γt}]`.
pub fn lambda_small_d(c_pp: f64, c_mm: f64, gamma: f64, t: f64) -> f64 {
    let eta = (-gamma * t).exp();
    c_mm * c_mm * eta * (1.0 - c_pp / c_mm - eta)
}

/// Death time of [`lambda_small_d`]: `−ln(1 − c++/c−−)/Γ` for `0 ≤ c++ < c−−`.
pub fn t_disentangle_small_d(c_pp: f64, c_mm: f64, gamma: f64) -> Option<f64> {
    if c_mm > c_pp && c_pp >= 0.0 && gamma > 0.0 {
        Some(-(-c_pp / c_mm).ln_1p() / gamma)
    } else {
        None
    }
}

/// The state `c+−|+−⟩ + c−+|−+⟩` (real weights, renormalised).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiFamilyParams {
    pub c_pm: f64,
    pub c_mp: f64,
    pub d_eq_sq: f64,
    pub gamma: f64,
}

impl PhiFamilyParams {
    pub fn new(c_pm: f64, c_mp: f64, d_eq_sq: f64, gamma: f64) -> Result<Self> {
        check_family(d_eq_sq, gamma)?;
        let (c_pm, c_mp) = normalize_pair(c_pm, c_mp)?;
        Ok(PhiFamilyParams {
            c_pm,
            c_mp,
            d_eq_sq,
            gamma,
        })
    }

    pub fn state(&self) -> Result<CatPairState> {
        let x = Amplitude::real(0.5 * self.d_eq_sq.sqrt());
        let pair = [x, x.scale(-1.0)];
        let z = Complex64::new(0.0, 0.0);
        let q = [[z, Complex64::new(self.c_pm, 0.0)], [Complex64::new(self.c_mp, 0.0), z]];
        CatPairState::from_qubit_weights(pair, pair, q, self.gamma, self.gamma)
    }

    /// `min(|c+−−c−+|, |c+−+c−+|) / max(..)`.
    pub fn ratio(&self) -> f64 {
        let (small, large) = ordered_moduli(self.c_pm - self.c_mp, self.c_pm + self.c_mp);
        small / large
    }
}

pub fn t_disentangle_2(c_pm: f64, c_mp: f64, d_eq_sq: f64, gamma: f64) -> Option<f64> {
    let (small, large) = ordered_moduli(c_pm - c_mp, c_pm + c_mp);
    death_time(small, large, d_eq_sq, gamma)
}

/// Exact `λ₋` of the `c+−|+−⟩ + c−+|−+⟩` family.
///
/// Each mode evolves as `|±⟩|0⟩_r → |φ±⟩`; tracing the reservoirs leaves an
/// X state whose partial transpose has the block
/// `[[p1²m1²S, w], [w, p2²m2²S]]` with `S = c+−² + c−+²` and
/// `w = c+−c−+(p1²m2² + p2²m1²)`.
pub fn lambda_state2(params: &PhiFamilyParams, t: f64) -> Result<f64> {
    let phi = phi_coefficients(0.25 * params.d_eq_sq, params.gamma, t)?;
    let (p1, p2, m1, m2) = (phi.p1, phi.p2, phi.m1, phi.m2);
    let s = params.c_pm * params.c_pm + params.c_mp * params.c_mp;
    let a = (p1 * m1).powi(2) * s;
    let d = (p2 * m2).powi(2) * s;
    let w = params.c_pm * params.c_mp * ((p1 * m2).powi(2) + (p2 * m1).powi(2));
    Ok(0.5 * (a + d) - (0.25 * (a - d) * (a - d) + w * w).sqrt())
}
