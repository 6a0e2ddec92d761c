//! Coherent-state amplitudes, their overlaps, and the orthonormal two-state
//! basis spanned by a pair of coherent states.
//!
//! For a pair `|ξ1⟩, |ξ2⟩` with overlap `s = ⟨ξ2|ξ1⟩` and phase `u = s/|s|`
//! the basis is
//!
//! ```text
//! |±⟩ = N± (|ξ1⟩ ± u |ξ2⟩),   N± = 1/√(2(1 ± |s|))
//! ```
//!
//! and its inverse expansion is `|ξ1⟩ = |+⟩/(2N+) + |−⟩/(2N−)`,
//! `|ξ2⟩ = u* (|+⟩/(2N+) − |−⟩/(2N−))`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default lower bound on `|ξ1 − ξ2|²` below which the two-state basis is
/// rejected.
pub const DEFAULT_MIN_DIST_SQ: f64 = 1e-12;

/// Complex phase-space coordinate of a coherent state.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Amplitude(pub Complex64);

impl Amplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Amplitude(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Amplitude(Complex64::new(re, 0.0))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteAmplitude(format!("{self}")))
        }
    }

    pub fn dist_sq(&self, other: &Amplitude) -> f64 {
        (self.0 - other.0).norm_sqr()
    }

    pub fn scale(&self, factor: f64) -> Amplitude {
        Amplitude(self.0 * factor)
    }
}

impl fmt::Debug for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Amplitude({}{:+}i)", self.0.re, self.0.im)
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}

impl From<Complex64> for Amplitude {
    fn from(z: Complex64) -> Self {
        Amplitude(z)
    }
}

impl From<f64> for Amplitude {
    fn from(x: f64) -> Self {
        Amplitude::real(x)
    }
}

/// Exponent `z` with `⟨ξ2|ξ1⟩ = e^z`.
fn overlap_exponent(xi1: Amplitude, xi2: Amplitude) -> Complex64 {
    -0.5 * xi1.norm_sqr() - 0.5 * xi2.norm_sqr() + xi2.0.conj() * xi1.0
}

/// `⟨ξ2|ξ1⟩ = exp(−|ξ1|²/2 − |ξ2|²/2 + ξ2* ξ1)`.
pub fn coherent_overlap(xi1: Amplitude, xi2: Amplitude) -> Complex64 {
    overlap_exponent(xi1, xi2).exp()
}

/// `ξ e^{−γt/2}`, the amplitude of a coherent state after damping for time `t`.
pub fn decay_amplitude(xi: Amplitude, gamma: f64, t: f64) -> Result<Amplitude> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidRate(gamma));
    }
    Ok(xi.scale((-0.5 * gamma * t).exp()))
}

/// Orthonormal basis `{|+⟩, |−⟩}` of `span{|ξ1⟩, |ξ2⟩}` and the expansion of
/// the two coherent states in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoBasisMap {
    pub xi1: Amplitude,
    pub xi2: Amplitude,
    /// `⟨ξ2|ξ1⟩`.
    pub overlap: Complex64,
    /// `⟨ξ2|ξ1⟩ / |⟨ξ2|ξ1⟩|`.
    pub phase_unit: Complex64,
    pub n_plus: f64,
    pub n_minus: f64,
    /// `expansion[i][s]` is the coefficient of `|s⟩` (s = 0 for `+`, 1 for
    /// `−`) in `|ξ_{i+1}⟩`.
    pub expansion: [[Complex64; 2]; 2],
}

impl OrthoBasisMap {
    pub fn new(xi1: Amplitude, xi2: Amplitude) -> Result<Self> {
        build_ortho_basis(xi1, xi2, DEFAULT_MIN_DIST_SQ)
    }

    /// `|⟨ξ2|ξ1⟩|`.
    pub fn overlap_modulus(&self) -> f64 {
        (-0.5 * self.xi1.dist_sq(&self.xi2)).exp()
    }

    /// Gram matrix `G[i][j] = ⟨ξ_j|ξ_i⟩` recomputed from the expansion table.
    pub fn reconstructed_gram(&self) -> [[Complex64; 2]; 2] {
        let g = &self.expansion;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..2).map(|s| g[i][s] * g[j][s].conj()).sum();
            }
        }
        out
    }

    /// Coefficients of `|±⟩` on `(|ξ1⟩, |ξ2⟩)`: `|s⟩ = c[s][0]|ξ1⟩ + c[s][1]|ξ2⟩`.
    pub fn basis_in_coherent_states(&self) -> [[Complex64; 2]; 2] {
        let np = Complex64::new(self.n_plus, 0.0);
        let nm = Complex64::new(self.n_minus, 0.0);
        [[np, np * self.phase_unit], [nm, -nm * self.phase_unit]]
    }
}

/// Builds the orthonormal basis for the pair, rejecting pairs closer than
/// `min_dist_sq`.
pub fn build_ortho_basis(xi1: Amplitude, xi2: Amplitude, min_dist_sq: f64) -> Result<OrthoBasisMap> {
    xi1.check_finite()?;
    xi2.check_finite()?;
    let dist_sq = xi1.dist_sq(&xi2);
    if !(dist_sq >= min_dist_sq) || dist_sq == 0.0 {
        return Err(Error::DegenerateSuperposition {
            dist_sq,
            threshold: min_dist_sq,
        });
    }

    let z = overlap_exponent(xi1, xi2);
    let modulus = (-0.5 * dist_sq).exp();
    // phase taken from the exponent so it survives underflow of |s|
    let phase_unit = Complex64::from_polar(1.0, z.im);
    let overlap = phase_unit * modulus;

    let n_plus = 1.0 / (2.0 * (1.0 + modulus)).sqrt();
    // 1 - e^{-x} without cancellation
    let one_minus = -(-0.5 * dist_sq).exp_m1();
    let n_minus = 1.0 / (2.0 * one_minus).sqrt();

    let gp = Complex64::new(0.5 / n_plus, 0.0);
    let gm = Complex64::new(0.5 / n_minus, 0.0);
    let uc = phase_unit.conj();
    let expansion = [[gp, gm], [uc * gp, -uc * gm]];

    Ok(OrthoBasisMap {
        xi1,
        xi2,
        overlap,
        phase_unit,
        n_plus,
        n_minus,
        expansion,
    })
}

/// The squared phase-space distances under each convention in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    /// `|α1 − α2|²/2`.
    pub d_alpha_sq: f64,
    /// `|β1 − β2|²/2`.
    pub d_beta_sq: f64,
    /// `(|α1 − α2|² + |β1 − β2|²)/2`.
    pub d_avg_sq: f64,
    /// `|α1 − α2|²`, the per-mode distance of the equal-distance formulas.
    pub d_eq_sq: f64,
}

impl Distances {
    pub fn from_amplitudes(alpha1: Amplitude, alpha2: Amplitude, beta1: Amplitude, beta2: Amplitude) -> Self {
        let da = alpha1.dist_sq(&alpha2);
        let db = beta1.dist_sq(&beta2);
        Distances {
            d_alpha_sq: 0.5 * da,
            d_beta_sq: 0.5 * db,
            d_avg_sq: 0.5 * (da + db),
            d_eq_sq: da,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `⟨ξ2|ξ1⟩` by summing the Fock series to `cutoff`.
    fn fock_series_overlap(xi1: Complex64, xi2: Complex64, cutoff: usize) -> Complex64 {
        let pref = (-0.5 * xi1.norm_sqr() - 0.5 * xi2.norm_sqr()).exp();
        let mut term = c(1.0, 0.0);
        let mut sum = term;
        for n in 1..=cutoff {
            term = term * xi2.conj() * xi1 / n as f64;
            sum += term;
        }
        sum * pref
    }

    #[test]
    fn overlap_of_identical_states_is_one() {
        let a = Amplitude::new(0.7, -1.3);
        let s = coherent_overlap(a, a);
        assert!((s - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn overlap_of_opposite_unit_amplitudes() {
        let s = coherent_overlap(Amplitude::real(1.0), Amplitude::real(-1.0));
        let series = fock_series_overlap(c(1.0, 0.0), c(-1.0, 0.0), 40);
        assert!((s.re - 0.1353352832366127).abs() < 1e-15);
        assert!(s.im.abs() < 1e-15);
        assert!((s - series).norm() < 1e-14);
    }

    #[test]
    fn overlap_is_hermitian_symmetric() {
        let a = Amplitude::new(0.3, 0.8);
        let b = Amplitude::new(-1.1, 0.2);
        let ab = coherent_overlap(a, b);
        let ba = coherent_overlap(b, a);
        assert!((ab - ba.conj()).norm() < 1e-15);
        assert!((ab - fock_series_overlap(a.0, b.0, 60)).norm() < 1e-13);
    }

    #[test]
    fn wide_pair_is_nearly_orthogonal() {
        let m = OrthoBasisMap::new(Amplitude::real(2.0), Amplitude::real(-2.0)).unwrap();
        assert!((m.overlap.norm() - (-8.0f64).exp()).abs() < 1e-18);
        assert!((m.n_plus - 1.0 / 2f64.sqrt()).abs() < 1e-3);
        assert!((m.n_minus - 1.0 / 2f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn narrow_pair_has_large_odd_normalisation() {
        let m = OrthoBasisMap::new(Amplitude::real(0.1), Amplitude::real(-0.1)).unwrap();
        let expected = 1.0 / (2.0 * (1.0 - (-0.02f64).exp())).sqrt();
        assert!((m.n_minus - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn coincident_pair_is_rejected() {
        let a = Amplitude::new(0.4, 0.4);
        assert!(matches!(OrthoBasisMap::new(a, a), Err(Error::DegenerateSuperposition { .. })));
        let b = Amplitude::new(0.4 + 1e-7, 0.4);
        assert!(build_ortho_basis(a, b, 1e-12).is_err());
        assert!(build_ortho_basis(a, b, 1e-16).is_ok());
    }

    #[test]
    fn decay_examples() {
        let a = Amplitude::new(0.3, -0.2);
        assert_eq!(decay_amplitude(a, 1.0, 0.0).unwrap(), a);
        assert_eq!(decay_amplitude(a, 0.0, 5.0).unwrap(), a);
        let d = decay_amplitude(Amplitude::real(2.0), 1.0, 2.0 * 2f64.ln()).unwrap();
        assert!((d.re() - 1.0).abs() < 1e-15);
        assert!(matches!(decay_amplitude(a, 1.0, -1.0), Err(Error::NegativeTime(_))));
        assert!(matches!(decay_amplitude(a, -1.0, 1.0), Err(Error::InvalidRate(_))));
    }

    #[test]
    fn distance_conventions() {
        let d = Distances::from_amplitudes(1.0.into(), (-1.0).into(), 1.0.into(), (-1.0).into());
        assert_eq!(d.d_alpha_sq, 2.0);
        assert_eq!(d.d_eq_sq, 4.0);
        assert_eq!(d.d_avg_sq, 4.0);
        assert_eq!(d.d_avg_sq, d.d_alpha_sq + d.d_beta_sq);

        let same = Distances::from_amplitudes(0.5.into(), 0.5.into(), 1.0.into(), (-1.0).into());
        assert_eq!(same.d_alpha_sq, 0.0);

        let one_sided = Distances::from_amplitudes(1.0.into(), (-1.0).into(), 0.3.into(), 0.3.into());
        assert_eq!(one_sided.d_avg_sq, 2.0);
    }

    fn amp() -> impl Strategy<Value = Amplitude> {
        (-2.5f64..2.5, -2.5f64..2.5).prop_map(|(re, im)| Amplitude::new(re, im))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn overlap_modulus_identity(a in amp(), b in amp()) {
            let s = coherent_overlap(a, b);
            let expected = (-0.5 * a.dist_sq(&b)).exp();
            prop_assert!((s.norm() - expected).abs() <= 1e-12 * expected.max(1e-300));
            prop_assert!(s.norm() <= 1.0 + 1e-15);
        }

        #[test]
        fn basis_is_orthonormal_and_round_trips(a in amp(), b in amp()) {
            prop_assume!(a.dist_sq(&b) > 1e-2);
            let m = OrthoBasisMap::new(a, b).unwrap();
            // ⟨s|s'⟩ through coherent overlaps
            let coef = m.basis_in_coherent_states();
            let states = [a, b];
            for s in 0..2 {
                for sp in 0..2 {
                    let mut ip = Complex64::new(0.0, 0.0);
                    for i in 0..2 {
                        for j in 0..2 {
                            ip += coef[sp][j].conj() * coef[s][i] * coherent_overlap(states[i], states[j]);
                        }
                    }
                    let target = if s == sp { 1.0 } else { 0.0 };
                    prop_assert!((ip - Complex64::new(target, 0.0)).norm() < 1e-12,
                        "<{}|{}> = {}", sp, s, ip);
                }
            }
            let g = m.reconstructed_gram();
            for i in 0..2 {
                for j in 0..2 {
                    let direct = coherent_overlap(states[i], states[j]);
                    prop_assert!((g[i][j] - direct).norm() < 1e-12);
                }
            }
        }
    }
}
