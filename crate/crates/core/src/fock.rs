//! Brute-force oracle: the two-mode damping master equation
//! `dρ/dt = Σ_x (Γ_x/2)(2xρx† − x†xρ − ρx†x)` integrated with fixed-step RK4
//! in a truncated Fock basis `|n_a, n_b⟩`, `n ≤ cutoff`, flattened as
//! `n_a·(cutoff+1) + n_b`.
//!
//! The truncated generator is exactly trace-preserving, so any loss of trace
//! comes from the initial truncation only.

use ndarray::Array2;
use num_complex::Complex64;

use crate::engine::{CatPairState, DensityMatrix4};
use crate::error::{Error, Result};
use crate::linalg::{self, dagger, CMatrix, ZERO};
use crate::states::{Amplitude, OrthoBasisMap};

/// Largest admissible truncated tail `Σ_{n>cutoff} |⟨n|α⟩|²`.
pub const TAIL_BUDGET: f64 = 1e-10;
/// Levels added on top of the smallest admissible cutoff.
pub const GUARD_LEVELS: usize = 5;
/// Largest admissible weight outside the two-qubit span.
pub const LEAKAGE_BUDGET: f64 = 1e-8;
/// Default step is this fraction of `1/(Γ_max·cutoff)`.
pub const STEP_FRACTION: f64 = 0.1;

/// Truncated coherent state and the probability it leaves out.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Vec<Complex64>,
    pub deficit: f64,
}

/// `Σ_{n>cutoff} e^{−x} xⁿ/n!` summed directly (no `1 − Σ` cancellation).
fn poisson_tail(x: f64, cutoff: usize) -> f64 {
    let mut term = (-x).exp();
    for n in 1..=cutoff {
        term *= x / n as f64;
    }
    let mut tail = 0.0;
    let mut n = cutoff + 1;
    loop {
        term *= x / n as f64;
        tail += term;
        if n as f64 > x && term <= tail * 1e-17 {
            break;
        }
        if term == 0.0 && n as f64 > x {
            break;
        }
        n += 1;
    }
    tail
}

/// Smallest cutoff with tail below [`TAIL_BUDGET`] for `|α| = max_abs`, plus
/// [`GUARD_LEVELS`].
pub fn cutoff_for(max_abs: f64) -> usize {
    let x = max_abs * max_abs;
    let mut n = 0;
    while poisson_tail(x, n) >= TAIL_BUDGET {
        n += 1;
    }
    n + GUARD_LEVELS
}

/// `e^{−|α|²/2} αⁿ/√n!` for `n ≤ cutoff`.
pub fn coherent_fock_vector(alpha: Amplitude, cutoff: usize) -> Result<FockVector> {
    alpha.check_finite()?;
    let deficit = poisson_tail(alpha.norm_sqr(), cutoff);
    if !(deficit < TAIL_BUDGET) {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail: deficit,
            budget: TAIL_BUDGET,
        });
    }
    let a = alpha.value();
    let mut amplitudes = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amplitudes.push(c);
    for n in 1..=cutoff {
        c *= a / (n as f64).sqrt();
        amplitudes.push(c);
    }
    Ok(FockVector { amplitudes, deficit })
}

/// Two-mode density matrix in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    pub cutoff: usize,
    pub matrix: CMatrix,
    /// `1 − Tr ρ`.
    pub trace_deficit: f64,
}

impl FockDensity {
    pub fn from_matrix(cutoff: usize, matrix: CMatrix) -> Self {
        let dim = (cutoff + 1) * (cutoff + 1);
        assert_eq!(matrix.dim(), (dim, dim), "matrix does not match the cutoff");
        let trace_deficit = 1.0 - linalg::trace(&matrix).re;
        FockDensity {
            cutoff,
            matrix,
            trace_deficit,
        }
    }

    /// `|Ψ⟩⟨Ψ|` for the initial state of the analytic engine.
    pub fn from_cat_state(state: &CatPairState, cutoff: usize) -> Result<Self> {
        let n1 = cutoff + 1;
        let fa = [
            coherent_fock_vector(state.alpha1, cutoff)?,
            coherent_fock_vector(state.alpha2, cutoff)?,
        ];
        let fb = [
            coherent_fock_vector(state.beta1, cutoff)?,
            coherent_fock_vector(state.beta2, cutoff)?,
        ];
        let mut psi = vec![ZERO; n1 * n1];
        for i in 0..2 {
            for k in 0..2 {
                let c = state.c[i][k];
                for (na, a) in fa[i].amplitudes.iter().enumerate() {
                    let ca = c * a;
                    for (nb, b) in fb[k].amplitudes.iter().enumerate() {
                        psi[na * n1 + nb] += ca * b;
                    }
                }
            }
        }
        let matrix = Array2::from_shape_fn((n1 * n1, n1 * n1), |(r, c)| psi[r] * psi[c].conj());
        Ok(Self::from_matrix(cutoff, matrix))
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    /// `(⟨a†a⟩, ⟨b†b⟩)`.
    pub fn mean_photon_numbers(&self) -> (f64, f64) {
        let n1 = self.cutoff + 1;
        let mut out = (0.0, 0.0);
        for r in 0..self.dim() {
            let p = self.matrix[[r, r]].re;
            out.0 += (r / n1) as f64 * p;
            out.1 += (r % n1) as f64 * p;
        }
        out
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.matrix)
    }
}

/// Rates and square-root tables of the truncated generator.
struct Generator {
    cutoff: usize,
    gamma_a: f64,
    gamma_b: f64,
    sqrt: Vec<f64>,
}

impl Generator {
    fn new(cutoff: usize, gamma_a: f64, gamma_b: f64) -> Self {
        Generator {
            cutoff,
            gamma_a,
            gamma_b,
            sqrt: (0..=cutoff + 1).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    /// `out = y + coef·L(z)`, or `coef·L(z)` without `y`.
    ///
    /// Element `(r, c)` with `r = (n_a, n_b)`, `c = (m_a, m_b)` only reads
    /// `z[r, c]`, `z[r + (1,0), c + (1,0)]` and `z[r + (0,1), c + (0,1)]`, and the
    /// arithmetic is symmetric in `r ↔ c`, so an exactly Hermitian `z` gives an
    /// exactly Hermitian result.
    fn apply(&self, z: &[Complex64], y: Option<&[Complex64]>, coef: f64, out: &mut [Complex64]) {
        let cutoff = self.cutoff;
        let n1 = cutoff + 1;
        let dim = n1 * n1;
        let (ga, gb, sq) = (self.gamma_a, self.gamma_b, &self.sqrt);
        // b-mode loss and feed factors along a block of the column index
        let loss_b: Vec<f64> = (0..n1).map(|m| 0.5 * gb * m as f64).collect();
        let feed_b: Vec<f64> = (0..cutoff).map(|m| sq[m + 1]).collect();
        for r in 0..dim {
            let (na, ma) = (r / n1, r % n1);
            let z_row = &z[r * dim..(r + 1) * dim];
            let out_row = &mut out[r * dim..(r + 1) * dim];
            let row_a = (na < cutoff).then(|| &z[(r + n1) * dim..(r + n1 + 1) * dim]);
            let row_b = (ma < cutoff).then(|| &z[(r + 1) * dim..(r + 2) * dim]);
            let base = 0.5 * (ga * na as f64 + gb * ma as f64);
            for nb in 0..n1 {
                let c0 = nb * n1;
                let blk = &mut out_row[c0..c0 + n1];
                let zb = &z_row[c0..c0 + n1];
                let la = base + 0.5 * ga * nb as f64;
                match y {
                    Some(y) => {
                        let yb = &y[r * dim + c0..r * dim + c0 + n1];
                        for ((o, &zv), (&yv, &lb)) in blk.iter_mut().zip(zb).zip(yb.iter().zip(&loss_b)) {
                            *o = yv + zv * (-coef * (la + lb));
                        }
                    }
                    None => {
                        for ((o, &zv), &lb) in blk.iter_mut().zip(zb).zip(&loss_b) {
                            *o = zv * (-coef * (la + lb));
                        }
                    }
                }
                if let Some(za) = row_a {
                    if nb < cutoff {
                        let f = coef * ga * sq[na + 1] * sq[nb + 1];
                        for (o, &zv) in blk.iter_mut().zip(&za[c0 + n1..c0 + 2 * n1]) {
                            *o += zv * f;
                        }
                    }
                }
                if let Some(zr) = row_b {
                    let f = coef * gb * sq[ma + 1];
                    for ((o, &zv), &fm) in blk[..cutoff].iter_mut().zip(&zr[c0 + 1..c0 + n1]).zip(&feed_b) {
                        *o += zv * (f * fm);
                    }
                }
            }
        }
    }
}

/// `dρ/dt` of the truncated master equation.
pub fn lindblad_rhs(rho: &FockDensity, gamma_a: f64, gamma_b: f64) -> CMatrix {
    let mut out = CMatrix::zeros(rho.matrix.dim());
    let z = rho.matrix.as_slice().expect("standard layout");
    Generator::new(rho.cutoff, gamma_a, gamma_b).apply(z, None, 1.0, out.as_slice_mut().expect("standard layout"));
    out
}

/// `STEP_FRACTION / (Γ_max·cutoff)`; infinite when nothing decays.
pub fn default_step(gamma_a: f64, gamma_b: f64, cutoff: usize) -> f64 {
    STEP_FRACTION / max_rate(gamma_a, gamma_b, cutoff)
}

fn max_rate(gamma_a: f64, gamma_b: f64, cutoff: usize) -> f64 {
    gamma_a.max(gamma_b) * cutoff.max(1) as f64
}

fn check_rates(gamma_a: f64, gamma_b: f64) -> Result<()> {
    for g in [gamma_a, gamma_b] {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidRate(g));
        }
    }
    Ok(())
}

/// Integrates from t = 0 and calls `visit` at every grid time (ascending).
/// Steps are shortened so that each grid time is hit exactly.
pub fn integrate_with(
    rho0: &FockDensity,
    gamma_a: f64,
    gamma_b: f64,
    t_grid: &[f64],
    step: f64,
    mut visit: impl FnMut(f64, &FockDensity) -> Result<()>,
) -> Result<()> {
    check_rates(gamma_a, gamma_b)?;
    let rate = max_rate(gamma_a, gamma_b, rho0.cutoff);
    if !(step > 0.0) || step * rate > 1.0 {
        return Err(Error::StepTooLarge {
            step,
            reason: format!("stability needs step <= 1/(gamma_max*cutoff) = {:e}", 1.0 / rate),
        });
    }
    let dim = rho0.dim();
    let generator = Generator::new(rho0.cutoff, gamma_a, gamma_b);
    let mut y = rho0.matrix.iter().copied().collect::<Vec<_>>();
    let mut buf_a = vec![ZERO; dim * dim];
    let mut buf_b = vec![ZERO; dim * dim];
    let mut t = 0.0;
    for &target in t_grid {
        if !(target >= t) {
            return Err(Error::NegativeTime(target - t));
        }
        let span = target - t;
        let substeps = if span == 0.0 { 0 } else { (span / step).ceil().max(1.0) as usize };
        let h = if substeps == 0 { 0.0 } else { span / substeps as f64 };
        for _ in 0..substeps {
            // For a constant linear generator classic RK4 is the degree-4
            // Taylor polynomial of e^{hL}; evaluate it in Horner form.
            generator.apply(&y, Some(&y), h / 4.0, &mut buf_a);
            generator.apply(&buf_a, Some(&y), h / 3.0, &mut buf_b);
            generator.apply(&buf_b, Some(&y), h / 2.0, &mut buf_a);
            generator.apply(&buf_a, Some(&y), h, &mut buf_b);
            std::mem::swap(&mut y, &mut buf_b);
        }
        t = target;
        // the kernel keeps exact Hermiticity; this only guards against drift
        symmetrize(&mut y, dim);
        let matrix = Array2::from_shape_vec((dim, dim), y.clone()).expect("square buffer");
        visit(t, &FockDensity::from_matrix(rho0.cutoff, matrix))?;
    }
    Ok(())
}

/// States at every grid time. Memory grows with the grid; prefer
/// [`integrate_with`] for large cutoffs.
pub fn integrate(rho0: &FockDensity, gamma_a: f64, gamma_b: f64, t_grid: &[f64], step: f64) -> Result<Vec<FockDensity>> {
    let mut out = Vec::with_capacity(t_grid.len());
    integrate_with(rho0, gamma_a, gamma_b, t_grid, step, |_, rho| {
        out.push(rho.clone());
        Ok(())
    })?;
    Ok(out)
}

fn symmetrize(m: &mut [Complex64], n: usize) {
    for i in 0..n {
        m[i * n + i].im = 0.0;
        for j in (i + 1)..n {
            let avg = 0.5 * (m[i * n + j] + m[j * n + i].conj());
            m[i * n + j] = avg;
            m[j * n + i] = avg.conj();
        }
    }
}

/// Integrates to `horizon` with `step` and `step/2`; fails with
/// `StepTooLarge` if the largest element difference exceeds `tol`.
/// Returns that difference.
pub fn check_step_halving(rho0: &FockDensity, gamma_a: f64, gamma_b: f64, horizon: f64, step: f64, tol: f64) -> Result<f64> {
    let coarse = integrate(rho0, gamma_a, gamma_b, &[horizon], step)?;
    let fine = integrate(rho0, gamma_a, gamma_b, &[horizon], 0.5 * step)?;
    let diff = linalg::max_abs_diff(&coarse[0].matrix, &fine[0].matrix);
    if diff > tol {
        return Err(Error::StepTooLarge {
            step,
            reason: format!("halving the step changes the state by {diff:e} > {tol:e}"),
        });
    }
    Ok(diff)
}

/// 4×4 block of a Fock density matrix on the span of two orthonormal pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitProjection {
    pub density: DensityMatrix4,
    /// `Tr ρ − Tr ρ_4`: weight outside the span.
    pub leakage: f64,
}

/// `|s⟩_a ⊗ |p⟩_b` in Fock components, columns ordered `2s + p`.
fn span_vectors(basis_a: &OrthoBasisMap, basis_b: &OrthoBasisMap, cutoff: usize) -> Result<CMatrix> {
    let n1 = cutoff + 1;
    let mode_vectors = |basis: &OrthoBasisMap| -> Result<[Vec<Complex64>; 2]> {
        let f1 = coherent_fock_vector(basis.xi1, cutoff)?.amplitudes;
        let f2 = coherent_fock_vector(basis.xi2, cutoff)?.amplitudes;
        let h = basis.basis_in_coherent_states();
        let v = |s: usize| -> Vec<Complex64> { f1.iter().zip(&f2).map(|(a, b)| h[s][0] * a + h[s][1] * b).collect() };
        Ok([v(0), v(1)])
    };
    let va = mode_vectors(basis_a)?;
    let vb = mode_vectors(basis_b)?;
    let mut w = CMatrix::zeros((n1 * n1, 4));
    for s in 0..2 {
        for p in 0..2 {
            for na in 0..n1 {
                for nb in 0..n1 {
                    w[[na * n1 + nb, 2 * s + p]] = va[s][na] * vb[p][nb];
                }
            }
        }
    }
    Ok(w)
}

/// Projects onto the span of the decayed pairs; `LeakageExceeded` when more
/// than [`LEAKAGE_BUDGET`] lies outside it.
pub fn project_to_qubit_basis(rho: &FockDensity, basis_a: &OrthoBasisMap, basis_b: &OrthoBasisMap) -> Result<QubitProjection> {
    let w = span_vectors(basis_a, basis_b, rho.cutoff)?;
    let small = dagger(&w).dot(&rho.matrix.dot(&w));
    let leakage = linalg::trace(&rho.matrix).re - linalg::trace(&small).re;
    if !(leakage.abs() < LEAKAGE_BUDGET) {
        return Err(Error::LeakageExceeded {
            leakage,
            budget: LEAKAGE_BUDGET,
        });
    }
    let mut density = DensityMatrix4::from_matrix(small);
    density.bases = Some((*basis_a, *basis_b));
    Ok(QubitProjection { density, leakage })
}
