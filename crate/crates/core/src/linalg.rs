//! Small dense complex matrix helpers and a cyclic Jacobi eigensolver for
//! Hermitian matrices (sizes up to 16 in practice).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = Array2<Complex64>;

/// Inputs whose anti-Hermitian part exceeds this (relative to `max(1, ‖M‖)`)
/// are rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diag().iter().sum()
}

/// Largest entry of `|M − M†|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition `M = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        self.apply_spectral(|x| x)
    }

    /// `V f(Λ) V†`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros((n, n));
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[[i, k]] * w;
                for j in 0..n {
                    out[[i, j]] += vik * self.vectors[[j, k]].conj();
                }
            }
        }
        out
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    assert_eq!(m.nrows(), m.ncols(), "eigensolver needs a square matrix");
    let scale = frobenius_norm(m).max(1.0);
    let deviation = hermiticity_defect(m);
    if deviation > HERMITIAN_TOL * scale || !deviation.is_finite() {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Cyclic Jacobi diagonalisation. Each rotation first removes the phase of
/// the pivot `a_pq` with `diag(1, e^{−iφ})`, then applies the real Jacobi
/// rotation that zeroes it.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let n = m.nrows();
    let mut a = m.clone();
    // symmetrise away the tolerated anti-Hermitian residue
    for i in 0..n {
        a[[i, i]] = Complex64::new(a[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (a[[i, j]] + a[[j, i]].conj());
            a[[i, j]] = avg;
            a[[j, i]] = avg.conj();
        }
    }
    let mut v = CMatrix::eye(n);
    let scale = frobenius_norm(&a);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[[i, j]].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let pc = phase.conj();
                // V = [[c, s], [−s e^{−iφ}, c e^{−iφ}]] on (p, q)
                let vpp = Complex64::new(c, 0.0);
                let vpq = Complex64::new(s, 0.0);
                let vqp = -s * pc;
                let vqq = c * pc;

                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * vpp + akq * vqp;
                    a[[k, q]] = akp * vpq + akq * vqq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = vpp.conj() * apk + vqp.conj() * aqk;
                    a[[q, k]] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                a[[p, q]] = ZERO;
                a[[q, p]] = ZERO;
                a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
                a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);

                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * vpp + vkq * vqp;
                    v[[k, q]] = vkp * vpq + vkq * vqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].re.total_cmp(&a[[j, j]].re));
    let values = order.iter().map(|&i| a[[i, i]].re).collect();
    let mut vectors = CMatrix::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[[row, src]];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Haar-ish random unitary from Gram-Schmidt on a complex Gaussian matrix.
    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let mut m = CMatrix::zeros((n, n));
        for z in m.iter_mut() {
            *z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        for k in 0..n {
            for j in 0..k {
                let proj: Complex64 = (0..n).map(|i| m[[i, j]].conj() * m[[i, k]]).sum();
                for i in 0..n {
                    let mij = m[[i, j]];
                    m[[i, k]] -= proj * mij;
                }
            }
            let norm = (0..n).map(|i| m[[i, k]].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                m[[i, k]] /= norm;
            }
        }
        m
    }

    #[test]
    fn identity_spectrum() {
        let vals = hermitian_eigenvalues(&CMatrix::eye(4)).unwrap();
        assert_eq!(vals, vec![1.0; 4]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let vals = hermitian_eigenvalues(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugated_diagonal_keeps_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spectrum = [0.1, 0.2, 0.3, 0.4];
        for _ in 0..20 {
            let u = random_unitary(4, &mut rng);
            let d = CMatrix::from_diag(&ndarray::Array1::from_iter(spectrum.iter().map(|&x| c(x))));
            let m = u.dot(&d).dot(&dagger(&u));
            let eig = hermitian_eigen(&m).unwrap();
            for (got, want) in eig.values.iter().zip(spectrum) {
                assert!((got - want).abs() < 1e-13, "{got} vs {want}");
            }
            let resid = frobenius_distance(&eig.reconstruct(), &m);
            assert!(resid <= 1e-10 * frobenius_norm(&m));
        }
    }

    #[test]
    fn random_sixteen_dimensional_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = CMatrix::zeros((16, 16));
        for i in 0..16 {
            m[[i, i]] = c(rng.random::<f64>() * 4.0 - 2.0);
            for j in (i + 1)..16 {
                let z = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                m[[i, j]] = z;
                m[[j, i]] = z.conj();
            }
        }
        let eig = hermitian_eigen(&m).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let resid = frobenius_distance(&eig.reconstruct(), &m);
        assert!(resid <= 1e-10 * frobenius_norm(&m), "residual {resid}");
        let vtv = dagger(&eig.vectors).dot(&eig.vectors);
        assert!(frobenius_distance(&vtv, &CMatrix::eye(16)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = array![[c(0.0), c(1.0)], [c(0.5), c(0.0)]];
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn tolerates_roundoff_asymmetry() {
        let m = array![[c(1.0), Complex64::new(0.2, 1e-13)], [c(0.2), c(-1.0)]];
        assert!(hermitian_eigen(&m).is_ok());
    }
}
