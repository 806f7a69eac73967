//! Hermitian eigenvalues via the real symmetric embedding
//! `[[Re H, -Im H], [Im H, Re H]]` and cyclic Jacobi rotations.
//!
//! The embedding has every eigenvalue of `H` with multiplicity two, so the
//! sorted spectrum is read off by taking every other value.

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Maximum entrywise deviation from `H^†` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Real eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let dev = a.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }

    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize on the way in so rounding in the input cannot stall Jacobi.
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[i * m + (j + n)] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }

    let mut eig = symmetric_jacobi(&mut s, m)?;
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig.into_iter().step_by(2).collect())
}

/// Cyclic Jacobi on a dense row-major symmetric matrix; returns the diagonal
/// after convergence (unsorted).
fn symmetric_jacobi(s: &mut [f64], m: usize) -> Result<Vec<f64>> {
    let scale = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(vec![0.0; m]);
    }
    let tol = 1e-15 * scale;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i * m + j] * s[i * m + j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            return Ok((0..m).map(|i| s[i * m + i]).collect());
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = s[p * m + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;

                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
                s[p * m + q] = 0.0;
                s[q * m + p] = 0.0;
            }
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn maximally_mixed_two_qubits() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        let ev = hermitian_eigenvalues(&m).unwrap();
        for v in ev {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_sign_matrix() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn complex_off_diagonal() {
        // [[0, -i], [i, 0]] has eigenvalues +-1.
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eigenvalues_sum_to_trace() {
        let m = ComplexMatrix::from_fn(5, 5, |i, j| {
            let re = ((i * 7 + j * 3) % 5) as f64 + ((j * 7 + i * 3) % 5) as f64;
            let im = if i == j {
                0.0
            } else {
                (i as f64 - j as f64) * 0.3
            };
            Complex64::new(re, im)
        });
        let ev = hermitian_eigenvalues(&m).unwrap();
        let sum: f64 = ev.iter().sum();
        assert!((sum - m.trace().re).abs() < 1e-9);
        assert!(ev.windows(2).all(|w| w[0] >= w[1]));
    }
}
