//! Singular values by one-sided (Hestenes) Jacobi rotations.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Singular values below `RANK_CLAMP * sigma_max` are reported as exactly zero.
pub const RANK_CLAMP: f64 = 1e-12;

/// Off-diagonal Gram entries are considered annihilated below this relative size.
const ROTATION_TOL: f64 = 1e-13;

/// Singular values of `a`, sorted descending; `min(rows, cols)` of them.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    // Work on the tall orientation so the column count is min(rows, cols).
    let tall = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.dagger()
    };
    let m = tall.rows();
    let n = tall.cols();
    if n == 0 {
        return Ok(Vec::new());
    }

    // Column-major copy: each column is contiguous.
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| tall.column(j)).collect();

    // Columns below this squared norm are rounding residue; rotating against
    // them can cycle without ever reducing the relative Gram entry.
    let frob2: f64 = cols.iter().flatten().map(|z| z.norm_sqr()).sum();
    let negligible = 64.0 * f64::EPSILON * f64::EPSILON * frob2;

    let max_sweeps = 100 * n.max(1);
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = gram(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0
                    || g <= ROTATION_TOL * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;

                // Rotate a phase into column q so the Gram entry becomes real,
                // then apply the classical real Jacobi rotation.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;

                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for k in 0..m {
                    let x = cp[k];
                    let y = cq[k] * phase.conj();
                    cp[k] = x * c - y * s;
                    cq[k] = x * s + y * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(max_sweeps));
    }

    let mut sigma: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let cutoff = RANK_CLAMP * sigma[0];
    for s in &mut sigma {
        if *s < cutoff {
            *s = 0.0;
        }
    }
    Ok(sigma)
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

fn gram(x: &[Complex64], y: &[Complex64]) -> (f64, f64, Complex64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = Complex64::new(0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        alpha += a.norm_sqr();
        beta += b.norm_sqr();
        gamma += a.conj() * b;
    }
    (alpha, beta, gamma)
}
