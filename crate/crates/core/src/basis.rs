//! The principal matrix basis `A_ij = sum_m w^(im) E_{m,m+j}` of `d x d`
//! matrices, `w = exp(2 pi i / d)`, and transition matrices describing how
//! unitary conjugation mixes the non-identity elements.
//!
//! Index pairs are ordered lexicographically everywhere: `(0,0), (0,1), ...,
//! (0,d-1), (1,0), ...`. "Non-identity" enumerations drop `(0,0)`, so the
//! non-identity position of `(i, j)` is `i*d + j - 1`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// Unitarity tolerance for conjugating matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// A basis label `(i, j)` with `i, j` in `Z_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPair {
    pub i: usize,
    pub j: usize,
}

impl IndexPair {
    pub const IDENTITY: IndexPair = IndexPair { i: 0, j: 0 };

    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// Position in the full lexicographic enumeration.
    pub fn flat(self, d: usize) -> usize {
        self.i * d + self.j
    }

    /// Position among the non-identity pairs; `None` for `(0,0)`.
    pub fn nonidentity_index(self, d: usize) -> Option<usize> {
        self.flat(d).checked_sub(1)
    }

    pub fn from_flat(flat: usize, d: usize) -> Self {
        Self::new(flat / d, flat % d)
    }

    pub fn is_identity(self) -> bool {
        self == Self::IDENTITY
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.i, self.j)
    }
}

/// All `d^2` pairs in lexicographic order.
pub fn all_pairs(d: usize) -> impl Iterator<Item = IndexPair> {
    (0..d * d).map(move |k| IndexPair::from_flat(k, d))
}

/// The `d^2 - 1` non-identity pairs in lexicographic order.
pub fn nonidentity_pairs(d: usize) -> impl Iterator<Item = IndexPair> {
    (1..d * d).map(move |k| IndexPair::from_flat(k, d))
}

/// `w^k` for `w = exp(2 pi i / d)`, with exact values where the phase is a
/// multiple of a quarter turn.
pub fn root_of_unity(d: usize, k: usize) -> Complex64 {
    let k = k % d;
    if (4 * k).is_multiple_of(d) {
        return match 4 * k / d {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * k as f64 / d as f64)
}

/// The `d^2` principal basis matrices for one local dimension.
///
/// Every element is monomial: row `m` holds the single entry `w^(im)` in
/// column `m + j (mod d)`. The sparse form is kept alongside the dense
/// matrices because the correlation extraction only needs that structure.
#[derive(Debug, Clone)]
pub struct PrincipalBasis {
    d: usize,
    omega: Complex64,
    elements: Vec<ComplexMatrix>,
    phases: Vec<Vec<Complex64>>,
}

impl PrincipalBasis {
    fn build(d: usize) -> Self {
        let mut elements = Vec::with_capacity(d * d);
        let mut phases = Vec::with_capacity(d * d);
        for p in all_pairs(d) {
            let row_phase: Vec<Complex64> = (0..d).map(|m| root_of_unity(d, p.i * m)).collect();
            let mut a = ComplexMatrix::zeros(d, d);
            for (m, &ph) in row_phase.iter().enumerate() {
                a[(m, (m + p.j) % d)] = ph;
            }
            elements.push(a);
            phases.push(row_phase);
        }
        Self {
            d,
            omega: root_of_unity(d, 1),
            elements,
            phases,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    pub fn element(&self, p: IndexPair) -> &ComplexMatrix {
        &self.elements[p.flat(self.d)]
    }

    pub fn get(&self, i: usize, j: usize) -> &ComplexMatrix {
        self.element(IndexPair::new(i, j))
    }

    /// Column holding the nonzero entry of row `m` in `A_p`.
    #[inline]
    pub fn column_of(&self, p: IndexPair, m: usize) -> usize {
        (m + p.j) % self.d
    }

    /// The nonzero entry `w^(i m)` of row `m` in `A_p`.
    #[inline]
    pub fn phase_of(&self, p: IndexPair, m: usize) -> Complex64 {
        self.phases[p.flat(self.d)][m]
    }

    /// Expansion coefficients `tr(A_p^† B) / d` for every pair `p`.
    pub fn expand(&self, b: &ComplexMatrix) -> Result<Vec<Complex64>> {
        if b.rows() != self.d || b.cols() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "expected {0}x{0}, got {1}x{2}",
                self.d,
                b.rows(),
                b.cols()
            )));
        }
        Ok(all_pairs(self.d)
            .map(|p| self.element(p).inner(b) / self.d as f64)
            .collect())
    }

    /// Inverse of [`expand`](Self::expand).
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> ComplexMatrix {
        assert_eq!(coeffs.len(), self.d * self.d);
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for (c, a) in coeffs.iter().zip(&self.elements) {
            if *c != ZERO {
                out = &out + &a.scale(*c);
            }
        }
        out
    }
}

/// Principal basis for dimension `d`, built once per `d` and shared.
pub fn principal_basis(d: usize) -> Result<Arc<PrincipalBasis>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PrincipalBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    Ok(guard
        .entry(d)
        .or_insert_with(|| Arc::new(PrincipalBasis::build(d)))
        .clone())
}

/// Coefficients `m_{p,q}` with `u A_p u^† = sum_q m_{p,q} A_q`, rows and
/// columns indexed by the non-identity pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    d: usize,
    entries: ComplexMatrix,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.entries
    }

    pub fn entry(&self, from: IndexPair, to: IndexPair) -> Complex64 {
        match (from.nonidentity_index(self.d), to.nonidentity_index(self.d)) {
            (Some(a), Some(b)) => self.entries[(a, b)],
            _ => ZERO,
        }
    }
}

/// Transition matrix of the conjugation `A -> u A u^†`.
pub fn conjugation_coefficients(
    basis: &PrincipalBasis,
    u: &ComplexMatrix,
) -> Result<TransitionMatrix> {
    let d = basis.dim();
    if u.rows() != d || u.cols() != d {
        return Err(Error::ShapeMismatch(format!(
            "conjugating matrix must be {d}x{d}, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let dev = u.unitary_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let ud = u.dagger();
    let n = d * d - 1;
    let mut entries = ComplexMatrix::zeros(n, n);
    for (row, p) in nonidentity_pairs(d).enumerate() {
        let conj = u.matmul(basis.element(p)).matmul(&ud);
        for (col, q) in nonidentity_pairs(d).enumerate() {
            entries[(row, col)] = basis.element(q).inner(&conj) / d as f64;
        }
    }
    Ok(TransitionMatrix { d, entries })
}
