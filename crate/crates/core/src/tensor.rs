//! Correlation tensors and their unfoldings.
//!
//! A state expands as
//! `rho = d^-3 * sum_{p,q,s} r_{p,q,s} A_p (x) A_q (x) A_s` with
//! `r_{p,q,s} = tr(rho (A_p (x) A_q (x) A_s)^†)`. Coefficients with identity
//! labels in some slots are the one- and two-party terms; the all-identity
//! coefficient is the trace.

use std::fmt;

use num_complex::Complex64;

use crate::basis::{
    conjugation_coefficients, nonidentity_pairs, principal_basis, IndexPair, PrincipalBasis,
};
use crate::criteria::CoefficientTriple;
use crate::error::{Error, Result};
use crate::linalg::{trace_norm, ComplexMatrix, ZERO};
use crate::states::DensityMatrix;
use crate::Bipartition;

/// Full set of expansion coefficients of a tripartite state, stored densely
/// over lexicographic label triples.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationDecomposition {
    d: usize,
    coeffs: Vec<Complex64>,
}

impl CorrelationDecomposition {
    pub fn dim(&self) -> usize {
        self.d
    }

    fn offset(&self, p: IndexPair, q: IndexPair, s: IndexPair) -> usize {
        let n = self.d * self.d;
        (p.flat(self.d) * n + q.flat(self.d)) * n + s.flat(self.d)
    }

    /// `tr(rho (A_p (x) A_q (x) A_s)^†)`; identity labels give the lower-order terms.
    pub fn coefficient(&self, p: IndexPair, q: IndexPair, s: IndexPair) -> Complex64 {
        self.coeffs[self.offset(p, q, s)]
    }

    /// Three-party coefficient `r_{p,q,s}`.
    pub fn r(&self, p: IndexPair, q: IndexPair, s: IndexPair) -> Complex64 {
        self.coefficient(p, q, s)
    }

    /// Party-1 coefficient `u_p`.
    pub fn u(&self, p: IndexPair) -> Complex64 {
        self.coefficient(p, IndexPair::IDENTITY, IndexPair::IDENTITY)
    }

    /// Party-2 coefficient `v_q`.
    pub fn v(&self, q: IndexPair) -> Complex64 {
        self.coefficient(IndexPair::IDENTITY, q, IndexPair::IDENTITY)
    }

    /// Party-3 coefficient `w_s`.
    pub fn w(&self, s: IndexPair) -> Complex64 {
        self.coefficient(IndexPair::IDENTITY, IndexPair::IDENTITY, s)
    }

    /// Parties 1-2 coefficient `x_{p,q}`.
    pub fn xt(&self, p: IndexPair, q: IndexPair) -> Complex64 {
        self.coefficient(p, q, IndexPair::IDENTITY)
    }

    /// Parties 1-3 coefficient `y_{p,s}`.
    pub fn yt(&self, p: IndexPair, s: IndexPair) -> Complex64 {
        self.coefficient(p, IndexPair::IDENTITY, s)
    }

    /// Parties 2-3 coefficient `z_{q,s}`.
    pub fn zt(&self, q: IndexPair, s: IndexPair) -> Complex64 {
        self.coefficient(IndexPair::IDENTITY, q, s)
    }

    /// Every label triple with its coefficient, lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = ([IndexPair; 3], Complex64)> + '_ {
        let n = self.d * self.d;
        self.coeffs.iter().enumerate().map(move |(k, &z)| {
            let p = IndexPair::from_flat(k / (n * n), self.d);
            let q = IndexPair::from_flat((k / n) % n, self.d);
            let s = IndexPair::from_flat(k % n, self.d);
            ([p, q, s], z)
        })
    }

    /// Reassembles the density matrix from the coefficients.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let basis = principal_basis(self.d)?;
        let d = self.d;
        let dim = d * d * d;
        let scale = 1.0 / dim as f64;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for ([p, q, s], coef) in self.iter() {
            if coef == ZERO {
                continue;
            }
            for_each_monomial_entry(&basis, [p, q, s], |row, col, phase| {
                out[(row, col)] += coef * phase * scale;
            });
        }
        Ok(out)
    }

    /// Matrix with entries `r` where the isolated party of `bip` carries the
    /// fixed label `frozen`; rows follow the earlier remaining party and
    /// columns the later one, both over non-identity labels.
    pub fn slice(&self, bip: Bipartition, frozen: IndexPair) -> ComplexMatrix {
        let d = self.d;
        let n = d * d - 1;
        let mut out = ComplexMatrix::zeros(n, n);
        for (a, pa) in nonidentity_pairs(d).enumerate() {
            for (b, pb) in nonidentity_pairs(d).enumerate() {
                out[(a, b)] = match bip {
                    Bipartition::One => self.r(frozen, pa, pb),
                    Bipartition::Two => self.r(pa, frozen, pb),
                    Bipartition::Three => self.r(pa, pb, frozen),
                };
            }
        }
        out
    }
}

/// Calls `f(row, col, phase)` for each nonzero entry of `A_p (x) A_q (x) A_s`.
fn for_each_monomial_entry(
    basis: &PrincipalBasis,
    labels: [IndexPair; 3],
    mut f: impl FnMut(usize, usize, Complex64),
) {
    let d = basis.dim();
    let [p, q, s] = labels;
    for a in 0..d {
        let (ca, pha) = (basis.column_of(p, a), basis.phase_of(p, a));
        for b in 0..d {
            let (cb, phb) = (basis.column_of(q, b), basis.phase_of(q, b));
            let phab = pha * phb;
            for c in 0..d {
                let (cc, phc) = (basis.column_of(s, c), basis.phase_of(s, c));
                f((a * d + b) * d + c, (ca * d + cb) * d + cc, phab * phc);
            }
        }
    }
}

/// All expansion coefficients of `rho`.
pub fn decompose(rho: &DensityMatrix) -> Result<CorrelationDecomposition> {
    decompose_matrix(rho.dim(), rho.matrix())
}

/// [`decompose`] for any `d^3 x d^3` matrix; no positivity or trace checks.
pub fn decompose_matrix(d: usize, m: &ComplexMatrix) -> Result<CorrelationDecomposition> {
    let basis = principal_basis(d)?;
    let dim = d * d * d;
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::ShapeMismatch(format!(
            "expected {dim}x{dim} matrix for d={d}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = d * d;
    let mut coeffs = Vec::with_capacity(n * n * n);
    let pairs: Vec<IndexPair> = crate::basis::all_pairs(d).collect();
    for &p in &pairs {
        for &q in &pairs {
            for &s in &pairs {
                // tr(rho P^†) = sum_X rho[X, col(X)] * conj(phase(X)) for monomial P.
                let mut acc = ZERO;
                for_each_monomial_entry(&basis, [p, q, s], |row, col, phase| {
                    acc += m[(row, col)] * phase.conj();
                });
                coeffs.push(acc);
            }
        }
    }
    Ok(CorrelationDecomposition { d, coeffs })
}

/// Which unfolding a matrix is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnfoldingLabel {
    /// Qubit slice `T_k`, `k` in `1..=3`.
    T(u8),
    S,
    N,
}

impl fmt::Display for UnfoldingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnfoldingLabel::T(k) => write!(f, "T{k}"),
            UnfoldingLabel::S => f.write_str("S"),
            UnfoldingLabel::N => f.write_str("N"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unfolding {
    pub bipartition: Bipartition,
    pub label: UnfoldingLabel,
    pub matrix: ComplexMatrix,
}

impl Unfolding {
    pub fn trace_norm(&self) -> Result<f64> {
        trace_norm(&self.matrix)
    }
}

fn require_qubits(dec: &CorrelationDecomposition) -> Result<()> {
    if dec.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: "2",
            got: dec.dim(),
        });
    }
    Ok(())
}

/// Qubit slice `T_k^{f|gh}`: the isolated party frozen at the `k`-th
/// non-identity label (`k = 1, 2, 3` for `(0,1), (1,0), (1,1)`).
pub fn t_matrix(dec: &CorrelationDecomposition, bip: Bipartition, k: u8) -> Result<Unfolding> {
    require_qubits(dec)?;
    if !(1..=3).contains(&k) {
        return Err(Error::ParameterOutOfRange(format!(
            "slice index {k} not in 1..=3"
        )));
    }
    let frozen = IndexPair::from_flat(k as usize, 2);
    Ok(Unfolding {
        bipartition: bip,
        label: UnfoldingLabel::T(k),
        matrix: dec.slice(bip, frozen),
    })
}

/// `S^{f|gh} = a T_1 + b T_2 + c T_3`.
pub fn s_matrix(
    dec: &CorrelationDecomposition,
    bip: Bipartition,
    coeffs: CoefficientTriple,
) -> Result<Unfolding> {
    require_qubits(dec)?;
    let mut m = ComplexMatrix::zeros(3, 3);
    for (k, weight) in [(1u8, coeffs.a), (2, coeffs.b), (3, coeffs.c)] {
        if weight != 0.0 {
            m = &m + &t_matrix(dec, bip, k)?.matrix.scale_real(weight);
        }
    }
    Ok(Unfolding {
        bipartition: bip,
        label: UnfoldingLabel::S,
        matrix: m,
    })
}

/// `N^{1|23} = sum_i T_{(i,1)}` and, for the other cuts,
/// `N = sum_k w^k T_{(k,1)}`, where `T_{(k,1)}` freezes the isolated party at
/// label `(k, 1)`.
pub fn n_matrix(dec: &CorrelationDecomposition, bip: Bipartition) -> Result<Unfolding> {
    let d = dec.dim();
    let n = d * d - 1;
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..d {
        let phase = match bip {
            Bipartition::One => Complex64::new(1.0, 0.0),
            _ => crate::basis::root_of_unity(d, k),
        };
        let slice = dec.slice(bip, IndexPair::new(k, 1));
        m = &m + &slice.scale(phase);
    }
    Ok(Unfolding {
        bipartition: bip,
        label: UnfoldingLabel::N,
        matrix: m,
    })
}

/// Average of the three `N` trace norms.
pub fn t_scalar(dec: &CorrelationDecomposition) -> Result<f64> {
    let mut total = 0.0;
    for bip in Bipartition::ALL {
        total += n_matrix(dec, bip)?.trace_norm()?;
    }
    Ok(total / 3.0)
}

/// Compares every `1|23` slice of `rho' = (I (x) u2 (x) u3) rho (...)^†`,
/// computed directly, with `M^t T N` built from the transition matrices of
/// `u2` and `u3`. Returns the largest entrywise deviation.
pub fn transform_covariance_check(
    rho: &DensityMatrix,
    u2: &ComplexMatrix,
    u3: &ComplexMatrix,
) -> Result<f64> {
    let d = rho.dim();
    let basis = principal_basis(d)?;
    let m = conjugation_coefficients(&basis, u2)?.into_matrix();
    let nmat = conjugation_coefficients(&basis, u3)?.into_matrix();
    let eye = ComplexMatrix::identity(d);
    let moved = rho.conjugate_local([&eye, u2, u3])?;
    let before = decompose(rho)?;
    let after = decompose(&moved)?;
    let mt = m.transpose();
    let mut worst = 0.0f64;
    for frozen in nonidentity_pairs(d) {
        let direct = after.slice(Bipartition::One, frozen);
        let via = mt
            .matmul(&before.slice(Bipartition::One, frozen))
            .matmul(&nmat);
        worst = worst.max(direct.max_abs_diff(&via));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        canonical_biseparable, ghz, noisy_state, w3, BiseparableCase, NoiseFamily,
    };

    fn pair(i: usize, j: usize) -> IndexPair {
        IndexPair::new(i, j)
    }

    /// Independent route: build `A_p (x) A_q (x) A_s` densely and take the trace.
    fn brute_coefficient(
        rho: &ComplexMatrix,
        d: usize,
        p: IndexPair,
        q: IndexPair,
        s: IndexPair,
    ) -> Complex64 {
        let b = principal_basis(d).unwrap();
        let big = b.element(p).kron(b.element(q)).kron(b.element(s));
        rho.matmul(&big.dagger()).trace()
    }

    #[test]
    fn maximally_mixed_has_only_trace_term() {
        let dec = decompose(&DensityMatrix::maximally_mixed(2).unwrap()).unwrap();
        for ([p, q, s], z) in dec.iter() {
            if p.is_identity() && q.is_identity() && s.is_identity() {
                assert!((z - 1.0).norm() < 1e-15);
            } else {
                assert!(z.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn reference_coefficients_match_brute_force() {
        let g = ghz(2).unwrap().density();
        let dec = decompose(&g).unwrap();
        let expect = brute_coefficient(g.matrix(), 2, pair(0, 1), pair(0, 1), pair(0, 1));
        assert!((expect - 1.0).norm() < 1e-14);
        assert!((dec.r(pair(0, 1), pair(0, 1), pair(0, 1)) - 1.0).norm() < 1e-14);
        assert!((dec.xt(pair(1, 0), pair(1, 0)) - 1.0).norm() < 1e-14);

        let w = w3().density();
        let dec = decompose(&w).unwrap();
        let expect = brute_coefficient(w.matrix(), 2, pair(0, 1), pair(0, 1), pair(1, 0));
        assert!((expect.re - 2.0 / 3.0).abs() < 1e-14);
        assert!((dec.r(pair(0, 1), pair(0, 1), pair(1, 0)).re - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn fast_extraction_agrees_with_dense_traces_for_qutrits() {
        let mut rng = crate::states::rng_from_seed(21);
        let rho = crate::states::random_density(&mut rng, 3).unwrap();
        let dec = decompose(&rho).unwrap();
        for (k, ([p, q, s], z)) in dec.iter().enumerate() {
            if k % 37 != 0 {
                continue;
            }
            let brute = brute_coefficient(rho.matrix(), 3, p, q, s);
            assert!((z - brute).norm() < 1e-12);
        }
    }

    #[test]
    fn qubit_t_slices_for_case_i() {
        let (t0, t1) = (0.6, 0.8);
        let psi = canonical_biseparable(BiseparableCase::I, &[t0, t1], 2).unwrap();
        let dec = decompose(&psi.density()).unwrap();
        let t1m = t_matrix(&dec, Bipartition::One, 1).unwrap().matrix;
        let t2m = t_matrix(&dec, Bipartition::One, 2).unwrap().matrix;
        let mut e1 = ComplexMatrix::zeros(3, 3);
        e1[(1, 0)] = Complex64::new(2.0 * t0 * t1, 0.0);
        let mut e2 = ComplexMatrix::zeros(3, 3);
        e2[(1, 1)] = Complex64::new(t0 * t0 + t1 * t1, 0.0);
        assert!(t1m.max_abs_diff(&e1) < 1e-14);
        assert!(t2m.max_abs_diff(&e2) < 1e-14);
    }

    #[test]
    fn qubit_t3_for_case_ii() {
        let (t0, t1) = (0.6, 0.8);
        let psi = canonical_biseparable(BiseparableCase::II, &[t0, t1], 2).unwrap();
        let dec = decompose(&psi.density()).unwrap();
        let t3 = t_matrix(&dec, Bipartition::One, 3).unwrap().matrix;
        let mut e = ComplexMatrix::zeros(3, 3);
        e[(0, 2)] = Complex64::new(2.0 * t0 * t1, 0.0);
        e[(2, 0)] = Complex64::new(2.0 * t0 * t1, 0.0);
        assert!(t3.max_abs_diff(&e) < 1e-14);
    }

    #[test]
    fn t_matrix_rejects_qudits() {
        let dec = decompose(&DensityMatrix::maximally_mixed(3).unwrap()).unwrap();
        assert!(matches!(
            t_matrix(&dec, Bipartition::One, 1),
            Err(Error::UnsupportedDimension { .. })
        ));
        assert!(matches!(
            s_matrix(
                &dec,
                Bipartition::One,
                CoefficientTriple::new(1.0, 0.0, 0.0)
            ),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn s_matrix_reduces_to_single_slice() {
        let dec = decompose(&w3().density()).unwrap();
        let s = s_matrix(
            &dec,
            Bipartition::Two,
            CoefficientTriple::new(1.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(
            s.matrix,
            t_matrix(&dec, Bipartition::Two, 1).unwrap().matrix
        );
    }

    #[test]
    fn w_state_b_only_trace_norm() {
        let dec = decompose(&w3().density()).unwrap();
        for bip in Bipartition::ALL {
            let s = s_matrix(&dec, bip, CoefficientTriple::new(0.0, 1.0, 0.0)).unwrap();
            assert!((s.trace_norm().unwrap() - 7.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_s_norm_is_mu() {
        let dec = decompose(&noisy_state(NoiseFamily::ghz(2, 0.0)).unwrap()).unwrap();
        let c = CoefficientTriple::new(2.0, 0.5, -1.0);
        let s = s_matrix(&dec, Bipartition::Two, c).unwrap();
        assert!((s.trace_norm().unwrap() - c.mu()).abs() < 1e-12);
    }

    #[test]
    fn n_matrix_of_maximally_mixed_vanishes() {
        for d in 2..=4 {
            let dec = decompose(&DensityMatrix::maximally_mixed(d).unwrap()).unwrap();
            for bip in Bipartition::ALL {
                let n = n_matrix(&dec, bip).unwrap();
                assert_eq!((n.matrix.rows(), n.matrix.cols()), (d * d - 1, d * d - 1));
                assert!(n.matrix.frobenius_norm() < 1e-14);
            }
            assert!(t_scalar(&dec).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn ghz3_n_norms() {
        let dec = decompose(&ghz(3).unwrap().density()).unwrap();
        // Equal weights 1/sqrt(3): d^2 * t_1 * t_2 = 9 / 3.
        let n2 = n_matrix(&dec, Bipartition::Two)
            .unwrap()
            .trace_norm()
            .unwrap();
        assert!((n2 - 3.0).abs() < 1e-10);
        let avg = t_scalar(&dec).unwrap();
        assert!((avg - 3.0).abs() < 1e-10);
    }

    #[test]
    fn covariance_with_identity_is_exact() {
        let rho = crate::states::random_density(&mut crate::states::rng_from_seed(4), 2).unwrap();
        let eye = ComplexMatrix::identity(2);
        assert!(transform_covariance_check(&rho, &eye, &eye).unwrap() < 1e-15);
    }
}
