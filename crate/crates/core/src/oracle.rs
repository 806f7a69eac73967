//! Independent checks: partial transposition, brute-force singular values
//! and Monte-Carlo searches for biseparable states that exceed a bound.
//!
//! A negative partial transpose proves entanglement across a cut; a positive
//! one proves nothing. Reports here are one-sided evidence only.

use std::fmt;
use std::thread;

use crate::criteria::{theorem2_bounds, CoefficientTriple};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::states::{
    canonical_biseparable, noisy_state, random_unit_vector, random_unitary, rng_from_seed,
    BiseparableCase, DensityMatrix, NoiseFamily, PureState, SeededRng,
};
use crate::tensor::{decompose, n_matrix, s_matrix};
use crate::{linalg, Bipartition};

/// Minimum eigenvalue below which a partial transpose counts as negative.
pub const NPT_TOL: f64 = -1e-9;

/// Slack allowed when comparing a sampled witness with its bound.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PptReport {
    pub bipartition: Bipartition,
    pub min_eigenvalue: f64,
    pub is_npt: bool,
}

/// Transposes the indices of `party` (0-based) of a `d^3 x d^3` matrix.
pub fn partial_transpose_matrix(m: &ComplexMatrix, d: usize, party: usize) -> ComplexMatrix {
    assert!(party < 3, "party index {party} out of range");
    let n = d * d * d;
    assert_eq!((m.rows(), m.cols()), (n, n));
    let digits = |idx: usize| [idx / (d * d), (idx / d) % d, idx % d];
    let join = |g: [usize; 3]| (g[0] * d + g[1]) * d + g[2];
    ComplexMatrix::from_fn(n, n, |row, col| {
        let mut r = digits(row);
        let mut c = digits(col);
        std::mem::swap(&mut r[party], &mut c[party]);
        m[(join(r), join(c))]
    })
}

/// Partial transpose over the isolated party of `bip`.
pub fn partial_transpose(rho: &DensityMatrix, bip: Bipartition) -> ComplexMatrix {
    partial_transpose_matrix(rho.matrix(), rho.dim(), bip.party())
}

pub fn ppt_report(rho: &DensityMatrix, bip: Bipartition) -> Result<PptReport> {
    let pt = partial_transpose(rho, bip);
    let min_eigenvalue = *hermitian_eigenvalues(&pt)?
        .last()
        .expect("non-empty spectrum");
    Ok(PptReport {
        bipartition: bip,
        min_eigenvalue,
        is_npt: min_eigenvalue < NPT_TOL,
    })
}

/// Value of the family parameter where the partial transpose across `bip`
/// changes sign, located by bisection on the minimum eigenvalue.
pub fn ppt_transition(family: NoiseFamily, bip: Bipartition, iterations: usize) -> Result<f64> {
    let min_eig = |x: f64| -> Result<f64> {
        Ok(ppt_report(&noisy_state(family.with_x(x))?, bip)?.min_eigenvalue)
    };
    let neg0 = min_eig(0.0)? < 0.0;
    let neg1 = min_eig(1.0)? < 0.0;
    if neg0 == neg1 {
        return Err(Error::NoCrossing);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if (min_eig(mid)? < 0.0) == neg0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Singular values as square roots of the eigenvalues of `M^† M`.
pub fn brute_singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = m.dagger().matmul(m);
    let k = m.rows().min(m.cols());
    let mut ev: Vec<f64> = hermitian_eigenvalues(&gram)?
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    ev.truncate(k);
    Ok(ev)
}

/// Largest elementwise gap between the Jacobi singular values and the
/// `M^† M` eigenvalue route.
pub fn singular_value_disagreement(m: &ComplexMatrix) -> Result<f64> {
    let a = linalg::singular_values(m)?;
    let b = brute_singular_values(m)?;
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Which parties receive random local unitaries in [`validate_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    /// Only the two parties of the pair `gh`: the freedom the witnesses are
    /// invariant under.
    Pair,
    /// All three parties, including the isolated one.
    All,
}

impl std::str::FromStr for Rotation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pair" => Ok(Rotation::Pair),
            "all" => Ok(Rotation::All),
            _ => Err(format!("unknown rotation `{s}` (expected pair or all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    pub seed: u64,
    pub d: usize,
    pub case: BiseparableCase,
    pub bipartition: Bipartition,
    pub samples: usize,
    /// Slice weights for qubits; ignored for `d >= 3`.
    pub coeffs: CoefficientTriple,
    pub rotation: Rotation,
    /// Worker threads; worker `w` draws from the stream seeded with `seed + w`.
    pub jobs: usize,
}

impl ValidationConfig {
    pub fn new(
        seed: u64,
        d: usize,
        case: BiseparableCase,
        bipartition: Bipartition,
        samples: usize,
    ) -> Self {
        Self {
            seed,
            d,
            case,
            bipartition,
            samples,
            coeffs: CoefficientTriple::new(0.0, 1.0, 0.0),
            rotation: Rotation::Pair,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub config: ValidationConfig,
    pub max_witness: f64,
    pub bound: f64,
    /// Samples whose witness exceeded `bound + BOUND_SLACK`.
    pub violations: usize,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn excess(&self) -> f64 {
        self.max_witness - self.bound
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(
            f,
            "validate d={} case={} bipartition={} samples={} seed={}",
            c.d, c.case, c.bipartition, c.samples, c.seed
        )?;
        writeln!(f, "max_witness {:.12}", self.max_witness)?;
        writeln!(f, "bound {:.12}", self.bound)?;
        if self.passed() {
            write!(f, "PASS")
        } else {
            write!(
                f,
                "VIOLATION {} of {} samples exceed the bound (max excess {:.6e})",
                self.violations,
                c.samples,
                self.excess()
            )
        }
    }
}

/// Bound a biseparable state of the given case structure should respect.
///
/// Qubits: `3|b|` for case i on `2|13`, `sqrt(b^2 + mu^2)` otherwise. Qudits:
/// the per-case `N` bounds.
pub fn biseparable_bound(
    d: usize,
    case: BiseparableCase,
    bip: Bipartition,
    coeffs: CoefficientTriple,
) -> f64 {
    if d == 2 {
        return match (case, bip) {
            (BiseparableCase::I, Bipartition::Two) => 3.0 * coeffs.b.abs(),
            _ => (coeffs.b * coeffs.b + coeffs.mu() * coeffs.mu()).sqrt(),
        };
    }
    match theorem2_bounds(d, bip) {
        (Some((case_i, _)), _) if case == BiseparableCase::I => case_i,
        (Some((_, case_ii)), _) => case_ii,
        (None, bound) => bound,
    }
}

/// The witness the bound refers to: `||S^{f|gh}||_tr` for qubits,
/// `||N^{f|gh}||_tr` otherwise.
pub fn biseparable_witness(
    psi: &PureState,
    bip: Bipartition,
    coeffs: CoefficientTriple,
) -> Result<f64> {
    let dec = decompose(&psi.density())?;
    if psi.dim() == 2 {
        s_matrix(&dec, bip, coeffs)?.trace_norm()
    } else {
        n_matrix(&dec, bip)?.trace_norm()
    }
}

fn sample_state(rng: &mut SeededRng, cfg: &ValidationConfig) -> Result<PureState> {
    let d = cfg.d;
    let t: Vec<f64> = random_unit_vector(rng, d)
        .iter()
        .map(|z| z.norm())
        .collect();
    let psi = canonical_biseparable(cfg.case, &t, d)?;
    let mut u = [
        ComplexMatrix::identity(d),
        ComplexMatrix::identity(d),
        ComplexMatrix::identity(d),
    ];
    let (g, h) = cfg.bipartition.others();
    u[g] = random_unitary(rng, d);
    u[h] = random_unitary(rng, d);
    if cfg.rotation == Rotation::All {
        u[cfg.bipartition.party()] = random_unitary(rng, d);
    }
    psi.apply_local([&u[0], &u[1], &u[2]])
}

/// Samples biseparable pure states with random Schmidt weights and random
/// local unitaries, and records the largest witness seen.
pub fn validate_bounds(cfg: &ValidationConfig) -> Result<BoundReport> {
    if cfg.samples == 0 {
        return Err(Error::ParameterOutOfRange(
            "samples must be at least 1".into(),
        ));
    }
    if cfg.d < 2 {
        return Err(Error::InvalidDimension(cfg.d));
    }
    let bound = biseparable_bound(cfg.d, cfg.case, cfg.bipartition, cfg.coeffs);
    let jobs = cfg.jobs.clamp(1, cfg.samples);

    let worker = |w: usize| -> Result<(f64, usize)> {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(w as u64));
        let count = (cfg.samples - w).div_ceil(jobs);
        let mut best = f64::NEG_INFINITY;
        let mut violations = 0;
        for _ in 0..count {
            let psi = sample_state(&mut rng, cfg)?;
            let witness = biseparable_witness(&psi, cfg.bipartition, cfg.coeffs)?;
            if witness > bound + BOUND_SLACK {
                violations += 1;
            }
            best = best.max(witness);
        }
        Ok((best, violations))
    };

    let results: Vec<Result<(f64, usize)>> = if jobs == 1 {
        vec![worker(0)]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..jobs).map(|w| s.spawn(move || worker(w))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };

    let mut max_witness = f64::NEG_INFINITY;
    let mut violations = 0;
    for r in results {
        let (best, v) = r?;
        max_witness = max_witness.max(best);
        violations += v;
    }
    Ok(BoundReport {
        config: cfg.clone(),
        max_witness,
        bound,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, random_density, w3};

    #[test]
    fn maximally_mixed_is_fixed() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        for bip in Bipartition::ALL {
            assert_eq!(&partial_transpose(&rho, bip), rho.matrix());
            assert!(!ppt_report(&rho, bip).unwrap().is_npt);
        }
    }

    #[test]
    fn transpose_is_an_involution_preserving_trace_and_hermiticity() {
        let rho = random_density(&mut rng_from_seed(8), 2).unwrap();
        for p in 0..3 {
            let pt = partial_transpose_matrix(rho.matrix(), 2, p);
            assert!(pt.hermitian_deviation() < 1e-12);
            assert!((pt.trace() - rho.matrix().trace()).norm() < 1e-12);
            assert_eq!(&partial_transpose_matrix(&pt, 2, p), rho.matrix());
        }
    }

    #[test]
    fn ghz_partial_transpose_has_minus_half() {
        let rho = ghz(2).unwrap().density();
        let r = ppt_report(&rho, Bipartition::One).unwrap();
        assert!((r.min_eigenvalue + 0.5).abs() < 1e-12);
        assert!(r.is_npt);
    }

    #[test]
    fn w_state_is_npt_everywhere() {
        let rho = w3().density();
        for bip in Bipartition::ALL {
            assert!(ppt_report(&rho, bip).unwrap().is_npt);
        }
    }

    #[test]
    fn ghz_family_npt_boundary() {
        // Min eigenvalue of the transposed family is (5x - 4) / 8.
        let at = |x| {
            ppt_report(
                &noisy_state(NoiseFamily::ghz(2, x)).unwrap(),
                Bipartition::One,
            )
            .unwrap()
        };
        assert!(at(0.79).is_npt);
        assert!(!at(0.81).is_npt);
        assert!((at(0.5).min_eigenvalue - (5.0 * 0.5 - 4.0) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn brute_route_agrees_on_rectangular_input() {
        let m = ComplexMatrix::from_fn(3, 5, |i, j| {
            crate::Complex64::new(
                ((i * 7 + j * j) % 5) as f64 - 2.0,
                (i * j) as f64 * 0.3 - 0.5,
            )
        });
        assert!(singular_value_disagreement(&m).unwrap() < 1e-8);
    }

    #[test]
    fn product_limit_stays_at_b() {
        // t = (1, 0): the state is a product and the qubit witness equals |b|.
        let psi = canonical_biseparable(BiseparableCase::I, &[1.0, 0.0], 2).unwrap();
        let c = CoefficientTriple::new(0.3, -0.8, 0.1);
        for bip in Bipartition::ALL {
            let w = biseparable_witness(&psi, bip, c).unwrap();
            assert!((w - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_is_deterministic_per_seed_and_jobs() {
        let mut cfg = ValidationConfig::new(17, 2, BiseparableCase::I, Bipartition::Two, 40);
        let a = validate_bounds(&cfg).unwrap();
        let b = validate_bounds(&cfg).unwrap();
        assert_eq!(a, b);
        cfg.jobs = 3;
        let c = validate_bounds(&cfg).unwrap();
        let d = validate_bounds(&cfg).unwrap();
        assert_eq!(c, d);
        assert!(a.passed() && c.passed());
    }

    #[test]
    fn rejects_zero_samples() {
        let cfg = ValidationConfig::new(1, 2, BiseparableCase::I, Bipartition::One, 0);
        assert!(matches!(
            validate_bounds(&cfg),
            Err(Error::ParameterOutOfRange(_))
        ));
    }
}
