//! Trace-norm separability tests built on the `S` and `N` unfoldings.
//!
//! Qubit tests weight the three slices of a bipartition with a real triple
//! `(a, b, c)` and compare `||S||_tr` with the largest value a biseparable
//! state reaches. The qudit test compares `||N||_tr` with `d^2 / 2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::states::{
    noisy_state, BiseparableCase, DensityMatrix, NoiseFamily, NoiseKind, PureState,
};
use crate::tensor::{decompose, n_matrix, s_matrix, CorrelationDecomposition};
use crate::Bipartition;

/// A witness must exceed its bound by more than this to count as detection.
pub const DETECTION_MARGIN: f64 = 1e-12;

/// Largest `|a/b|` for which the `c = 0` qubit test can fire on the W family,
/// as printed to four decimals.
pub const COR2_RATIO_LIMIT: f64 = 1.6248;

/// Bisection steps used by [`sweep_threshold`].
pub const SWEEP_ITERATIONS: usize = 60;

/// Real weights `(a, b, c)` of the slices `T_1, T_2, T_3` for one bipartition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CoefficientTriple {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// `|a + c| + |a - c|`
    pub fn mu(&self) -> f64 {
        (self.a + self.c).abs() + (self.a - self.c).abs()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self::new(self.a * lambda, self.b * lambda, self.c * lambda)
    }
}

impl fmt::Display for CoefficientTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl FromStr for CoefficientTriple {
    type Err = String;

    /// `a,b,c` or `a,b` (then `c = 0`). Components may be fractions like `1/3`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| parse_number(t.trim()))
            .collect::<std::result::Result<_, _>>()?;
        match parts.as_slice() {
            [a, b] => Ok(Self::new(*a, *b, 0.0)),
            [a, b, c] => Ok(Self::new(*a, *b, *c)),
            _ => Err(format!("expected `a,b,c` or `a,b`, found `{s}`")),
        }
    }
}

fn parse_number(t: &str) -> std::result::Result<f64, String> {
    let bad = || format!("bad number `{t}`");
    match t.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => t.parse().map_err(|_| bad()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// `||S^{2|13}||_tr > 3|b|` with `3|b| < mu`.
    Corollary1,
    /// `||a T_1 + b T_2||_tr > sqrt(b^2 + 4a^2)` on any cut, `|a/b| < 1.6248`.
    Corollary2,
    /// `||N^{f|gh}||_tr > d^2 / 2` for qudits.
    Theorem2,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Corollary1 => "cor1",
            Criterion::Corollary2 => "cor2",
            Criterion::Theorem2 => "thm2",
        })
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cor1" => Ok(Criterion::Corollary1),
            "cor2" => Ok(Criterion::Corollary2),
            "thm2" => Ok(Criterion::Theorem2),
            _ => Err(format!(
                "unknown criterion `{s}` (expected cor1, cor2 or thm2)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    Entangled,
    Inconclusive,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Entangled => "entangled",
            Conclusion::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of one criterion on one bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub bipartition: Bipartition,
    pub criterion: Criterion,
    pub witness_value: f64,
    pub bound: f64,
    pub conclusion: Conclusion,
    /// For the qudit test on `1|23` and `3|12`: the two per-case bounds
    /// `(sqrt(d^3 (d-1)) / 2, d^2 / 2)`; `bound` is their maximum.
    pub case_bounds: Option<(f64, f64)>,
}

impl Verdict {
    fn new(bipartition: Bipartition, criterion: Criterion, witness_value: f64, bound: f64) -> Self {
        let conclusion = if witness_value > bound + DETECTION_MARGIN {
            Conclusion::Entangled
        } else {
            Conclusion::Inconclusive
        };
        Self {
            bipartition,
            criterion,
            witness_value,
            bound,
            conclusion,
            case_bounds: None,
        }
    }

    pub fn is_entangled(&self) -> bool {
        self.conclusion == Conclusion::Entangled
    }

    /// `witness - bound`; positive when the criterion fires.
    pub fn margin(&self) -> f64 {
        self.witness_value - self.bound
    }

    /// `verdict <bipartition> <witness> <bound> <entangled|inconclusive>`
    pub fn machine_line(&self) -> String {
        format!(
            "verdict {} {:.12} {:.12} {}",
            self.bipartition, self.witness_value, self.bound, self.conclusion
        )
    }
}

/// Closed-form `||S^{f|gh}||_tr` for the canonical biseparable qubit states
/// with Schmidt weights `(t0, t1)`.
pub fn theorem1_value(
    case: BiseparableCase,
    bip: Bipartition,
    coeffs: CoefficientTriple,
    t0: f64,
    t1: f64,
) -> Result<f64> {
    if !(t0 >= 0.0 && t1 >= 0.0) || (t0 * t0 + t1 * t1 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSpectrum(format!(
            "need t0, t1 >= 0 with t0^2 + t1^2 = 1, got ({t0}, {t1})"
        )));
    }
    let CoefficientTriple { a, b, c } = coeffs;
    let p = t0 * t1;
    Ok(match (case, bip) {
        (BiseparableCase::I, Bipartition::Two) => b.abs() * (1.0 + 4.0 * p),
        (BiseparableCase::I, _) => (4.0 * (a * a + c * c) * p * p + b * b).sqrt(),
        (BiseparableCase::II, _) => b.abs() * (t0 * t0 - t1 * t1).abs() + 2.0 * coeffs.mu() * p,
    })
}

fn require_qubit_state(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: "2",
            got: rho.dim(),
        });
    }
    Ok(())
}

/// Checks the coefficient constraints of the `2|13` test.
pub fn corollary1_admissible(coeffs: CoefficientTriple) -> Result<()> {
    let b = coeffs.b.abs();
    let mu = coeffs.mu();
    if b == 0.0 || mu == 0.0 || 3.0 * b >= mu {
        return Err(Error::PreconditionViolated(format!(
            "need b != 0, mu != 0 and 3|b| < mu; got |b| = {b}, mu = {mu}"
        )));
    }
    Ok(())
}

/// Checks the coefficient constraints of the `c = 0` test.
pub fn corollary2_admissible(coeffs: CoefficientTriple) -> Result<()> {
    if coeffs.c != 0.0 {
        return Err(Error::PreconditionViolated(format!(
            "need c = 0, got c = {}",
            coeffs.c
        )));
    }
    if coeffs.b == 0.0 {
        return Err(Error::PreconditionViolated("need b != 0".into()));
    }
    let ratio = (coeffs.a / coeffs.b).abs();
    if ratio >= COR2_RATIO_LIMIT {
        return Err(Error::PreconditionViolated(format!(
            "need |a/b| < {COR2_RATIO_LIMIT}, got {ratio}"
        )));
    }
    Ok(())
}

/// `||S^{2|13}||_tr` against `3|b|`.
///
/// The bound is the largest value on the canonical `2|13` form, whose party-2
/// factor is `|0>`. Rotating that factor mixes the slices, so the bound is
/// not an upper limit for all biseparable states.
pub fn corollary1_detect(rho: &DensityMatrix, coeffs: CoefficientTriple) -> Result<Verdict> {
    require_qubit_state(rho)?;
    corollary1_admissible(coeffs)?;
    let dec = decompose(rho)?;
    corollary1_on(&dec, coeffs)
}

fn corollary1_on(dec: &CorrelationDecomposition, coeffs: CoefficientTriple) -> Result<Verdict> {
    let witness = s_matrix(dec, Bipartition::Two, coeffs)?.trace_norm()?;
    Ok(Verdict::new(
        Bipartition::Two,
        Criterion::Corollary1,
        witness,
        3.0 * coeffs.b.abs(),
    ))
}

/// `||a T_1 + b T_2||_tr` against `sqrt(b^2 + 4a^2)` for each bipartition.
pub fn corollary2_detect(rho: &DensityMatrix, coeffs: CoefficientTriple) -> Result<Vec<Verdict>> {
    require_qubit_state(rho)?;
    corollary2_admissible(coeffs)?;
    let dec = decompose(rho)?;
    corollary2_on(&dec, coeffs)
}

fn corollary2_on(
    dec: &CorrelationDecomposition,
    coeffs: CoefficientTriple,
) -> Result<Vec<Verdict>> {
    let bound = (coeffs.b * coeffs.b + 4.0 * coeffs.a * coeffs.a).sqrt();
    Bipartition::ALL
        .iter()
        .map(|&bip| {
            let witness = s_matrix(dec, bip, coeffs)?.trace_norm()?;
            Ok(Verdict::new(bip, Criterion::Corollary2, witness, bound))
        })
        .collect()
}

/// Smallest state weight `x` above which the W family is detected by the
/// `c = 0` test with `a/b = delta`.
pub fn f_delta(delta: f64) -> f64 {
    let d2 = delta * delta;
    let inner = (25.0 + 16.0 * d2).sqrt();
    let numerator = 18f64.sqrt() * (1.0 + 4.0 * d2).sqrt();
    let denominator =
        8f64.sqrt() + (13.0 + 8.0 * d2 + inner).sqrt() + (13.0 + 8.0 * d2 - inner).sqrt();
    numerator / denominator
}

/// Noise weight below which the GHZ family is detected by the `2|13` test:
/// `1 - 3|b| / mu`, clamped to `[0, 1]`.
pub fn ghz_threshold(coeffs: CoefficientTriple) -> Result<f64> {
    let mu = coeffs.mu();
    if mu == 0.0 {
        return Err(Error::DegenerateCoefficients);
    }
    Ok((1.0 - 3.0 * coeffs.b.abs() / mu).clamp(0.0, 1.0))
}

/// Upper limits of `||N^{f|gh}||_tr` on biseparable pure qudit states:
/// `(case i, case ii)` for the outer cuts, and `d^2/2` alone for `2|13`.
pub fn theorem2_bounds(d: usize, bip: Bipartition) -> (Option<(f64, f64)>, f64) {
    let d = d as f64;
    let half_square = d * d / 2.0;
    match bip {
        Bipartition::Two => (None, half_square),
        _ => {
            let case_i = (d * d * d * (d - 1.0)).sqrt() / 2.0;
            (Some((case_i, half_square)), case_i.max(half_square))
        }
    }
}

/// Qudit test on a pure state, one verdict per bipartition.
pub fn theorem2_check(psi: &PureState) -> Result<Vec<Verdict>> {
    if psi.dim() < 3 {
        return Err(Error::UnsupportedDimension {
            expected: ">= 3",
            got: psi.dim(),
        });
    }
    theorem2_on(&decompose(&psi.density())?)
}

/// Qudit test on a density matrix. Mixed input is accepted only with
/// `assume_convexity`: the trace norm of the affine map `rho -> N(rho)` is
/// convex, so the pure-state bound carries over to mixtures of biseparable
/// states.
pub fn theorem2_check_density(rho: &DensityMatrix, assume_convexity: bool) -> Result<Vec<Verdict>> {
    if rho.dim() < 3 {
        return Err(Error::UnsupportedDimension {
            expected: ">= 3",
            got: rho.dim(),
        });
    }
    let purity = rho.matrix().matmul(rho.matrix()).trace().re;
    if (purity - 1.0).abs() > 1e-9 && !assume_convexity {
        return Err(Error::PreconditionViolated(format!(
            "state is mixed (purity {purity:.6}); pass assume_convexity to extend the pure-state bound"
        )));
    }
    theorem2_on(&decompose(rho)?)
}

fn theorem2_on(dec: &CorrelationDecomposition) -> Result<Vec<Verdict>> {
    let d = dec.dim();
    Bipartition::ALL
        .iter()
        .map(|&bip| {
            let witness = n_matrix(dec, bip)?.trace_norm()?;
            let (case_bounds, bound) = theorem2_bounds(d, bip);
            let mut v = Verdict::new(bip, Criterion::Theorem2, witness, bound);
            v.case_bounds = case_bounds;
            Ok(v)
        })
        .collect()
}

/// Runs `criterion` on a density matrix. Multi-cut criteria return one
/// verdict per bipartition.
pub fn evaluate(
    rho: &DensityMatrix,
    criterion: Criterion,
    coeffs: CoefficientTriple,
    assume_convexity: bool,
) -> Result<Vec<Verdict>> {
    match criterion {
        Criterion::Corollary1 => Ok(vec![corollary1_detect(rho, coeffs)?]),
        Criterion::Corollary2 => corollary2_detect(rho, coeffs),
        Criterion::Theorem2 => theorem2_check_density(rho, assume_convexity),
    }
}

/// Largest `witness - bound` over the verdicts of `criterion` on `rho`.
fn best_margin(
    rho: &DensityMatrix,
    criterion: Criterion,
    coeffs: CoefficientTriple,
) -> Result<f64> {
    let dec = decompose(rho)?;
    let verdicts = match criterion {
        Criterion::Corollary1 => vec![corollary1_on(&dec, coeffs)?],
        Criterion::Corollary2 => corollary2_on(&dec, coeffs)?,
        Criterion::Theorem2 => theorem2_on(&dec)?,
    };
    Ok(verdicts
        .iter()
        .map(Verdict::margin)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Boundary value of `x` at which `criterion` starts (or stops) firing on
/// `family`, found by bisection on `[0, 1]`.
///
/// For the GHZ family the criterion fires for `x` below the result; for the W
/// family, above it. If it fires on the whole interval the far endpoint is
/// returned (1 for GHZ, 0 for W). The qudit criterion is evaluated on the
/// mixed family under the convexity extension.
pub fn sweep_threshold(
    family: NoiseFamily,
    criterion: Criterion,
    coeffs: CoefficientTriple,
) -> Result<f64> {
    match criterion {
        Criterion::Corollary1 | Criterion::Corollary2 if family.d != 2 => {
            return Err(Error::UnsupportedDimension {
                expected: "2",
                got: family.d,
            });
        }
        Criterion::Theorem2 if family.d < 3 => {
            return Err(Error::UnsupportedDimension {
                expected: ">= 3",
                got: family.d,
            });
        }
        Criterion::Corollary1 => corollary1_admissible(coeffs)?,
        Criterion::Corollary2 => corollary2_admissible(coeffs)?,
        Criterion::Theorem2 => {}
    }
    let margin =
        |x: f64| -> Result<f64> { best_margin(&noisy_state(family.with_x(x))?, criterion, coeffs) };
    let fires = |m: f64| m > DETECTION_MARGIN;

    let at0 = fires(margin(0.0)?);
    let at1 = fires(margin(1.0)?);
    match (at0, at1) {
        (false, false) => return Err(Error::NoCrossing),
        (true, true) => {
            return Ok(match family.kind {
                NoiseKind::GhzMix => 1.0,
                NoiseKind::WMix => 0.0,
            })
        }
        _ => {}
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..SWEEP_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if fires(margin(mid)?) == at0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
