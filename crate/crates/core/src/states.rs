//! Tripartite states on `C^d (x) C^d (x) C^d`.
//!
//! Computational basis states `|abc>` use the flat index `a*d^2 + b*d + c`
//! (party 1 most significant). Unfoldings, partial transposes and the
//! correlation extraction all rely on this convention.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, read_matrix, singular_values, vector_norm, write_matrix, ComplexMatrix,
    HERMITIAN_TOL, ZERO,
};
use crate::Bipartition;

/// Accepted deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const POSITIVITY_TOL: f64 = -1e-9;
/// Accepted deviation of a pure state's norm from one.
pub const NORM_TOL: f64 = 1e-12;

/// Generator used for all seeded sampling: ChaCha with 8 rounds, seeded
/// through `SeedableRng::seed_from_u64`.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// A normalized vector of `d^3` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    d: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(d: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(d)?;
        if amplitudes.len() != d * d * d {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for local dimension {d}",
                amplitudes.len()
            )));
        }
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::ParameterOutOfRange(format!(
                "state norm {norm} is not 1"
            )));
        }
        Ok(Self { d, amplitudes })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(d: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vector_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ParameterOutOfRange(
                "cannot normalize zero vector".into(),
            ));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(d, amplitudes)
    }

    /// The basis state `|abc>`.
    pub fn basis(d: usize, a: usize, b: usize, c: usize) -> Result<Self> {
        check_dim(d)?;
        let mut amps = vec![ZERO; d * d * d];
        amps[flat_index(d, a, b, c)] = Complex64::new(1.0, 0.0);
        Self::new(d, amps)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, a: usize, b: usize, c: usize) -> Complex64 {
        self.amplitudes[flat_index(self.d, a, b, c)]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            d: self.d,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Applies `u1 (x) u2 (x) u3`.
    pub fn apply_local(&self, u: [&ComplexMatrix; 3]) -> Result<Self> {
        let w = local_operator(self.d, u)?;
        Self::normalized(self.d, w.apply(&self.amplitudes))
    }

    /// The `d x d^2` matrix whose rows are indexed by the isolated party of
    /// `bip` and whose columns by the remaining pair (earlier party first).
    pub fn unfold(&self, bip: Bipartition) -> ComplexMatrix {
        let d = self.d;
        let (g, h) = bip.others();
        let f = bip.party();
        let mut m = ComplexMatrix::zeros(d, d * d);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let idx = [a, b, c];
                    m[(idx[f], idx[g] * d + idx[h])] = self.amplitude(a, b, c);
                }
            }
        }
        m
    }
}

/// A `d^3 x d^3` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    d: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(d: usize, matrix: ComplexMatrix) -> Result<Self> {
        check_dim(d)?;
        let n = d * d * d;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "density matrix for d={d} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        let min = *hermitian_eigenvalues(&matrix)?.last().unwrap();
        if min < POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { d, matrix })
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        check_dim(d)?;
        let n = d * d * d;
        Ok(Self {
            d,
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        })
    }

    /// Convex combination `sum_k p_k rho_k`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::ParameterOutOfRange("empty mixture".into()))?;
        let d = first.d;
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if parts.iter().any(|(p, r)| *p < 0.0 || r.d != d) || (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::ParameterOutOfRange(
                "mixture weights must be non-negative, sum to 1, and share one dimension".into(),
            ));
        }
        let n = d * d * d;
        let mut m = ComplexMatrix::zeros(n, n);
        for (p, r) in parts {
            m = &m + &r.matrix.scale_real(*p);
        }
        Ok(Self { d, matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `W rho W^†` for `W = u1 (x) u2 (x) u3`.
    pub fn conjugate_local(&self, u: [&ComplexMatrix; 3]) -> Result<Self> {
        let w = local_operator(self.d, u)?;
        Ok(Self {
            d: self.d,
            matrix: w.matmul(&self.matrix).matmul(&w.dagger()),
        })
    }

    /// Text form: a `dims d d d` line followed by the matrix block.
    pub fn to_text(&self) -> String {
        format!("dims {0} {0} {0}\n{1}", self.d, write_matrix(&self.matrix))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (n, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let bad = || Error::Parse {
            line: n + 1,
            msg: format!("expected `dims d d d`, found `{header}`"),
        };
        if parts.len() != 4 || parts[0] != "dims" {
            return Err(bad());
        }
        let dims: Vec<usize> = parts[1..]
            .iter()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if dims[0] != dims[1] || dims[1] != dims[2] {
            return Err(Error::Parse {
                line: n + 1,
                msg: "unequal local dimensions are not supported".into(),
            });
        }
        let rest: String = text.lines().skip(n + 1).collect::<Vec<_>>().join("\n");
        let matrix = read_matrix(&rest).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse {
                line: line + n + 1,
                msg,
            },
            other => other,
        })?;
        Self::new(dims[0], matrix)
    }
}

/// Schmidt coefficients across one bipartition, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub bipartition: Bipartition,
    pub coefficients: Vec<f64>,
}

/// White-noise family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// `x/d^3 I + (1-x) |GHZ_d><GHZ_d|`: `x` is the noise weight.
    GhzMix,
    /// `(1-x)/8 I + x |W><W|`: `x` is the state weight. Qubits only.
    WMix,
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ghz" => Ok(NoiseKind::GhzMix),
            "w" => Ok(NoiseKind::WMix),
            _ => Err(format!("unknown family `{s}` (expected ghz or w)")),
        }
    }
}

/// One member of a white-noise family. The two kinds use opposite
/// conventions for `x`; see [`NoiseKind`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseFamily {
    pub kind: NoiseKind,
    pub d: usize,
    pub x: f64,
}

impl NoiseFamily {
    pub fn ghz(d: usize, x: f64) -> Self {
        Self {
            kind: NoiseKind::GhzMix,
            d,
            x,
        }
    }

    pub fn w(x: f64) -> Self {
        Self {
            kind: NoiseKind::WMix,
            d: 2,
            x,
        }
    }

    pub fn with_x(self, x: f64) -> Self {
        Self { x, ..self }
    }

    /// Weight carried by the pure component.
    pub fn state_weight(&self) -> f64 {
        match self.kind {
            NoiseKind::GhzMix => 1.0 - self.x,
            NoiseKind::WMix => self.x,
        }
    }
}

/// The two canonical forms a biseparable pure state is reduced to:
/// `sum_k t_k |k,0,k>` and `sum_k t_k |k,k,k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BiseparableCase {
    I,
    II,
}

impl fmt::Display for BiseparableCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BiseparableCase::I => "i",
            BiseparableCase::II => "ii",
        })
    }
}

impl FromStr for BiseparableCase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "i" | "1" => Ok(BiseparableCase::I),
            "ii" | "2" => Ok(BiseparableCase::II),
            _ => Err(format!("unknown case `{s}` (expected i or ii)")),
        }
    }
}

/// `(|000> + |111> + ... + |d-1,d-1,d-1>) / sqrt(d)`.
pub fn ghz(d: usize) -> Result<PureState> {
    check_dim(d)?;
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![ZERO; d * d * d];
    for k in 0..d {
        amps[flat_index(d, k, k, k)] = amp;
    }
    PureState::new(d, amps)
}

/// `(|100> + |010> + |001>) / sqrt(3)`.
pub fn w3() -> PureState {
    let amp = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![ZERO; 8];
    for idx in [4, 2, 1] {
        amps[idx] = amp;
    }
    PureState {
        d: 2,
        amplitudes: amps,
    }
}

pub fn noisy_state(family: NoiseFamily) -> Result<DensityMatrix> {
    let NoiseFamily { kind, d, x } = family;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::ParameterOutOfRange(format!(
            "mixing parameter x = {x} not in [0, 1]"
        )));
    }
    let pure = match kind {
        NoiseKind::GhzMix => ghz(d)?,
        NoiseKind::WMix => {
            if d != 2 {
                return Err(Error::UnsupportedDimension {
                    expected: "2",
                    got: d,
                });
            }
            w3()
        }
    };
    let weight = family.state_weight();
    let n = d * d * d;
    let noise = ComplexMatrix::identity(n).scale_real((1.0 - weight) / n as f64);
    let signal = pure.density().matrix.scale_real(weight);
    Ok(DensityMatrix {
        d,
        matrix: &noise + &signal,
    })
}

pub fn schmidt_spectrum(psi: &PureState, bipartition: Bipartition) -> Result<SchmidtSpectrum> {
    Ok(SchmidtSpectrum {
        bipartition,
        coefficients: singular_values(&psi.unfold(bipartition))?,
    })
}

/// Canonical biseparable form with Schmidt weights `t` (padded with zeros to
/// length `d`): case I is `sum_k t_k |k,0,k>`, case II is `sum_k t_k |k,k,k>`.
pub fn canonical_biseparable(case: BiseparableCase, t: &[f64], d: usize) -> Result<PureState> {
    check_dim(d)?;
    let t = validate_spectrum(t, d)?;
    let mut amps = vec![ZERO; d * d * d];
    for (k, &tk) in t.iter().enumerate() {
        let idx = match case {
            BiseparableCase::I => flat_index(d, k, 0, k),
            BiseparableCase::II => flat_index(d, k, k, k),
        };
        amps[idx] = Complex64::new(tk, 0.0);
    }
    PureState::new(d, amps)
}

/// Checks a Schmidt weight vector and pads it to length `d`.
pub fn validate_spectrum(t: &[f64], d: usize) -> Result<Vec<f64>> {
    if t.len() > d {
        return Err(Error::InvalidSpectrum(format!(
            "{} coefficients for dimension {d}",
            t.len()
        )));
    }
    if t.iter().any(|&x| x.is_nan() || x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidSpectrum(
            "coefficients must be non-negative".into(),
        ));
    }
    let sq: f64 = t.iter().map(|x| x * x).sum();
    if (sq - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSpectrum(format!(
            "squared coefficients sum to {sq}, not 1"
        )));
    }
    let mut out = t.to_vec();
    out.resize(d, 0.0);
    Ok(out)
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Unit vector in `C^n` from a normalized complex Gaussian sample.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let mut v = gaussian_vector(rng, n);
        let norm = vector_norm(&v);
        if norm > 1e-12 {
            v.iter_mut().for_each(|a| *a /= norm);
            return v;
        }
    }
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<PureState> {
    check_dim(d)?;
    PureState::new(d, random_unit_vector(rng, d * d * d))
}

/// Product of a random one-party state on the isolated party of `bip` and a
/// random (generally entangled) state on the remaining pair.
pub fn random_biseparable<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    bip: Bipartition,
) -> Result<PureState> {
    check_dim(d)?;
    let single = random_unit_vector(rng, d);
    let pair = random_unit_vector(rng, d * d);
    let f = bip.party();
    let (g, h) = bip.others();
    let mut amps = vec![ZERO; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let idx = [a, b, c];
                amps[flat_index(d, a, b, c)] = single[idx[f]] * pair[idx[g] * d + idx[h]];
            }
        }
    }
    PureState::normalized(d, amps)
}

/// Unitary from Gram-Schmidt orthonormalization of a complex Gaussian matrix
/// (Haar distributed).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..d).map(|_| gaussian_vector(rng, d)).collect();
        let mut ok = true;
        for j in 0..d {
            // Two passes of modified Gram-Schmidt for orthogonality to ~1e-15.
            for _ in 0..2 {
                for k in 0..j {
                    let proj: Complex64 = cols[k]
                        .iter()
                        .zip(&cols[j])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    let (done, rest) = cols.split_at_mut(j);
                    for (x, y) in rest[0].iter_mut().zip(&done[k]) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = vector_norm(&cols[j]);
            if norm < 1e-10 {
                ok = false;
                break;
            }
            cols[j].iter_mut().for_each(|x| *x /= norm);
        }
        if ok {
            return ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]);
        }
    }
}

/// Random `n x n` density matrix `G G^† / tr(G G^†)` with `G` complex Gaussian
/// (Hilbert-Schmidt measure).
pub fn random_local_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_vec(n, n, gaussian_vector(rng, n * n)).expect("finite sample");
    let p = g.matmul(&g.dagger());
    let tr = p.trace().re;
    let mut rho = p.scale_real(1.0 / tr);
    // Exact Hermiticity after rounding.
    for i in 0..n {
        rho[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            rho[(j, i)] = rho[(i, j)].conj();
        }
    }
    rho
}

pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<DensityMatrix> {
    check_dim(d)?;
    Ok(DensityMatrix {
        d,
        matrix: random_local_density(rng, d * d * d),
    })
}

/// `rho_1 (x) rho_2 (x) rho_3` with independent random one-party states.
pub fn random_product_mixed<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<DensityMatrix> {
    check_dim(d)?;
    let a = random_local_density(rng, d);
    let b = random_local_density(rng, d);
    let c = random_local_density(rng, d);
    Ok(DensityMatrix {
        d,
        matrix: a.kron(&b).kron(&c),
    })
}

pub(crate) fn flat_index(d: usize, a: usize, b: usize, c: usize) -> usize {
    (a * d + b) * d + c
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

fn local_operator(d: usize, u: [&ComplexMatrix; 3]) -> Result<ComplexMatrix> {
    for m in u {
        if m.rows() != d || m.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "local operator must be {d}x{d}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(u[0].kron(u[1]).kron(u[2]))
}
