//! State families and seeded samplers.
//!
//! Samplers draw from a caller-provided RNG. Batch code derives one ChaCha
//! stream per sample from `(master seed, sample index)` via [`sample_stream`],
//! so serial and parallel runs generate identical states.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::ComplexMatrix;
use crate::qstate::PureState;
use crate::scalar::{cplx, czero, Cplx, Real};

/// RNG stream for sample `index` under `seed`.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cplx<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    cplx(T::lit(re), T::lit(im))
}

fn check_n(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(domain!("{what} needs at least {min} qubits, got {n}"));
    }
    Ok(())
}

/// `√λ |0…0⟩ + √(1−λ) e^{iφ} |1…1⟩`, parameterized by the marginal eigenvalue `λ ∈ [1/2, 1]`.
pub fn gghz<T: Real>(n: usize, lambda: T, phi: T) -> Result<PureState<T>> {
    check_n(n, 2, "gGHZ")?;
    if !(lambda >= T::lit(0.5) && lambda <= T::one()) {
        return Err(domain!("gGHZ lambda {lambda} outside [1/2, 1]"));
    }
    let mut amps = vec![czero(); 1 << n];
    amps[0] = cplx(lambda.sqrt(), T::zero());
    let (s, c) = phi.sin_cos();
    amps[(1 << n) - 1] = cplx(c, s) * (T::one() - lambda).sqrt();
    PureState::normalized(n, amps)
}

/// `(|0…0⟩ + |11⟩ ⊗ (β|0…0⟩ + √(1−β²) e^{iθ}|1…1⟩)) / √2`.
pub fn sghz<T: Real>(n: usize, beta: T, theta: T) -> Result<PureState<T>> {
    check_n(n, 3, "sGHZ")?;
    if !(beta >= T::zero() && beta <= T::one()) {
        return Err(domain!("sGHZ beta {beta} outside [0, 1]"));
    }
    let h = T::FRAC_1_SQRT_2();
    let mut amps = vec![czero(); 1 << n];
    amps[0] = cplx(h, T::zero());
    amps[3 << (n - 2)] = amps[3 << (n - 2)] + cplx(beta * h, T::zero());
    let (s, c) = theta.sin_cos();
    let tail = (T::one() - beta * beta).max(T::zero()).sqrt() * h;
    amps[(1 << n) - 1] = amps[(1 << n) - 1] + cplx(c, s) * tail;
    PureState::normalized(n, amps)
}

pub fn ghz<T: Real>(n: usize) -> Result<PureState<T>> {
    gghz(n, T::lit(0.5), T::zero())
}

/// `(|0…01⟩ + |0…10⟩ + … + |10…0⟩) / √N`.
pub fn w_state<T: Real>(n: usize) -> Result<PureState<T>> {
    check_n(n, 2, "W state")?;
    let mut amps = vec![czero(); 1 << n];
    for q in 0..n {
        amps[1 << q] = cplx(T::one(), T::zero());
    }
    PureState::normalized(n, amps)
}

/// Haar-random pure state: normalized i.i.d. complex Gaussian amplitudes.
pub fn haar_random<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState<T>> {
    check_n(n, 1, "Haar sampling")?;
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    PureState::normalized(n, amps)
}

/// Generic three-qubit state; the W class has measure zero, so Haar samples
/// are GHZ class with probability one.
pub fn ghz_class_random<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Result<PureState<T>> {
    haar_random(3, rng)
}

/// Uniform unit vector in `span{|000⟩, |001⟩, |010⟩, |100⟩}`.
pub fn w_class_random<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Result<PureState<T>> {
    let mut amps = vec![czero(); 8];
    for idx in [0usize, 1, 2, 4] {
        amps[idx] = gaussian(rng);
    }
    PureState::normalized(3, amps)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expands Dicke-basis coefficients `c_k` (k = number of ones) into the full register.
pub fn from_dicke_coefficients<T: Real>(n: usize, coeffs: &[Cplx<T>]) -> Result<PureState<T>> {
    if coeffs.len() != n + 1 {
        return Err(domain!(
            "{} Dicke coefficients for {n} qubits",
            coeffs.len()
        ));
    }
    let scale: Vec<T> = (0..=n).map(|k| T::lit(binomial(n, k)).sqrt()).collect();
    let amps = (0..1usize << n)
        .map(|idx| {
            let k = idx.count_ones() as usize;
            coeffs[k] / scale[k]
        })
        .collect();
    PureState::normalized(n, amps)
}

/// Uniform unit vector in the permutation-symmetric subspace.
pub fn symmetric_random<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState<T>> {
    check_n(n, 2, "symmetric sampling")?;
    let coeffs: Vec<Cplx<T>> = (0..=n).map(|_| gaussian(rng)).collect();
    from_dicke_coefficients(n, &coeffs)
}

/// Haar-random `dim × dim` unitary (Gram–Schmidt of a Ginibre matrix).
pub fn random_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<Cplx<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Cplx<T>> = (0..dim).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj = q
                    .iter()
                    .zip(&v)
                    .fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * b);
                for (x, y) in v.iter_mut().zip(q) {
                    *x = *x - *y * proj;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm > T::lit(1e-6) {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            u[(r, c)] = z;
        }
    }
    u
}

/// Every state family and sampler class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Gghz,
    Sghz,
    Ghz3,
    W3,
    Haar,
    WClass,
    Symmetric,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Gghz => "gghz",
            FamilyKind::Sghz => "sghz",
            FamilyKind::Ghz3 => "ghz3",
            FamilyKind::W3 => "w3",
            FamilyKind::Haar => "haar",
            FamilyKind::WClass => "w_class",
            FamilyKind::Symmetric => "symmetric",
        }
    }

    pub fn is_sampler(self) -> bool {
        matches!(
            self,
            FamilyKind::Ghz3 | FamilyKind::Haar | FamilyKind::WClass | FamilyKind::Symmetric
        )
    }

    /// Draws one state of a sampler class.
    pub fn sample<T: Real, R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<PureState<T>> {
        let three = |n: usize| {
            if n != 3 {
                Err(domain!(
                    "{} is a three-qubit class, got n = {n}",
                    self.name()
                ))
            } else {
                Ok(())
            }
        };
        match self {
            FamilyKind::Haar => haar_random(n, rng),
            FamilyKind::Ghz3 => three(n).and_then(|_| ghz_class_random(rng)),
            FamilyKind::WClass => three(n).and_then(|_| w_class_random(rng)),
            FamilyKind::Symmetric => symmetric_random(n, rng),
            other => Err(domain!(
                "{} is a parametric family, not a sampler",
                other.name()
            )),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gghz" => FamilyKind::Gghz,
            "sghz" => FamilyKind::Sghz,
            "ghz3" | "ghz" => FamilyKind::Ghz3,
            "w3" => FamilyKind::W3,
            "haar" => FamilyKind::Haar,
            "w_class" | "w-class" | "wclass" => FamilyKind::WClass,
            "symmetric" | "sym" => FamilyKind::Symmetric,
            _ => return Err(domain!("unknown family `{s}`")),
        })
    }
}

/// A family or sampler together with its parameters, for provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n_qubits: usize,
    /// Named parameters, in the order they are reported.
    pub params: Vec<(String, f64)>,
    /// Master seed for samplers.
    pub seed: Option<u64>,
}

impl FamilySpec {
    pub fn gghz(n: usize, lambda: f64, phi: f64) -> Self {
        let params = vec![
            ("lambda".into(), lambda),
            ("amplitude".into(), lambda.sqrt()),
            ("phi".into(), phi),
        ];
        Self {
            kind: FamilyKind::Gghz,
            n_qubits: n,
            params,
            seed: None,
        }
    }

    pub fn sghz(n: usize, beta: f64, theta: f64) -> Self {
        let params = vec![("beta".into(), beta), ("theta".into(), theta)];
        Self {
            kind: FamilyKind::Sghz,
            n_qubits: n,
            params,
            seed: None,
        }
    }

    pub fn sampler(kind: FamilyKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n_qubits: n,
            params: Vec::new(),
            seed: Some(seed),
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    /// Builds the state; sampler kinds draw sample `index` of the seeded stream.
    pub fn build<T: Real>(&self, index: u64) -> Result<PureState<T>> {
        let p = |name: &str| {
            self.param(name)
                .ok_or_else(|| domain!("missing parameter `{name}`"))
        };
        match self.kind {
            FamilyKind::Gghz => gghz(
                self.n_qubits,
                T::lit(p("lambda")?),
                T::lit(self.param("phi").unwrap_or(0.0)),
            ),
            FamilyKind::Sghz => sghz(
                self.n_qubits,
                T::lit(p("beta")?),
                T::lit(self.param("theta").unwrap_or(0.0)),
            ),
            FamilyKind::W3 => w_state(3),
            k => {
                let seed = self
                    .seed
                    .ok_or_else(|| domain!("sampler `{k}` needs a seed"))?;
                k.sample(self.n_qubits, &mut sample_stream(seed, index))
            }
        }
    }
}
