//! Multiparty correlation measures and their monogamy scores.
//!
//! Every score here is anchored at a nodal qubit: `whole` is the measure
//! across `nodal : rest`, `parts` are the measures on the reduced states of
//! `(nodal, i)` for every other qubit `i` in ascending order.

mod correlations;
mod optimizer;

use serde::Serialize;

pub use correlations::{
    conditional_entropy, dephased_entropy, quantum_discord, quantum_discord_with, work_deficit,
    work_deficit_with, Optimized, Party, DEGENERATE_MUTUAL_INFO,
};
pub use optimizer::{minimize_direction, MeasurementDirection, Minimum, OptimizerConfig};

use crate::error::{domain, Error, Result};
use crate::numerics::{binary_entropy, hermitian_eigen, singular_values, ComplexMatrix};
use crate::qstate::{
    marginal_max_eigenvalue, schmidt_lambda1, Bipartition, DensityMatrix, PureState,
};
use crate::scalar::{czero, Cplx, Real};

/// Which side of each nodal pair is measured in discord and work deficit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Arrow {
    /// Measure the nodal qubit.
    Forward,
    /// Measure the partner qubit.
    Backward,
}

impl Arrow {
    fn measured_party(self) -> Party {
        match self {
            Arrow::Forward => Party::First,
            Arrow::Backward => Party::Second,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonogamyScore<T> {
    pub whole: T,
    pub parts: Vec<T>,
    pub score: T,
    /// False if any optimized part hit the iteration cap.
    pub converged: bool,
}

impl<T: Real> MonogamyScore<T> {
    fn new(whole: T, parts: Vec<T>, converged: bool) -> Self {
        let score = parts.iter().fold(whole, |acc, &p| acc - p);
        Self {
            whole,
            parts,
            score,
            converged,
        }
    }
}

fn check_score_input<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<()> {
    if psi.n_qubits() < 2 {
        return Err(domain!("monogamy scores need at least two qubits"));
    }
    if nodal >= psi.n_qubits() {
        return Err(domain!("nodal qubit {nodal} out of range"));
    }
    Ok(())
}

/// Generalized geometric measure `1 − max λ_{A:B}` over all cuts.
pub fn ggm<T: Real>(psi: &PureState<T>) -> Result<T> {
    if psi.n_qubits() < 2 {
        return Err(domain!("GGM needs at least two qubits"));
    }
    let mut best = T::zero();
    for bp in Bipartition::all_distinct(psi.n_qubits()) {
        best = best.max(marginal_max_eigenvalue(psi, &bp)?);
    }
    Ok((T::one() - best).max(T::zero()))
}

/// `σ_y ⊗ σ_y` acting on a two-qubit column: `Y|ab⟩ = −(−1)^{a+b}|āb̄⟩`.
#[inline]
fn spin_flip_sign(index: usize) -> f64 {
    if index == 0 || index == 3 {
        -1.0
    } else {
        1.0
    }
}

/// Wootters concurrence from any factor `W` with `ρ = W W†` (4 rows):
/// the λᵢ are the singular values of `Wᵀ (σ_y⊗σ_y) W`.
fn concurrence_from_factor<T: Real>(w: &ComplexMatrix<T>) -> Result<T> {
    let k = w.cols();
    let mut tau = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let mut acc = czero::<T>();
            for r in 0..4 {
                acc = acc + w[(r, i)] * w[(3 - r, j)] * T::lit(spin_flip_sign(3 - r));
            }
            tau[(i, j)] = acc;
            tau[(j, i)] = acc;
        }
    }
    let sv = singular_values(&tau)?;
    let v = sv.values();
    let rest = v.iter().skip(1).fold(T::zero(), |a, &b| a + b);
    Ok((v[0] - rest).max(T::zero()).min(T::one()))
}

/// Thin LQ factor of a 4×K matrix by twice-iterated Gram–Schmidt on its rows,
/// returning the lower-triangular `L` with `W W† = L L†`.
fn row_compress<T: Real>(w: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (m, k) = (w.rows(), w.cols());
    if k <= m {
        return w.clone();
    }
    let mut q: Vec<Vec<Cplx<T>>> = Vec::with_capacity(m);
    let mut l = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        let mut v: Vec<Cplx<T>> = (0..k).map(|c| w[(i, c)]).collect();
        for _ in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let proj = qj
                    .iter()
                    .zip(&v)
                    .fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * b);
                l[(i, j)] = l[(i, j)] + proj;
                for (x, y) in v.iter_mut().zip(qj) {
                    *x = *x - *y * proj;
                }
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        l[(i, i)] = Cplx::new(norm, T::zero());
        if norm > T::zero() {
            for x in &mut v {
                *x = *x / norm;
            }
        }
        q.push(v);
    }
    l
}

/// Relative cutoff below which eigenvalues are dropped when factoring a
/// density matrix for the concurrence.
const FACTOR_CUTOFF: f64 = 1e-14;

/// Wootters concurrence of a two-qubit state.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    rho.require_two_qubits()?;
    let (spectrum, vectors) = hermitian_eigen(rho.matrix())?;
    let values = spectrum.values();
    if values.iter().any(|&v| v < -T::tol(1e-8)) {
        return Err(Error::Numerical(
            "density matrix has a significantly negative eigenvalue".into(),
        ));
    }
    let cutoff = T::tol(FACTOR_CUTOFF) * values[0].max(T::zero());
    let kept: Vec<usize> = (0..4).filter(|&i| values[i] > cutoff).collect();
    if kept.is_empty() {
        return Err(Error::Numerical("zero density matrix".into()));
    }
    let mut w = ComplexMatrix::zeros(4, kept.len());
    for (c, &i) in kept.iter().enumerate() {
        let s = values[i].sqrt();
        for r in 0..4 {
            w[(r, c)] = vectors[(r, i)] * s;
        }
    }
    concurrence_from_factor(&w)
}

/// Concurrence of the `(first, second)` reduced state of a pure state,
/// factored straight from the amplitudes.
pub fn pair_concurrence<T: Real>(psi: &PureState<T>, first: usize, second: usize) -> Result<T> {
    if first == second {
        return Err(domain!("pair needs two distinct qubits"));
    }
    let w = psi.reshape(&[first, second])?;
    concurrence_from_factor(&row_compress(&w))
}

/// `C²(nodal : rest) = 4 λ₁ (1 − λ₁)` for a pure state.
pub fn concurrence_sq_one_vs_rest<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<T> {
    let l = schmidt_lambda1(psi, nodal)?;
    Ok((T::lit(4.0) * l * (T::one() - l))
        .max(T::zero())
        .min(T::one()))
}

/// Squared-concurrence monogamy score (the N-tangle).
pub fn tangle_score<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<MonogamyScore<T>> {
    check_score_input(psi, nodal)?;
    let whole = concurrence_sq_one_vs_rest(psi, nodal)?;
    let parts = (0..psi.n_qubits())
        .filter(|&i| i != nodal)
        .map(|i| pair_concurrence(psi, nodal, i).map(|c| c * c))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonogamyScore::new(whole, parts, true))
}

/// Von Neumann entropy of the nodal marginal, `H(λ₁)`.
pub fn nodal_entropy<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<T> {
    binary_entropy(schmidt_lambda1(psi, nodal)?)
}

fn optimized_score<T: Real>(
    psi: &PureState<T>,
    nodal: usize,
    pair_measure: impl Fn(&DensityMatrix<T>) -> Result<Optimized<T>>,
) -> Result<MonogamyScore<T>> {
    check_score_input(psi, nodal)?;
    let whole = nodal_entropy(psi, nodal)?;
    let mut converged = true;
    let mut parts = Vec::with_capacity(psi.n_qubits() - 1);
    for i in (0..psi.n_qubits()).filter(|&i| i != nodal) {
        let r = pair_measure(&psi.pair_state(nodal, i)?)?;
        converged &= r.converged;
        parts.push(r.value);
    }
    Ok(MonogamyScore::new(whole, parts, converged))
}

/// Quantum discord monogamy score; the `nodal : rest` term is `S(ρ_nodal)`.
pub fn discord_score<T: Real>(
    psi: &PureState<T>,
    nodal: usize,
    arrow: Arrow,
) -> Result<MonogamyScore<T>> {
    optimized_score(psi, nodal, |rho| {
        quantum_discord(rho, arrow.measured_party())
    })
}

/// Quantum work-deficit monogamy score; the `nodal : rest` term is `S(ρ_nodal)`.
pub fn work_deficit_score<T: Real>(
    psi: &PureState<T>,
    nodal: usize,
    arrow: Arrow,
) -> Result<MonogamyScore<T>> {
    optimized_score(psi, nodal, |rho| work_deficit(rho, arrow.measured_party()))
}
