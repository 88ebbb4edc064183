//! Pure N-qubit states, reduced density matrices, partial traces and Pauli
//! correlators.
//!
//! Qubit 0 is the most significant bit of a basis index: for three qubits,
//! `|q0 q1 q2⟩` has index `4·q0 + 2·q1 + q2`.

use crate::error::{contract, domain, Error, Result};
use crate::numerics::{
    hermitian_eigenvalues, singular_values, spectral_entropy, ComplexMatrix, NEGATIVITY_TOL,
    TRACE_TOL,
};
use crate::scalar::{cplx, czero, Cplx, Real};

pub const NORM_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Normalized amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    n_qubits: usize,
    amplitudes: Vec<Cplx<T>>,
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain!("a state needs at least one qubit"));
    }
    if n > 24 {
        return Err(domain!("{n} qubits is beyond the dense-vector range"));
    }
    Ok(())
}

impl<T: Real> PureState<T> {
    /// Wraps amplitudes that are already normalized within `NORM_TOL`.
    pub fn new(n_qubits: usize, amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(contract!(
                "{} amplitudes given for {n_qubits} qubits (expected {})",
                amplitudes.len(),
                1usize << n_qubits
            ));
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - T::one()).abs() > T::tol(NORM_TOL) {
            return Err(contract!("state norm² is {norm}, expected 1"));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Cplx<T>>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(contract!(
                "{} amplitudes given for {n_qubits} qubits",
                amplitudes.len()
            ));
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(domain!("cannot normalize a zero or non-finite vector"));
        }
        for a in &mut amplitudes {
            *a = *a / norm;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(domain!(
                "basis index {index} out of range for {n_qubits} qubits"
            ));
        }
        let mut amps = vec![czero(); 1 << n_qubits];
        amps[index] = cplx(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes: amps,
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amplitudes)
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut amps = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for &a in &self.amplitudes {
            for &b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Self::normalized(self.n_qubits + other.n_qubits, amps)
    }

    pub fn inner(&self, other: &Self) -> Cplx<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(czero(), |acc, (a, b)| acc + a.conj() * b)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(domain!(
                "qubit index {q} out of range for {} qubits",
                self.n_qubits
            ));
        }
        Ok(())
    }

    /// Applies a 2×2 unitary to a single qubit.
    pub fn apply_single_qubit(&self, qubit: usize, u: &ComplexMatrix<T>) -> Result<Self> {
        self.check_qubit(qubit)?;
        if u.rows() != 2 || u.cols() != 2 {
            return Err(contract!("single-qubit gate must be 2x2"));
        }
        let bit = 1 << (self.n_qubits - 1 - qubit);
        let mut out = self.amplitudes.clone();
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                out[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                out[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }

    /// Relabels qubits so that new qubit `k` is old qubit `perm[k]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(domain!("{perm:?} is not a permutation of {n} qubits"));
        }
        let mut out = vec![czero(); self.amplitudes.len()];
        for (new_idx, slot) in out.iter_mut().enumerate() {
            let mut old_idx = 0;
            for (k, &p) in perm.iter().enumerate() {
                if new_idx >> (n - 1 - k) & 1 == 1 {
                    old_idx |= 1 << (n - 1 - p);
                }
            }
            *slot = self.amplitudes[old_idx];
        }
        Ok(Self {
            n_qubits: n,
            amplitudes: out,
        })
    }

    /// Amplitude matrix with rows indexed by the `rows` qubits (first listed
    /// is most significant) and columns by the remaining qubits in ascending order.
    pub fn reshape(&self, rows: &[usize]) -> Result<ComplexMatrix<T>> {
        let n = self.n_qubits;
        let mut in_rows = vec![false; n];
        for &q in rows {
            self.check_qubit(q)?;
            if std::mem::replace(&mut in_rows[q], true) {
                return Err(domain!("qubit {q} listed twice"));
            }
        }
        if rows.is_empty() {
            return Err(domain!("reshape needs at least one row qubit"));
        }
        let cols: Vec<usize> = (0..n).filter(|q| !in_rows[*q]).collect();
        let (nr, nc) = (1usize << rows.len(), 1usize << cols.len());
        let mut m = ComplexMatrix::zeros(nr, nc);
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            let bit = |q: usize| (idx >> (n - 1 - q)) & 1;
            let r = rows.iter().fold(0, |acc, &q| (acc << 1) | bit(q));
            let c = cols.iter().fold(0, |acc, &q| (acc << 1) | bit(q));
            m[(r, c)] = amp;
        }
        Ok(m)
    }

    /// Reduced state of the `keep` qubits, in ascending qubit order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let keep = sorted_keep_set(keep, self.n_qubits)?;
        self.reduced_ordered(&keep)
    }

    /// Reduced state with the listed qubits in the given order.
    pub fn reduced_ordered(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let m = self.reshape(keep)?;
        let rho = m.matmul(&m.adjoint())?;
        Ok(DensityMatrix::trusted(keep.len(), rho))
    }

    /// Two-qubit reduced state with `first` as party 1 and `second` as party 2.
    pub fn pair_state(&self, first: usize, second: usize) -> Result<DensityMatrix<T>> {
        if first == second {
            return Err(domain!("pair needs two distinct qubits"));
        }
        self.reduced_ordered(&[first, second])
    }

    /// Full projector `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::trusted(self.n_qubits, ComplexMatrix::projector(&self.amplitudes))
    }
}

fn norm_sqr<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

fn sorted_keep_set(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(domain!("keep set is empty"));
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() != keep.len() {
        return Err(domain!("keep set {keep:?} has duplicates"));
    }
    if let Some(&q) = k.iter().find(|&&q| q >= n) {
        return Err(domain!("qubit {q} out of range for {n} qubits"));
    }
    Ok(k)
}

/// Hermitian, unit-trace, positive semidefinite operator on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n_qubits: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates hermiticity, trace and spectrum.
    pub fn new(n_qubits: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(contract!(
                "{}x{} matrix for {n_qubits} qubits (expected {dim}x{dim})",
                matrix.rows(),
                matrix.cols()
            ));
        }
        if !matrix.is_hermitian(T::tol(HERMITIAN_TOL)) {
            return Err(contract!("density matrix is not Hermitian"));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(contract!("density matrix trace is {}, expected 1", tr.re));
        }
        let spectrum = hermitian_eigenvalues(&matrix)?;
        if spectrum
            .values()
            .iter()
            .any(|&v| v < -T::tol(NEGATIVITY_TOL))
        {
            return Err(contract!("density matrix has a negative eigenvalue"));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// For operators that are valid by construction (partial traces of valid states).
    pub(crate) fn trusted(n_qubits: usize, matrix: ComplexMatrix<T>) -> Self {
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let m = ComplexMatrix::identity(dim)
            .scale(cplx(T::one() / T::from_usize(dim).unwrap(), T::zero()));
        Ok(Self::trusted(n_qubits, m))
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Cplx<T> {
        self.matrix[(r, c)]
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        Ok(hermitian_eigenvalues(&self.matrix)?.into_values())
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<T> {
        spectral_entropy(&self.eigenvalues()?)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        let keep = sorted_keep_set(keep, n)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let (dk, dt) = (1usize << keep.len(), 1usize << traced.len());
        let compose = |i: usize, k: usize| {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                idx |= ((i >> (keep.len() - 1 - pos)) & 1) << (n - 1 - q);
            }
            for (pos, &q) in traced.iter().enumerate() {
                idx |= ((k >> (traced.len() - 1 - pos)) & 1) << (n - 1 - q);
            }
            idx
        };
        let mut out = ComplexMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = czero();
                for k in 0..dt {
                    acc = acc + self.matrix[(compose(i, k), compose(j, k))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self::trusted(keep.len(), out))
    }

    /// Exchanges the two parties of a two-qubit state.
    pub fn swap_parties(&self) -> Result<Self> {
        self.require_two_qubits()?;
        let s = |i: usize| ((i & 1) << 1) | (i >> 1);
        let mut out = ComplexMatrix::zeros(4, 4);
        for r in 0..4 {
            for c in 0..4 {
                out[(s(r), s(c))] = self.matrix[(r, c)];
            }
        }
        Ok(Self::trusted(2, out))
    }

    pub(crate) fn require_two_qubits(&self) -> Result<()> {
        if self.n_qubits != 2 {
            return Err(domain!(
                "expected a two-qubit state, got {} qubits",
                self.n_qubits
            ));
        }
        Ok(())
    }
}

/// Either kind of state accepted by [`partial_trace`].
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a, T> {
    Pure(&'a PureState<T>),
    Mixed(&'a DensityMatrix<T>),
}

impl<'a, T> From<&'a PureState<T>> for StateRef<'a, T> {
    fn from(s: &'a PureState<T>) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a, T> From<&'a DensityMatrix<T>> for StateRef<'a, T> {
    fn from(s: &'a DensityMatrix<T>) -> Self {
        StateRef::Mixed(s)
    }
}

/// Reduced density matrix of the `keep` qubits of a pure or mixed state.
pub fn partial_trace<'a, T: Real>(
    state: impl Into<StateRef<'a, T>>,
    keep: &[usize],
) -> Result<DensityMatrix<T>> {
    match state.into() {
        StateRef::Pure(psi) => psi.partial_trace(keep),
        StateRef::Mixed(rho) => rho.partial_trace(keep),
    }
}

/// Cut of the qubits into `part_a` and its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    n_qubits: usize,
    part_a: Vec<usize>,
}

impl Bipartition {
    pub fn new(n_qubits: usize, part_a: &[usize]) -> Result<Self> {
        let part_a = sorted_keep_set(part_a, n_qubits)?;
        if part_a.len() == n_qubits {
            return Err(domain!("part A must be a proper subset of the qubits"));
        }
        Ok(Self { n_qubits, part_a })
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    pub fn part_b(&self) -> Vec<usize> {
        (0..self.n_qubits)
            .filter(|q| !self.part_a.contains(q))
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Every cut with `|A| ≤ ⌊N/2⌋`, listing each unordered cut once
    /// (when `|A| = N/2`, only the half containing qubit 0).
    pub fn all_distinct(n_qubits: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for mask in 1usize..(1 << n_qubits) - 1 {
            let size = mask.count_ones() as usize;
            let holds_zero = mask >> (n_qubits - 1) & 1 == 1;
            if 2 * size < n_qubits || (2 * size == n_qubits && holds_zero) {
                let part_a = (0..n_qubits)
                    .filter(|q| mask >> (n_qubits - 1 - q) & 1 == 1)
                    .collect();
                out.push(Self { n_qubits, part_a });
            }
        }
        out
    }
}

/// Largest eigenvalue of either marginal across `bp`.
pub fn marginal_max_eigenvalue<T: Real>(psi: &PureState<T>, bp: &Bipartition) -> Result<T> {
    if bp.n_qubits != psi.n_qubits() {
        return Err(domain!(
            "bipartition is for {} qubits, state has {}",
            bp.n_qubits,
            psi.n_qubits()
        ));
    }
    let sv = singular_values(&psi.reshape(bp.part_a())?)?;
    Ok((sv.max() * sv.max()).min(T::one()))
}

/// Larger eigenvalue of the single-qubit marginal of `nodal`, in `[1/2, 1]`.
pub fn schmidt_lambda1<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<T> {
    if psi.n_qubits() < 2 {
        return Err(domain!("Schmidt coefficient needs at least two qubits"));
    }
    let bp = Bipartition::new(psi.n_qubits(), &[nodal])?;
    Ok(marginal_max_eigenvalue(psi, &bp)?.max(T::lit(0.5)))
}

/// Pauli matrix for axis 1 (x), 2 (y) or 3 (z).
pub fn pauli<T: Real>(axis: usize) -> Result<ComplexMatrix<T>> {
    let (o, z) = (T::one(), T::zero());
    let data = match axis {
        1 => vec![cplx(z, z), cplx(o, z), cplx(o, z), cplx(z, z)],
        2 => vec![cplx(z, z), cplx(z, -o), cplx(z, o), cplx(z, z)],
        3 => vec![cplx(o, z), cplx(z, z), cplx(z, z), cplx(-o, z)],
        _ => return Err(domain!("Pauli axis must be 1, 2 or 3, got {axis}")),
    };
    ComplexMatrix::new(2, 2, data)
}

/// `Tr(ρ σ_n ⊗ σ_m)` for a two-qubit state.
pub fn pauli_correlator<T: Real>(rho: &DensityMatrix<T>, n: usize, m: usize) -> Result<T> {
    rho.require_two_qubits()?;
    let op = pauli::<T>(n)?.kron(&pauli(m)?);
    let mut acc = czero::<T>();
    for r in 0..4 {
        for c in 0..4 {
            acc = acc + rho.get(r, c) * op[(c, r)];
        }
    }
    if acc.im.abs() > T::tol(1e-10) {
        return Err(Error::Numerical(format!(
            "correlator has imaginary part {}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Amplitudes loaded from the plain-text state format.
#[derive(Debug, Clone)]
pub struct LoadedState<T> {
    pub state: PureState<T>,
    /// Norm of the amplitudes as written, before normalization.
    pub raw_norm: T,
}

impl<T: Real> LoadedState<T> {
    /// Whether the file's norm deviated from 1 by more than `1e-6`.
    pub fn norm_warning(&self) -> bool {
        (self.raw_norm - T::one()).abs() > T::lit(1e-6)
    }
}

/// Parses `<basis-index> <re> <im>` lines; `#` starts a comment line.
///
/// When `n_qubits` is `None` the smallest register holding the largest index
/// is used (at least one qubit).
pub fn parse_state_text<T: Real>(text: &str, n_qubits: Option<usize>) -> Result<LoadedState<T>> {
    let mut entries: Vec<(usize, Cplx<T>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(domain!("line {}: expected `<index> <re> <im>`", lineno + 1));
        }
        let idx: usize = fields[0]
            .parse()
            .map_err(|_| domain!("line {}: bad basis index `{}`", lineno + 1, fields[0]))?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| domain!("line {}: bad number `{s}`", lineno + 1))
        };
        let re = parse(fields[1])?;
        let im = parse(fields[2])?;
        if entries.iter().any(|(i, _)| *i == idx) {
            return Err(domain!("line {}: basis index {idx} repeated", lineno + 1));
        }
        entries.push((idx, cplx(T::lit(re), T::lit(im))));
    }
    if entries.is_empty() {
        return Err(domain!("state file has no amplitudes"));
    }
    let max_idx = entries.iter().map(|(i, _)| *i).max().unwrap_or(0);
    let n = match n_qubits {
        Some(n) => {
            if max_idx >= 1usize.checked_shl(n as u32).unwrap_or(usize::MAX) {
                return Err(domain!("basis index {max_idx} does not fit in {n} qubits"));
            }
            n
        }
        None => (usize::BITS - max_idx.leading_zeros()).max(1) as usize,
    };
    check_qubit_count(n)?;
    let mut amps = vec![czero(); 1 << n];
    for (i, a) in entries {
        amps[i] = a;
    }
    let raw_norm = norm_sqr(&amps).sqrt();
    let state = PureState::normalized(n, amps)?;
    Ok(LoadedState { state, raw_norm })
}
