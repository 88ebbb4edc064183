//! CHSH violation through the Horodecki criterion, the Bell-violation
//! parameter, and its monogamy score.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{hermitian_eigenvalues, ComplexMatrix};
use crate::qstate::{pauli_correlator, schmidt_lambda1, DensityMatrix, PureState};
use crate::scalar::{cplx, czero, Real};

/// `M ≤ 1 + M_SLACK` counts as no violation.
pub const M_SLACK: f64 = 1e-10;
/// A Bell-violation value above this is "nonzero" for monogamy counting and
/// for the non-distributive filter.
pub const NONZERO_BV: f64 = 1e-9;

/// The 3×3 matrix of Pauli correlators `t_nm = Tr(ρ σ_n ⊗ σ_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix<T> {
    pub t: [[T; 3]; 3],
}

impl<T: Real> CorrelationMatrix<T> {
    /// Eigenvalues of `TᵀT`, descending.
    pub fn gram_eigenvalues(&self) -> Result<[T; 3]> {
        let mut g = [T::zero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                g[3 * i + j] = (0..3).fold(T::zero(), |acc, k| acc + self.t[k][i] * self.t[k][j]);
            }
        }
        let ev = hermitian_eigenvalues(&ComplexMatrix::from_real(3, 3, &g)?)?;
        let v = ev.values();
        Ok([v[0], v[1], v[2]])
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.t;
        for (i, row) in t.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.t[j][i];
            }
        }
        Self { t }
    }
}

pub fn correlation_matrix<T: Real>(rho: &DensityMatrix<T>) -> Result<CorrelationMatrix<T>> {
    rho.require_two_qubits()?;
    let mut t = [[T::zero(); 3]; 3];
    for (n, row) in t.iter_mut().enumerate() {
        for (m, x) in row.iter_mut().enumerate() {
            *x = pauli_correlator(rho, n + 1, m + 1)?;
        }
    }
    Ok(CorrelationMatrix { t })
}

/// Sum of the two largest eigenvalues of `TᵀT`; the optimal CHSH value is `2√M`.
pub fn m_value<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let ev = correlation_matrix(rho)?.gram_eigenvalues()?;
    Ok((ev[0] + ev[1]).max(T::zero()))
}

/// `max(2√M − 2, 0)`, with `M ≤ 1 + M_SLACK` mapped to exactly zero.
pub fn bv_from_m<T: Real>(m: T) -> T {
    if m <= T::one() + T::tol(M_SLACK) {
        T::zero()
    } else {
        T::lit(2.0) * m.sqrt() - T::lit(2.0)
    }
}

pub fn bv<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(bv_from_m(m_value(rho)?))
}

/// Bell violation of a pure state across a cut with Schmidt eigenvalue `lambda1`.
#[inline]
pub fn bv_from_schmidt<T: Real>(lambda1: T) -> T {
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    (two * (T::one() + four * lambda1 * (T::one() - lambda1)).sqrt() - two).max(T::zero())
}

/// `BV` across `nodal : rest` of a pure state, from its Schmidt coefficient.
pub fn bv_one_vs_rest<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<T> {
    Ok(bv_from_schmidt(schmidt_lambda1(psi, nodal)?))
}

/// Two-qubit state `√λ|00⟩ + √(1−λ)|11⟩` carrying the `nodal : rest`
/// Schmidt coefficients of `psi`.
pub fn schmidt_effective_state<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<PureState<T>> {
    let lambda = schmidt_lambda1(psi, nodal)?;
    let mut amps = vec![czero(); 4];
    amps[0] = cplx(lambda.sqrt(), T::zero());
    amps[3] = cplx((T::one() - lambda).max(T::zero()).sqrt(), T::zero());
    PureState::normalized(2, amps)
}

/// `BV` across `nodal : rest` computed by embedding the rest as one logical qubit.
pub fn bv_one_vs_rest_embedded<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<T> {
    bv(&schmidt_effective_state(psi, nodal)?.density())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellScores<T> {
    pub bv_one_vs_rest: T,
    /// `(partner, BV of the nodal–partner reduced state)`, partners ascending.
    pub bv_pairs: Vec<(usize, T)>,
    pub delta_bv: T,
}

impl<T: Real> BellScores<T> {
    pub fn pair_sum(&self) -> T {
        self.bv_pairs.iter().fold(T::zero(), |acc, &(_, v)| acc + v)
    }

    /// Number of pair values above [`NONZERO_BV`].
    pub fn violating_pairs(&self) -> usize {
        self.bv_pairs
            .iter()
            .filter(|(_, v)| *v > T::lit(NONZERO_BV))
            .count()
    }

    pub fn max_pair(&self) -> T {
        self.bv_pairs
            .iter()
            .fold(T::zero(), |acc, &(_, v)| acc.max(v))
    }
}

/// Bell-violation monogamy score `BV(nodal:rest) − Σ_i BV(nodal, i)`.
pub fn bell_scores<T: Real>(psi: &PureState<T>, nodal: usize) -> Result<BellScores<T>> {
    let n = psi.n_qubits();
    if n < 2 {
        return Err(domain!("Bell scores need at least two qubits"));
    }
    if nodal >= n {
        return Err(domain!("nodal qubit {nodal} out of range for {n} qubits"));
    }
    let whole = bv_one_vs_rest(psi, nodal)?;
    let bv_pairs = (0..n)
        .filter(|&i| i != nodal)
        .map(|i| Ok((i, bv(&psi.pair_state(nodal, i)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut scores = BellScores {
        bv_one_vs_rest: whole,
        bv_pairs,
        delta_bv: T::zero(),
    };
    scores.delta_bv = whole - scores.pair_sum();
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cplx;
    use approx::assert_abs_diff_eq;

    fn from_real(n: usize, amps: &[(usize, f64)]) -> PureState<f64> {
        let mut v = vec![Cplx::new(0.0, 0.0); 1 << n];
        for &(i, a) in amps {
            v[i] = Cplx::new(a, 0.0);
        }
        PureState::normalized(n, v).unwrap()
    }

    const MAX_BV: f64 = 0.828_427_124_746_190_1; // 2√2 − 2

    /// Brute-force correlators `⟨ψ|σ_n ⊗ σ_m|ψ⟩` straight from amplitudes.
    fn brute_correlator(psi: &PureState<f64>, n: usize, m: usize) -> f64 {
        let op = crate::qstate::pauli::<f64>(n)
            .unwrap()
            .kron(&crate::qstate::pauli(m).unwrap());
        let a = psi.amplitudes();
        let mut acc = Cplx::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                acc += a[r].conj() * op[(r, c)] * a[c];
            }
        }
        acc.re
    }

    #[test]
    fn psi_minus_correlations_and_m() {
        let psi = from_real(2, &[(0, 1.0), (3, -1.0)]);
        let t = correlation_matrix(&psi.density()).unwrap();
        for n in 0..3 {
            for m in 0..3 {
                assert_abs_diff_eq!(
                    t.t[n][m],
                    brute_correlator(&psi, n + 1, m + 1),
                    epsilon = 1e-15
                );
            }
        }
        assert_abs_diff_eq!(t.t[0][0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.t[1][1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.t[2][2], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m_value(&psi.density()).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bv(&psi.density()).unwrap(), MAX_BV, epsilon = 1e-12);
    }

    #[test]
    fn maximally_mixed_and_product() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        assert_eq!(correlation_matrix(&mixed).unwrap().t, [[0.0; 3]; 3]);
        assert_eq!(m_value(&mixed).unwrap(), 0.0);
        let prod = PureState::<f64>::basis(2, 0).unwrap().density();
        assert_abs_diff_eq!(m_value(&prod).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(bv(&prod).unwrap(), 0.0);
    }

    #[test]
    fn ghz_pair_has_m_one() {
        let ghz = from_real(3, &[(0, 1.0), (7, 1.0)]);
        let rho = ghz.partial_trace(&[0, 1]).unwrap();
        let t = correlation_matrix(&rho).unwrap();
        assert_abs_diff_eq!(t.t[2][2], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.t[0][0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m_value(&rho).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(bv(&rho).unwrap(), 0.0);
    }

    #[test]
    fn one_vs_rest_values() {
        let ghz = from_real(4, &[(0, 1.0), (15, 1.0)]);
        assert_abs_diff_eq!(bv_one_vs_rest(&ghz, 0).unwrap(), MAX_BV, epsilon = 1e-14);
        assert_eq!(
            bv_one_vs_rest(&PureState::<f64>::basis(3, 2).unwrap(), 1).unwrap(),
            0.0
        );
        let g = from_real(3, &[(0, 0.9f64.sqrt()), (7, 0.1f64.sqrt())]);
        assert_abs_diff_eq!(
            bv_one_vs_rest(&g, 0).unwrap(),
            2.0 * 1.36f64.sqrt() - 2.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            bv_one_vs_rest(&g, 0).unwrap(),
            0.332_380_757_938_12,
            epsilon = 1e-12
        );
    }

    #[test]
    fn embedded_path_matches_formula_on_two_qubits() {
        let psi = from_real(2, &[(0, 0.3), (1, -0.4), (2, 0.1), (3, 0.8)]);
        let direct = bv(&psi.density()).unwrap();
        assert_abs_diff_eq!(bv_one_vs_rest(&psi, 0).unwrap(), direct, epsilon = 1e-12);
        assert_abs_diff_eq!(
            bv_one_vs_rest_embedded(&psi, 0).unwrap(),
            direct,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            bv_one_vs_rest_embedded(&psi, 1).unwrap(),
            direct,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gghz_scores() {
        for &lam in &[0.5, 0.62, 0.8, 0.97, 1.0] {
            let psi = from_real(3, &[(0, f64::sqrt(lam)), (7, f64::sqrt(1.0 - lam))]);
            let s = bell_scores(&psi, 0).unwrap();
            assert!(s.bv_pairs.iter().all(|&(_, v)| v == 0.0));
            let expect = 2.0 * (1.0 + 4.0 * lam * (1.0 - lam)).sqrt() - 2.0;
            assert_abs_diff_eq!(s.delta_bv, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_tensor_bell_scores() {
        // |0⟩ ⊗ (|00⟩ + |11⟩)/√2 with nodal qubit 1
        let psi = from_real(3, &[(0, 1.0), (3, 1.0)]);
        let s = bell_scores(&psi, 1).unwrap();
        assert_abs_diff_eq!(s.bv_one_vs_rest, MAX_BV, epsilon = 1e-12);
        assert_eq!(s.bv_pairs[0], (0, 0.0));
        assert_abs_diff_eq!(s.bv_pairs[1].1, MAX_BV, epsilon = 1e-12);
        assert_abs_diff_eq!(s.delta_bv, 0.0, epsilon = 1e-12);
        // nodal qubit 0 is unentangled
        let s0 = bell_scores(&psi, 0).unwrap();
        assert_abs_diff_eq!(s0.bv_one_vs_rest, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s0.delta_bv, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn w_state_scores() {
        let w = from_real(3, &[(1, 1.0), (2, 1.0), (4, 1.0)]);
        let rho = w.partial_trace(&[0, 1]).unwrap();
        // hand-computed correlators: t_xx = t_yy = 2/3, t_zz = -1/3
        let t = correlation_matrix(&rho).unwrap();
        assert_abs_diff_eq!(t.t[0][0], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.t[1][1], 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.t[2][2], -1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m_value(&rho).unwrap(), 8.0 / 9.0, epsilon = 1e-14);
        let s = bell_scores(&w, 0).unwrap();
        assert!(s.bv_pairs.iter().all(|&(_, v)| v == 0.0));
        let expect = 2.0 * (17.0f64 / 9.0).sqrt() - 2.0;
        assert_abs_diff_eq!(s.delta_bv, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(s.delta_bv, 0.748_737_0, epsilon = 1e-6);
    }

    #[test]
    fn two_qubit_delta_is_zero() {
        let psi = from_real(2, &[(0, 0.6), (3, 0.8)]);
        let s = bell_scores(&psi, 0).unwrap();
        assert_abs_diff_eq!(s.delta_bv, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_scores_domain() {
        assert!(bell_scores(&PureState::<f64>::basis(1, 0).unwrap(), 0).is_err());
        assert!(bell_scores(&PureState::<f64>::basis(3, 0).unwrap(), 3).is_err());
    }

    #[test]
    fn f32_bell_state() {
        let mut v = vec![Cplx::new(0.0f32, 0.0); 4];
        v[0] = Cplx::new(1.0, 0.0);
        v[3] = Cplx::new(1.0, 0.0);
        let psi = PureState::normalized(2, v).unwrap();
        assert!((m_value(&psi.density()).unwrap() - 2.0).abs() < 1e-5);
    }
}
