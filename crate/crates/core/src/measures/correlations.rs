//! Quantum discord and one-way quantum work deficit of two-qubit states,
//! optimized over rank-one projective measurements on one party.

use crate::error::{Error, Result};
use crate::measures::optimizer::{minimize_direction, MeasurementDirection, OptimizerConfig};
use crate::numerics::{hermitian_2x2_eigenvalues, spectral_entropy_unchecked};
use crate::qstate::DensityMatrix;
use crate::scalar::{czero, Cplx, Real};

/// Pairs with mutual information below this are product states; both
/// measures are zero there and no optimization is run.
pub const DEGENERATE_MUTUAL_INFO: f64 = 1e-12;
/// Most negative raw value accepted before clamping to zero.
const NEGATIVE_SLACK: f64 = 1e-6;

/// Which party of a two-qubit state is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    First,
    Second,
}

/// An optimized quantity and whether the optimizer converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimized<T> {
    pub value: T,
    pub direction: Option<MeasurementDirection<T>>,
    pub converged: bool,
}

/// Density matrix entries reordered so the measured party is the second index.
struct Oriented<T> {
    m: [[Cplx<T>; 4]; 4],
}

impl<T: Real> Oriented<T> {
    fn new(rho: &DensityMatrix<T>, party: Party) -> Result<Self> {
        rho.require_two_qubits()?;
        let map = |i: usize| match party {
            Party::Second => i,
            Party::First => ((i & 1) << 1) | (i >> 1),
        };
        let mut m = [[czero(); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = rho.get(map(r), map(c));
            }
        }
        Ok(Self { m })
    }

    /// Eigenvalues of the two unnormalized post-measurement blocks of the
    /// unmeasured party, `⟨m_k| ρ |m_k⟩`, and their weights.
    fn blocks(&self, dir: &MeasurementDirection<T>) -> [(T, T, T); 2] {
        let kets = dir.kets();
        let mut out = [(T::zero(), T::zero(), T::zero()); 2];
        for (k, ket) in kets.iter().enumerate() {
            let mut blk = [[czero::<T>(); 2]; 2];
            for (a, row) in blk.iter_mut().enumerate() {
                for (a2, x) in row.iter_mut().enumerate() {
                    let mut acc = czero::<T>();
                    for b in 0..2 {
                        for b2 in 0..2 {
                            acc = acc + ket[b].conj() * self.m[2 * a + b][2 * a2 + b2] * ket[b2];
                        }
                    }
                    *x = acc;
                }
            }
            let (hi, lo) = hermitian_2x2_eigenvalues(blk[0][0].re, blk[1][1].re, blk[0][1]);
            out[k] = (hi, lo, blk[0][0].re + blk[1][1].re);
        }
        out
    }
}

fn xlog2x<T: Real>(x: T) -> T {
    spectral_entropy_unchecked(&[x])
}

/// Conditional entropy `Σ_k p_k S(ρ_{u|k})` of the unmeasured party after
/// measuring `party` along `dir`.
pub fn conditional_entropy<T: Real>(
    rho: &DensityMatrix<T>,
    party: Party,
    dir: &MeasurementDirection<T>,
) -> Result<T> {
    let o = Oriented::new(rho, party)?;
    Ok(conditional_entropy_oriented(&o, dir))
}

fn conditional_entropy_oriented<T: Real>(o: &Oriented<T>, dir: &MeasurementDirection<T>) -> T {
    let [b0, b1] = o.blocks(dir);
    spectral_entropy_unchecked(&[b0.0, b0.1, b1.0, b1.1]) - xlog2x(b0.2) - xlog2x(b1.2)
}

/// Entropy of the state dephased by the measurement of `party` along `dir`.
pub fn dephased_entropy<T: Real>(
    rho: &DensityMatrix<T>,
    party: Party,
    dir: &MeasurementDirection<T>,
) -> Result<T> {
    let o = Oriented::new(rho, party)?;
    Ok(dephased_entropy_oriented(&o, dir))
}

fn dephased_entropy_oriented<T: Real>(o: &Oriented<T>, dir: &MeasurementDirection<T>) -> T {
    let [b0, b1] = o.blocks(dir);
    spectral_entropy_unchecked(&[b0.0, b0.1, b1.0, b1.1])
}

struct Entropies<T> {
    joint: T,
    unmeasured: T,
    measured: T,
}

fn entropies<T: Real>(rho: &DensityMatrix<T>, party: Party) -> Result<Entropies<T>> {
    rho.require_two_qubits()?;
    let joint = rho.entropy()?;
    let s1 = rho.partial_trace(&[0])?.entropy()?;
    let s2 = rho.partial_trace(&[1])?.entropy()?;
    let (measured, unmeasured) = match party {
        Party::First => (s1, s2),
        Party::Second => (s2, s1),
    };
    Ok(Entropies {
        joint,
        unmeasured,
        measured,
    })
}

fn finish<T: Real>(raw: T, what: &str) -> Result<T> {
    if raw < -T::tol(NEGATIVE_SLACK) || !raw.is_finite() {
        return Err(Error::Numerical(format!("{what} evaluated to {raw}")));
    }
    Ok(raw.max(T::zero()))
}

/// Quantum discord in bits with `party` measured: `I(ρ) − J(ρ)`.
pub fn quantum_discord<T: Real>(rho: &DensityMatrix<T>, party: Party) -> Result<Optimized<T>> {
    quantum_discord_with(rho, party, &OptimizerConfig::default())
}

pub fn quantum_discord_with<T: Real>(
    rho: &DensityMatrix<T>,
    party: Party,
    cfg: &OptimizerConfig,
) -> Result<Optimized<T>> {
    let e = entropies(rho, party)?;
    let mutual = e.unmeasured + e.measured - e.joint;
    if mutual < T::tol(DEGENERATE_MUTUAL_INFO) {
        return Ok(Optimized {
            value: T::zero(),
            direction: None,
            converged: true,
        });
    }
    let o = Oriented::new(rho, party)?;
    let min = minimize_direction(
        |t, p| conditional_entropy_oriented(&o, &MeasurementDirection::new(t, p)),
        cfg,
    );
    // I − J = S(measured) − S(joint) + min conditional entropy
    let value = finish(e.measured - e.joint + min.value, "discord")?;
    Ok(Optimized {
        value,
        direction: Some(min.direction),
        converged: min.converged,
    })
}

/// One-way quantum work deficit in bits with `party` measured:
/// `min S(ρ') − S(ρ)` over dephasings `ρ'` by a projective measurement.
pub fn work_deficit<T: Real>(rho: &DensityMatrix<T>, party: Party) -> Result<Optimized<T>> {
    work_deficit_with(rho, party, &OptimizerConfig::default())
}

pub fn work_deficit_with<T: Real>(
    rho: &DensityMatrix<T>,
    party: Party,
    cfg: &OptimizerConfig,
) -> Result<Optimized<T>> {
    let e = entropies(rho, party)?;
    let mutual = e.unmeasured + e.measured - e.joint;
    if mutual < T::tol(DEGENERATE_MUTUAL_INFO) {
        return Ok(Optimized {
            value: T::zero(),
            direction: None,
            converged: true,
        });
    }
    let o = Oriented::new(rho, party)?;
    let min = minimize_direction(
        |t, p| dephased_entropy_oriented(&o, &MeasurementDirection::new(t, p)),
        cfg,
    );
    let value = finish(min.value - e.joint, "work deficit")?;
    Ok(Optimized {
        value,
        direction: Some(min.direction),
        converged: min.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{binary_entropy, ComplexMatrix};
    use crate::qstate::PureState;
    use approx::assert_abs_diff_eq;

    fn from_real(n: usize, amps: &[(usize, f64)]) -> PureState<f64> {
        let mut v = vec![Cplx::new(0.0, 0.0); 1 << n];
        for &(i, a) in amps {
            v[i] = Cplx::new(a, 0.0);
        }
        PureState::normalized(n, v).unwrap()
    }

    fn bell() -> DensityMatrix<f64> {
        from_real(2, &[(0, 1.0), (3, 1.0)]).density()
    }

    #[test]
    fn bell_discord_and_wd() {
        for party in [Party::First, Party::Second] {
            assert_abs_diff_eq!(
                quantum_discord(&bell(), party).unwrap().value,
                1.0,
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(
                work_deficit(&bell(), party).unwrap().value,
                1.0,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn classical_and_product_states_vanish() {
        let a2 = 0.7;
        let classical = DensityMatrix::new(
            2,
            ComplexMatrix::from_real_diagonal(&[a2, 0.0, 0.0, 1.0 - a2]),
        )
        .unwrap();
        for party in [Party::First, Party::Second] {
            assert_abs_diff_eq!(
                quantum_discord(&classical, party).unwrap().value,
                0.0,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                work_deficit(&classical, party).unwrap().value,
                0.0,
                epsilon = 1e-12
            );
        }
        let r1 = ComplexMatrix::from_real(2, 2, &[0.6, 0.2, 0.2, 0.4]).unwrap();
        let r2 = ComplexMatrix::from_real(2, 2, &[0.9, -0.1, -0.1, 0.1]).unwrap();
        let product = DensityMatrix::new(2, r1.kron(&r2)).unwrap();
        let d = quantum_discord(&product, Party::Second).unwrap();
        assert_eq!(d.value, 0.0);
        assert!(d.direction.is_none());
        let pure_product = PureState::<f64>::basis(2, 1).unwrap().density();
        assert_eq!(
            work_deficit(&pure_product, Party::First).unwrap().value,
            0.0
        );
    }

    #[test]
    fn conditional_entropy_of_z_on_classical_state() {
        let classical =
            DensityMatrix::new(2, ComplexMatrix::from_real_diagonal(&[0.3, 0.0, 0.0, 0.7]))
                .unwrap();
        let z = MeasurementDirection::new(0.0, 0.0);
        assert_abs_diff_eq!(
            conditional_entropy(&classical, Party::Second, &z).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            dephased_entropy(&classical, Party::Second, &z).unwrap(),
            binary_entropy(0.3).unwrap(),
            epsilon = 1e-15
        );
        let x = MeasurementDirection::new(std::f64::consts::FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(
            conditional_entropy(&classical, Party::Second, &x).unwrap(),
            binary_entropy(0.3).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn pure_two_qubit_discord_equals_entanglement_entropy() {
        let psi = from_real(2, &[(0, 0.3), (1, -0.4), (2, 0.1), (3, 0.8)]);
        let s = psi.partial_trace(&[0]).unwrap().entropy().unwrap();
        for party in [Party::First, Party::Second] {
            assert_abs_diff_eq!(
                quantum_discord(&psi.density(), party).unwrap().value,
                s,
                epsilon = 1e-8
            );
            assert_abs_diff_eq!(
                work_deficit(&psi.density(), party).unwrap().value,
                s,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn refinement_never_worse_than_grid() {
        let psi = from_real(3, &[(1, 0.4), (2, 0.5), (4, 0.3), (7, 0.6)]);
        let rho = psi.pair_state(0, 2).unwrap();
        let o = Oriented::new(&rho, Party::First).unwrap();
        let m = minimize_direction(
            |t, p| conditional_entropy_oriented(&o, &MeasurementDirection::new(t, p)),
            &OptimizerConfig::default(),
        );
        assert!(m.value <= m.grid_value);
    }

    #[test]
    fn wrong_dimension_rejected() {
        let rho = PureState::<f64>::basis(3, 0).unwrap().density();
        assert!(quantum_discord(&rho, Party::First).is_err());
        assert!(work_deficit(&rho, Party::Second).is_err());
    }
}
