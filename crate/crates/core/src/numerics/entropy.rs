use crate::error::{contract, domain, Result};
use crate::numerics::eigen::hermitian_eigenvalues;
use crate::numerics::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Eigenvalues below this are treated as exact zeros in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;
/// Largest negativity tolerated in a density spectrum before it is an error.
pub const NEGATIVITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-12;

#[inline]
fn xlog2x<T: Real>(x: T) -> T {
    if x <= T::lit(ENTROPY_CUTOFF) {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy<T: Real>(p: T) -> Result<T> {
    let tol = T::tol(PROBABILITY_TOL);
    if !(p >= -tol && p <= T::one() + tol) {
        return Err(domain!("probability {p} outside [0, 1]"));
    }
    let p = p.max(T::zero()).min(T::one());
    Ok(-(xlog2x(p) + xlog2x(T::one() - p)))
}

/// `-Σ λ log₂ λ` over a probability-like spectrum.
///
/// Values within `NEGATIVITY_TOL` below zero are clamped; anything more
/// negative is rejected.
pub fn spectral_entropy<T: Real>(values: &[T]) -> Result<T> {
    let neg = T::tol(NEGATIVITY_TOL);
    let mut acc = T::zero();
    for &v in values {
        if v < -neg {
            return Err(contract!("eigenvalue {v} is significantly negative"));
        }
        acc = acc - xlog2x(v.max(T::zero()));
    }
    Ok(acc.max(T::zero()))
}

/// Same as [`spectral_entropy`] without validation, for hot loops on
/// spectra that are known to be nonnegative up to round-off.
#[inline]
pub(crate) fn spectral_entropy_unchecked<T: Real>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, &v| acc - xlog2x(v))
}

/// Von Neumann entropy in bits of a unit-trace Hermitian matrix.
pub fn von_neumann_entropy<T: Real>(rho: &ComplexMatrix<T>) -> Result<T> {
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > T::tol(TRACE_TOL) || tr.im.abs() > T::tol(TRACE_TOL) {
        return Err(contract!("density matrix trace is {tr}, expected 1"));
    }
    let spectrum = hermitian_eigenvalues(rho)?;
    spectral_entropy(spectrum.values())
}
