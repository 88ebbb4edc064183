//! Cyclic Jacobi eigensolver for Hermitian matrices and one-sided Jacobi SVD.
//!
//! Both routines reduce every step to the same 2×2 Hermitian rotation, which
//! is accurate to a few ulp for the dimensions used here (at most 2^10).

use crate::error::{contract, Error, Result};
use crate::numerics::matrix::{ComplexMatrix, Spectrum};
use crate::scalar::{Cplx, Real};

const MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-12;

/// Unitary rotation `J = [[c, s], [-s·conj(e), c·conj(e)]]` diagonalizing
/// `[[a, g], [conj(g), b]]` via `J† H J`, where `e = g / |g|`.
#[derive(Clone, Copy)]
struct Rotation<T> {
    pp: Cplx<T>,
    pq: Cplx<T>,
    qp: Cplx<T>,
    qq: Cplx<T>,
}

impl<T: Real> Rotation<T> {
    fn new(a: T, b: T, g: Cplx<T>) -> Self {
        let mag = g.norm();
        let phase = g / mag;
        let tau = (b - a) / (T::lit(2.0) * mag);
        let t = if tau >= T::zero() {
            T::one() / (tau + (T::one() + tau * tau).sqrt())
        } else {
            -T::one() / (-tau + (T::one() + tau * tau).sqrt())
        };
        let c = T::one() / (T::one() + t * t).sqrt();
        let s = t * c;
        let ph = phase.conj();
        Self {
            pp: Cplx::new(c, T::zero()),
            pq: Cplx::new(s, T::zero()),
            qp: ph * (-s),
            qq: ph * c,
        }
    }
}

/// Applies `M ← M J` on columns `p`, `q`.
fn rotate_columns<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, j: &Rotation<T>) {
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * j.pp + mq * j.qp;
        m[(k, q)] = mp * j.pq + mq * j.qq;
    }
}

/// Applies `M ← J† M` on rows `p`, `q`.
fn rotate_rows<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, j: &Rotation<T>) {
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = j.pp.conj() * mp + j.qp.conj() * mq;
        m[(q, k)] = j.pq.conj() * mp + j.qq.conj() * mq;
    }
}

fn off_diagonal_sqr<T: Real>(m: &ComplexMatrix<T>) -> T {
    let n = m.rows();
    let mut acc = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc = acc + m[(r, c)].norm_sqr();
            }
        }
    }
    acc
}

fn check_hermitian<T: Real>(a: &ComplexMatrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(contract!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        ));
    }
    let scale = T::one().max(a.frobenius_norm_sqr().sqrt());
    let dev = a.hermitian_deviation();
    if dev > T::tol(HERMITIAN_TOL) * scale {
        return Err(contract!("matrix is not Hermitian (max |A - A†| = {dev})"));
    }
    Ok(())
}

/// Eigenvalues (descending) and the matching unit eigenvectors as columns.
pub fn hermitian_eigen<T: Real>(a: &ComplexMatrix<T>) -> Result<(Spectrum<T>, ComplexMatrix<T>)> {
    check_hermitian(a)?;
    let n = a.rows();
    let mut m = a.clone();
    // Symmetrize away the permitted round-off before rotating.
    for r in 0..n {
        m[(r, r)] = Cplx::new(m[(r, r)].re, T::zero());
        for c in r + 1..n {
            let avg = (m[(r, c)] + m[(c, r)].conj()) * T::lit(0.5);
            m[(r, c)] = avg;
            m[(c, r)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scaled_eps = T::epsilon() * T::from_usize(n).unwrap();
    let target = scaled_eps * scaled_eps * m.frobenius_norm_sqr();
    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sqr(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m[(p, q)];
                if g.norm() <= T::min_positive_value() {
                    continue;
                }
                let rot = Rotation::new(m[(p, p)].re, m[(q, q)].re, g);
                rotate_columns(&mut m, p, q, &rot);
                rotate_rows(&mut m, p, q, &rot);
                m[(p, q)] = Cplx::new(T::zero(), T::zero());
                m[(q, p)] = Cplx::new(T::zero(), T::zero());
                rotate_columns(&mut v, p, q, &rot);
            }
        }
    }
    if !converged && off_diagonal_sqr(&m) > target * T::lit(1e4) {
        return Err(Error::Numerical(
            "Jacobi eigensolver did not converge".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .re
            .partial_cmp(&m[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok((Spectrum::from_unsorted(values), vectors))
}

/// Real eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    hermitian_eigen(a).map(|(s, _)| s)
}

/// Closed-form eigenvalues `(larger, smaller)` of `[[a, g], [conj(g), b]]`.
#[inline]
pub fn hermitian_2x2_eigenvalues<T: Real>(a: T, b: T, g: Cplx<T>) -> (T, T) {
    let half = T::lit(0.5);
    let mean = (a + b) * half;
    let gap = ((a - b) * half).hypot(g.norm());
    (mean + gap, mean - gap)
}

/// Singular values of any nonempty complex matrix, descending, by one-sided Jacobi.
pub fn singular_values<T: Real>(a: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(contract!("singular values of an empty matrix"));
    }
    // Orthogonalize the shorter dimension's vectors.
    let mut w = if a.cols() <= a.rows() {
        a.clone()
    } else {
        a.adjoint()
    };
    let (len, count) = (w.rows(), w.cols());
    let eps = T::epsilon();
    let tol = eps * T::from_usize(len.max(2)).unwrap();
    // Columns below eps·‖A‖ are numerically zero.
    let negligible = eps * eps * w.frobenius_norm_sqr();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..count {
            for q in p + 1..count {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = Cplx::new(T::zero(), T::zero());
                for k in 0..len {
                    let wp = w[(k, p)];
                    let wq = w[(k, q)];
                    alpha = alpha + wp.norm_sqr();
                    beta = beta + wq.norm_sqr();
                    gamma = gamma + wp.conj() * wq;
                }
                if gamma.norm() <= tol * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                    || gamma.norm() <= T::min_positive_value()
                {
                    continue;
                }
                rotated = true;
                let rot = Rotation::new(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &rot);
            }
        }
        if !rotated {
            let values = (0..count)
                .map(|c| {
                    (0..len)
                        .fold(T::zero(), |acc, k| acc + w[(k, c)].norm_sqr())
                        .sqrt()
                })
                .collect();
            return Ok(Spectrum::from_unsorted(values));
        }
    }
    Err(Error::Numerical(
        "one-sided Jacobi SVD did not converge".into(),
    ))
}
