//! Dense Hermitian linear algebra helpers.
//!
//! Every eigenproblem in the library funnels through [`hermitian_eigen`],
//! which dispatches to a real symmetric solver whenever the input has no
//! imaginary part. That keeps real inputs on an exactly-real path.

use nalgebra as na;

use crate::error::{Error, Result};
use crate::scalar::{abs2, cre, eps, from_usize, lit, CMatrix, CVector, Complex, Float, RMatrix};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Float> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Float> HermitianEigen<T> {
    /// Reorders into descending eigenvalue order.
    pub fn descending(mut self) -> Self {
        self.values.reverse();
        let n = self.vectors.ncols();
        let cols: Vec<CVector<T>> = (0..n).rev().map(|j| self.vectors.column(j).into_owned()).collect();
        self.vectors = CMatrix::from_columns(&cols);
        self
    }
}

pub fn is_real<T: Float>(m: &CMatrix<T>) -> bool {
    m.iter().all(|z| z.im == T::ZERO)
}

pub fn real_part<T: Float>(m: &CMatrix<T>) -> RMatrix<T> {
    m.map(|z| z.re)
}

pub fn to_complex<T: Float>(m: &RMatrix<T>) -> CMatrix<T> {
    m.map(cre)
}

/// Frobenius norm of a complex matrix.
pub fn frobenius<T: Float>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::ZERO, |acc, z| acc + abs2(*z)).sqrt()
}

/// `(m + m^H) / 2`.
pub fn hermitian_part<T: Float>(m: &CMatrix<T>) -> CMatrix<T> {
    let mut h = m + m.adjoint();
    h *= cre(T::HALF);
    enforce_hermitian(&mut h);
    h
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen<T: Float>(m: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
            context: "square matrix",
        });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let h = hermitian_part(m);
    if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::EigenFailure("non-finite matrix entry".into()));
    }
    let (values, vectors) = if is_real(&h) {
        let r = real_part(&h);
        let eig = na::SymmetricEigen::try_new(r, eps::<T>(), 0)
            .ok_or_else(|| Error::EigenFailure("symmetric QR did not converge".into()))?;
        (eig.eigenvalues, to_complex(&eig.eigenvectors))
    } else {
        let eig = na::SymmetricEigen::try_new(h, eps::<T>(), 0)
            .ok_or_else(|| Error::EigenFailure("hermitian QR did not converge".into()))?;
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let cols: Vec<CVector<T>> = order.iter().map(|&j| vectors.column(j).into_owned()).collect();
    Ok(HermitianEigen {
        values: order.iter().map(|&j| values[j]).collect(),
        vectors: CMatrix::from_columns(&cols),
    })
}

/// `V diag(f(λ)) V^H` for a Hermitian eigen-decomposition.
pub fn spectral_function<T: Float>(eig: &HermitianEigen<T>, f: impl Fn(T) -> T) -> CMatrix<T> {
    let n = eig.vectors.nrows();
    let mut scaled = eig.vectors.clone();
    for (j, &lambda) in eig.values.iter().enumerate() {
        let s = cre(f(lambda));
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    let mut out = &scaled * eig.vectors.adjoint();
    enforce_hermitian(&mut out);
    out
}

/// Mirrors the lower triangle onto the upper one so `m == m^H` holds exactly.
pub fn enforce_hermitian<T: Float>(m: &mut CMatrix<T>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = T::ZERO;
        for j in 0..i {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
}

/// Whether the Hermitian matrix `m + shift·I` is positive definite, decided by
/// a Cholesky factorization of its lower triangle that stops at the first
/// nonpositive pivot.
pub fn is_positive_definite<T: Float>(m: &CMatrix<T>, shift: T) -> bool {
    let n = m.nrows();
    if is_real(m) {
        let mut r = real_part(m);
        for i in 0..n {
            r[(i, i)] += shift;
        }
        return na::Cholesky::new(r).is_some();
    }
    let mut l = CMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re + shift;
        for k in 0..j {
            d -= abs2(l[(j, k)]);
        }
        if !(d > T::ZERO) {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = cre(d);
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / cre(d);
        }
    }
    true
}

/// `L^{-H}` for the Cholesky factor `L` of the Hermitian matrix `m`, so that
/// `M^H m M = I`; `None` unless `m − margin·I` is positive definite.
pub fn cholesky_whitener<T: Float>(m: &CMatrix<T>, margin: T) -> Option<CMatrix<T>> {
    let n = m.nrows();
    if !is_positive_definite(m, -margin) {
        return None;
    }
    if is_real(m) {
        let l = na::Cholesky::new(real_part(m))?.unpack();
        let inv = l.solve_lower_triangular(&RMatrix::identity(n, n))?;
        return Some(to_complex(&inv.transpose()));
    }
    let l = na::Cholesky::new(hermitian_part(m))?.unpack();
    Some(l.solve_lower_triangular(&CMatrix::identity(n, n))?.adjoint())
}

/// Square root and inverse square root of a Hermitian positive definite matrix.
#[derive(Debug, Clone)]
pub struct HermitianRoots<T: Float> {
    pub sqrt: CMatrix<T>,
    pub inv_sqrt: CMatrix<T>,
    /// Smallest eigenvalue before flooring.
    pub min_eigenvalue: T,
    /// True when at least one eigenvalue was raised to the floor.
    pub floored: bool,
}

impl<T: Float> HermitianRoots<T> {
    /// `P^{-1}`, built as `(P^{-1/2})^2` so it stays consistent with the roots.
    pub fn inverse(&self) -> CMatrix<T> {
        let mut inv = &self.inv_sqrt * &self.inv_sqrt;
        enforce_hermitian(&mut inv);
        inv
    }
}

/// Hermitian square roots with eigenvalue floor `floor_rel · tr(P) / dim`.
///
/// Returns `None` when the matrix is not positive definite (an eigenvalue at or
/// below a dimension-scaled rounding threshold, or a non-positive trace).
pub fn hermitian_roots<T: Float>(p: &CMatrix<T>, floor_rel: T) -> Result<Option<HermitianRoots<T>>> {
    let dim = p.nrows();
    let eig = hermitian_eigen(p)?;
    if dim == 0 {
        return Ok(Some(HermitianRoots {
            sqrt: CMatrix::zeros(0, 0),
            inv_sqrt: CMatrix::zeros(0, 0),
            min_eigenvalue: T::ZERO,
            floored: false,
        }));
    }
    let trace = (0..dim).fold(T::ZERO, |acc, i| acc + p[(i, i)].re);
    let max_ev = eig.values[dim - 1];
    let min_ev = eig.values[0];
    let rounding = max_ev * eps::<T>() * from_usize::<T>(dim) * lit(4.0);
    if !(trace > T::ZERO) || !(min_ev > rounding) {
        return Ok(None);
    }
    let floor = floor_rel * trace / from_usize::<T>(dim);
    let floored = min_ev < floor;
    let clamp = move |x: T| if x < floor { floor } else { x };
    Ok(Some(HermitianRoots {
        sqrt: spectral_function(&eig, |x| clamp(x).sqrt()),
        inv_sqrt: spectral_function(&eig, |x| T::ONE / clamp(x).sqrt()),
        min_eigenvalue: min_ev,
        floored,
    }))
}

/// Largest entry modulus, index of the first entry within a relative `tol` of it.
pub fn dominant_index<T: Float>(v: impl Iterator<Item = Complex<T>>, tol: T) -> Option<usize> {
    let mags: Vec<T> = v.map(abs2).collect();
    let max = mags.iter().copied().fold(T::ZERO, |a, b| if b > a { b } else { a });
    if max <= T::ZERO {
        return None;
    }
    let cutoff = max * (T::ONE - tol) * (T::ONE - tol);
    mags.iter().position(|&m| m >= cutoff)
}

/// Unit-modulus factor `conj(z)/|z|`; multiplying by it rotates `z` onto the
/// positive real axis. Exact (`±1 + 0i`) when `z` is real.
pub fn unphase<T: Float>(z: Complex<T>) -> Complex<T> {
    let m = crate::scalar::cabs(z);
    if m > T::ZERO {
        Complex::new(z.re / m, -z.im / m)
    } else {
        cre(T::ONE)
    }
}

/// Rotates `v` so that its dominant entry is real and positive.
pub fn fix_phase<T: Float>(v: &mut CVector<T>) -> Complex<T> {
    let tol = lit::<T>(1e-9);
    match dominant_index(v.iter().copied(), tol) {
        Some(k) => {
            let u = unphase(v[k]);
            v.iter_mut().for_each(|z| *z *= u);
            v[k].im = T::ZERO;
            u
        }
        None => cre(T::ONE),
    }
}

/// Lexicographic comparison of complex vectors entry by entry (real part,
/// then imaginary part), treating differences below `tol` as ties.
pub fn lex_cmp<T: Float>(a: &[Complex<T>], b: &[Complex<T>], tol: T) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for (x, y) in a.iter().zip(b.iter()) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > tol {
                return if p < q { Ordering::Less } else { Ordering::Greater };
            }
        }
    }
    Ordering::Equal
}

/// Quadratic form `x^H M x` (real part).
pub fn quad_form<T: Float>(m: &CMatrix<T>, x: &CVector<T>) -> T {
    x.dotc(&(m * x)).re
}

/// Modified Gram-Schmidt of `v` against orthonormal `basis`, returning the
/// residual norm before normalization.
pub fn orthonormalize_against<T: Float>(v: &mut CVector<T>, basis: &[CVector<T>]) -> T {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(v);
            v.axpy(-c, b, cre(T::ONE));
        }
    }
    let nrm = v.norm();
    if nrm > T::ZERO {
        *v /= cre(nrm);
    }
    nrm
}

/// A unit vector orthogonal to every column of `basis`, chosen deterministically
/// as the normalized residual of the coordinate vector with the largest residual.
pub fn complement_vector<T: Float>(dim: usize, basis: &[CVector<T>]) -> CVector<T> {
    let mut best: Option<(T, CVector<T>)> = None;
    for k in 0..dim {
        let mut e = CVector::<T>::zeros(dim);
        e[k] = cre(T::ONE);
        let nrm = orthonormalize_against(&mut e, basis);
        if best.as_ref().is_none_or(|(b, _)| nrm > *b + lit(1e-12)) {
            best = Some((nrm, e));
        }
    }
    best.map(|(_, v)| v).unwrap_or_else(|| CVector::zeros(dim))
}

/// Relative normality defect `‖S S^H − S^H S‖_F / ‖S‖_F²`.
pub fn normality_defect<T: Float>(s: &CMatrix<T>) -> T {
    let nrm = frobenius(s);
    if nrm == T::ZERO {
        return T::ZERO;
    }
    let sh = s.adjoint();
    frobenius(&(s * &sh - &sh * s)) / (nrm * nrm)
}
