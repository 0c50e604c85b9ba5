//! Synthesis of stationary multivariate graph processes and brute-force
//! reference routines used to cross-check the solvers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::canonical::ReducedRankPredictor;
use crate::error::{Error, Result};
use crate::graph::SpectralBasis;
use crate::linalg::{enforce_hermitian, hermitian_eigen, is_real};
use crate::scalar::{abs2, cabs, cre, lit, CMatrix, CVector, Complex, Float};
use crate::signal::MultivariateGraphSignal;
use crate::spectral::SpectralMatrixField;

/// Everything needed to draw realizations of a jointly stationary pair `(X, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec<T: Float> {
    basis: SpectralBasis<T>,
    joint_field: Vec<CMatrix<T>>,
    p: usize,
    realizations: usize,
    seed: u64,
    means: Option<CMatrix<T>>,
}

const PSD_TOL: f64 = 1e-10;

impl<T: Float> SynthesisSpec<T> {
    /// `joint_field[ℓ]` is the `(p+q) × (p+q)` joint spectral matrix at `λ_ℓ`
    /// (X block first). `means`, if given, is `n × (p+q)` with each column
    /// parallel to one basis vector.
    pub fn new(
        basis: SpectralBasis<T>,
        joint_field: Vec<CMatrix<T>>,
        p: usize,
        realizations: usize,
        seed: u64,
        means: Option<CMatrix<T>>,
    ) -> Result<Self> {
        let n = basis.size();
        if joint_field.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: joint_field.len(), context: "joint field length" });
        }
        let d = joint_field[0].nrows();
        if p == 0 || p >= d {
            return Err(Error::InvalidField(format!("split p = {p} must lie strictly inside joint dimension {d}")));
        }
        if realizations == 0 {
            return Err(Error::TooFewRealizations { required: 1, found: 0 });
        }
        for (l, m) in joint_field.iter().enumerate() {
            check_psd(m, d).map_err(|e| match e {
                Error::InvalidField(msg) => Error::InvalidField(format!("frequency {l}: {msg}")),
                other => other,
            })?;
        }
        if let Some(mu) = &means {
            if mu.shape() != (n, d) {
                return Err(Error::DimensionMismatch { expected: n * d, found: mu.len(), context: "means shape" });
            }
            for j in 0..d {
                check_mean_direction(&basis, &mu.column(j).into_owned(), j)?;
            }
        }
        Ok(SynthesisSpec { basis, joint_field, p, realizations, seed, means })
    }

    pub fn basis(&self) -> &SpectralBasis<T> {
        &self.basis
    }

    pub fn joint_field(&self) -> &[CMatrix<T>] {
        &self.joint_field
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.joint_field[0].nrows() - self.p
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn means(&self) -> Option<&CMatrix<T>> {
        self.means.as_ref()
    }

    pub fn with_realizations(mut self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::TooFewRealizations { required: 1, found: 0 });
        }
        self.realizations = m;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The population field the realizations are drawn from.
    pub fn population_field(&self) -> Result<SpectralMatrixField<T>> {
        SpectralMatrixField::from_joint(self.basis.eigenvalues().to_vec(), &self.joint_field, self.p)
    }

    /// Whether realizations come out exactly real.
    pub fn emits_real(&self) -> bool {
        self.basis.is_real()
            && self.joint_field.iter().all(is_real)
            && self.means.as_ref().is_none_or(is_real)
    }
}

fn check_psd<T: Float>(m: &CMatrix<T>, d: usize) -> Result<()> {
    if m.shape() != (d, d) {
        return Err(Error::DimensionMismatch { expected: d * d, found: m.len(), context: "joint field matrix shape" });
    }
    let scale = m.iter().fold(T::ONE, |a, z| a.max(cabs(*z)));
    let tol = lit::<T>(PSD_TOL) * scale;
    for i in 0..d {
        for j in 0..d {
            if cabs(m[(i, j)] - m[(j, i)].conj()) > tol {
                return Err(Error::InvalidField("matrix is not Hermitian".into()));
            }
        }
    }
    let eig = hermitian_eigen(m)?;
    if eig.values[0] < -tol {
        return Err(Error::InvalidField(format!("matrix is not positive semidefinite (eigenvalue {})", eig.values[0])));
    }
    Ok(())
}

fn check_mean_direction<T: Float>(b: &SpectralBasis<T>, m: &CVector<T>, dimension: usize) -> Result<()> {
    let total = m.norm_squared();
    if total == T::ZERO {
        return Ok(());
    }
    let coeffs = b.gft(m)?;
    let k = (0..coeffs.len())
        .max_by(|&i, &j| abs2(coeffs[i]).partial_cmp(&abs2(coeffs[j])).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let resid = (m - b.vector(k) * coeffs[k]).norm();
    if resid > lit::<T>(PSD_TOL) * total.sqrt().max(T::ONE) {
        return Err(Error::MeanNotProportionalToBasisVector { dimension });
    }
    Ok(())
}

/// Per-frequency coloring factors `L_ℓ` with `L_ℓ L_ℓ^H = joint_field[ℓ]`.
fn coloring<T: Float>(field: &[CMatrix<T>]) -> Result<Vec<CMatrix<T>>> {
    field
        .iter()
        .map(|m| {
            let mut h = m.clone();
            enforce_hermitian(&mut h);
            let eig = hermitian_eigen(&h)?;
            let mut l = eig.vectors;
            for (k, v) in eig.values.iter().enumerate() {
                let s = v.max(T::ZERO).sqrt();
                l.column_mut(k).scale_mut(s);
            }
            Ok(l)
        })
        .collect()
}

fn gaussian<T: Float>(rng: &mut ChaCha8Rng) -> T {
    let z: f64 = StandardNormal.sample(rng);
    lit(z)
}

/// Draws `spec.realizations()` independent realizations of `(X, Y)`.
///
/// At every frequency the GFT coefficients are Gaussian with covariance equal
/// to the joint spectral matrix (circular complex, or real when the basis and
/// field are real), independent across frequencies and realizations.
pub fn synthesize_stationary<T: Float>(
    spec: &SynthesisSpec<T>,
) -> Result<(MultivariateGraphSignal<T>, MultivariateGraphSignal<T>)> {
    let factors = coloring(&spec.joint_field)?;
    let n = spec.basis.size();
    let d = spec.joint_field[0].nrows();
    let real = spec.emits_real();
    let half = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let draws = (0..spec.realizations)
        .into_par_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(m as u64);
            let mut coeffs = CMatrix::<T>::zeros(n, d);
            for (l, f) in factors.iter().enumerate() {
                let w = CVector::<T>::from_fn(d, |_, _| {
                    if real {
                        cre(gaussian(&mut rng))
                    } else {
                        let re = gaussian::<T>(&mut rng);
                        let im = gaussian::<T>(&mut rng);
                        Complex::new(re * half, im * half)
                    }
                });
                coeffs.row_mut(l).copy_from(&(f * w).transpose());
            }
            let mut sig = spec.basis.inverse_gft_columns(&coeffs)?;
            if real {
                sig.iter_mut().for_each(|z| z.im = T::ZERO);
            }
            if let Some(mu) = &spec.means {
                sig += mu;
            }
            Ok(sig)
        })
        .collect::<Result<Vec<_>>>()?;
    let p = spec.p;
    let q = d - p;
    let xs = draws.iter().map(|s| s.columns(0, p).into_owned()).collect();
    let ys = draws.iter().map(|s| s.columns(p, q).into_owned()).collect();
    let xl = (1..=p).map(|i| format!("x{i}")).collect();
    let yl = (1..=q).map(|i| format!("y{i}")).collect();
    Ok((MultivariateGraphSignal::new(xs, Some(xl))?, MultivariateGraphSignal::new(ys, Some(yl))?))
}

/// A seeded random Hermitian positive definite joint spectral matrix of size
/// `d × d`: `G G^H / d + 0.05 I` with standard Gaussian `G` (complex unless
/// `real`).
pub fn random_joint_matrix<T: Float>(rng: &mut ChaCha8Rng, d: usize, real: bool) -> CMatrix<T> {
    let g = CMatrix::<T>::from_fn(d, d, |_, _| {
        let re = gaussian::<T>(rng);
        let im = if real { T::ZERO } else { gaussian::<T>(rng) };
        Complex::new(re, im)
    });
    let mut m = &g * g.adjoint() / cre(T::from_usize(d).unwrap_or(T::ONE));
    for i in 0..d {
        m[(i, i)] += cre(lit::<T>(0.05));
    }
    enforce_hermitian(&mut m);
    m
}

/// `n` independent random joint matrices of size `(p+q)`, drawn from one seed.
pub fn random_joint_field<T: Float>(seed: u64, n: usize, d: usize, real: bool) -> Vec<CMatrix<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_joint_matrix(&mut rng, d, real)).collect()
}

/// Random `(P_X, P_Y, P_XY)` split from one random joint matrix.
pub fn random_spectral_blocks<T: Float>(seed: u64, p: usize, q: usize) -> (CMatrix<T>, CMatrix<T>, CMatrix<T>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j = random_joint_matrix::<T>(&mut rng, p + q, false);
    (
        j.view((0, 0), (p, p)).into_owned(),
        j.view((p, p), (q, q)).into_owned(),
        j.view((0, p), (p, q)).into_owned(),
    )
}

/// Monte Carlo average of `Σ_i ‖Y_i − μ_i − Σ_j A_ij(X_j)‖²` over realizations.
pub fn empirical_mse<T: Float>(
    pred: &ReducedRankPredictor<T>,
    x: &MultivariateGraphSignal<T>,
    y: &MultivariateGraphSignal<T>,
    b: &SpectralBasis<T>,
) -> Result<T> {
    if x.realization_count() != y.realization_count() || x.nodes() != y.nodes() {
        return Err(Error::DimensionMismatch {
            expected: x.realization_count(),
            found: y.realization_count(),
            context: "paired realizations",
        });
    }
    if pred.mu.shape() != (y.nodes(), y.dim()) {
        return Err(Error::DimensionMismatch { expected: y.dim(), found: pred.mu.ncols(), context: "predictor output dimension" });
    }
    let total = x
        .realizations()
        .iter()
        .zip(y.realizations())
        .try_fold(T::ZERO, |acc, (xm, ym)| -> Result<T> {
            let fitted = pred.a_bank.apply_realization(xm, b)?;
            Ok(acc + (ym - &pred.mu - fitted).norm_squared())
        })?;
    Ok(total / T::from_usize(x.realization_count()).unwrap_or(T::ONE))
}

/// Canonical coherences and vectors from the non-Hermitian matrix
/// `P_X^{-1} P_XY P_Y^{-1} P_YX`, using Gaussian elimination, a complex
/// Hessenberg QR iteration and inverse iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T: Float> {
    pub coherences: Vec<T>,
    pub h: Vec<CVector<T>>,
    pub f: Vec<CVector<T>>,
}

pub fn cca_oracle<T: Float>(p_x: &CMatrix<T>, p_y: &CMatrix<T>, p_xy: &CMatrix<T>) -> Result<OracleSolution<T>> {
    let (p, q) = (p_x.nrows(), p_y.nrows());
    if p_xy.shape() != (p, q) || p_x.ncols() != p || p_y.ncols() != q {
        return Err(Error::DimensionMismatch { expected: p * q, found: p_xy.len(), context: "oracle block shapes" });
    }
    let p_yx = p_xy.adjoint();
    let a = gauss_solve(p_x, p_xy).ok_or(Error::SingularSpectralMatrix { frequency: 0, which: "P_X" })?;
    let b = gauss_solve(p_y, &p_yx).ok_or(Error::SingularSpectralMatrix { frequency: 0, which: "P_Y" })?;
    let n = &a * &b;
    let mut lambdas = qr_eigenvalues(&n)?;
    lambdas.sort_by(|u, v| v.re.partial_cmp(&u.re).unwrap_or(std::cmp::Ordering::Equal));
    let r = p.min(q);
    let mut out = OracleSolution { coherences: Vec::new(), h: Vec::new(), f: Vec::new() };
    for lam in lambdas.into_iter().take(r) {
        let mut h = inverse_iteration(&n, lam);
        let hn = (h.dotc(&(p_x * &h))).re.sqrt();
        h /= cre(hn);
        let mut f = &b * &h;
        let fnorm = (f.dotc(&(p_y * &f))).re;
        if fnorm > T::ZERO {
            f /= cre(fnorm.sqrt());
        }
        out.coherences.push(lam.re.max(T::ZERO));
        out.h.push(h);
        out.f.push(f);
    }
    Ok(out)
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
fn gauss_solve<T: Float>(a: &CMatrix<T>, b: &CMatrix<T>) -> Option<CMatrix<T>> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut x = b.clone();
    let scale = m.iter().fold(T::ZERO, |s, z| s.max(cabs(*z)));
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| cabs(m[(i, k)]).partial_cmp(&cabs(m[(j, k)])).unwrap())?;
        if cabs(m[(piv, k)]) <= lit::<T>(1e-14) * scale {
            return None;
        }
        m.swap_rows(k, piv);
        x.swap_rows(k, piv);
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
            for j in 0..x.ncols() {
                let v = x[(k, j)];
                x[(i, j)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..x.ncols() {
            let mut s = x[(k, j)];
            for c in (k + 1)..n {
                s -= m[(k, c)] * x[(c, j)];
            }
            x[(k, j)] = s / m[(k, k)];
        }
    }
    Some(x)
}

/// Eigenvalues of a general complex matrix: Householder reduction to upper
/// Hessenberg form, then single-shift QR with Wilkinson shifts and deflation.
fn qr_eigenvalues<T: Float>(a: &CMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = a.nrows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x = h.view((k + 1, k), (n - k - 1, 1)).column(0).into_owned();
        let alpha = x.norm();
        if alpha == T::ZERO {
            continue;
        }
        let phase = if cabs(x[0]) > T::ZERO { x[0] / cre(cabs(x[0])) } else { cre(T::ONE) };
        let mut v = x;
        v[0] += phase * cre(alpha);
        let vn = v.norm();
        v /= cre(vn);
        // H ← (I − 2vv^H) H (I − 2vv^H) on the trailing block.
        let rows = h.rows(k + 1, n - k - 1).into_owned();
        let upd = &v * (v.adjoint() * &rows) * cre(lit::<T>(2.0));
        h.rows_mut(k + 1, n - k - 1).copy_from(&(rows - upd));
        let cols = h.columns(k + 1, n - k - 1).into_owned();
        let upd = (&cols * &v) * v.adjoint() * cre(lit::<T>(2.0));
        h.columns_mut(k + 1, n - k - 1).copy_from(&(cols - upd));
    }
    let mut eigs = vec![cre(T::ZERO); n];
    let mut hi = n;
    let mut iter = 0usize;
    let tiny = lit::<T>(1e-15);
    while hi > 0 {
        if hi == 1 {
            eigs[0] = h[(0, 0)];
            break;
        }
        let k = hi - 1;
        let sub = cabs(h[(k, k - 1)]);
        if sub <= tiny * (cabs(h[(k, k)]) + cabs(h[(k - 1, k - 1)])) || sub == T::ZERO {
            eigs[k] = h[(k, k)];
            h[(k, k - 1)] = cre(T::ZERO);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 1000 {
            return Err(Error::EigenFailure("oracle QR iteration did not converge".into()));
        }
        // Wilkinson shift from the trailing 2×2 block; exceptional shift every 11 steps.
        let (a11, a12, a21, a22) = (h[(k - 1, k - 1)], h[(k - 1, k)], h[(k, k - 1)], h[(k, k)]);
        let tr = a11 + a22;
        let det = a11 * a22 - a12 * a21;
        let disc = nalgebra::ComplexField::sqrt(tr * tr * cre(lit::<T>(0.25)) - det);
        let half_tr = tr * cre(T::HALF);
        let (m1, m2) = (half_tr + disc, half_tr - disc);
        let mut shift = if cabs(m1 - a22) < cabs(m2 - a22) { m1 } else { m2 };
        if iter.is_multiple_of(11) {
            shift = a22 + cre(sub);
        }
        // QR step on the active block via Givens rotations.
        for i in 0..hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - 1);
        for j in 0..hi - 1 {
            let (x, y) = (h[(j, j)], h[(j + 1, j)]);
            let r = (abs2(x) + abs2(y)).sqrt();
            let (c, s) = if r == T::ZERO { (cre(T::ONE), cre(T::ZERO)) } else { (x / cre(r), y / cre(r)) };
            for col in j..n {
                let (u, w) = (h[(j, col)], h[(j + 1, col)]);
                h[(j, col)] = c.conj() * u + s.conj() * w;
                h[(j + 1, col)] = -s * u + c * w;
            }
            rots.push((c, s));
        }
        for (j, (c, s)) in rots.into_iter().enumerate() {
            for row in 0..(j + 2).min(hi) {
                let (u, w) = (h[(row, j)], h[(row, j + 1)]);
                h[(row, j)] = u * c + w * s;
                h[(row, j + 1)] = -u * s.conj() + w * c.conj();
            }
        }
        for i in 0..hi {
            h[(i, i)] += shift;
        }
    }
    Ok(eigs)
}

/// Eigenvector for eigenvalue `lam` by inverse iteration with a slightly
/// perturbed shift.
fn inverse_iteration<T: Float>(a: &CMatrix<T>, lam: Complex<T>) -> CVector<T> {
    let n = a.nrows();
    let scale = a.iter().fold(T::ONE, |s, z| s.max(cabs(*z)));
    let mut shifted = a.clone();
    let delta = lit::<T>(1e-10) * scale;
    for i in 0..n {
        shifted[(i, i)] -= lam + cre(delta);
    }
    let mut v = CVector::<T>::from_fn(n, |i, _| cre(T::ONE + lit::<T>(0.1) * T::from_usize(i).unwrap_or(T::ZERO)));
    for _ in 0..4 {
        let next = match gauss_solve(&shifted, &CMatrix::from_column_slice(n, 1, v.as_slice())) {
            Some(s) => s.column(0).into_owned(),
            None => {
                for i in 0..n {
                    shifted[(i, i)] -= cre(delta);
                }
                continue;
            }
        };
        let nn = next.norm();
        v = next / cre(nn);
    }
    v
}
