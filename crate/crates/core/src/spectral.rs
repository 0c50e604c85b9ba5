//! Graph power and cross-spectral density estimation.
//!
//! Every estimator in this module is a scaled sum of outer products of graph
//! Fourier coefficients, taken either across realizations (centered, with the
//! unbiased `1/(M-1)` scaling) or across randomly windowed copies of a single
//! realization. Windows are Rademacher (`±1`) node masks; window 0 is always the
//! all-ones mask, so the raw periodogram is part of every average.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpectralBasis;
use crate::linalg::{enforce_hermitian, hermitian_eigen, hermitian_part, is_positive_definite, spectral_function};
use crate::scalar::{abs2, cre, eps, from_usize, lit, CMatrix, CVector, Complex, Float, RMatrix};
use crate::signal::MultivariateGraphSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMode {
    RealizationAverage,
    RandomWindow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig<T: Float> {
    pub mode: EstimatorMode,
    pub window_count: usize,
    pub seed: u64,
    /// Relative ridge `δ`; `δ·tr(P)/dim` is added to diagonals of rank-deficient blocks.
    pub ridge: T,
    pub center: bool,
}

impl<T: Float> Default for EstimatorConfig<T> {
    fn default() -> Self {
        EstimatorConfig {
            mode: EstimatorMode::RealizationAverage,
            window_count: 50,
            seed: 0,
            ridge: lit(1e-8),
            center: true,
        }
    }
}

impl<T: Float> EstimatorConfig<T> {
    pub fn random_window(window_count: usize, seed: u64) -> Self {
        EstimatorConfig { mode: EstimatorMode::RandomWindow, window_count, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_count == 0 {
            return Err(Error::InvalidConfig("window count must be at least 1".into()));
        }
        if !(self.ridge >= T::ZERO) {
            return Err(Error::InvalidConfig("ridge must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Per-frequency spectral matrices of a pair of multivariate graph signals.
///
/// Only `P_XY` is stored for the cross terms; `P_YX(λ) = P_XY(λ)^H` is derived.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrixField<T: Float> {
    frequencies: Vec<Complex<T>>,
    p_x: Vec<CMatrix<T>>,
    p_y: Vec<CMatrix<T>>,
    p_xy: Vec<CMatrix<T>>,
    warnings: Vec<String>,
}

impl<T: Float> SpectralMatrixField<T> {
    pub fn new(
        frequencies: Vec<Complex<T>>,
        p_x: Vec<CMatrix<T>>,
        p_y: Vec<CMatrix<T>>,
        p_xy: Vec<CMatrix<T>>,
    ) -> Result<Self> {
        let n = frequencies.len();
        if n == 0 {
            return Err(Error::InvalidField("field needs at least one frequency".into()));
        }
        for (name, v) in [("P_X", &p_x), ("P_Y", &p_y), ("P_XY", &p_xy)] {
            if v.len() != n {
                return Err(Error::InvalidField(format!("{name} has {} matrices, expected {n}", v.len())));
            }
        }
        let p = p_x[0].nrows();
        let q = p_y[0].nrows();
        for l in 0..n {
            if p_x[l].shape() != (p, p) || p_y[l].shape() != (q, q) || p_xy[l].shape() != (p, q) {
                return Err(Error::InvalidField(format!("inconsistent block shapes at frequency {l}")));
            }
        }
        Ok(SpectralMatrixField { frequencies, p_x, p_y, p_xy, warnings: Vec::new() })
    }

    /// Splits per-frequency joint `(p+q) × (p+q)` matrices into blocks.
    pub fn from_joint(frequencies: Vec<Complex<T>>, joint: &[CMatrix<T>], p: usize) -> Result<Self> {
        let mut p_x = Vec::with_capacity(joint.len());
        let mut p_y = Vec::with_capacity(joint.len());
        let mut p_xy = Vec::with_capacity(joint.len());
        for j in joint {
            let d = j.nrows();
            if j.ncols() != d || p == 0 || p >= d {
                return Err(Error::InvalidField("joint matrices must be square with 0 < p < p+q".into()));
            }
            let q = d - p;
            p_x.push(j.view((0, 0), (p, p)).into_owned());
            p_y.push(j.view((p, p), (q, q)).into_owned());
            p_xy.push(j.view((0, p), (p, q)).into_owned());
        }
        Self::new(frequencies, p_x, p_y, p_xy)
    }

    pub fn frequencies(&self) -> &[Complex<T>] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn p(&self) -> usize {
        self.p_x[0].nrows()
    }

    pub fn q(&self) -> usize {
        self.p_y[0].nrows()
    }

    pub fn p_x(&self, l: usize) -> &CMatrix<T> {
        &self.p_x[l]
    }

    pub fn p_y(&self, l: usize) -> &CMatrix<T> {
        &self.p_y[l]
    }

    pub fn p_xy(&self, l: usize) -> &CMatrix<T> {
        &self.p_xy[l]
    }

    pub fn p_yx(&self, l: usize) -> CMatrix<T> {
        self.p_xy[l].adjoint()
    }

    /// Joint spectral matrix of `(X | Y)` at frequency `l`.
    pub fn joint(&self, l: usize) -> CMatrix<T> {
        let (p, q) = (self.p(), self.q());
        let mut j = CMatrix::zeros(p + q, p + q);
        j.view_mut((0, 0), (p, p)).copy_from(&self.p_x[l]);
        j.view_mut((p, p), (q, q)).copy_from(&self.p_y[l]);
        j.view_mut((0, p), (p, q)).copy_from(&self.p_xy[l]);
        j.view_mut((p, 0), (q, p)).copy_from(&self.p_xy[l].adjoint());
        j
    }

    /// Notes produced during estimation (e.g. uncentered single realizations).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Adds `δ·tr(P)/dim` to the diagonal of each auto-spectral block whose
    /// smallest eigenvalue falls below that level. Returns how many blocks changed.
    pub fn apply_ridge(&mut self, delta: T) -> Result<usize> {
        let mut changed = 0;
        if delta <= T::ZERO {
            return Ok(0);
        }
        for blocks in [&mut self.p_x, &mut self.p_y] {
            for m in blocks.iter_mut() {
                if ridge_block(m, delta)? {
                    changed += 1;
                }
            }
        }
        Ok(changed)
    }
}

fn ridge_block<T: Float>(m: &mut CMatrix<T>, delta: T) -> Result<bool> {
    let dim = m.nrows();
    let trace = (0..dim).fold(T::ZERO, |a, i| a + m[(i, i)].re);
    let level = delta * trace / from_usize::<T>(dim);
    // Cholesky of `M − level·I` succeeds exactly when the smallest eigenvalue exceeds `level`.
    if !is_positive_definite(m, -level) {
        for i in 0..dim {
            m[(i, i)] += cre(level);
        }
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Nearest Hermitian positive semidefinite matrix: Hermitian part with negative
/// eigenvalues clipped to zero. Inputs already PSD (to rounding) come back as
/// their Hermitian part.
pub fn psd_project<T: Float>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    let h = hermitian_part(m);
    if h.nrows() == 0 {
        return Ok(h);
    }
    // Cheap exit: a successful Cholesky of `H + tol·I` bounds every eigenvalue
    // below by `−tol`, with `tol` taken from the trace (an upper bound on the
    // spectral scale of a near-PSD matrix).
    let trace = (0..h.nrows()).fold(T::ZERO, |a, i| a + h[(i, i)].re);
    if trace > T::ZERO && is_positive_definite(&h, trace * eps::<T>() * from_usize::<T>(h.nrows()) * lit(8.0)) {
        return Ok(h);
    }
    let eig = hermitian_eigen(&h)?;
    let scale = eig.values.iter().fold(T::ZERO, |a, &v| a.max(v.abs()));
    let tol = scale * eps::<T>() * from_usize::<T>(h.nrows()) * lit(8.0);
    if eig.values[0] >= -tol {
        return Ok(h);
    }
    Ok(spectral_function(&eig, |x| if x > T::ZERO { x } else { T::ZERO }))
}

/// Graph cross-periodogram `(v_ℓ^H x)(v_ℓ^H y)^*` for every frequency `ℓ`.
pub fn cross_periodogram<T: Float>(x: &CVector<T>, y: &CVector<T>, b: &SpectralBasis<T>) -> Result<CVector<T>> {
    let gx = b.gft(x)?;
    let gy = b.gft(y)?;
    Ok(gx.zip_map(&gy, |a, c| a * c.conj()))
}

/// Average of cross-periodograms over realizations, centered by the sample mean
/// with unbiased `1/(M−1)` scaling when `cfg.center` is set.
pub fn realization_average_csd<T: Float>(
    xi: &[CVector<T>],
    xj: &[CVector<T>],
    b: &SpectralBasis<T>,
    cfg: &EstimatorConfig<T>,
) -> Result<CVector<T>> {
    let m = xi.len();
    if xj.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: xj.len(), context: "realization counts" });
    }
    let required = if cfg.center { 2 } else { 1 };
    if m < required {
        return Err(Error::TooFewRealizations { required, found: m });
    }
    let n = b.size();
    let (mean_i, mean_j) = if cfg.center {
        (vector_mean(xi, n)?, vector_mean(xj, n)?)
    } else {
        (CVector::zeros(n), CVector::zeros(n))
    };
    let mut acc = CVector::<T>::zeros(n);
    for (a, c) in xi.iter().zip(xj) {
        acc += cross_periodogram(&(a - &mean_i), &(c - &mean_j), b)?;
    }
    let denom = from_usize::<T>(if cfg.center { m - 1 } else { m });
    Ok(acc / cre(denom))
}

fn vector_mean<T: Float>(xs: &[CVector<T>], n: usize) -> Result<CVector<T>> {
    let mut mean = CVector::<T>::zeros(n);
    for x in xs {
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len(), context: "signal length" });
        }
        mean += x;
    }
    Ok(mean / cre(from_usize::<T>(xs.len())))
}

/// Rademacher window `m` for a graph of `n` nodes; window 0 is all ones.
pub fn rademacher_window<T: Float>(seed: u64, m: usize, n: usize) -> Vec<T> {
    if m == 0 {
        return vec![T::ONE; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(m as u64);
    (0..n).map(|_| if rng.random::<bool>() { T::ONE } else { -T::ONE }).collect()
}

/// Windowed average graph cross-periodogram of a single realization.
pub fn windowed_average_csd<T: Float>(
    x: &CVector<T>,
    y: &CVector<T>,
    b: &SpectralBasis<T>,
    cfg: &EstimatorConfig<T>,
) -> Result<CVector<T>> {
    cfg.validate()?;
    let n = b.size();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len().max(y.len()),
            context: "signal length vs graph size",
        });
    }
    let mut acc = CVector::<T>::zeros(n);
    for m in 0..cfg.window_count {
        let w = rademacher_window::<T>(cfg.seed, m, n);
        let wx = CVector::from_fn(n, |i, _| x[i] * cre(w[i]));
        let wy = CVector::from_fn(n, |i, _| y[i] * cre(w[i]));
        acc += cross_periodogram(&wx, &wy, b)?;
    }
    Ok(acc / cre(from_usize::<T>(cfg.window_count)))
}

/// Graph Fourier coefficients of a batch of samples, split into real and
/// imaginary parts, laid out per frequency as `samples × dims`.
struct CoefficientStack<T: Float> {
    re: Vec<RMatrix<T>>,
    im: Option<Vec<RMatrix<T>>>,
}

impl<T: Float> CoefficientStack<T> {
    fn new(samples: &[CMatrix<T>], b: &SpectralBasis<T>) -> Result<Self> {
        let n = b.size();
        let s = samples.len();
        let d = samples[0].ncols();
        let real = b.is_real() && samples.iter().all(crate::linalg::is_real);
        let mut re = vec![RMatrix::<T>::zeros(s, d); n];
        let mut im = if real { None } else { Some(vec![RMatrix::<T>::zeros(s, d); n]) };
        let v_re = b.eigenvectors().map(|z| z.re);
        for (k, sample) in samples.iter().enumerate() {
            if real {
                let c = v_re.tr_mul(&sample.map(|z| z.re));
                for (dst, row) in re.iter_mut().zip(c.row_iter()) {
                    dst.row_mut(k).copy_from(&row);
                }
            } else {
                let c = b.gft_columns(sample)?;
                let imag = im.as_mut().expect("complex stack");
                for l in 0..n {
                    for j in 0..d {
                        re[l][(k, j)] = c[(l, j)].re;
                        imag[l][(k, j)] = c[(l, j)].im;
                    }
                }
            }
        }
        Ok(CoefficientStack { re, im })
    }

    /// `scale · Σ_s c_s c_s^H` at frequency `l`, where `c_s` is a sample's coefficient row.
    fn gram(&self, l: usize, scale: T) -> CMatrix<T> {
        let a = &self.re[l];
        let real = a.tr_mul(a);
        let mut out = match &self.im {
            None => real.map(cre),
            Some(im) => {
                let bm = &im[l];
                let re_part = real + bm.tr_mul(bm);
                let im_part = bm.tr_mul(a) - a.tr_mul(bm);
                re_part.zip_map(&im_part, Complex::new)
            }
        };
        out *= cre(scale);
        enforce_hermitian(&mut out);
        out
    }
}

/// Samples entering the estimate for `signal` (centered realizations or
/// windowed copies) and the scale applied to their sum of outer products.
fn estimation_samples<T: Float>(
    signal: &MultivariateGraphSignal<T>,
    cfg: &EstimatorConfig<T>,
    warnings: &mut Vec<String>,
) -> Result<(Vec<CMatrix<T>>, T)> {
    let m = signal.realization_count();
    let n = signal.nodes();
    let centered = cfg.center && m >= 2;
    let reals: Vec<CMatrix<T>> = if centered {
        let mut mean = CMatrix::<T>::zeros(n, signal.dim());
        for r in signal.realizations() {
            mean += r;
        }
        mean /= cre(from_usize::<T>(m));
        signal.realizations().iter().map(|r| r - &mean).collect()
    } else {
        signal.realizations().to_vec()
    };
    match cfg.mode {
        EstimatorMode::RealizationAverage => {
            if m < 2 && cfg.center {
                return Err(Error::TooFewRealizations { required: 2, found: m });
            }
            let denom = if centered { m - 1 } else { m };
            Ok((reals, T::ONE / from_usize::<T>(denom)))
        }
        EstimatorMode::RandomWindow => {
            if cfg.center && !centered {
                warnings.push("single realization: signals left uncentered".into());
            }
            let windows: Vec<Vec<T>> = (0..cfg.window_count).map(|k| rademacher_window(cfg.seed, k, n)).collect();
            let mut samples = Vec::with_capacity(reals.len() * windows.len());
            for r in &reals {
                for w in &windows {
                    let mut s = r.clone();
                    for (i, &wi) in w.iter().enumerate() {
                        if wi < T::ZERO {
                            s.row_mut(i).neg_mut();
                        }
                    }
                    samples.push(s);
                }
            }
            let denom = if centered { (m - 1) * windows.len() } else { m * windows.len() };
            Ok((samples, T::ONE / from_usize::<T>(denom)))
        }
    }
}

/// Estimates `P_X, P_Y, P_XY` at every frequency.
///
/// The joint `(p+q)` spectral matrix is projected onto the PSD cone before it
/// is split, and auto-spectral blocks are ridged as described on
/// [`SpectralMatrixField::apply_ridge`].
pub fn spectral_matrix_field<T: Float>(
    x: &MultivariateGraphSignal<T>,
    y: &MultivariateGraphSignal<T>,
    b: &SpectralBasis<T>,
    cfg: &EstimatorConfig<T>,
) -> Result<SpectralMatrixField<T>> {
    cfg.validate()?;
    if x.nodes() != b.size() {
        return Err(Error::DimensionMismatch {
            expected: b.size(),
            found: x.nodes(),
            context: "signal nodes vs graph size",
        });
    }
    let joint_signal = x.concat(y)?;
    let mut warnings = Vec::new();
    let (samples, scale) = estimation_samples(&joint_signal, cfg, &mut warnings)?;
    let stack = CoefficientStack::new(&samples, b)?;
    let joint = (0..b.size())
        .map(|l| psd_project(&stack.gram(l, scale)))
        .collect::<Result<Vec<_>>>()?;
    let mut field = SpectralMatrixField::from_joint(b.eigenvalues().to_vec(), &joint, x.dim())?;
    field.warnings = warnings;
    field.apply_ridge(cfg.ridge)?;
    Ok(field)
}

/// Off-diagonal energy of `V^H Σ̂_ij V` for one dimension pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarityEntry {
    pub i: usize,
    pub j: usize,
    /// `‖offdiag(V^H Σ̂_ij V)‖_F² / ‖V^H Σ̂_ij V‖_F²`; 0 when the matrix vanishes.
    pub ratio: f64,
    /// `‖Σ̂_ij‖_F`, to tell noise-only pairs (population cross-covariance zero) apart.
    pub energy: f64,
}

/// Reporting threshold for [`stationarity_diagnostic`] ratios.
pub const STATIONARITY_THRESHOLD: f64 = 0.05;

/// How far the sample cross-covariances are from being diagonalized by the basis.
pub fn stationarity_diagnostic<T: Float>(
    x: &MultivariateGraphSignal<T>,
    b: &SpectralBasis<T>,
) -> Result<Vec<StationarityEntry>> {
    let m = x.realization_count();
    if m < 2 {
        return Err(Error::TooFewRealizations { required: 2, found: m });
    }
    if x.nodes() != b.size() {
        return Err(Error::DimensionMismatch {
            expected: b.size(),
            found: x.nodes(),
            context: "signal nodes vs graph size",
        });
    }
    let (n, d) = (x.nodes(), x.dim());
    let mut mean = CMatrix::<T>::zeros(n, d);
    for r in x.realizations() {
        mean += r;
    }
    mean /= cre(from_usize::<T>(m));
    let coeffs: Vec<CMatrix<T>> = x
        .realizations()
        .iter()
        .map(|r| b.gft_columns(&(r - &mean)))
        .collect::<Result<_>>()?;
    let scale = cre(T::ONE / from_usize::<T>(m - 1));
    let mut out = Vec::new();
    for i in 0..d {
        for j in i..d {
            // V^H Σ̂_ij V = (1/(M-1)) Σ_m ĉ_i ĉ_j^H
            let mut t = CMatrix::<T>::zeros(n, n);
            for c in &coeffs {
                let ci = c.column(i);
                let cj = c.column(j);
                t.ger(scale, &ci, &cj.map(|z| z.conj()), cre(T::ONE));
            }
            let total = t.iter().fold(T::ZERO, |a, z| a + abs2(*z));
            let diag = (0..n).fold(T::ZERO, |a, k| a + abs2(t[(k, k)]));
            let ratio = if total > T::ZERO { (total - diag) / total } else { T::ZERO };
            out.push(StationarityEntry {
                i,
                j,
                ratio: crate::scalar::to_f64(ratio).clamp(0.0, 1.0),
                energy: crate::scalar::to_f64(total.sqrt()),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, laplacian, spectral_basis};

    fn basis(n: usize) -> SpectralBasis<f64> {
        let mut edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        edges.push((0, n - 1, 0.5));
        if n / 2 > 2 {
            edges.push((1, n / 2, 2.0));
        }
        spectral_basis(&laplacian(&build_graph(edges, n, false).unwrap()).unwrap()).unwrap()
    }

    fn vecr(v: &[f64]) -> CVector<f64> {
        CVector::from_iterator(v.len(), v.iter().map(|&x| cre(x)))
    }

    #[test]
    fn single_mode_periodogram() {
        let b = basis(6);
        let a = Complex::new(1.5, -0.5);
        let x = b.vector(0) * a;
        let p = cross_periodogram(&x, &x, &b).unwrap();
        assert!((p[0] - cre(abs2(a))).norm() < 1e-12);
        assert!(p.iter().skip(1).all(|z| z.norm() < 1e-12));
        let q = cross_periodogram(&b.vector(0), &b.vector(1), &b).unwrap();
        assert!(q.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn periodogram_matches_dense_outer_product() {
        let b = basis(8);
        let x = CVector::from_fn(8, |i, _| Complex::new((i as f64).sin(), (i as f64 * 0.3).cos()));
        let y = CVector::from_fn(8, |i, _| Complex::new((i as f64 * 1.7).cos(), 0.2 * i as f64));
        let v = b.eigenvectors();
        let dense = v.adjoint() * (&x * y.adjoint()) * v;
        let p = cross_periodogram(&x, &y, &b).unwrap();
        for l in 0..8 {
            assert!((p[l] - dense[(l, l)]).norm() < 1e-12);
        }
    }

    #[test]
    fn identical_copies_uncentered_equal_periodogram() {
        let b = basis(5);
        let x = vecr(&[1.0, -2.0, 0.5, 3.0, 0.0]);
        let y = vecr(&[0.5, 1.0, -1.0, 2.0, 1.0]);
        let cfg = EstimatorConfig { center: false, ..Default::default() };
        let avg = realization_average_csd(&vec![x.clone(); 4], &vec![y.clone(); 4], &b, &cfg).unwrap();
        let direct = cross_periodogram(&x, &y, &b).unwrap();
        assert!((avg - direct).norm() < 1e-12);
        let centered = EstimatorConfig::<f64>::default();
        assert_eq!(
            realization_average_csd(std::slice::from_ref(&x), std::slice::from_ref(&y), &b, &centered).unwrap_err(),
            Error::TooFewRealizations { required: 2, found: 1 }
        );
    }

    #[test]
    fn windowed_estimate_is_deterministic_and_nonnegative_on_diagonal() {
        let b = basis(7);
        let x = vecr(&[1.0, -2.0, 0.5, 3.0, 0.0, 1.0, 2.0]);
        let cfg = EstimatorConfig::random_window(20, 42);
        let a = windowed_average_csd(&x, &x, &b, &cfg).unwrap();
        let c = windowed_average_csd(&x, &x, &b, &cfg).unwrap();
        assert_eq!(a, c);
        assert!(a.iter().all(|z| z.im.abs() < 1e-14 && z.re >= 0.0));
        // One window is the raw periodogram.
        let one = EstimatorConfig::random_window(1, 42);
        let w1 = windowed_average_csd(&x, &x, &b, &one).unwrap();
        assert!((w1 - cross_periodogram(&x, &x, &b).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn psd_project_examples() {
        let d = CMatrix::from_row_slice(2, 2, &[cre(1.0_f64), cre(0.0), cre(0.0), cre(-0.1)]);
        let p = psd_project(&d).unwrap();
        assert!((p[(0, 0)].re - 1.0).abs() < 1e-15 && p[(1, 1)].norm() < 1e-15);
        let pd = CMatrix::from_row_slice(2, 2, &[cre(2.0), Complex::new(0.5, 0.5), Complex::new(0.5, -0.5), cre(1.0)]);
        assert!((psd_project(&pd).unwrap() - &pd).norm() < 1e-12);
        let twice = psd_project(&p).unwrap();
        assert!((twice - &p).norm() < 1e-15);
    }

    #[test]
    fn field_matches_pairwise_estimators() {
        let b = basis(6);
        let reals: Vec<CMatrix<f64>> = (0..5)
            .map(|m| CMatrix::from_fn(6, 3, |i, j| cre(((m * 7 + i * 3 + j) as f64 * 0.77).sin())))
            .collect();
        let xs = MultivariateGraphSignal::new(reals.iter().map(|r| r.columns(0, 2).into_owned()).collect(), None).unwrap();
        let ys = MultivariateGraphSignal::new(reals.iter().map(|r| r.columns(2, 1).into_owned()).collect(), None).unwrap();
        let cfg = EstimatorConfig { ridge: 0.0, ..Default::default() };
        let field = spectral_matrix_field(&xs, &ys, &b, &cfg).unwrap();
        let col = |m: &CMatrix<f64>, j: usize| m.column(j).into_owned();
        let x0: Vec<_> = xs.realizations().iter().map(|r| col(r, 0)).collect();
        let x1: Vec<_> = xs.realizations().iter().map(|r| col(r, 1)).collect();
        let y0: Vec<_> = ys.realizations().iter().map(|r| col(r, 0)).collect();
        let c01 = realization_average_csd(&x0, &x1, &b, &cfg).unwrap();
        let c0y = realization_average_csd(&x0, &y0, &b, &cfg).unwrap();
        for l in 0..6 {
            assert!((field.p_x(l)[(0, 1)] - c01[l]).norm() < 1e-10);
            assert!((field.p_xy(l)[(0, 0)] - c0y[l]).norm() < 1e-10);
            assert_eq!(field.p_yx(l), field.p_xy(l).adjoint());
        }
    }
}
