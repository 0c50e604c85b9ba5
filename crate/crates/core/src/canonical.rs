//! Canonical coherence analysis: per-frequency solves, canonical filter banks
//! and reduced-rank prediction.
//!
//! All eigenproblems are posed in whitened (Hermitian) form. With whitening
//! maps `M_X^H P_X M_X = I`, `M_Y^H P_Y M_Y = I` (e.g. `P^{-1/2}`) and
//! `K(λ) = M_X^H P_XY M_Y`, the canonical coherences are the eigenvalues of
//! `K^H K` (equivalently `K K^H`), and the canonical filters are the whitened
//! eigenvectors mapped back through `M_X`, `M_Y`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SpectralBasis;
use crate::linalg::{
    complement_vector, enforce_hermitian, fix_phase, frobenius, hermitian_eigen, hermitian_roots,
    cholesky_whitener, orthonormalize_against, quad_form, unphase, HermitianRoots,
};
use crate::scalar::{cre, lit, CMatrix, CVector, Complex, Float};
use crate::signal::{apply_filter_bank, FilterBank, MultivariateGraphSignal};
use crate::spectral::SpectralMatrixField;

/// Numerical settings for the per-frequency solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T: Float> {
    /// Eigenvalue floor for inverse square roots, relative to `tr(P)/dim`.
    /// Half the default estimation ridge, so ridged blocks are never floored.
    pub floor: T,
}

impl<T: Float> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig { floor: lit(5e-9) }
    }
}

/// Canonical pairs at a single graph frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySolution<T: Float> {
    pub frequency: Complex<T>,
    /// `γ_1 ≥ … ≥ γ_r ≥ 0`.
    pub coherences: Vec<T>,
    /// `h_i` with `h_i^H P_X h_i = 1`.
    pub h: Vec<CVector<T>>,
    /// `f_i` with `f_i^H P_Y f_i = 1`.
    pub f: Vec<CVector<T>>,
    /// Full spectrum of `P_YX P_X^{-1} P_XY`, descending (empty when not requested).
    pub tau: Vec<T>,
}

impl<T: Float> FrequencySolution<T> {
    pub fn rank(&self) -> usize {
        self.h.len()
    }

    /// `H(λ)`: row `i` is `h_i^H`.
    pub fn h_matrix(&self) -> CMatrix<T> {
        rows_from_adjoints(&self.h)
    }

    /// `F(λ)`: row `i` is `f_i^H`.
    pub fn f_matrix(&self) -> CMatrix<T> {
        rows_from_adjoints(&self.f)
    }

    fn rotate(&mut self, i: usize, u: Complex<T>) {
        self.h[i] *= u;
        self.f[i] *= u;
    }
}

fn rows_from_adjoints<T: Float>(vs: &[CVector<T>]) -> CMatrix<T> {
    let r = vs.len();
    let d = vs.first().map_or(0, |v| v.len());
    CMatrix::from_fn(r, d, |i, j| vs[i][j].conj())
}

fn check_blocks<T: Float>(p_x: &CMatrix<T>, p_y: &CMatrix<T>, p_xy: &CMatrix<T>, r: usize) -> Result<(usize, usize)> {
    let (p, q) = (p_x.nrows(), p_y.nrows());
    if p_x.ncols() != p || p_y.ncols() != q || p_xy.shape() != (p, q) {
        return Err(Error::DimensionMismatch {
            expected: p * q,
            found: p_xy.nrows() * p_xy.ncols(),
            context: "spectral block shapes",
        });
    }
    if r == 0 {
        return Err(Error::InvalidConfig("rank must be at least 1".into()));
    }
    if r > p.min(q) {
        return Err(Error::RankTooLarge { requested: r, max: p.min(q) });
    }
    Ok((p, q))
}

fn roots<T: Float>(m: &CMatrix<T>, cfg: &SolverConfig<T>, which: &'static str) -> Result<HermitianRoots<T>> {
    hermitian_roots(m, cfg.floor)?.ok_or(Error::SingularSpectralMatrix { frequency: 0, which })
}

/// A whitening map `M` with `M^H P M = I`: the inverse Cholesky factor
/// `L^{-H}` when `P` clears the eigenvalue floor, the floored inverse square
/// root otherwise. Canonical pairs do not depend on which whitening is used.
fn whitener<T: Float>(m: &CMatrix<T>, cfg: &SolverConfig<T>, which: &'static str) -> Result<CMatrix<T>> {
    let dim = m.nrows();
    let trace = (0..dim).fold(T::ZERO, |a, i| a + m[(i, i)].re);
    let floor = cfg.floor * trace / crate::scalar::from_usize::<T>(dim.max(1));
    if trace > T::ZERO {
        if let Some(w) = cholesky_whitener(m, floor) {
            return Ok(w);
        }
    }
    Ok(roots(m, cfg, which)?.inv_sqrt)
}

type SingularPairs<T> = (Vec<T>, Vec<CVector<T>>, Vec<CVector<T>>);

/// Orthonormal singular pairs `(σ_i², a_i, b_i)` of `k` with `k b_i = σ_i a_i`,
/// from the Hermitian eigenproblem on the smaller side.
fn whitened_pairs<T: Float>(k: &CMatrix<T>, r: usize) -> Result<SingularPairs<T>> {
    let (p, q) = k.shape();
    if p < q {
        let (g, b, a) = whitened_pairs(&k.adjoint(), r)?;
        return Ok((g, a, b));
    }
    // q ≤ p: eigenvectors of K^H K live on the q side.
    let mut m = k.ad_mul(k);
    enforce_hermitian(&mut m);
    let eig = hermitian_eigen(&m)?.descending();
    let scale = frobenius(k);
    let cutoff = lit::<T>(1e-8) * scale;
    let mut gammas = Vec::with_capacity(r);
    let mut a_vecs: Vec<CVector<T>> = Vec::with_capacity(r);
    let mut b_vecs = Vec::with_capacity(r);
    for i in 0..r {
        let b = eig.vectors.column(i).into_owned();
        let mut a = k * &b;
        let raw = a.norm();
        let resid = orthonormalize_against(&mut a, &a_vecs);
        if !(raw > cutoff) || !(resid > lit::<T>(0.5) * raw) {
            a = complement_vector(p, &a_vecs);
        }
        let g = eig.values[i];
        gammas.push(if g > T::ZERO { g } else { T::ZERO });
        a_vecs.push(a);
        b_vecs.push(b);
    }
    Ok((gammas, a_vecs, b_vecs))
}

fn unit_quadratic<T: Float>(v: &mut CVector<T>, m: &CMatrix<T>) {
    let qf = quad_form(m, v);
    if qf > T::ZERO {
        *v /= cre(qf.sqrt());
    }
}

fn solve_inner<T: Float>(
    p_x: &CMatrix<T>,
    p_y: &CMatrix<T>,
    p_xy: &CMatrix<T>,
    r: usize,
    cfg: &SolverConfig<T>,
    with_tau: bool,
) -> Result<FrequencySolution<T>> {
    check_blocks(p_x, p_y, p_xy, r)?;
    let mx = whitener(p_x, cfg, "P_X")?;
    let my = whitener(p_y, cfg, "P_Y")?;
    let k = mx.ad_mul(p_xy) * &my;
    let (coherences, a, b) = whitened_pairs(&k, r)?;
    let mut sol = FrequencySolution {
        frequency: cre(T::ZERO),
        coherences,
        h: a.iter().map(|v| &mx * v).collect(),
        f: b.iter().map(|v| &my * v).collect(),
        tau: Vec::new(),
    };
    for i in 0..r {
        unit_quadratic(&mut sol.h[i], p_x);
        unit_quadratic(&mut sol.f[i], p_y);
        let mut probe = sol.h[i].clone();
        let u = fix_phase(&mut probe);
        sol.rotate(i, u);
    }
    if with_tau {
        let mut t = p_xy.adjoint() * (&mx * mx.adjoint()) * p_xy;
        enforce_hermitian(&mut t);
        sol.tau = hermitian_eigen(&t)?
            .descending()
            .values
            .into_iter()
            .map(|v| if v > T::ZERO { v } else { T::ZERO })
            .collect();
    }
    Ok(sol)
}

/// Canonical pairs maximizing coherence at one frequency.
///
/// `P_X`, `P_Y` must be Hermitian positive definite; `r ≤ min(p, q)`.
pub fn solve_frequency<T: Float>(
    p_x: &CMatrix<T>,
    p_y: &CMatrix<T>,
    p_xy: &CMatrix<T>,
    r: usize,
) -> Result<FrequencySolution<T>> {
    solve_inner(p_x, p_y, p_xy, r, &SolverConfig::default(), true)
}

pub fn solve_frequency_with<T: Float>(
    p_x: &CMatrix<T>,
    p_y: &CMatrix<T>,
    p_xy: &CMatrix<T>,
    r: usize,
    cfg: &SolverConfig<T>,
) -> Result<FrequencySolution<T>> {
    solve_inner(p_x, p_y, p_xy, r, cfg, true)
}

/// Canonical graph signals and the filter banks that produce them.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSolution<T: Float> {
    /// `r × p` responses; `Z = H_bank(X)`.
    pub h_bank: FilterBank<T>,
    /// `r × q` responses; `W = F_bank(Y)`.
    pub f_bank: FilterBank<T>,
    pub z: MultivariateGraphSignal<T>,
    pub w: MultivariateGraphSignal<T>,
    /// `coherence[i][ℓ] = γ̂_{i+1}(λ_ℓ)`.
    pub coherence: Vec<Vec<T>>,
    pub frequencies: Vec<Complex<T>>,
    /// Offsets `F(μ^Y) − H(μ^X)` per component (`n × r`), when the inputs
    /// carry enough realizations to estimate means.
    pub mu: Option<CMatrix<T>>,
}

impl<T: Float> CanonicalSolution<T> {
    pub fn rank(&self) -> usize {
        self.coherence.len()
    }
}

/// Solves every frequency of `field`, aligning the phases of each component
/// across neighboring frequencies.
pub fn solve_field<T: Float>(field: &SpectralMatrixField<T>, r: usize, cfg: &SolverConfig<T>) -> Result<Vec<FrequencySolution<T>>> {
    let mut sols = (0..field.len())
        .into_par_iter()
        .map(|l| {
            solve_inner(field.p_x(l), field.p_y(l), field.p_xy(l), r, cfg, false)
                .map(|mut s| {
                    s.frequency = field.frequencies()[l];
                    s
                })
                .map_err(|e| e.with_frequency(l))
        })
        .collect::<Result<Vec<_>>>()?;
    align_phases(&mut sols);
    Ok(sols)
}

/// Rotates `h_i(λ_ℓ)` (and `f_i(λ_ℓ)` with it) to maximize the real part of
/// its inner product with `h_i(λ_{ℓ−1})`.
fn align_phases<T: Float>(sols: &mut [FrequencySolution<T>]) {
    for l in 1..sols.len() {
        let (done, rest) = sols.split_at_mut(l);
        let prev = &done[l - 1];
        let cur = &mut rest[0];
        for i in 0..cur.rank() {
            let ip = prev.h[i].dotc(&cur.h[i]);
            let scale = prev.h[i].norm() * cur.h[i].norm();
            if crate::scalar::cabs(ip) > lit::<T>(1e-12) * scale {
                cur.rotate(i, unphase(ip));
            }
        }
    }
}

fn sample_mean<T: Float>(x: &MultivariateGraphSignal<T>) -> CMatrix<T> {
    let mut mean = CMatrix::<T>::zeros(x.nodes(), x.dim());
    for r in x.realizations() {
        mean += r;
    }
    mean / cre(crate::scalar::from_usize::<T>(x.realization_count()))
}

/// Runs the full analysis: per-frequency solves, filter banks and canonical signals.
pub fn run_gccha<T: Float>(
    x: &MultivariateGraphSignal<T>,
    y: &MultivariateGraphSignal<T>,
    b: &SpectralBasis<T>,
    field: &SpectralMatrixField<T>,
    r: usize,
) -> Result<CanonicalSolution<T>> {
    run_gccha_with(x, y, b, field, r, &SolverConfig::default())
}

pub fn run_gccha_with<T: Float>(
    x: &MultivariateGraphSignal<T>,
    y: &MultivariateGraphSignal<T>,
    b: &SpectralBasis<T>,
    field: &SpectralMatrixField<T>,
    r: usize,
    cfg: &SolverConfig<T>,
) -> Result<CanonicalSolution<T>> {
    let n = b.size();
    if field.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: field.len(), context: "field frequencies" });
    }
    if field.p() != x.dim() || field.q() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: field.p() + field.q(),
            found: x.dim() + y.dim(),
            context: "field dimensions vs signal dimensions",
        });
    }
    let sols = solve_field(field, r, cfg)?;
    let h_bank = FilterBank::new(sols.iter().map(FrequencySolution::h_matrix).collect())?;
    let f_bank = FilterBank::new(sols.iter().map(FrequencySolution::f_matrix).collect())?;
    let z = apply_filter_bank(&h_bank, x, b)?;
    let w = apply_filter_bank(&f_bank, y, b)?;
    let coherence = (0..r).map(|i| sols.iter().map(|s| s.coherences[i]).collect()).collect();
    let mu = if x.realization_count() >= 2 {
        let mz = h_bank.apply_realization(&sample_mean(x), b)?;
        let mw = f_bank.apply_realization(&sample_mean(y), b)?;
        Some(mw - mz)
    } else {
        None
    };
    Ok(CanonicalSolution {
        h_bank,
        f_bank,
        z,
        w,
        coherence,
        frequencies: field.frequencies().to_vec(),
        mu,
    })
}

/// Filters from the whitening-constrained least-squares formulation:
/// `H = D_r^H P_X^{-1/2}`, `F = E_r^H P_Y^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedFilters<T: Float> {
    pub h: CMatrix<T>,
    pub f: CMatrix<T>,
    /// Shared leading eigenvalues of the two whitened matrices.
    pub coherences: Vec<T>,
}

/// Minimizes `Σ_i E|W_i − μ_i − Z_i|²` subject to `H P_X H^H = I_r` and
/// `F P_Y F^H = I_r` at every frequency. Each side's eigenvectors are computed
/// from its own whitened matrix; `e_i` is phased so that `d_i^H K e_i ≥ 0`.
pub fn solve_constrained_filters<T: Float>(
    field: &SpectralMatrixField<T>,
    r: usize,
) -> Result<Vec<ConstrainedFilters<T>>> {
    let cfg = SolverConfig::default();
    (0..field.len())
        .map(|l| {
            constrained_at(field.p_x(l), field.p_y(l), field.p_xy(l), r, &cfg).map_err(|e| e.with_frequency(l))
        })
        .collect()
}

fn constrained_at<T: Float>(
    p_x: &CMatrix<T>,
    p_y: &CMatrix<T>,
    p_xy: &CMatrix<T>,
    r: usize,
    cfg: &SolverConfig<T>,
) -> Result<ConstrainedFilters<T>> {
    check_blocks(p_x, p_y, p_xy, r)?;
    let rx = roots(p_x, cfg, "P_X")?;
    let ry = roots(p_y, cfg, "P_Y")?;
    let p_yx = p_xy.adjoint();
    let mut mx = &rx.inv_sqrt * p_xy * ry.inverse() * &p_yx * &rx.inv_sqrt;
    let mut my = &ry.inv_sqrt * &p_yx * rx.inverse() * p_xy * &ry.inv_sqrt;
    enforce_hermitian(&mut mx);
    enforce_hermitian(&mut my);
    let dx = hermitian_eigen(&mx)?.descending();
    let ey = hermitian_eigen(&my)?.descending();
    let k = &rx.inv_sqrt * p_xy * &ry.inv_sqrt;
    let mut d_rows = Vec::with_capacity(r);
    let mut e_rows = Vec::with_capacity(r);
    for i in 0..r {
        let d = dx.vectors.column(i).into_owned();
        let mut e = ey.vectors.column(i).into_owned();
        let c = d.dotc(&(&k * &e));
        e *= unphase(c);
        d_rows.push(d);
        e_rows.push(e);
    }
    let h = rows_from_adjoints(&d_rows) * &rx.inv_sqrt;
    let f = rows_from_adjoints(&e_rows) * &ry.inv_sqrt;
    let coherences = dx.values[..r].iter().map(|&v| if v > T::ZERO { v } else { T::ZERO }).collect();
    Ok(ConstrainedFilters { h, f, coherences })
}

/// Rank-`r` linear predictor of `Y` from filtered `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRankPredictor<T: Float> {
    /// `q × p` responses `A(λ) = G(λ) H(λ)`.
    pub a_bank: FilterBank<T>,
    /// `q × r` reconstruction responses.
    pub g_bank: FilterBank<T>,
    /// `r × p` reduction responses.
    pub h_bank: FilterBank<T>,
    /// Intercepts `μ_i`, one column per output dimension (`n × q`).
    pub mu: CMatrix<T>,
    /// Minimum of the criterion the predictor was fitted for: the plain mean
    /// squared error, or the `P_Y^{-1/2}`-weighted error when `weighted`.
    pub min_mse: T,
    pub weighted: bool,
    /// Per-frequency eigenvalues driving the fit (descending): `τ` for the
    /// plain criterion, the canonical coherences for the weighted one.
    pub spectrum: Vec<Vec<T>>,
}

impl<T: Float> ReducedRankPredictor<T> {
    pub fn rank(&self) -> usize {
        self.h_bank.outputs()
    }

    /// Error spectral matrix `P_ε(λ_ℓ)` of this predictor under `field`.
    pub fn error_spectrum(&self, field: &SpectralMatrixField<T>, l: usize) -> CMatrix<T> {
        let a = self.a_bank.response(l);
        let cross = a * field.p_xy(l);
        let mut e = field.p_y(l) - &cross - cross.adjoint() + a * field.p_x(l) * a.adjoint();
        enforce_hermitian(&mut e);
        e
    }

    /// `Σ_ℓ tr P_ε(λ_ℓ)`: the mean squared error when the intercepts are exact.
    pub fn mse_under(&self, field: &SpectralMatrixField<T>) -> T {
        (0..field.len()).fold(T::ZERO, |acc, l| acc + self.error_spectrum(field, l).trace().re)
    }

    /// `Σ_ℓ tr[P_Y^{-1/2} P_ε P_Y^{-1/2}]`.
    pub fn weighted_mse_under(&self, field: &SpectralMatrixField<T>) -> Result<T> {
        let mut acc = T::ZERO;
        for l in 0..field.len() {
            let ry = roots(field.p_y(l), &SolverConfig::default(), "P_Y").map_err(|e| e.with_frequency(l))?;
            acc += (&ry.inv_sqrt * self.error_spectrum(field, l) * &ry.inv_sqrt).trace().re;
        }
        Ok(acc)
    }
}

/// Fits the rank-`r` predictor minimizing the mean squared error (or its
/// `P_Y^{-1/2}`-weighted variant). `means_x` (`n × p`) and `means_y` (`n × q`)
/// are the signal means; pass zeros for centered data.
pub fn reduced_rank_predictor<T: Float>(
    field: &SpectralMatrixField<T>,
    b: &SpectralBasis<T>,
    means_x: &CMatrix<T>,
    means_y: &CMatrix<T>,
    r: usize,
    weighted: bool,
) -> Result<ReducedRankPredictor<T>> {
    let (p, q, n) = (field.p(), field.q(), field.len());
    if n != b.size() || means_x.shape() != (n, p) || means_y.shape() != (n, q) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: means_x.nrows(),
            context: "predictor means / field frequencies",
        });
    }
    if r == 0 || r > q {
        return Err(Error::RankTooLarge { requested: r, max: q });
    }
    let cfg = SolverConfig::default();
    let mut a_resp = Vec::with_capacity(n);
    let mut g_resp = Vec::with_capacity(n);
    let mut h_resp = Vec::with_capacity(n);
    let mut spectrum = Vec::with_capacity(n);
    let mut min_mse = T::ZERO;
    for l in 0..n {
        let at = |e: Error| e.with_frequency(l);
        let rx = roots(field.p_x(l), &cfg, "P_X").map_err(at)?;
        let p_yx = field.p_yx(l);
        let regress = &p_yx * rx.inverse();
        let mut t = &regress * field.p_xy(l);
        enforce_hermitian(&mut t);
        if weighted {
            let ry = roots(field.p_y(l), &cfg, "P_Y").map_err(at)?;
            let mut mw = &ry.inv_sqrt * &t * &ry.inv_sqrt;
            enforce_hermitian(&mut mw);
            let eig = hermitian_eigen(&mw)?.descending();
            let eta = eig.vectors.columns(0, r).into_owned();
            let g = &ry.sqrt * &eta;
            let h = eta.adjoint() * &ry.inv_sqrt * &regress;
            let trace_rest = T::from_usize(q).unwrap_or(T::ZERO) - mw.trace().re;
            let tail = eig.values[r..].iter().fold(T::ZERO, |a, &v| a + v);
            min_mse += trace_rest + tail;
            a_resp.push(&g * &h);
            g_resp.push(g);
            h_resp.push(h);
            spectrum.push(eig.values);
        } else {
            let eig = hermitian_eigen(&t)?.descending();
            let g = eig.vectors.columns(0, r).into_owned();
            let h = g.adjoint() * &regress;
            let tail = eig.values[r..].iter().fold(T::ZERO, |a, &v| a + v);
            min_mse += (field.p_y(l) - &t).trace().re + tail;
            a_resp.push(&g * &h);
            g_resp.push(g);
            h_resp.push(h);
            spectrum.push(eig.values);
        }
    }
    let a_bank = FilterBank::new(a_resp)?;
    let mu = means_y - a_bank.apply_realization(means_x, b)?;
    Ok(ReducedRankPredictor {
        a_bank,
        g_bank: FilterBank::new(g_resp)?,
        h_bank: FilterBank::new(h_resp)?,
        mu,
        min_mse: if min_mse > T::ZERO { min_mse } else { T::ZERO },
        weighted,
        spectrum,
    })
}
