//! Loadings, cross-loadings, communality and adequacy of canonical graph signals.
//!
//! Everything is computed from the filters and the spectral matrix field; the
//! canonical signals are never re-estimated.

use crate::canonical::CanonicalSolution;
use crate::error::{Error, Result};
use crate::scalar::{abs2, CMatrix, Float, RMatrix};
use crate::spectral::SpectralMatrixField;

/// Squared coherences `c_ij(λ_ℓ)` between canonical component `i` and original
/// channel `j`, one `r × d` matrix per frequency, plus their signed square roots.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingTable<T: Float> {
    pub coherence: Vec<RMatrix<T>>,
    /// `sign(Re p_ij) · √c_ij`.
    pub signed: Vec<RMatrix<T>>,
}

impl<T: Float> LoadingTable<T> {
    pub fn components(&self) -> usize {
        self.coherence[0].nrows()
    }

    pub fn channels(&self) -> usize {
        self.coherence[0].ncols()
    }

    pub fn frequencies(&self) -> usize {
        self.coherence.len()
    }

    fn max_entry(&self) -> T {
        self.coherence.iter().flat_map(|m| m.iter().copied()).fold(T::ZERO, |a, b| a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadingsReport<T: Float> {
    pub loadings_zx: LoadingTable<T>,
    pub loadings_wy: LoadingTable<T>,
    pub cross_loadings_zy: LoadingTable<T>,
    pub cross_loadings_wx: LoadingTable<T>,
    /// `p × n`.
    pub communality_x: RMatrix<T>,
    /// `q × n`.
    pub communality_y: RMatrix<T>,
    /// `r × n`.
    pub adequacy_z: RMatrix<T>,
    pub adequacy_w: RMatrix<T>,
    /// Running sums of the adequacy rows over the component index.
    pub cumulative_z: RMatrix<T>,
    pub cumulative_w: RMatrix<T>,
}

/// Upper bound tolerance on loadings and communalities.
pub const LOADING_BOUND_TOL: f64 = 1e-10;

/// `num = filter · block` (`r × d`), `c_ij = |num_ij|² / (power_i · diag_j)`.
fn table<T: Float>(num: &[CMatrix<T>], power: &[Vec<T>], diag: &[Vec<T>]) -> LoadingTable<T> {
    let mut coherence = Vec::with_capacity(num.len());
    let mut signed = Vec::with_capacity(num.len());
    for ((m, pz), px) in num.iter().zip(power).zip(diag) {
        let c = RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            let den = pz[i] * px[j];
            if den > T::ZERO {
                abs2(m[(i, j)]) / den
            } else {
                T::ZERO
            }
        });
        let s = RMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            let root = c[(i, j)].sqrt();
            if m[(i, j)].re < T::ZERO {
                -root
            } else {
                root
            }
        });
        coherence.push(c);
        signed.push(s);
    }
    LoadingTable { coherence, signed }
}

fn diag_re<T: Float>(m: &CMatrix<T>) -> Vec<T> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

/// Analytic loadings of `sol` under `field`.
pub fn loadings<T: Float>(sol: &CanonicalSolution<T>, field: &SpectralMatrixField<T>) -> Result<LoadingsReport<T>> {
    let n = field.len();
    if sol.h_bank.frequencies() != n || sol.h_bank.inputs() != field.p() || sol.f_bank.inputs() != field.q() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sol.h_bank.frequencies(),
            context: "canonical solution vs spectral field",
        });
    }
    let mut zx = Vec::with_capacity(n);
    let mut wy = Vec::with_capacity(n);
    let mut zy = Vec::with_capacity(n);
    let mut wx = Vec::with_capacity(n);
    let mut pz = Vec::with_capacity(n);
    let mut pw = Vec::with_capacity(n);
    let mut dx = Vec::with_capacity(n);
    let mut dy = Vec::with_capacity(n);
    for l in 0..n {
        let h = sol.h_bank.response(l);
        let f = sol.f_bank.response(l);
        let hp = h * field.p_x(l);
        let fp = f * field.p_y(l);
        pz.push(diag_re(&(&hp * h.adjoint())));
        pw.push(diag_re(&(&fp * f.adjoint())));
        zx.push(hp);
        wy.push(fp);
        zy.push(h * field.p_xy(l));
        wx.push(f * field.p_yx(l));
        dx.push(diag_re(field.p_x(l)));
        dy.push(diag_re(field.p_y(l)));
    }
    let loadings_zx = table(&zx, &pz, &dx);
    let loadings_wy = table(&wy, &pw, &dy);
    let cross_loadings_zy = table(&zy, &pz, &dy);
    let cross_loadings_wx = table(&wx, &pw, &dx);
    let communality_x = communality(&loadings_zx);
    let communality_y = communality(&loadings_wy);
    let (adequacy_z, cumulative_z) = adequacy(&loadings_zx);
    let (adequacy_w, cumulative_w) = adequacy(&loadings_wy);
    let report = LoadingsReport {
        loadings_zx,
        loadings_wy,
        cross_loadings_zy,
        cross_loadings_wx,
        communality_x,
        communality_y,
        adequacy_z,
        adequacy_w,
        cumulative_z,
        cumulative_w,
    };
    let worst = report.max_value();
    if !(worst <= T::ONE + crate::scalar::lit(1e-6)) {
        return Err(Error::InvalidField(format!(
            "loading bound violated: largest value {worst}; filters are not normalized against this field"
        )));
    }
    Ok(report)
}

impl<T: Float> LoadingsReport<T> {
    /// Largest loading, cross-loading or communality in the report.
    pub fn max_value(&self) -> T {
        let m = |x: &RMatrix<T>| x.iter().copied().fold(T::ZERO, |a, b| a.max(b));
        [
            self.loadings_zx.max_entry(),
            self.loadings_wy.max_entry(),
            self.cross_loadings_zy.max_entry(),
            self.cross_loadings_wx.max_entry(),
            m(&self.communality_x),
            m(&self.communality_y),
            m(&self.cumulative_z),
            m(&self.cumulative_w),
        ]
        .into_iter()
        .fold(T::ZERO, |a, b| a.max(b))
    }
}

/// Per-channel sums over components: `d × n`.
pub fn communality<T: Float>(t: &LoadingTable<T>) -> RMatrix<T> {
    RMatrix::from_fn(t.channels(), t.frequencies(), |j, l| {
        t.coherence[l].column(j).iter().fold(T::ZERO, |a, &b| a + b)
    })
}

/// Per-component averages over channels and their running sums: both `r × n`.
pub fn adequacy<T: Float>(t: &LoadingTable<T>) -> (RMatrix<T>, RMatrix<T>) {
    let d = T::from_usize(t.channels()).unwrap_or(T::ONE);
    let avg = RMatrix::from_fn(t.components(), t.frequencies(), |i, l| {
        t.coherence[l].row(i).iter().fold(T::ZERO, |a, &b| a + b) / d
    });
    let mut cum = avg.clone();
    for i in 1..cum.nrows() {
        for l in 0..cum.ncols() {
            cum[(i, l)] = cum[(i - 1, l)] + avg[(i, l)];
        }
    }
    (avg, cum)
}
