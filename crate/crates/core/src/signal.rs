//! Multivariate graph signals and banks of linear shift-invariant filters.

use crate::error::{Error, Result};
use crate::graph::SpectralBasis;
use crate::linalg::is_real;
use crate::scalar::{CMatrix, Float};

/// An `n × d` table of node values, repeated over `M ≥ 1` realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateGraphSignal<T: Float> {
    realizations: Vec<CMatrix<T>>,
    labels: Vec<String>,
}

impl<T: Float> MultivariateGraphSignal<T> {
    pub fn new(realizations: Vec<CMatrix<T>>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = realizations
            .first()
            .ok_or(Error::TooFewRealizations { required: 1, found: 0 })?;
        let (n, d) = first.shape();
        if n == 0 || d == 0 {
            return Err(Error::InvalidConfig("signal needs at least one node and one dimension".into()));
        }
        for r in &realizations {
            if r.shape() != (n, d) {
                return Err(Error::DimensionMismatch {
                    expected: n * d,
                    found: r.nrows() * r.ncols(),
                    context: "realization shape",
                });
            }
        }
        let labels = match labels {
            Some(l) if l.len() != d => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: l.len(),
                    context: "dimension labels",
                })
            }
            Some(l) => l,
            None => (1..=d).map(|i| format!("d{i}")).collect(),
        };
        Ok(MultivariateGraphSignal { realizations, labels })
    }

    /// A single realization.
    pub fn single(values: CMatrix<T>) -> Result<Self> {
        Self::new(vec![values], None)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: labels.len(),
                context: "dimension labels",
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn nodes(&self) -> usize {
        self.realizations[0].nrows()
    }

    pub fn dim(&self) -> usize {
        self.realizations[0].ncols()
    }

    pub fn realization_count(&self) -> usize {
        self.realizations.len()
    }

    pub fn realizations(&self) -> &[CMatrix<T>] {
        &self.realizations
    }

    pub fn realization(&self, m: usize) -> &CMatrix<T> {
        &self.realizations[m]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_real(&self) -> bool {
        self.realizations.iter().all(is_real)
    }

    /// Stacks the dimensions of `self` and `other` side by side, realization by realization.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.nodes() != other.nodes() || self.realization_count() != other.realization_count() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes() * self.realization_count(),
                found: other.nodes() * other.realization_count(),
                context: "node axis / realization count of paired signals",
            });
        }
        let (n, p, q) = (self.nodes(), self.dim(), other.dim());
        let reals = self
            .realizations
            .iter()
            .zip(&other.realizations)
            .map(|(a, b)| {
                let mut m = CMatrix::zeros(n, p + q);
                m.columns_mut(0, p).copy_from(a);
                m.columns_mut(p, q).copy_from(b);
                m
            })
            .collect();
        let labels = self.labels.iter().chain(other.labels.iter()).cloned().collect();
        Self::new(reals, Some(labels))
    }
}

/// Per-frequency response matrices (`r_out × r_in`, one per graph frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank<T: Float> {
    responses: Vec<CMatrix<T>>,
}

impl<T: Float> FilterBank<T> {
    pub fn new(responses: Vec<CMatrix<T>>) -> Result<Self> {
        let first = responses
            .first()
            .ok_or_else(|| Error::InvalidConfig("filter bank needs at least one frequency".into()))?;
        let shape = first.shape();
        for r in &responses {
            if r.shape() != shape {
                return Err(Error::DimensionMismatch {
                    expected: shape.0 * shape.1,
                    found: r.nrows() * r.ncols(),
                    context: "filter bank response shape",
                });
            }
        }
        Ok(FilterBank { responses })
    }

    /// Identity responses at every one of `n` frequencies.
    pub fn identity(n: usize, d: usize) -> Self {
        FilterBank { responses: vec![CMatrix::identity(d, d); n] }
    }

    pub fn responses(&self) -> &[CMatrix<T>] {
        &self.responses
    }

    pub fn response(&self, l: usize) -> &CMatrix<T> {
        &self.responses[l]
    }

    pub fn frequencies(&self) -> usize {
        self.responses.len()
    }

    pub fn outputs(&self) -> usize {
        self.responses[0].nrows()
    }

    pub fn inputs(&self) -> usize {
        self.responses[0].ncols()
    }

    /// `(self ∘ inner)(λ) = self(λ) · inner(λ)`.
    pub fn compose(&self, inner: &FilterBank<T>) -> Result<FilterBank<T>> {
        if self.inputs() != inner.outputs() || self.frequencies() != inner.frequencies() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                found: inner.outputs(),
                context: "filter composition",
            });
        }
        FilterBank::new(self.responses.iter().zip(&inner.responses).map(|(a, b)| a * b).collect())
    }

    /// The same bank with every response row rescaled to unit Euclidean norm
    /// (zero rows stay zero): filters scaled as plain eigenvectors rather than
    /// to unit output power.
    pub fn unit_row_norms(&self) -> FilterBank<T> {
        let responses = self
            .responses
            .iter()
            .map(|m| {
                let mut m = m.clone();
                for mut row in m.row_iter_mut() {
                    let norm = row.norm();
                    if norm > T::zero() {
                        row.unscale_mut(norm);
                    }
                }
                m
            })
            .collect();
        FilterBank { responses }
    }

    /// Applies the bank to one `n × r_in` realization.
    pub fn apply_realization(&self, x: &CMatrix<T>, b: &SpectralBasis<T>) -> Result<CMatrix<T>> {
        if x.ncols() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                found: x.ncols(),
                context: "filter input width vs signal dimension",
            });
        }
        if self.frequencies() != b.size() {
            return Err(Error::DimensionMismatch {
                expected: b.size(),
                found: self.frequencies(),
                context: "filter bank frequencies vs graph size",
            });
        }
        let coeffs = b.gft_columns(x)?;
        let mut out = CMatrix::zeros(b.size(), self.outputs());
        for (l, resp) in self.responses.iter().enumerate() {
            let row = resp * coeffs.row(l).transpose();
            out.row_mut(l).copy_from(&row.transpose());
        }
        b.inverse_gft_columns(&out)
    }
}

/// Filters every realization of `x` through `f` in the graph frequency domain.
pub fn apply_filter_bank<T: Float>(
    f: &FilterBank<T>,
    x: &MultivariateGraphSignal<T>,
    b: &SpectralBasis<T>,
) -> Result<MultivariateGraphSignal<T>> {
    let out = x
        .realizations()
        .iter()
        .map(|r| f.apply_realization(r, b))
        .collect::<Result<Vec<_>>>()?;
    MultivariateGraphSignal::new(out, None)
}
