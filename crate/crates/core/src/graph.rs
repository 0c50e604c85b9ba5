//! Graphs, shift operators and the graph Fourier basis.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{
    fix_phase, frobenius, hermitian_eigen, hermitian_part, is_real, lex_cmp, normality_defect,
    to_complex,
};
use crate::scalar::{abs2, cabs, cre, lit, to_f64, CMatrix, CVector, Complex, Float, RMatrix};

/// Relative tolerance on the commutator `S S^H − S^H S` for normality.
pub const NORMALITY_TOL: f64 = 1e-10;
/// Relative eigenvalue gap below which basis columns count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Relative eigen-residual a basis must achieve.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `base` for double precision, loosened to a multiple of machine epsilon for
/// coarser scalar types.
fn scaled_tol<T: Float>(base: f64, eps_multiple: f64) -> T {
    lit::<T>(base).max(crate::scalar::eps::<T>() * lit(eps_multiple))
}

/// A weighted edge `(source, target, weight)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub source: usize,
    pub target: usize,
    pub weight: T,
}

impl<T> Edge<T> {
    pub fn new(source: usize, target: usize, weight: T) -> Self {
        Edge { source, target, weight }
    }
}

impl<T> From<(usize, usize, T)> for Edge<T> {
    fn from((source, target, weight): (usize, usize, T)) -> Self {
        Edge { source, target, weight }
    }
}

/// A finite, simple, connected, weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<T: Float> {
    node_count: usize,
    edges: Vec<Edge<T>>,
    directed: bool,
}

impl<T: Float> Graph<T> {
    /// Validates an edge list. Zero-weight edges are kept but do not connect nodes.
    pub fn new(edges: Vec<Edge<T>>, node_count: usize, directed: bool) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            for idx in [e.source, e.target] {
                if idx >= node_count {
                    return Err(Error::NodeOutOfRange { index: idx, n: node_count });
                }
            }
            if e.source == e.target {
                return Err(Error::SelfLoop { node: e.source });
            }
            if !(e.weight >= T::ZERO) || !e.weight.is_finite() {
                return Err(Error::NegativeWeight {
                    source_node: e.source,
                    target: e.target,
                    weight: to_f64(e.weight),
                });
            }
            let key = if directed {
                (e.source, e.target)
            } else {
                (e.source.min(e.target), e.source.max(e.target))
            };
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge { source_node: e.source, target: e.target });
            }
        }
        let g = Graph { node_count, edges, directed };
        if let Some(node) = g.first_unreachable() {
            return Err(Error::DisconnectedGraph { node });
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Weighted adjacency `W`; symmetric for undirected graphs.
    pub fn weight_matrix(&self) -> RMatrix<T> {
        let n = self.node_count;
        let mut w = RMatrix::<T>::zeros(n, n);
        for e in &self.edges {
            w[(e.source, e.target)] = e.weight;
            if !self.directed {
                w[(e.target, e.source)] = e.weight;
            }
        }
        w
    }

    /// Breadth-first search over positive-weight edges, ignoring direction.
    fn first_unreachable(&self) -> Option<usize> {
        let n = self.node_count;
        let mut adj = vec![Vec::new(); n];
        for e in self.edges.iter().filter(|e| e.weight > T::ZERO) {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.iter().position(|s| !s)
    }
}

/// Builds and validates a graph from `(source, target, weight)` triples.
pub fn build_graph<T: Float>(
    edges: impl IntoIterator<Item = (usize, usize, T)>,
    node_count: usize,
    directed: bool,
) -> Result<Graph<T>> {
    Graph::new(edges.into_iter().map(Edge::from).collect(), node_count, directed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    Laplacian,
    Adjacency,
    CustomNormal,
}

/// A normal graph shift operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator<T: Float> {
    matrix: CMatrix<T>,
    kind: ShiftKind,
}

impl<T: Float> ShiftOperator<T> {
    /// Wraps a user-supplied matrix after checking that it is square and normal.
    pub fn custom(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
                context: "shift operator must be square",
            });
        }
        check_normal(&matrix)?;
        Ok(ShiftOperator { matrix, kind: ShiftKind::CustomNormal })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }
}

fn check_normal<T: Float>(m: &CMatrix<T>) -> Result<()> {
    let defect = normality_defect(m);
    if !(defect <= scaled_tol::<T>(NORMALITY_TOL, 1e3)) {
        return Err(Error::NotNormal { residual: to_f64(defect) });
    }
    Ok(())
}

/// Combinatorial Laplacian `L = diag(W 1) − W` of an undirected graph.
pub fn laplacian<T: Float>(g: &Graph<T>) -> Result<ShiftOperator<T>> {
    if g.is_directed() {
        return Err(Error::DirectedGraphUnsupported);
    }
    let w = g.weight_matrix();
    let n = g.node_count();
    let mut l = -w.clone();
    for i in 0..n {
        l[(i, i)] = w.row(i).iter().fold(T::ZERO, |a, &b| a + b);
    }
    Ok(ShiftOperator { matrix: to_complex(&l), kind: ShiftKind::Laplacian })
}

/// Weighted adjacency as shift operator. Directed graphs must yield a normal matrix.
pub fn adjacency<T: Float>(g: &Graph<T>) -> Result<ShiftOperator<T>> {
    let m = to_complex(&g.weight_matrix());
    check_normal(&m)?;
    Ok(ShiftOperator { matrix: m, kind: ShiftKind::Adjacency })
}

/// Eigenbasis of a shift operator stored in low-to-high frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis<T: Float> {
    eigenvectors: CMatrix<T>,
    eigenvalues: Vec<Complex<T>>,
    frequency_keys: Vec<T>,
    kind: ShiftKind,
}

impl<T: Float> SpectralBasis<T> {
    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    pub fn frequency_keys(&self) -> &[T] {
        &self.frequency_keys
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, l: usize) -> CVector<T> {
        self.eigenvectors.column(l).into_owned()
    }

    /// True when every eigenvector is real, enabling real-valued signal paths.
    pub fn is_real(&self) -> bool {
        is_real(&self.eigenvectors)
    }

    /// Graph Fourier transform `V^H x`.
    pub fn gft(&self, x: &CVector<T>) -> Result<CVector<T>> {
        self.check_len(x.len())?;
        Ok(self.eigenvectors.ad_mul(x))
    }

    /// Inverse transform `V c`.
    pub fn inverse_gft(&self, coefficients: &CVector<T>) -> Result<CVector<T>> {
        self.check_len(coefficients.len())?;
        Ok(&self.eigenvectors * coefficients)
    }

    /// Column-wise GFT of an `n × d` table.
    pub fn gft_columns(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_len(x.nrows())?;
        Ok(self.eigenvectors.ad_mul(x))
    }

    pub fn inverse_gft_columns(&self, c: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_len(c.nrows())?;
        Ok(&self.eigenvectors * c)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                found: len,
                context: "signal length vs graph size",
            });
        }
        Ok(())
    }
}

/// Free-function form of [`SpectralBasis::gft`].
pub fn gft<T: Float>(x: &CVector<T>, b: &SpectralBasis<T>) -> Result<CVector<T>> {
    b.gft(x)
}

pub fn inverse_gft<T: Float>(c: &CVector<T>, b: &SpectralBasis<T>) -> Result<CVector<T>> {
    b.inverse_gft(c)
}

/// Default frequency key: the eigenvalue itself for Laplacians, `|1 − λ/ρ(S)|`
/// for adjacency operators and `|1 − λ|` for custom normal operators.
pub fn default_frequency_key<T: Float>(kind: ShiftKind, lambda: Complex<T>, spectral_radius: T) -> T {
    let one = cre(T::ONE);
    match kind {
        ShiftKind::Laplacian => lambda.re,
        ShiftKind::Adjacency if spectral_radius > T::ZERO => cabs(one - lambda / cre(spectral_radius)),
        ShiftKind::Adjacency | ShiftKind::CustomNormal => cabs(one - lambda),
    }
}

/// Eigendecomposition of a normal shift operator with the default frequency order.
pub fn spectral_basis<T: Float>(s: &ShiftOperator<T>) -> Result<SpectralBasis<T>> {
    let kind = s.kind();
    spectral_basis_by(s, move |lambda, rho| default_frequency_key(kind, lambda, rho))
}

/// Eigendecomposition with a caller-supplied frequency key `key(λ, ρ(S))`.
pub fn spectral_basis_by<T: Float>(
    s: &ShiftOperator<T>,
    key: impl Fn(Complex<T>, T) -> T,
) -> Result<SpectralBasis<T>> {
    let m = s.matrix();
    let n = m.nrows();
    check_normal(m)?;
    let scale = frobenius(m);
    let (vectors, values) = normal_eigen(m)?;

    let rho = values.iter().map(|z| cabs(*z)).fold(T::ZERO, |a, b| if b > a { b } else { a });
    let mut cols: Vec<(CVector<T>, Complex<T>, T)> = (0..n)
        .map(|j| {
            let mut v = vectors.column(j).into_owned();
            fix_phase(&mut v);
            (v, values[j], key(values[j], rho))
        })
        .collect();
    cols.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal));

    // Columns with (nearly) tied keys are ordered by eigenvalue, and genuinely
    // degenerate ones lexicographically by their phase-fixed entries.
    let tol = scaled_tol::<T>(DEGENERACY_TOL, 1e2) * if scale > T::ZERO { scale } else { T::ONE };
    let lex_tol = scaled_tol::<T>(DEGENERACY_TOL, 1e2);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cols[end].2 - cols[end - 1].2 <= tol {
            end += 1;
        }
        let group = &mut cols[start..end];
        group.sort_by(|a, b| {
            if cabs(a.1 - b.1) <= tol {
                lex_cmp(a.0.as_slice(), b.0.as_slice(), lex_tol)
            } else {
                a.1.re
                    .partial_cmp(&b.1.re)
                    .unwrap_or(Ordering::Equal)
                    .then(a.1.im.partial_cmp(&b.1.im).unwrap_or(Ordering::Equal))
            }
        });
        let floor = group.iter().map(|c| c.2).fold(group[0].2, |a, b| if b < a { b } else { a });
        group.iter_mut().for_each(|c| c.2 = floor);
        start = end;
    }

    let eigenvectors = CMatrix::from_columns(&cols.iter().map(|c| c.0.clone()).collect::<Vec<_>>());
    let eigenvalues: Vec<Complex<T>> = cols.iter().map(|c| c.1).collect();
    let frequency_keys: Vec<T> = cols.iter().map(|c| c.2).collect();

    let basis = SpectralBasis { eigenvectors, eigenvalues, frequency_keys, kind: s.kind() };
    let residual = max_eigen_residual(m, &basis);
    if scale > T::ZERO && residual > scaled_tol::<T>(RESIDUAL_TOL, 1e3) * scale {
        return Err(Error::EigenFailure(format!(
            "eigen residual {:e} exceeds tolerance",
            to_f64(residual)
        )));
    }
    Ok(basis)
}

/// `max_ℓ ‖S v_ℓ − λ_ℓ v_ℓ‖₂`.
pub fn max_eigen_residual<T: Float>(s: &CMatrix<T>, b: &SpectralBasis<T>) -> T {
    (0..b.size())
        .map(|l| {
            let v = b.vector(l);
            (s * &v - &v * b.eigenvalues[l]).norm()
        })
        .fold(T::ZERO, |a, x| if x > a { x } else { a })
}

/// Unitary eigendecomposition of a normal matrix via its commuting Hermitian
/// and skew-Hermitian parts.
fn normal_eigen<T: Float>(m: &CMatrix<T>) -> Result<(CMatrix<T>, Vec<Complex<T>>)> {
    let n = m.nrows();
    let scale = frobenius(m);
    let herm = hermitian_part(m);
    let skew_defect = frobenius(&(m - &herm));
    if skew_defect <= lit::<T>(1e-14) * scale {
        let eig = hermitian_eigen(&herm)?;
        return Ok((eig.vectors, eig.values.into_iter().map(cre).collect()));
    }
    // S = A + iB with A, B Hermitian and commuting.
    let minus_i = Complex::new(T::ZERO, -T::ONE);
    let b = (m - &herm) * minus_i;
    let mix = lit::<T>(0.577_215_664_901_532_9);
    let combo = &herm + &b * cre(mix);
    let eig = hermitian_eigen(&combo)?;
    let mut v = eig.vectors;
    let tol = scaled_tol::<T>(DEGENERACY_TOL, 1e2) * if scale > T::ZERO { scale } else { T::ONE };
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            // Resolve accidental ties of the combination by diagonalizing B,
            // then A, on the cluster subspace.
            for part in [&b, &herm] {
                let q = v.columns(start, end - start).into_owned();
                let restricted = q.ad_mul(&(part * &q));
                let sub = hermitian_eigen(&restricted)?;
                let rotated = &q * &sub.vectors;
                v.columns_mut(start, end - start).copy_from(&rotated);
            }
        }
        start = end;
    }
    let values = (0..n)
        .map(|j| {
            let col = v.column(j).into_owned();
            col.dotc(&(m * &col))
        })
        .collect();
    Ok((v, values))
}

/// Total variation of a graph signal.
///
/// Laplacian operators use the quadratic form `x^H L x`; every other operator
/// uses the `p`-Dirichlet form `(1/p) ‖x − S x‖_p^p`.
pub fn total_variation<T: Float>(x: &CVector<T>, s: &ShiftOperator<T>, p: T) -> Result<T> {
    if x.len() != s.size() {
        return Err(Error::DimensionMismatch {
            expected: s.size(),
            found: x.len(),
            context: "signal length vs shift operator",
        });
    }
    let sx = s.matrix() * x;
    match s.kind() {
        ShiftKind::Laplacian => Ok(x.dotc(&sx).re),
        _ => {
            if !(p > T::ZERO) {
                return Err(Error::InvalidConfig("norm order must be positive".into()));
            }
            let sum = (x - sx).iter().fold(T::ZERO, |acc, z| acc + abs2(*z).sqrt().powf(p));
            Ok(sum / p)
        }
    }
}
