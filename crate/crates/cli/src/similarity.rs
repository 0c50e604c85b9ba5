//! Label-similarity graphs: same-label images joined by cosine similarity.

use gccha_core::{build_graph, GraphF64};

use crate::{CliError, CliResult};

/// Weight of the edges added to join otherwise disconnected components.
pub const BRIDGE_WEIGHT: f64 = 1e-6;

fn cosine(a: &[f64], b: &[f64], na: f64, nb: f64) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Undirected graph with an edge between every pair of same-label images,
/// weighted by their cosine similarity clamped to `[0, 1]`; zero weights are
/// dropped. With `bridge`, components are chained in order of their lowest
/// node index by edges of weight [`BRIDGE_WEIGHT`] between those nodes.
pub fn build_similarity_graph(features: &[Vec<f64>], labels: &[i64], bridge: bool) -> CliResult<GraphF64> {
    let n = features.len();
    if labels.len() != n {
        return Err(CliError::Validation(format!("{} feature rows but {} labels", n, labels.len())));
    }
    let norms: Vec<f64> = features.iter().map(|f| f.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    if let Some(i) = norms.iter().position(|&v| v == 0.0) {
        return Err(CliError::Validation(format!("image {i} has an all-zero pixel vector")));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if labels[i] == labels[j] {
                let w = cosine(&features[i], &features[j], norms[i], norms[j]);
                if w > 0.0 {
                    edges.push((i, j, w));
                }
            }
        }
    }
    if bridge {
        let roots = component_roots(n, &edges);
        for pair in roots.windows(2) {
            edges.push((pair[0], pair[1], BRIDGE_WEIGHT));
        }
    }
    build_graph(edges, n, false).map_err(CliError::from)
}

/// Lowest node index of each connected component, ascending.
fn component_roots(n: usize, edges: &[(usize, usize, f64)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b, _) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            // Keep the smaller index as the representative.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).collect()
}
