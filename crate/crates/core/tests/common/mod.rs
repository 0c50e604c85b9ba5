#![allow(dead_code)]

use gccha_core::linalg::quad_form;
use gccha_core::*;

/// `(p, q, n)` for instance `k`, cycling through `p, q ∈ 1..=4`, `n ∈ 4..=16`.
pub fn dims(k: u64) -> (usize, usize, usize) {
    let p = 1 + (k % 4) as usize;
    let q = 1 + ((k / 4) % 4) as usize;
    let n = 4 + ((k * 7) % 13) as usize;
    (p, q, n)
}

pub fn random_field(seed: u64, p: usize, q: usize, n: usize) -> FieldF64 {
    let joint = random_joint_field::<f64>(seed, n, p + q, false);
    let freqs = (0..n).map(|l| Complex::new(l as f64, 0.0)).collect();
    SpectralMatrixField::from_joint(freqs, &joint, p).unwrap()
}

/// Sine of the angle between `span{a}` and `span{b}`.
pub fn line_angle_sin(a: &CVector<f64>, b: &CVector<f64>) -> f64 {
    let ua = a / Complex::new(a.norm(), 0.0);
    let ub = b / Complex::new(b.norm(), 0.0);
    let proj = &ua * ua.dotc(&ub);
    (ub - proj).norm()
}

/// Coherence `|u^H M v|² / (u^H M u · v^H M v)` of two filters under one block.
pub fn coherence_under(m: &CMatrix<f64>, u: &CVector<f64>, v: &CVector<f64>) -> f64 {
    let c = u.dotc(&(m * v));
    c.norm_sqr() / (quad_form(m, u) * quad_form(m, v))
}

pub fn path_graph(n: usize) -> GraphF64 {
    build_graph((0..n - 1).map(|i| (i, i + 1, 1.0 + 0.1 * i as f64)), n, false).unwrap()
}
