mod common;

use common::*;
use gccha_core::*;

fn basis(n: usize) -> SpectralBasisF64 {
    spectral_basis(&laplacian(&path_graph(n)).unwrap()).unwrap()
}

/// Canonical solution for a population field; the signals are placeholders.
fn solution(field: &FieldF64, b: &SpectralBasisF64, r: usize) -> CanonicalSolutionF64 {
    let n = b.size();
    let x = MultivariateGraphSignal::single(CMatrix::zeros(n, field.p())).unwrap();
    let y = MultivariateGraphSignal::single(CMatrix::zeros(n, field.q())).unwrap();
    run_gccha(&x, &y, b, field, r).unwrap()
}

fn population(seed: u64, p: usize, q: usize, b: &SpectralBasisF64) -> FieldF64 {
    let joint = random_joint_field::<f64>(seed, b.size(), p + q, false);
    SpectralMatrixField::from_joint(b.eigenvalues().to_vec(), &joint, p).unwrap()
}

#[test]
fn communalities_are_bounded_with_equality_on_smaller_side() {
    for k in 0..200u64 {
        let (p, q, n) = dims(k);
        let b = basis(n);
        let field = population(k, p, q, &b);
        let r = p.min(q);
        let rep = loadings(&solution(&field, &b, r), &field).unwrap();
        for c in rep.communality_x.iter().chain(rep.communality_y.iter()) {
            assert!((0.0..=1.0 + 1e-10).contains(c), "instance {k}: communality {c}");
        }
        for a in rep.adequacy_z.iter().chain(rep.adequacy_w.iter()) {
            assert!((0.0..=1.0 + 1e-10).contains(a));
        }
        if p < q {
            assert!(rep.communality_x.iter().all(|c| (c - 1.0).abs() < 1e-8), "instance {k}");
        }
        if p > q {
            assert!(rep.communality_y.iter().all(|c| (c - 1.0).abs() < 1e-8), "instance {k}");
        }
        if p <= q {
            let last = rep.cumulative_z.row(r - 1);
            assert!(last.iter().all(|c| (c - 1.0).abs() < 1e-8));
        }
        for l in 0..n {
            let col = rep.cumulative_z.column(l);
            assert!(col.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn single_channel_loading_is_one() {
    let b = basis(5);
    let field = population(3, 1, 1, &b);
    let rep = loadings(&solution(&field, &b, 1), &field).unwrap();
    for l in 0..5 {
        assert!((rep.loadings_zx.coherence[l][(0, 0)] - 1.0).abs() < 1e-12);
        assert!((rep.loadings_wy.coherence[l][(0, 0)] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_component_cumulative_is_adequacy() {
    let b = basis(6);
    let field = population(8, 3, 2, &b);
    let rep = loadings(&solution(&field, &b, 1), &field).unwrap();
    assert_eq!(rep.cumulative_z, rep.adequacy_z);
    assert_eq!(rep.cumulative_w, rep.adequacy_w);
}

#[test]
fn cross_loadings_equal_coherence_times_loading_for_single_pair() {
    // With p = q = 1: c^{ZY} = γ · c^{WY} = γ.
    let b = basis(4);
    let field = population(12, 1, 1, &b);
    let sol = solution(&field, &b, 1);
    let rep = loadings(&sol, &field).unwrap();
    for l in 0..4 {
        assert!((rep.cross_loadings_zy.coherence[l][(0, 0)] - sol.coherence[0][l]).abs() < 1e-12);
        assert!((rep.cross_loadings_wx.coherence[l][(0, 0)] - sol.coherence[0][l]).abs() < 1e-12);
    }
}

#[test]
fn analytic_loadings_match_estimation_route() {
    let b = basis(5);
    let (p, q) = (2, 3);
    let joint = random_joint_field::<f64>(41, 5, p + q, true);
    let spec = SynthesisSpec::new(b.clone(), joint, p, 10_000, 17, None).unwrap();
    let field = spec.population_field().unwrap();
    let (x, y) = synthesize_stationary(&spec).unwrap();
    let sol = run_gccha(&x, &y, &b, &field, 2).unwrap();
    let rep = loadings(&sol, &field).unwrap();
    let est = EstimatorConfig::default();
    let zx = spectral_matrix_field(&sol.z, &x, &b, &est).unwrap();
    let wy = spectral_matrix_field(&sol.w, &y, &b, &est).unwrap();
    let coh = |f: &FieldF64, l: usize, i: usize, j: usize| {
        f.p_xy(l)[(i, j)].norm_sqr() / (f.p_x(l)[(i, i)].re * f.p_y(l)[(j, j)].re)
    };
    for l in 0..5 {
        for i in 0..2 {
            for j in 0..p {
                let d = (rep.loadings_zx.coherence[l][(i, j)] - coh(&zx, l, i, j)).abs();
                assert!(d < 0.02, "ZX l={l} i={i} j={j}: {d}");
            }
            for j in 0..q {
                let d = (rep.loadings_wy.coherence[l][(i, j)] - coh(&wy, l, i, j)).abs();
                assert!(d < 0.02, "WY l={l} i={i} j={j}: {d}");
            }
        }
    }
}

#[test]
fn signed_loadings_square_to_coherence() {
    let b = basis(6);
    let field = population(2, 3, 3, &b);
    let rep = loadings(&solution(&field, &b, 2), &field).unwrap();
    for (c, s) in rep.loadings_zx.coherence.iter().zip(&rep.loadings_zx.signed) {
        assert!((c - s.component_mul(s)).norm() < 1e-12);
    }
}
