//! Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
//! when any criterion fails. Set `GCCHA_USPS_CSV` to a `label,p0,…,p255`
//! table to add the digit-classification check to criterion 8.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gccha_cli::analyze::{analyze, AnalysisConfig, EstimatorChoice};
use gccha_cli::classify::{run_classification, ClassificationConfig};
use gccha_cli::images::{synthetic_images, ImageTable};
use gccha_cli::knn::{accuracy, knn_classify};
use gccha_core::io;
use gccha_core::linalg::quad_form;
use gccha_core::*;
use std::result::Result;

type Check = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let checks: [(&str, Check); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("canonical identities", canonical_identities),
        ("minimum prediction error", minimum_prediction_error),
        ("communality bounds", communality_bounds),
        ("constrained and maximizing filters agree", constrained_equivalence),
        ("estimation consistency", estimation_consistency),
        ("identical inputs through the CLI", identical_inputs_cli),
        ("classification and curve properties", classification),
        ("determinism of CLI outputs", determinism),
    ];
    let mut failures = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failures, checks.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(p, q, n)` for instance `k`, cycling through `p, q ∈ 1..=4`, `n ∈ 4..=16`.
fn dims(k: u64) -> (usize, usize, usize) {
    (1 + (k % 4) as usize, 1 + ((k / 4) % 4) as usize, 4 + ((k * 7) % 13) as usize)
}

fn random_field(seed: u64, p: usize, q: usize, n: usize) -> FieldF64 {
    let joint = random_joint_field::<f64>(seed, n, p + q, false);
    let freqs = (0..n).map(|l| Complex::new(l as f64, 0.0)).collect();
    SpectralMatrixField::from_joint(freqs, &joint, p).unwrap()
}

fn path_basis(n: usize) -> SpectralBasisF64 {
    let g = build_graph((0..n - 1).map(|i| (i, i + 1, 1.0 + 0.1 * i as f64)), n, false).unwrap();
    spectral_basis(&laplacian(&g).unwrap()).unwrap()
}

fn line_angle_sin(a: &CVector<f64>, b: &CVector<f64>) -> f64 {
    let ua = a / Complex::new(a.norm(), 0.0);
    let ub = b / Complex::new(b.norm(), 0.0);
    let proj = &ua * ua.dotc(&ub);
    (ub - proj).norm()
}

fn oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let (mut gap, mut angle) = (0.0f64, 0.0f64);
    for k in 0..50u64 {
        let (p, q, n) = dims(k);
        let field = random_field(1000 + k, p, q, n);
        for l in 0..n {
            let sol = solve_frequency(field.p_x(l), field.p_y(l), field.p_xy(l), p.min(q)).map_err(|e| e.to_string())?;
            let ora = cca_oracle(field.p_x(l), field.p_y(l), field.p_xy(l)).map_err(|e| e.to_string())?;
            for i in 0..p.min(q) {
                gap = gap.max((sol.coherences[i] - ora.coherences[i]).abs());
                angle = angle.max(line_angle_sin(&sol.h[i], &ora.h[i])).max(line_angle_sin(&sol.f[i], &ora.f[i]));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("max |γ − γ_oracle| = {gap:.2e}, max principal-angle sine = {angle:.2e}, {secs:.2}s");
    ensure(gap <= 1e-9 && angle < 1e-7 && secs < 10.0, || detail.clone())?;
    Ok(detail)
}

fn canonical_identities() -> Result<String, String> {
    let (mut resid, mut cross, mut unit) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..50u64 {
        let (p, q, n) = dims(k);
        let field = random_field(1000 + k, p, q, n);
        let r = p.min(q);
        for l in 0..n {
            let (px, py, pxy) = (field.p_x(l), field.p_y(l), field.p_xy(l));
            let sol = solve_frequency(px, py, pxy, r).map_err(|e| e.to_string())?;
            let pyx = pxy.adjoint();
            let a = px.clone().lu().solve(pxy).ok_or("singular P_X")?;
            let b = py.clone().lu().solve(&pyx).ok_or("singular P_Y")?;
            let (nx, ny) = (&a * &b, &b * &a);
            for i in 0..r {
                let g = Complex::new(sol.coherences[i], 0.0);
                resid = resid
                    .max((&nx * &sol.h[i] - &sol.h[i] * g).norm() / sol.h[i].norm())
                    .max((&ny * &sol.f[i] - &sol.f[i] * g).norm() / sol.f[i].norm());
                unit = unit.max((quad_form(px, &sol.h[i]) - 1.0).abs()).max((quad_form(py, &sol.f[i]) - 1.0).abs());
                for j in (0..r).filter(|&j| j != i) {
                    cross = cross
                        .max(sol.h[i].dotc(&(px * &sol.h[j])).norm())
                        .max(sol.f[i].dotc(&(py * &sol.f[j])).norm())
                        .max(sol.h[i].dotc(&(pxy * &sol.f[j])).norm());
                }
            }
        }
    }
    let detail = format!("eigen residual {resid:.2e}, cross terms {cross:.2e}, unit-GPSD deviation {unit:.2e}");
    ensure(resid <= 1e-8 && cross <= 1e-8 && unit <= 1e-8, || detail.clone())?;
    Ok(detail)
}

fn minimum_prediction_error() -> Result<String, String> {
    let start = Instant::now();
    let (n, p, q) = (5, 2, 3);
    let b = path_basis(n);
    let zx = CMatrix::zeros(n, p);
    let zy = CMatrix::zeros(n, q);
    let mut worst = 0.0f64;
    for k in 0..10u64 {
        let joint = random_joint_field::<f64>(300 + k, n, p + q, true);
        let spec = SynthesisSpec::new(b.clone(), joint, p, 100_000, k, None).map_err(|e| e.to_string())?;
        let field = spec.population_field().map_err(|e| e.to_string())?;
        let (x, y) = synthesize_stationary(&spec).map_err(|e| e.to_string())?;
        for r in [1, q - 1, q] {
            let pred = reduced_rank_predictor(&field, &b, &zx, &zy, r, false).map_err(|e| e.to_string())?;
            let emp = empirical_mse(&pred, &x, &y, &b).map_err(|e| e.to_string())?;
            worst = worst.max((emp / pred.min_mse - 1.0).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!("max relative gap {:.3}% over 10 instances × r ∈ {{1, {}, {q}}}, {secs:.1}s", 100.0 * worst, q - 1);
    ensure(worst <= 0.01 && secs < 60.0, || detail.clone())?;
    Ok(detail)
}

fn population_solution(field: &FieldF64, b: &SpectralBasisF64, r: usize) -> CanonicalSolutionF64 {
    let n = b.size();
    let x = MultivariateGraphSignal::single(CMatrix::zeros(n, field.p())).unwrap();
    let y = MultivariateGraphSignal::single(CMatrix::zeros(n, field.q())).unwrap();
    run_gccha(&x, &y, b, field, r).unwrap()
}

fn communality_bounds() -> Result<String, String> {
    let (mut top, mut eq_gap, mut eq_cases) = (0.0f64, 0.0f64, 0);
    for k in 0..200u64 {
        let (p, q, n) = dims(k);
        let b = path_basis(n);
        let joint = random_joint_field::<f64>(k, n, p + q, false);
        let field = SpectralMatrixField::from_joint(b.eigenvalues().to_vec(), &joint, p).map_err(|e| e.to_string())?;
        let rep = loadings(&population_solution(&field, &b, p.min(q)), &field).map_err(|e| e.to_string())?;
        for &c in rep.communality_x.iter().chain(rep.communality_y.iter()) {
            ensure(c >= 0.0, || format!("instance {k}: negative communality {c}"))?;
            top = top.max(c);
        }
        let smaller = match p.cmp(&q) {
            std::cmp::Ordering::Less => Some(&rep.communality_x),
            std::cmp::Ordering::Greater => Some(&rep.communality_y),
            std::cmp::Ordering::Equal => None,
        };
        if let Some(m) = smaller {
            eq_cases += 1;
            eq_gap = m.iter().fold(eq_gap, |a, c| a.max((c - 1.0).abs()));
        }
    }
    let detail = format!("max communality {top:.12}, equality gap {eq_gap:.2e} over {eq_cases} unequal-size instances");
    ensure(top <= 1.0 + 1e-10 && eq_gap <= 1e-8, || detail.clone())?;
    Ok(detail)
}

fn coherence_under(m: &CMatrix<f64>, u: &CVector<f64>, v: &CVector<f64>) -> f64 {
    u.dotc(&(m * v)).norm_sqr() / (quad_form(m, u) * quad_form(m, v))
}

fn constrained_equivalence() -> Result<String, String> {
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let (p, q, n) = dims(k + 3);
        let field = random_field(5000 + k, p, q, n);
        let r = p.min(q);
        let cons = solve_constrained_filters(&field, r).map_err(|e| e.to_string())?;
        let sols = solve_field(&field, r, &SolverConfig::default()).map_err(|e| e.to_string())?;
        for l in 0..n {
            for i in 0..r {
                let h = cons[l].h.row(i).adjoint();
                let f = cons[l].f.row(i).adjoint();
                worst = worst
                    .max((coherence_under(field.p_x(l), &sols[l].h[i], &h) - 1.0).abs())
                    .max((coherence_under(field.p_y(l), &sols[l].f[i], &f) - 1.0).abs());
            }
        }
    }
    let detail = format!("max |row coherence − 1| = {worst:.2e} over 20 instances");
    ensure(worst <= 1e-8, || detail.clone())?;
    Ok(detail)
}

fn relative_field_error(est: &FieldF64, pop: &FieldF64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for l in 0..pop.len() {
        num += (est.joint(l) - pop.joint(l)).norm_squared();
        den += pop.joint(l).norm_squared();
    }
    (num / den).sqrt()
}

fn estimation_consistency() -> Result<String, String> {
    let n = 6;
    let b = path_basis(n);
    let joint = random_joint_field::<f64>(8, n, 4, true);
    let spec = SynthesisSpec::new(b.clone(), joint, 2, 100, 0, None).map_err(|e| e.to_string())?;
    let pop = spec.population_field().map_err(|e| e.to_string())?;
    let est_cfg = EstimatorConfig::default();
    let mut errs = Vec::new();
    for m in [100, 400, 1600] {
        let mut avg = 0.0;
        for t in 0..20 {
            let s = spec.clone().with_realizations(m).map_err(|e| e.to_string())?.with_seed(t);
            let (x, y) = synthesize_stationary(&s).map_err(|e| e.to_string())?;
            let est = spectral_matrix_field(&x, &y, &b, &est_cfg).map_err(|e| e.to_string())?;
            avg += relative_field_error(&est, &pop) / 20.0;
        }
        errs.push(avg);
    }
    let s = spec.with_realizations(2000).map_err(|e| e.to_string())?.with_seed(99);
    let (x, y) = synthesize_stationary(&s).map_err(|e| e.to_string())?;
    let est = spectral_matrix_field(&x, &y, &b, &est_cfg).map_err(|e| e.to_string())?;
    let cfg = SolverConfig::default();
    let a = solve_field(&est, 2, &cfg).map_err(|e| e.to_string())?;
    let p = solve_field(&pop, 2, &cfg).map_err(|e| e.to_string())?;
    let sup = (0..n)
        .flat_map(|l| (0..2).map(move |i| (l, i)))
        .map(|(l, i)| (a[l].coherences[i] - p[l].coherences[i]).abs())
        .fold(0.0f64, f64::max);
    let detail = format!(
        "mean relative error {:.4} → {:.4} → {:.4} (M = 100, 400, 1600); sup |γ̂ − γ| = {sup:.4} at M = 2000",
        errs[0], errs[1], errs[2]
    );
    ensure(errs[0] > errs[1] && errs[1] > errs[2] && sup <= 0.05, || detail.clone())?;
    Ok(detail)
}

fn gccha() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gccha"))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = gccha().args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("gccha {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn synth_spec(nodes: usize, p: usize, q: usize, realizations: usize, seed: u64) -> String {
    let edges: Vec<(usize, usize, f64)> = (0..nodes)
        .map(|i| (i, (i + 1) % nodes, 1.0 + 0.25 * (i % 3) as f64))
        .chain((0..nodes / 3).map(|i| (i, i + nodes / 2, 0.5)))
        .collect();
    serde_json::json!({
        "nodes": nodes,
        "edges": edges,
        "p": p,
        "q": q,
        "realizations": realizations,
        "seed": seed,
        "random_field": { "seed": seed + 1 }
    })
    .to_string()
}

fn identical_inputs_cli() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    fs::write(d.join("spec.json"), synth_spec(10, 3, 2, 40, 5)).map_err(|e| e.to_string())?;
    run_cli(&["synth", "--spec", arg(&d.join("spec.json")), "--out", arg(&d.join("data"))])?;
    let x = d.join("data/x.csv");
    run_cli(&["analyze", "--graph", arg(&d.join("data/graph.csv")), "--x", arg(&x), "--y", arg(&x), "--out", arg(&d.join("out"))])?;
    let text = fs::read_to_string(d.join("out/coherence_curves.csv")).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut count = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[0] == "1" {
            let g: f64 = f[4].parse().map_err(|e| format!("{e}"))?;
            worst = worst.max((g - 1.0).abs());
            count += 1;
        }
    }
    let detail = format!("max |γ̂_1 − 1| = {worst:.2e} over {count} frequencies");
    ensure(count == 10 && worst <= 1e-8, || detail.clone())?;
    Ok(detail)
}

fn raw_knn_accuracy(table: &ImageTable) -> f64 {
    let feats = CMatrix::from_fn(table.len(), table.pixel_count(), |i, j| Complex::new(table.pixels[i][j], 0.0));
    accuracy(&knn_classify(&feats, &table.labels, 10).unwrap(), &table.labels)
}

fn curve_properties() -> Result<String, String> {
    // A single realization of five-by-five channels on 18 nodes, estimated with 50 random windows.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    fs::write(d.join("spec.json"), synth_spec(18, 5, 5, 1, 11)).map_err(|e| e.to_string())?;
    run_cli(&["synth", "--spec", arg(&d.join("spec.json")), "--out", arg(&d.join("data"))])?;
    let mut cfg = AnalysisConfig::new(d.join("data/graph.csv"), d.join("data/x.csv"), d.join("data/y.csv"), d.join("out"));
    cfg.estimator = EstimatorChoice::RandomWindow;
    let out = analyze(&cfg).map_err(|e| e.to_string())?;
    let coh = &out.solution.coherence;
    for l in 0..coh[0].len() {
        for i in 1..coh.len() {
            ensure(coh[i - 1][l] >= coh[i][l], || format!("coherence order broken at frequency {l}, pair {i}"))?;
        }
    }
    for cum in [&out.report.cumulative_z, &out.report.cumulative_w] {
        for l in 0..cum.ncols() {
            let col: Vec<f64> = cum.column(l).iter().copied().collect();
            ensure(col.iter().all(|c| (0.0..=1.0 + 1e-10).contains(c)), || format!("cumulative power outside [0, 1] at {l}"))?;
            ensure(col.windows(2).all(|w| w[0] <= w[1] + 1e-12), || format!("cumulative power decreasing at {l}"))?;
        }
    }
    Ok("coherences ordered and cumulative power monotone in [0, 1] on 18 nodes, p = q = 5".into())
}

fn classification() -> Result<String, String> {
    let table = synthetic_images(2, 40, 16, 0.05, 2024);
    let raw = raw_knn_accuracy(&table);
    let cfg = ClassificationConfig { seed: 7, ..Default::default() };
    let start = Instant::now();
    let cells = run_classification(&table, &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let (mean, std) = (cells[0].mean(), cells[0].std());
    let mut detail = format!(
        "synthetic two-cluster accuracy {mean:.4} ± {std:.4} (raw-pixel 10-NN {raw:.4}) over {} repetitions in {:.0}s",
        cfg.repetitions,
        elapsed.as_secs_f64()
    );
    let mut ok = raw >= 0.95 && mean >= 0.95 && elapsed < Duration::from_secs(600);
    if let Ok(path) = std::env::var("GCCHA_USPS_CSV") {
        let usps = ImageTable::read_file(Path::new(&path)).map_err(|e| e.to_string())?;
        let cells = run_classification(&usps, &ClassificationConfig::default()).map_err(|e| e.to_string())?;
        let m = cells[0].mean();
        detail.push_str(&format!("; digits accuracy {m:.4} ± {:.4}", cells[0].std()));
        ok &= (0.97..=1.0).contains(&m);
    } else {
        detail.push_str("; digit table not supplied");
    }
    match curve_properties() {
        Ok(d) => detail.push_str(&format!("; {d}")),
        Err(e) => {
            ok = false;
            detail.push_str(&format!("; {e}"));
        }
    }
    ensure(ok, || detail.clone())?;
    Ok(detail)
}

fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    fs::write(d.join("spec.json"), synth_spec(12, 3, 2, 1, 21)).map_err(|e| e.to_string())?;
    fs::write(d.join("spec_many.json"), synth_spec(12, 3, 2, 30, 22)).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for run in ["a", "b"] {
        let o = d.join(run);
        fs::create_dir_all(&o).map_err(|e| e.to_string())?;
        let p = |name: &str| o.join(name);
        run_cli(&["make-images", "--classes", "3", "--per-class", "12", "--side", "8", "--seed", "4", "--out", arg(&p("images.csv"))])?;
        run_cli(&[
            "classify", "--images", arg(&p("images.csv")), "--split-rows", "2,4", "--rank", "3,6", "--reps", "3",
            "--per-class", "10", "--row-width", "8", "--seed", "9", "--out", arg(&p("accuracy.csv")),
            "--repetitions-out", arg(&p("repetitions.csv")),
        ])?;
        run_cli(&["synth", "--spec", arg(&d.join("spec.json")), "--out", arg(&p("single"))])?;
        run_cli(&["synth", "--spec", arg(&d.join("spec_many.json")), "--out", arg(&p("many"))])?;
        let (g1, x1, y1) = (p("single/graph.csv"), p("single/x.csv"), p("single/y.csv"));
        run_cli(&["analyze", "--graph", arg(&g1), "--x", arg(&x1), "--y", arg(&y1), "--seed", "3", "--out", arg(&p("analysis_windows"))])?;
        let (g2, x2, y2) = (p("many/graph.csv"), p("many/x.csv"), p("many/y.csv"));
        run_cli(&["analyze", "--graph", arg(&g2), "--x", arg(&x2), "--y", arg(&y2), "--gso", "adjacency", "--out", arg(&p("analysis_avg"))])?;
        run_cli(&["diagnose", "--graph", arg(&g2), "--x", arg(&x2), "--out", arg(&p("diagnostic.csv"))])?;
        run_cli(&["basis", "--graph", arg(&g2), "--out", arg(&p("basis"))])?;
    }
    let mut stack = vec![d.join("a")];
    while let Some(dir_a) = stack.pop() {
        for fa in files_in(&dir_a) {
            if fa.is_dir() {
                stack.push(fa);
                continue;
            }
            let fb = d.join("b").join(fa.strip_prefix(d.join("a")).unwrap());
            let (ba, bb) = (fs::read(&fa).map_err(|e| e.to_string())?, fs::read(&fb).map_err(|e| e.to_string())?);
            ensure(ba == bb, || format!("{} differs between runs", fa.strip_prefix(d).unwrap().display()))?;
            compared += 1;
        }
    }
    // Different window seeds must actually change the windowed estimate.
    let o = d.join("a");
    run_cli(&[
        "analyze", "--graph", arg(&o.join("single/graph.csv")), "--x", arg(&o.join("single/x.csv")), "--y",
        arg(&o.join("single/y.csv")), "--seed", "4", "--out", arg(&d.join("reseeded")),
    ])?;
    let a = fs::read(o.join("analysis_windows/field.json")).map_err(|e| e.to_string())?;
    let b = fs::read(d.join("reseeded/field.json")).map_err(|e| e.to_string())?;
    ensure(a != b, || "window seed has no effect".into())?;
    let signal = io::read_signal_file(&o.join("many/x.csv")).map_err(|e| e.to_string())?;
    Ok(format!(
        "{compared} output files byte-identical across two runs of make-images, classify, synth, analyze, diagnose, basis ({} realizations re-read)",
        signal.realization_count()
    ))
}
