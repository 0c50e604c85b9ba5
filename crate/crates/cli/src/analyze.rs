//! End-to-end analysis of two signal files on a shared graph.

use std::path::{Path, PathBuf};

use gccha_core::io::{self, format_complex, format_real, ReportRow};
use gccha_core::*;
use serde::Serialize;

use crate::{create, output_err, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GsoChoice {
    #[default]
    Laplacian,
    Adjacency,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EstimatorChoice {
    /// Realization averaging with two or more realizations, random windows otherwise.
    Auto,
    RealizationAverage,
    RandomWindow,
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub graph_path: PathBuf,
    pub x_path: PathBuf,
    pub y_path: PathBuf,
    pub gso: GsoChoice,
    pub gso_path: Option<PathBuf>,
    pub directed: bool,
    pub estimator: EstimatorChoice,
    pub windows: usize,
    pub seed: u64,
    pub ridge: f64,
    pub rank: Option<usize>,
    pub output_dir: PathBuf,
    pub loading_threshold: f64,
}

impl AnalysisConfig {
    pub fn new(graph: impl Into<PathBuf>, x: impl Into<PathBuf>, y: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            graph_path: graph.into(),
            x_path: x.into(),
            y_path: y.into(),
            gso: GsoChoice::Laplacian,
            gso_path: None,
            directed: false,
            estimator: EstimatorChoice::Auto,
            windows: 50,
            seed: 0,
            ridge: 1e-8,
            rank: None,
            output_dir: out.into(),
            loading_threshold: 0.2,
        }
    }
}

/// Shift operator and basis for `graph` under the chosen operator.
pub fn shift_basis(
    graph: &GraphF64,
    gso: GsoChoice,
    gso_path: Option<&Path>,
) -> CliResult<(ShiftOperatorF64, SpectralBasisF64)> {
    let s = match gso {
        GsoChoice::Laplacian => laplacian(graph)?,
        GsoChoice::Adjacency => adjacency(graph)?,
        GsoChoice::Custom => {
            let path = gso_path.ok_or_else(|| CliError::Validation("--gso custom requires --gso-file".into()))?;
            let m = io::read_matrix_file(path)?;
            if m.shape() != (graph.node_count(), graph.node_count()) {
                return Err(CliError::Validation(format!(
                    "custom shift operator is {}×{}, graph has {} nodes",
                    m.nrows(),
                    m.ncols(),
                    graph.node_count()
                )));
            }
            ShiftOperator::custom(m)?
        }
    };
    let b = spectral_basis(&s)?;
    Ok((s, b))
}

pub fn estimator_config(choice: EstimatorChoice, realizations: usize, windows: usize, seed: u64, ridge: f64) -> EstimatorConfig<f64> {
    let mode = match choice {
        EstimatorChoice::Auto if realizations >= 2 => EstimatorMode::RealizationAverage,
        EstimatorChoice::Auto => EstimatorMode::RandomWindow,
        EstimatorChoice::RealizationAverage => EstimatorMode::RealizationAverage,
        EstimatorChoice::RandomWindow => EstimatorMode::RandomWindow,
    };
    EstimatorConfig { mode, window_count: windows, seed, ridge, center: true }
}

#[derive(Debug, Clone, Serialize)]
struct EstimatorSummary {
    mode: EstimatorMode,
    windows: usize,
    seed: u64,
    ridge: f64,
    center: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlaggedLoading {
    pub set: &'static str,
    pub component: usize,
    pub channel: String,
    pub frequency_index: usize,
    pub signed_loading: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisSummary {
    pub nodes: usize,
    pub p: usize,
    pub q: usize,
    pub rank: usize,
    pub realizations: usize,
    pub gso: GsoChoice,
    estimator: EstimatorSummary,
    pub frequencies: Vec<[f64; 2]>,
    pub frequency_keys: Vec<f64>,
    /// `coherence[i][ℓ]`.
    pub coherence: Vec<Vec<f64>>,
    pub mean_coherence: Vec<f64>,
    /// `cumulative_z[t][ℓ]`: explanatory power of the first `t + 1` components.
    pub cumulative_z: Vec<Vec<f64>>,
    pub cumulative_w: Vec<Vec<f64>>,
    pub mean_cumulative_z: Vec<f64>,
    pub mean_cumulative_w: Vec<f64>,
    pub loading_threshold: f64,
    pub flagged_loadings: Vec<FlaggedLoading>,
    pub warnings: Vec<String>,
}

/// In-memory products of an analysis run.
pub struct AnalysisOutcome {
    pub basis: SpectralBasisF64,
    pub field: FieldF64,
    pub solution: CanonicalSolutionF64,
    pub report: LoadingsReportF64,
    pub summary: AnalysisSummary,
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
}

fn rows_of(m: &RMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

/// Runs the analysis and returns its products without writing files.
pub fn analyze(cfg: &AnalysisConfig) -> CliResult<AnalysisOutcome> {
    let x = io::read_signal_file(&cfg.x_path)?;
    let y = io::read_signal_file(&cfg.y_path)?;
    if x.nodes() != y.nodes() || x.realization_count() != y.realization_count() {
        return Err(CliError::Validation(format!(
            "X has {} nodes × {} realizations, Y has {} × {}",
            x.nodes(),
            x.realization_count(),
            y.nodes(),
            y.realization_count()
        )));
    }
    let graph = io::read_edges_file(&cfg.graph_path, Some(x.nodes()), cfg.directed)?;
    let (_, basis) = shift_basis(&graph, cfg.gso, cfg.gso_path.as_deref())?;
    let rank = cfg.rank.unwrap_or(x.dim().min(y.dim()));
    if rank == 0 || rank > x.dim().min(y.dim()) {
        return Err(CliError::Validation(format!("rank {rank} must lie in 1..={}", x.dim().min(y.dim()))));
    }
    if !(cfg.loading_threshold >= 0.0) {
        return Err(CliError::Validation("loading threshold must be nonnegative".into()));
    }
    let est = estimator_config(cfg.estimator, x.realization_count(), cfg.windows, cfg.seed, cfg.ridge);
    let field = spectral_matrix_field(&x, &y, &basis, &est)?;
    let solution = run_gccha(&x, &y, &basis, &field, rank)?;
    let report = loadings(&solution, &field)?;

    let mut flagged = Vec::new();
    let sets: [(&'static str, &LoadingTable<f64>, &[String]); 2] =
        [("ZX", &report.loadings_zx, x.labels()), ("WY", &report.loadings_wy, y.labels())];
    for (set, table, labels) in sets {
        for (l, s) in table.signed.iter().enumerate() {
            for i in 0..s.nrows() {
                for (j, label) in labels.iter().enumerate() {
                    if s[(i, j)].abs() > cfg.loading_threshold {
                        flagged.push(FlaggedLoading {
                            set,
                            component: i + 1,
                            channel: label.clone(),
                            frequency_index: l,
                            signed_loading: s[(i, j)],
                        });
                    }
                }
            }
        }
    }
    let cumulative_z = rows_of(&report.cumulative_z);
    let cumulative_w = rows_of(&report.cumulative_w);
    let summary = AnalysisSummary {
        nodes: x.nodes(),
        p: x.dim(),
        q: y.dim(),
        rank,
        realizations: x.realization_count(),
        gso: cfg.gso,
        estimator: EstimatorSummary {
            mode: est.mode,
            windows: est.window_count,
            seed: est.seed,
            ridge: est.ridge,
            center: est.center,
        },
        frequencies: basis.eigenvalues().iter().map(|z| [z.re, z.im]).collect(),
        frequency_keys: basis.frequency_keys().to_vec(),
        mean_coherence: solution.coherence.iter().map(|c| mean(c)).collect(),
        coherence: solution.coherence.clone(),
        mean_cumulative_z: cumulative_z.iter().map(|c| mean(c)).collect(),
        mean_cumulative_w: cumulative_w.iter().map(|c| mean(c)).collect(),
        cumulative_z,
        cumulative_w,
        loading_threshold: cfg.loading_threshold,
        flagged_loadings: flagged,
        warnings: field.warnings().to_vec(),
    };
    Ok(AnalysisOutcome {
        basis,
        field,
        solution,
        report,
        summary,
        x_labels: x.labels().to_vec(),
        y_labels: y.labels().to_vec(),
    })
}

/// Runs the analysis and writes `coherence_curves.csv`, `loadings.csv`,
/// `canonical_signals.csv`, `field.json` and `summary.json` into the output directory.
pub fn run_analysis(cfg: &AnalysisConfig) -> CliResult<AnalysisOutcome> {
    let out = analyze(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| output_err(&cfg.output_dir, e))?;
    write_outputs(&cfg.output_dir, &out)?;
    Ok(out)
}

fn write_outputs(dir: &Path, out: &AnalysisOutcome) -> CliResult<()> {
    let lambdas = out.basis.eigenvalues();
    let keys = out.basis.frequency_keys();

    let path = dir.join("coherence_curves.csv");
    let mut wr = csv::Writer::from_writer(create(&path)?);
    let csv_err = |e: csv::Error| output_err(&path, e);
    wr.write_record(["component", "frequency_index", "lambda", "frequency_key", "coherence"]).map_err(csv_err)?;
    for (i, curve) in out.solution.coherence.iter().enumerate() {
        for (l, g) in curve.iter().enumerate() {
            wr.write_record([
                (i + 1).to_string(),
                l.to_string(),
                format_complex(lambdas[l]),
                format_real(keys[l]),
                format_real(*g),
            ])
            .map_err(csv_err)?;
        }
    }
    wr.flush().map_err(|e| output_err(&path, e))?;

    let path = dir.join("loadings.csv");
    io::write_report(create(&path)?, &report_rows(&out.report, lambdas, &out.x_labels, &out.y_labels))?;

    let r = out.solution.rank();
    let names = |p: &str| (1..=r).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let z = out.solution.z.clone().with_labels(names("Z"))?;
    let w = out.solution.w.clone().with_labels(names("W"))?;
    let path = dir.join("canonical_signals.csv");
    io::write_signal(create(&path)?, &z.concat(&w)?)?;

    let path = dir.join("field.json");
    io::write_field(create(&path)?, &out.field)?;

    let path = dir.join("summary.json");
    let mut f = create(&path)?;
    serde_json::to_writer_pretty(&mut f, &out.summary).map_err(|e| output_err(&path, e))?;
    use std::io::Write;
    writeln!(f).and_then(|_| f.flush()).map_err(|e| output_err(&path, e))?;
    Ok(())
}

/// Long-format rows for every loading table and summary.
pub fn report_rows(rep: &LoadingsReportF64, lambdas: &[Complex<f64>], x_labels: &[String], y_labels: &[String]) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    let mut push = |component: usize, channel: &str, l: usize, quantity: &str, value: f64| {
        rows.push(ReportRow {
            component,
            channel: channel.to_string(),
            frequency_index: l,
            lambda: lambdas[l],
            quantity: quantity.to_string(),
            value,
        })
    };
    let tables: [(&str, &LoadingTable<f64>, &[String]); 4] = [
        ("loading_zx", &rep.loadings_zx, x_labels),
        ("loading_wy", &rep.loadings_wy, y_labels),
        ("cross_loading_zy", &rep.cross_loadings_zy, y_labels),
        ("cross_loading_wx", &rep.cross_loadings_wx, x_labels),
    ];
    let signed_names = ["signed_loading_zx", "signed_loading_wy", "signed_cross_loading_zy", "signed_cross_loading_wx"];
    for ((name, t, labels), signed_name) in tables.into_iter().zip(signed_names) {
        for l in 0..t.frequencies() {
            for i in 0..t.components() {
                for (j, label) in labels.iter().enumerate() {
                    push(i + 1, label, l, name, t.coherence[l][(i, j)]);
                    push(i + 1, label, l, signed_name, t.signed[l][(i, j)]);
                }
            }
        }
    }
    for (name, m, labels) in [("communality_x", &rep.communality_x, x_labels), ("communality_y", &rep.communality_y, y_labels)] {
        for (j, label) in labels.iter().enumerate() {
            for l in 0..m.ncols() {
                push(0, label, l, name, m[(j, l)]);
            }
        }
    }
    for (name, m) in [
        ("adequacy_z", &rep.adequacy_z),
        ("adequacy_w", &rep.adequacy_w),
        ("cumulative_z", &rep.cumulative_z),
        ("cumulative_w", &rep.cumulative_w),
    ] {
        for i in 0..m.nrows() {
            for l in 0..m.ncols() {
                push(i + 1, "", l, name, m[(i, l)]);
            }
        }
    }
    rows
}
