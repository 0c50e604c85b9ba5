use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gccha_cli::analyze::{run_analysis, shift_basis, AnalysisConfig, EstimatorChoice, GsoChoice};
use gccha_cli::classify::{run_classification, write_accuracy_table, write_repetitions, ClassificationConfig, FeatureScaling};
use gccha_cli::diagnose::{diagnose, write_diagnostic};
use gccha_cli::images::{synthetic_images, ImageTable};
use gccha_cli::synth_cmd::{read_spec, run_synth};
use gccha_cli::{configure_threads, CliError, CliResult};
use gccha_core::io::{self, format_complex, format_real};

/// Canonical coherence analysis for multivariate graph signals.
#[derive(Parser)]
#[command(name = "gccha", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list with header `src,dst,weight`.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "laplacian")]
    gso: GsoChoice,
    /// Dense shift operator for `--gso custom`.
    #[arg(long)]
    gso_file: Option<PathBuf>,
    /// Treat edges as directed (adjacency and custom operators only).
    #[arg(long)]
    directed: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate spectra, solve for canonical pairs and write reports.
    Analyze {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        estimator: EstimatorChoice,
        #[arg(long, default_value_t = 50)]
        windows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative ridge for rank-deficient auto-spectra.
        #[arg(long, default_value_t = 1e-8)]
        ridge: f64,
        /// Number of canonical pairs (default min(p, q)).
        #[arg(long)]
        rank: Option<usize>,
        /// Signed loadings above this magnitude are flagged in the summary.
        #[arg(long, default_value_t = 0.2)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split-view image classification with canonical features and k-NN.
    Classify {
        /// Image table with header `label,p0,…`.
        #[arg(long)]
        images: PathBuf,
        /// Rows in the first view; comma-separated for several table cells.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        split_rows: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "20")]
        rank: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        per_class: usize,
        #[arg(long, default_value_t = 16)]
        row_width: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        windows: usize,
        #[arg(long, value_enum, default_value = "random-window")]
        estimator: EstimatorChoice,
        /// Scale of the canonical filters that produce the features.
        #[arg(long, value_enum, default_value = "unit-norm")]
        scaling: FeatureScaling,
        /// Leave the label classes disconnected instead of bridging them.
        #[arg(long)]
        no_bridge: bool,
        /// Accuracy table destination (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-repetition accuracies.
        #[arg(long)]
        repetitions_out: Option<PathBuf>,
    },
    /// Draw a stationary process pair from a JSON description.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report how far sample cross-covariances are from graph stationarity.
    Diagnose {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        x: PathBuf,
        /// Destination (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the graph Fourier basis.
    Basis {
        #[command(flatten)]
        graph: GraphArgs,
        /// Node count when isolated trailing nodes are absent from the edge list.
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic labelled image table of well-separated classes.
    MakeImages {
        #[arg(long, default_value_t = 2)]
        classes: usize,
        #[arg(long, default_value_t = 40)]
        per_class: usize,
        #[arg(long, default_value_t = 16)]
        side: usize,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn open_out(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            Box::new(std::io::BufWriter::new(f))
        }
        None => Box::new(std::io::stdout().lock()),
    })
}

fn csv_out(e: csv::Error) -> CliError {
    CliError::Output(e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Analyze { graph, x, y, estimator, windows, seed, ridge, rank, threshold, out } => {
            let cfg = AnalysisConfig {
                graph_path: graph.graph,
                x_path: x,
                y_path: y,
                gso: graph.gso,
                gso_path: graph.gso_file,
                directed: graph.directed,
                estimator,
                windows,
                seed,
                ridge,
                rank,
                output_dir: out,
                loading_threshold: threshold,
            };
            let res = run_analysis(&cfg)?;
            for w in &res.summary.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Classify {
            images,
            split_rows,
            rank,
            reps,
            seed,
            per_class,
            row_width,
            k,
            windows,
            estimator,
            scaling,
            no_bridge,
            out,
            repetitions_out,
        } => {
            let table = ImageTable::read_file(&images)?;
            let cfg = ClassificationConfig {
                images_per_class: per_class,
                split_rows,
                row_width,
                ranks: rank,
                knn_k: k,
                repetitions: reps,
                seed,
                bridge: !no_bridge,
                estimator,
                windows,
                ridge: 1e-8,
                scaling,
            };
            let cells = run_classification(&table, &cfg)?;
            let rows = table.pixel_count() / row_width;
            write_accuracy_table(open_out(&out)?, &cells, rows).map_err(csv_out)?;
            if let Some(path) = repetitions_out {
                write_repetitions(open_out(&Some(path))?, &cells).map_err(csv_out)?;
            }
        }
        Command::Synth { spec, out } => {
            run_synth(&read_spec(&spec)?, &out)?;
        }
        Command::Diagnose { graph, x, out } => {
            let sig = io::read_signal_file(&x)?;
            let g = io::read_edges_file(&graph.graph, Some(sig.nodes()), graph.directed)?;
            let (_, basis) = shift_basis(&g, graph.gso, graph.gso_file.as_deref())?;
            let entries = diagnose(&sig, &basis)?;
            write_diagnostic(open_out(&out)?, &sig, &entries).map_err(csv_out)?;
        }
        Command::Basis { graph, nodes, out } => {
            let g = io::read_edges_file(&graph.graph, nodes, graph.directed)?;
            let (_, basis) = shift_basis(&g, graph.gso, graph.gso_file.as_deref())?;
            std::fs::create_dir_all(&out).map_err(|e| CliError::Output(e.to_string()))?;
            io::write_matrix(open_out(&Some(out.join("eigenvectors.csv")))?, basis.eigenvectors())?;
            let mut wr = csv::Writer::from_writer(open_out(&Some(out.join("eigenvalues.csv")))?);
            wr.write_record(["frequency_index", "lambda", "frequency_key"]).map_err(csv_out)?;
            for (l, (lam, key)) in basis.eigenvalues().iter().zip(basis.frequency_keys()).enumerate() {
                wr.write_record([l.to_string(), format_complex(*lam), format_real(*key)]).map_err(csv_out)?;
            }
            wr.flush().map_err(|e| CliError::Output(e.to_string()))?;
        }
        Command::MakeImages { classes, per_class, side, noise, seed, out } => {
            if classes == 0 || per_class == 0 || side == 0 || noise.is_nan() || noise < 0.0 {
                return Err(CliError::Validation("classes, per-class and side must be positive, noise nonnegative".into()));
            }
            synthetic_images(classes, per_class, side, noise, seed).write_file(&out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
