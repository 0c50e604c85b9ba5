//! Split-view image classification: each image is a node, the top rows and
//! the remaining rows of its pixels are the two multivariate signals, and the
//! canonical signals feed a leave-one-out k-NN classifier.

use std::io::Write;

use gccha_core::io::format_real;
use gccha_core::*;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analyze::{estimator_config, EstimatorChoice};
use crate::images::ImageTable;
use crate::knn::{accuracy, knn_classify};
use crate::similarity::build_similarity_graph;
use crate::{CliError, CliResult};

/// Scale of the canonical filters used to form features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum FeatureScaling {
    /// Filter rows of unit Euclidean norm (plain eigenvectors). Frequencies
    /// keep their share of signal energy, so the label-indicator modes of the
    /// similarity graph dominate the features.
    #[default]
    UnitNorm,
    /// Unit canonical power at every frequency, as in the analysis output.
    UnitGpsd,
}

#[derive(Debug, Clone)]
pub struct ClassificationConfig {
    pub images_per_class: usize,
    /// Number of pixel rows assigned to the first view, one table cell per entry.
    pub split_rows: Vec<usize>,
    pub row_width: usize,
    pub ranks: Vec<usize>,
    pub knn_k: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub bridge: bool,
    pub estimator: EstimatorChoice,
    pub windows: usize,
    pub ridge: f64,
    pub scaling: FeatureScaling,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        ClassificationConfig {
            images_per_class: 40,
            split_rows: vec![4],
            row_width: 16,
            ranks: vec![20],
            knn_k: 10,
            repetitions: 50,
            seed: 0,
            bridge: true,
            estimator: EstimatorChoice::RandomWindow,
            windows: 50,
            ridge: 1e-8,
            scaling: FeatureScaling::UnitNorm,
        }
    }
}

/// Accuracies of one `(rank, split_rows)` cell across repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyCell {
    pub rank: usize,
    pub split_rows: usize,
    pub accuracies: Vec<f64>,
}

impl AccuracyCell {
    pub fn mean(&self) -> f64 {
        self.accuracies.iter().sum::<f64>() / self.accuracies.len().max(1) as f64
    }

    /// Sample standard deviation (zero for a single repetition).
    pub fn std(&self) -> f64 {
        let n = self.accuracies.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        (self.accuracies.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    }
}

fn validate(cfg: &ClassificationConfig, table: &ImageTable) -> CliResult<()> {
    let d = table.pixel_count();
    let bad = |m: String| Err(CliError::Validation(m));
    if cfg.repetitions == 0 || cfg.images_per_class == 0 || cfg.row_width == 0 {
        return bad("repetitions, images per class and row width must be positive".into());
    }
    if cfg.split_rows.is_empty() || cfg.ranks.is_empty() {
        return bad("at least one split and one rank are required".into());
    }
    for &k in &cfg.split_rows {
        let p = k * cfg.row_width;
        if k == 0 || p >= d {
            return bad(format!("split after {k} rows of width {} leaves no pixels for one view (D = {d})", cfg.row_width));
        }
        for &r in &cfg.ranks {
            if r == 0 || r > p.min(d - p) {
                return bad(format!("rank {r} must lie in 1..={} for a split after {k} rows", p.min(d - p)));
            }
        }
    }
    for c in table.classes() {
        let count = table.labels.iter().filter(|&&l| l == c).count();
        if count < 2 {
            return bad(format!("label {c} has fewer than two images"));
        }
    }
    let n = table.classes().len() * cfg.images_per_class;
    if cfg.knn_k == 0 || cfg.knn_k >= n.min(table.len()) {
        return bad(format!("k = {} must be smaller than the number of sampled images", cfg.knn_k));
    }
    Ok(())
}

/// Indices sampled for one repetition: up to `per_class` images of each
/// label, labels ascending, indices ascending within a label.
pub fn sample_images(table: &ImageTable, per_class: usize, seed: u64, repetition: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repetition as u64);
    let mut chosen = Vec::new();
    for c in table.classes() {
        let members: Vec<usize> = (0..table.len()).filter(|&i| table.labels[i] == c).collect();
        let take = per_class.min(members.len());
        let mut picked: Vec<usize> = sample(&mut rng, members.len(), take).into_iter().map(|k| members[k]).collect();
        picked.sort_unstable();
        chosen.extend(picked);
    }
    chosen
}

fn view(rows: &[&Vec<f64>], from: usize, to: usize) -> CMatrix<f64> {
    CMatrix::from_fn(rows.len(), to - from, |i, j| Complex::new(rows[i][from + j], 0.0))
}

/// Accuracy of every `(rank, split)` pair for one repetition, split-major.
fn repetition(table: &ImageTable, cfg: &ClassificationConfig, rep: usize) -> CliResult<Vec<f64>> {
    let idx = sample_images(table, cfg.images_per_class, cfg.seed, rep);
    let rows: Vec<&Vec<f64>> = idx.iter().map(|&i| &table.pixels[i]).collect();
    let labels: Vec<i64> = idx.iter().map(|&i| table.labels[i]).collect();
    let pixels: Vec<Vec<f64>> = rows.iter().map(|r| (*r).clone()).collect();
    let graph = build_similarity_graph(&pixels, &labels, cfg.bridge)?;
    let basis = spectral_basis(&laplacian(&graph)?)?;
    let d = table.pixel_count();
    let max_rank = *cfg.ranks.iter().max().unwrap_or(&1);
    let mut out = Vec::with_capacity(cfg.split_rows.len() * cfg.ranks.len());
    for &k in &cfg.split_rows {
        let p = k * cfg.row_width;
        let x = MultivariateGraphSignal::single(view(&rows, 0, p))?;
        let y = MultivariateGraphSignal::single(view(&rows, p, d))?;
        let est = estimator_config(cfg.estimator, 1, cfg.windows, cfg.seed.wrapping_add(rep as u64), cfg.ridge);
        let field = spectral_matrix_field(&x, &y, &basis, &est)?;
        let sol = run_gccha(&x, &y, &basis, &field, max_rank)?;
        let (z, w) = match cfg.scaling {
            FeatureScaling::UnitGpsd => (sol.z, sol.w),
            FeatureScaling::UnitNorm => (
                apply_filter_bank(&sol.h_bank.unit_row_norms(), &x, &basis)?,
                apply_filter_bank(&sol.f_bank.unit_row_norms(), &y, &basis)?,
            ),
        };
        let (z, w) = (z.realization(0), w.realization(0));
        for &r in &cfg.ranks {
            let mut features = CMatrix::zeros(labels.len(), 2 * r);
            features.columns_mut(0, r).copy_from(&z.columns(0, r));
            features.columns_mut(r, r).copy_from(&w.columns(0, r));
            let pred = knn_classify(&features, &labels, cfg.knn_k)?;
            out.push(accuracy(&pred, &labels));
        }
    }
    Ok(out)
}

/// Runs all repetitions (in parallel, one RNG stream each) and collects the
/// accuracy table.
pub fn run_classification(table: &ImageTable, cfg: &ClassificationConfig) -> CliResult<Vec<AccuracyCell>> {
    validate(cfg, table)?;
    let per_rep = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| repetition(table, cfg, rep))
        .collect::<CliResult<Vec<_>>>()?;
    let mut cells = Vec::new();
    let mut c = 0;
    for &k in &cfg.split_rows {
        for &r in &cfg.ranks {
            cells.push(AccuracyCell { rank: r, split_rows: k, accuracies: per_rep.iter().map(|a| a[c]).collect() });
            c += 1;
        }
    }
    Ok(cells)
}

/// `rank,split_rows,split_fraction,mean_accuracy,std_accuracy,repetitions`.
pub fn write_accuracy_table<W: Write>(w: W, cells: &[AccuracyCell], row_count: usize) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["rank", "split_rows", "split_fraction", "mean_accuracy", "std_accuracy", "repetitions"])?;
    for c in cells {
        wr.write_record([
            c.rank.to_string(),
            c.split_rows.to_string(),
            format_real(c.split_rows as f64 / row_count as f64),
            format_real(c.mean()),
            format_real(c.std()),
            c.accuracies.len().to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Per-repetition accuracies: `rank,split_rows,repetition,accuracy`.
pub fn write_repetitions<W: Write>(w: W, cells: &[AccuracyCell]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["rank", "split_rows", "repetition", "accuracy"])?;
    for c in cells {
        for (k, a) in c.accuracies.iter().enumerate() {
            wr.write_record([c.rank.to_string(), c.split_rows.to_string(), k.to_string(), format_real(*a)])?;
        }
    }
    wr.flush()?;
    Ok(())
}
