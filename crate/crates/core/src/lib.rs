//! Canonical coherence analysis for pairs of multivariate graph signals.
//!
//! Given two multivariate signals `X` (p channels) and `Y` (q channels) on a
//! shared graph, the crate estimates per-frequency spectral matrices and finds
//! pairs of graph filters whose outputs have maximal coherence at every graph
//! frequency, together with reduced-rank predictors and loading statistics.
//!
//! The numerical core is generic over [`Float`] (implemented for `f32` and
//! `f64`); the `*F64` / `*F32` aliases below name the concrete types.
//!
//! ```
//! use gccha_core::*;
//!
//! let g = build_graph([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 4, false).unwrap();
//! let basis = spectral_basis(&laplacian(&g).unwrap()).unwrap();
//! let id = CMatrix::<f64>::identity(1, 1);
//! let half = CMatrix::from_element(1, 1, Complex::new(0.5, 0.0));
//! let field = SpectralMatrixField::new(
//!     basis.eigenvalues().to_vec(),
//!     vec![id.clone(); 4],
//!     vec![id; 4],
//!     vec![half; 4],
//! )
//! .unwrap();
//! let sol = solve_field(&field, 1, &SolverConfig::default()).unwrap();
//! assert!((sol[0].coherences[0] - 0.25).abs() < 1e-12);
//! ```

// Negated comparisons are used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod error;
pub mod graph;
pub mod interpret;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod signal;
pub mod spectral;
pub mod synth;

pub use canonical::{
    reduced_rank_predictor, run_gccha, run_gccha_with, solve_constrained_filters, solve_field, solve_frequency,
    solve_frequency_with, CanonicalSolution, ConstrainedFilters, FrequencySolution, ReducedRankPredictor, SolverConfig,
};
pub use error::{Error, Result};
pub use graph::{
    adjacency, build_graph, default_frequency_key, gft, inverse_gft, laplacian, max_eigen_residual, spectral_basis,
    spectral_basis_by, total_variation, Edge, Graph, ShiftKind, ShiftOperator, SpectralBasis,
};
pub use interpret::{adequacy, communality, loadings, LoadingTable, LoadingsReport};
pub use scalar::{CMatrix, CVector, Complex, Float, RMatrix};
pub use signal::{apply_filter_bank, FilterBank, MultivariateGraphSignal};
pub use spectral::{
    cross_periodogram, psd_project, rademacher_window, realization_average_csd, spectral_matrix_field,
    stationarity_diagnostic, windowed_average_csd, EstimatorConfig, EstimatorMode, SpectralMatrixField,
    StationarityEntry, STATIONARITY_THRESHOLD,
};
pub use synth::{
    cca_oracle, empirical_mse, random_joint_field, random_joint_matrix, random_spectral_blocks, synthesize_stationary,
    OracleSolution, SynthesisSpec,
};

pub type GraphF64 = Graph<f64>;
pub type ShiftOperatorF64 = ShiftOperator<f64>;
pub type SpectralBasisF64 = SpectralBasis<f64>;
pub type SignalF64 = MultivariateGraphSignal<f64>;
pub type FilterBankF64 = FilterBank<f64>;
pub type FieldF64 = SpectralMatrixField<f64>;
pub type CanonicalSolutionF64 = CanonicalSolution<f64>;
pub type PredictorF64 = ReducedRankPredictor<f64>;
pub type LoadingsReportF64 = LoadingsReport<f64>;
pub type SynthesisSpecF64 = SynthesisSpec<f64>;

pub type GraphF32 = Graph<f32>;
pub type ShiftOperatorF32 = ShiftOperator<f32>;
pub type SpectralBasisF32 = SpectralBasis<f32>;
pub type SignalF32 = MultivariateGraphSignal<f32>;
pub type FilterBankF32 = FilterBank<f32>;
pub type FieldF32 = SpectralMatrixField<f32>;
pub type CanonicalSolutionF32 = CanonicalSolution<f32>;
pub type PredictorF32 = ReducedRankPredictor<f32>;
pub type LoadingsReportF32 = LoadingsReport<f32>;
pub type SynthesisSpecF32 = SynthesisSpec<f32>;
