//! `synth`: draw a stationary process pair from a JSON description.

use std::path::Path;

use gccha_core::io::{self, matrix_from_json, FieldJson, JsonMatrix};
use gccha_core::*;
use serde::{Deserialize, Serialize};

use crate::analyze::{shift_basis, GsoChoice};
use crate::{create, output_err, CliError, CliResult};

/// Random joint field instead of an explicit one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomFieldSpec {
    pub seed: u64,
    /// Real symmetric matrices (real signals on real bases).
    #[serde(default = "yes")]
    pub real: bool,
}

fn yes() -> bool {
    true
}

/// JSON form of a synthesis request. Exactly one of `joint_field` and
/// `random_field` must be present; `joint_field[ℓ]` follows the frequency
/// order of the operator's basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpecFile {
    pub nodes: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub directed: bool,
    #[serde(default)]
    pub gso: GsoChoice,
    pub p: usize,
    pub q: usize,
    pub realizations: usize,
    pub seed: u64,
    #[serde(default)]
    pub joint_field: Option<Vec<JsonMatrix>>,
    #[serde(default)]
    pub random_field: Option<RandomFieldSpec>,
    /// `nodes × (p+q)` mean table.
    #[serde(default)]
    pub means: Option<JsonMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PopulationJson {
    pub field: FieldJson,
    pub frequency_keys: Vec<f64>,
    /// Population canonical coherences `coherence[i][ℓ]`, `i < min(p, q)`.
    pub coherence: Vec<Vec<f64>>,
}

pub fn read_spec(path: &Path) -> CliResult<SynthSpecFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Builds the graph and the validated synthesis spec.
pub fn build_spec(file: &SynthSpecFile) -> CliResult<(GraphF64, SynthesisSpecF64)> {
    if file.gso == GsoChoice::Custom {
        return Err(CliError::Validation("synth supports laplacian and adjacency operators".into()));
    }
    let graph = build_graph(file.edges.iter().copied(), file.nodes, file.directed)?;
    let (_, basis) = shift_basis(&graph, file.gso, None)?;
    let d = file.p + file.q;
    let joint = match (&file.joint_field, &file.random_field) {
        (Some(j), None) => j.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?,
        (None, Some(r)) => random_joint_field(r.seed, file.nodes, d, r.real),
        _ => return Err(CliError::Validation("give exactly one of joint_field and random_field".into())),
    };
    if joint.iter().any(|m| m.shape() != (d, d)) {
        return Err(CliError::Validation(format!("joint field matrices must be {d}×{d}")));
    }
    let means = file.means.as_ref().map(matrix_from_json).transpose()?;
    let spec = SynthesisSpec::new(basis, joint, file.p, file.realizations, file.seed, means)?;
    Ok((graph, spec))
}

/// Writes `x.csv`, `y.csv`, `graph.csv` and `population.json` into `out`.
pub fn run_synth(file: &SynthSpecFile, out: &Path) -> CliResult<PopulationJson> {
    let (graph, spec) = build_spec(file)?;
    let (x, y) = synthesize_stationary(&spec)?;
    let field = spec.population_field()?;
    let r = file.p.min(file.q);
    let sols = solve_field(&field, r, &SolverConfig::default())?;
    let population = PopulationJson {
        field: FieldJson::from_field(&field),
        frequency_keys: spec.basis().frequency_keys().to_vec(),
        coherence: (0..r).map(|i| sols.iter().map(|s| s.coherences[i]).collect()).collect(),
    };
    std::fs::create_dir_all(out).map_err(|e| output_err(out, e))?;
    io::write_signal(create(&out.join("x.csv"))?, &x)?;
    io::write_signal(create(&out.join("y.csv"))?, &y)?;
    io::write_edges(create(&out.join("graph.csv"))?, &graph)?;
    let path = out.join("population.json");
    serde_json::to_writer_pretty(create(&path)?, &population).map_err(|e| output_err(&path, e))?;
    Ok(population)
}
