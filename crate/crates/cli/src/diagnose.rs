//! `diagnose`: how far sample cross-covariances are from being diagonalized
//! by the graph basis.

use std::io::Write;

use gccha_core::io::format_real;
use gccha_core::{stationarity_diagnostic, SignalF64, SpectralBasisF64, StationarityEntry, STATIONARITY_THRESHOLD};

use crate::CliResult;

pub fn diagnose(x: &SignalF64, basis: &SpectralBasisF64) -> CliResult<Vec<StationarityEntry>> {
    Ok(stationarity_diagnostic(x, basis)?)
}

/// `i,j,label_i,label_j,ratio,energy,exceeds_threshold`.
pub fn write_diagnostic<W: Write>(w: W, x: &SignalF64, entries: &[StationarityEntry]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["i", "j", "label_i", "label_j", "ratio", "energy", "exceeds_threshold"])?;
    for e in entries {
        wr.write_record([
            e.i.to_string(),
            e.j.to_string(),
            x.labels()[e.i].clone(),
            x.labels()[e.j].clone(),
            format_real(e.ratio),
            format_real(e.energy),
            (e.ratio >= STATIONARITY_THRESHOLD).to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
