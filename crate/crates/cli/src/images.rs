//! Labelled image tables (`label,p0,…,p{D-1}`) and a synthetic generator.

use std::io::{Read, Write};
use std::path::Path;

use gccha_core::io::format_real;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{create, output_err, CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ImageTable {
    pub labels: Vec<i64>,
    /// One row of `D` pixels per image.
    pub pixels: Vec<Vec<f64>>,
}

impl ImageTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.first().map_or(0, Vec::len)
    }

    /// Distinct labels, ascending.
    pub fn classes(&self) -> Vec<i64> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn read<R: Read>(r: R) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers().map_err(|e| CliError::Validation(e.to_string()))?.clone();
        if headers.len() < 2 || &headers[0] != "label" {
            return Err(CliError::Validation("image table must have header 'label,p0,…'".into()));
        }
        let d = headers.len() - 1;
        let mut labels = Vec::new();
        let mut pixels = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| CliError::Validation(e.to_string()))?;
            let bad = |what: &str| CliError::Validation(format!("image row {}: {what}", row + 1));
            if rec.len() != d + 1 {
                return Err(bad("wrong number of fields"));
            }
            labels.push(rec[0].parse::<i64>().map_err(|_| bad("label must be an integer"))?);
            let px = rec
                .iter()
                .skip(1)
                .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("pixel values must be finite numbers"))?;
            pixels.push(px);
        }
        if labels.is_empty() {
            return Err(CliError::Validation("image table has no rows".into()));
        }
        Ok(ImageTable { labels, pixels })
    }

    pub fn read_file(path: &Path) -> CliResult<Self> {
        let f = std::fs::File::open(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Self::read(std::io::BufReader::new(f))
    }

    pub fn write<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["label".to_string()];
        header.extend((0..self.pixel_count()).map(|k| format!("p{k}")));
        wr.write_record(&header)?;
        for (label, px) in self.labels.iter().zip(&self.pixels) {
            let mut row = vec![label.to_string()];
            row.extend(px.iter().map(|&v| format_real(v)));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> CliResult<()> {
        self.write(create(path)?).map_err(|e| output_err(path, e))
    }
}

/// `classes × per_class` images of `side × side` pixels. Class `c` is a
/// Gaussian cloud around its own smooth prototype (two bumps whose positions
/// depend on `c`), so classes are well separated in pixel space.
pub fn synthetic_images(classes: usize, per_class: usize, side: usize, noise: f64, seed: u64) -> ImageTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise.max(0.0)).expect("finite noise level");
    let s = side as f64;
    let prototypes: Vec<Vec<f64>> = (0..classes)
        .map(|c| {
            let t = (c as f64 + 0.5) / classes.max(1) as f64;
            let bumps = [(0.2 + 0.6 * t, 0.3), (0.7, 0.2 + 0.6 * (1.0 - t))];
            (0..side * side)
                .map(|k| {
                    let (r, col) = ((k / side) as f64 / s, (k % side) as f64 / s);
                    let v: f64 = bumps
                        .iter()
                        .map(|&(br, bc)| (-((r - br).powi(2) + (col - bc).powi(2)) / 0.02).exp())
                        .sum();
                    2.0 * v - 1.0
                })
                .collect()
        })
        .collect();
    let mut labels = Vec::with_capacity(classes * per_class);
    let mut pixels = Vec::with_capacity(classes * per_class);
    for (c, proto) in prototypes.iter().enumerate() {
        for _ in 0..per_class {
            labels.push(c as i64);
            pixels.push(proto.iter().map(|&v| v + normal.sample(&mut rng)).collect());
        }
    }
    ImageTable { labels, pixels }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = synthetic_images(2, 3, 4, 0.1, 5);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("label,p0,p1,"));
        assert_eq!(ImageTable::read(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn malformed_rows_are_validation_errors() {
        let err = ImageTable::read("label,p0,p1\n1,0.5\n".as_bytes()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = ImageTable::read("label,p0\nx,0.5\n".as_bytes()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
