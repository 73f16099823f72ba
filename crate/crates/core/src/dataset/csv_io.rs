use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::schema::{FeatureId, TrafficClass, CLASS_COLUMN, FEATURE_NAMES, NUM_FEATURES};
use super::{Dataset, MibRecord};
use crate::error::{Error, Result};

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_csv(BufReader::new(file), path.display().to_string())
}

/// Reads the canonical CSV layout. Columns are matched by header name, so
/// their order does not matter and unknown extra columns are ignored. Row
/// numbers in errors are 1-based and count data rows only.
pub fn read_csv<R: Read>(reader: R, source: impl Into<String>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let mut cols = [0usize; NUM_FEATURES];
    for (c, name) in cols.iter_mut().zip(FEATURE_NAMES) {
        *c = find(name)?;
    }
    let class_col = find(CLASS_COLUMN)?;

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let rowno = i + 1;
        let mut features = Vec::with_capacity(NUM_FEATURES);
        for (&c, name) in cols.iter().zip(FEATURE_NAMES) {
            let cell = row.get(c).unwrap_or("");
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    value: cell.to_string(),
                    row: rowno,
                    column: name.to_string(),
                })?;
            if v < 0.0 {
                return Err(Error::NegativeCounter {
                    value: v,
                    row: rowno,
                    column: name.to_string(),
                });
            }
            features.push(v);
        }
        let label_cell = row.get(class_col).unwrap_or("");
        let label: TrafficClass = label_cell.parse().map_err(|_| Error::UnknownClass {
            label: label_cell.to_string(),
            row: rowno,
        })?;
        records.push(MibRecord::new(features, label));
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::new(FeatureId::all(), records, source)
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_csv(ds, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes the dataset's columns followed by `class`. Numbers use the
/// shortest decimal form that parses back to the same `f64`.
pub fn write_csv<W: Write>(ds: &Dataset, mut w: W) -> Result<()> {
    let mut line = String::new();
    for f in ds.schema() {
        line.push_str(f.name());
        line.push(',');
    }
    line.push_str(CLASS_COLUMN);
    writeln!(w, "{line}")?;
    for r in ds.records() {
        line.clear();
        for v in r.features() {
            line.push_str(&v.to_string());
            line.push(',');
        }
        line.push_str(r.label().as_str());
        writeln!(w, "{line}")?;
    }
    Ok(())
}
