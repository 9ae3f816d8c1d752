//! Feature cache: one CSV row per image so training never recomputes
//! image features.

use std::path::Path;

use crate::dataset::Label;
use crate::error::{Error, Result};

use super::FeatureVector;

/// Exact cache header.
pub const CACHE_HEADER: [&str; 6] = ["path", "label", "alc_r", "alc_g", "alc_b", "ring_len"];

/// One cached extraction result.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheRow {
    pub path: String,
    pub label: Label,
    pub features: FeatureVector,
}

/// Writes rows in the given order. Reals are serialized with
/// round-trip precision.
pub fn write_cache(path: impl AsRef<Path>, rows: &[CacheRow]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    writer.write_record(CACHE_HEADER).map_err(|e| csv_error(path, e))?;
    for row in rows {
        let f = &row.features;
        writer
            .write_record([
                row.path.as_str(),
                row.label.as_str(),
                &f.alc_r.to_string(),
                &f.alc_g.to_string(),
                &f.alc_b.to_string(),
                &f.ring_length.to_string(),
            ])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads a cache file back, validating the header and every field.
pub fn read_cache(path: impl AsRef<Path>) -> Result<Vec<CacheRow>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != CACHE_HEADER {
        return Err(Error::format(format!(
            "{}: unexpected cache header {:?}",
            path.display(),
            header
        )));
    }

    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |i: usize| -> Result<&str> {
            record.get(i).ok_or_else(|| {
                Error::format(format!("{}: row {} is short", path.display(), line + 2))
            })
        };
        let label = Label::parse(field(1)?).ok_or_else(|| {
            Error::format(format!("{}: unknown label {:?}", path.display(), field(1).unwrap()))
        })?;
        let real = |i: usize| -> Result<f64> {
            field(i)?.parse().map_err(|_| {
                Error::format(format!("{}: bad real in row {}", path.display(), line + 2))
            })
        };
        let ring: usize = field(5)?.parse().map_err(|_| {
            Error::format(format!("{}: bad ring count in row {}", path.display(), line + 2))
        })?;
        rows.push(CacheRow {
            path: field(0)?.to_string(),
            label,
            features: FeatureVector {
                alc_r: real(2)?,
                alc_g: real(3)?,
                alc_b: real(4)?,
                ring_length: ring,
            },
        });
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(format!("{}: {other:?}", path.display())),
    }
}
