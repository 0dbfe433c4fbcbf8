//! Field serialization: a JSON header next to a CSV or raw binary payload.
//!
//! Payload order is site-major, then component-major with the index tuple
//! read as a big-endian base-4 number. CSV rows carry the site coordinates
//! first; binary payloads are bare little-endian `f64` values.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{component_count, component_indices, Lattice4, TensorField, Variance};
use crate::error::{Error, Result};
use crate::kinematics::FourVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldFormat {
    Csv,
    Binary,
}

impl FieldFormat {
    fn extension(self) -> &'static str {
        match self {
            FieldFormat::Csv => "csv",
            FieldFormat::Binary => "bin",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub rank: usize,
    pub extents: [usize; 4],
    pub spacing: [f64; 4],
    pub origin: [f64; 4],
    pub variance: Vec<Variance>,
    pub format: FieldFormat,
    /// Payload path relative to the header's directory.
    pub data_file: String,
}

/// CSV column name of a component, e.g. `c013` for index tuple (0, 1, 3).
pub fn component_label(comp: usize, rank: usize) -> String {
    if rank == 0 {
        return "value".into();
    }
    let digits: String = component_indices(comp, rank)
        .iter()
        .map(|i| char::from(b'0' + *i as u8))
        .collect();
    format!("c{digits}")
}

/// Writes `<header_path>` and a sibling payload with the same stem.
pub fn write_field(header_path: &Path, field: &TensorField, format: FieldFormat) -> Result<PathBuf> {
    let data_path = header_path.with_extension(format.extension());
    let data_name = data_path
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::invalid("write_field", "header path has no file name"))?
        .to_string();
    let lat = field.lattice();
    let header = FieldHeader {
        rank: field.rank(),
        extents: lat.extents(),
        spacing: lat.spacing(),
        origin: lat.origin().0,
        variance: field.variance().to_vec(),
        format,
        data_file: data_name,
    };
    fs::write(header_path, serde_json::to_string_pretty(&header)? + "\n")?;

    let mut w = BufWriter::new(fs::File::create(&data_path)?);
    match format {
        FieldFormat::Csv => write_csv(&mut w, field)?,
        FieldFormat::Binary => {
            for v in field.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(data_path)
}

/// Writes a field as CSV: coordinates then one column per component.
pub fn write_csv<W: Write>(w: &mut W, field: &TensorField) -> Result<()> {
    let rank = field.rank();
    let nc = component_count(rank);
    let mut head = String::from("x0,x1,x2,x3");
    for c in 0..nc {
        head.push(',');
        head.push_str(&component_label(c, rank));
    }
    writeln!(w, "{head}")?;
    let lat = field.lattice();
    for site in 0..lat.sites() {
        let x = lat.position(site);
        let mut row = String::new();
        for (i, v) in x.0.iter().chain(field.site(site)).enumerate() {
            if i > 0 {
                row.push(',');
            }
            row.push_str(&format!("{v:.16e}"));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

/// Reads a field written by [`write_field`].
pub fn read_field(header_path: &Path) -> Result<TensorField> {
    const OP: &str = "read_field";
    let text = fs::read_to_string(header_path)?;
    let header: FieldHeader = serde_json::from_str(&text)?;
    if header.variance.len() != header.rank {
        return Err(Error::invalid(OP, "variance mask length differs from rank"));
    }
    let lat = Lattice4::new(header.extents, header.spacing, FourVector(header.origin))?;
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    let data_path = dir.join(&header.data_file);
    let nc = component_count(header.rank);
    let data = match header.format {
        FieldFormat::Binary => {
            let bytes = fs::read(&data_path)?;
            if bytes.len() % 8 != 0 {
                return Err(Error::invalid(OP, "binary payload length is not a multiple of 8"));
            }
            bytes
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect()
        }
        FieldFormat::Csv => {
            let text = fs::read_to_string(&data_path)?;
            let mut lines = text.lines();
            let head = lines.next().ok_or_else(|| Error::invalid(OP, "empty CSV payload"))?;
            if head.split(',').count() != 4 + nc {
                return Err(Error::invalid(OP, "CSV column count does not match rank"));
            }
            let mut data = Vec::with_capacity(lat.sites() * nc);
            for (row, line) in lines.enumerate() {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() != 4 + nc {
                    return Err(Error::invalid(OP, format!("CSV row {row} has {} columns", cols.len())));
                }
                for c in &cols[4..] {
                    data.push(c.trim().parse::<f64>().map_err(|e| {
                        Error::invalid(OP, format!("CSV row {row}: `{c}`: {e}"))
                    })?);
                }
            }
            data
        }
    };
    TensorField::from_data(lat, header.variance, data)
}
