use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::run::{RunReport, Table};
use crate::error::Result;
use crate::lattice::write_csv;

/// Serializes with sorted keys, two-space indent and floats in
/// 17-significant-digit exponent form.
pub fn canonical_json(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, 0);
    s.push('\n');
    s
}

fn write_value(s: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => s.push_str("null"),
        Value::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(s, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(s, "{u}");
            } else {
                let _ = write!(s, "{:.16e}", n.as_f64().unwrap_or(f64::NAN));
            }
        }
        Value::String(t) => s.push_str(&Value::String(t.clone()).to_string()),
        Value::Array(a) => {
            if a.is_empty() {
                s.push_str("[]");
                return;
            }
            s.push('[');
            for (i, x) in a.iter().enumerate() {
                s.push_str(if i == 0 { "\n" } else { ",\n" });
                indent(s, depth + 1);
                write_value(s, x, depth + 1);
            }
            s.push('\n');
            indent(s, depth);
            s.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                s.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            s.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                s.push_str(if i == 0 { "\n" } else { ",\n" });
                indent(s, depth + 1);
                s.push_str(&Value::String(k.clone()).to_string());
                s.push_str(": ");
                write_value(s, &m[k], depth + 1);
            }
            s.push('\n');
            indent(s, depth);
            s.push('}');
        }
    }
}

fn indent(s: &mut String, depth: usize) {
    for _ in 0..depth {
        s.push_str("  ");
    }
}

pub fn write_table<W: Write>(w: &mut W, t: &Table) -> Result<()> {
    writeln!(w, "{}", t.header.join(","))?;
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Writes the report and, when `csv` is set, one CSV per field and table.
/// Returns the paths written.
pub fn write_outputs(report: &RunReport, dir: &Path, csv: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = report.scenario.output.json.clone().unwrap_or_else(|| "report.json".into());
    let report_path = dir.join(name);
    fs::write(&report_path, canonical_json(&report.to_value()?))?;
    let mut written = vec![report_path];
    if csv && !report.scenario.output.stats_only {
        for (name, field) in &report.fields {
            let p = dir.join(format!("{name}.csv"));
            let mut w = BufWriter::new(fs::File::create(&p)?);
            write_csv(&mut w, field)?;
            w.flush()?;
            written.push(p);
        }
        for t in &report.tables {
            let p = dir.join(format!("{}.csv", t.name));
            let mut w = BufWriter::new(fs::File::create(&p)?);
            write_table(&mut w, t)?;
            w.flush()?;
            written.push(p);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_full_precision() {
        let v = json!({"b": 0.1, "a": [1, -2], "c": {"z": true, "y": null}});
        let s = canonical_json(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [\n    1,\n    -2\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {\n    \"y\": null,\n    \"z\": true\n  }\n}\n"
        );
    }

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e300, 1.0 / 3.0] {
            let s = canonical_json(&json!(x));
            assert_eq!(s.trim().parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn table_rows_match() {
        let t = Table {
            name: "t".into(),
            header: vec!["a".into(), "b".into()],
            rows: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
        };
        let mut buf = Vec::new();
        write_table(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("a,b\n1.0000000000000000e0,"));
    }
}
