//! Report serialization. Numbers are written in the shortest decimal form
//! that parses back to the same double.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::CliError;

/// Format requested by the flags, checked against the output extension.
pub fn resolve_format(output: Option<&Path>, format: Option<Format>) -> Result<Format, CliError> {
    let Some(path) = output else {
        return Ok(format.unwrap_or(Format::Json));
    };
    let ext = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        _ => return Err(CliError::invalid(format!("output {} must end in .json or .csv", path.display()))),
    };
    match format {
        Some(f) if f != ext => {
            Err(CliError::invalid(format!("--format {f:?} does not match the extension of {}", path.display())))
        }
        _ => Ok(ext),
    }
}

/// A report: the JSON document and the flat rows used for CSV.
pub struct Report<J, R> {
    pub json: J,
    pub rows: Vec<R>,
}

impl<J: Serialize, R: Serialize> Report<J, R> {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json).map_err(|e| CliError::io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in &self.rows {
                    w.serialize(r).map_err(|e| CliError::io(e.to_string()))?;
                }
                w.into_inner().map_err(|e| CliError::io(e.to_string()))
            }
        }
    }
}

/// Single-record report.
pub fn single<T: Serialize + Clone>(value: T) -> Report<T, T> {
    Report { rows: vec![value.clone()], json: value }
}

/// Report whose JSON form is the list of rows.
pub fn rows<T: Serialize + Clone>(rows: Vec<T>) -> Report<Vec<T>, T> {
    Report { json: rows.clone(), rows }
}

pub fn emit(bytes: &[u8], output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn format_follows_extension() {
        let p = PathBuf::from("out.CSV");
        assert_eq!(resolve_format(Some(&p), None).unwrap(), Format::Csv);
        assert!(resolve_format(Some(&p), Some(Format::Json)).is_err());
        assert!(resolve_format(Some(Path::new("out.txt")), None).is_err());
        assert_eq!(resolve_format(None, None).unwrap(), Format::Json);
    }

    #[test]
    fn floats_round_trip_through_both_formats() {
        #[derive(Serialize, serde::Deserialize, Clone, PartialEq, Debug)]
        struct Row {
            x: f64,
        }
        let vals = vec![
            Row { x: 0.1 + 0.2 },
            Row { x: 1e-300 },
            Row { x: std::f64::consts::PI },
            Row { x: 123456789.12345679 },
        ];
        let r = rows(vals.clone());
        let j: Vec<Row> = serde_json::from_slice(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(j, vals);
        let bytes = r.render(Format::Csv).unwrap();
        let back: Vec<Row> = csv::Reader::from_reader(&bytes[..]).deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(back, vals);
    }
}
