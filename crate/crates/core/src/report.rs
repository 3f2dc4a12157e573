//! JSON-lines output.
//!
//! Every record is a single JSON object on its own line whose first key,
//! `record`, names its kind (`simulation`, `audit`, `expectation`, ...).
//! Floats use the shortest representation that parses back to the same
//! `f64`, so records round-trip exactly.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub struct ReportWriter {
    out: Box<dyn Write>,
}

impl ReportWriter {
    pub fn stdout() -> Self {
        ReportWriter {
            out: Box::new(BufWriter::new(io::stdout())),
        }
    }

    /// Appends to `path`, creating it if needed.
    pub fn append(path: &Path) -> Result<Self> {
        let file: File = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ReportWriter {
            out: Box::new(BufWriter::new(file)),
        })
    }

    pub fn to_writer<W: Write + 'static>(w: W) -> Self {
        ReportWriter { out: Box::new(w) }
    }

    /// Writes `body` tagged with `kind`; `body` must serialize to an object.
    pub fn emit<T: Serialize + ?Sized>(&mut self, kind: &str, body: &T) -> Result<()> {
        let line = record_line(kind, body)?;
        writeln!(self.out, "{line}")?;
        self.out.flush()?;
        Ok(())
    }
}

/// One record as a JSON string without the trailing newline.
pub fn record_line<T: Serialize + ?Sized>(kind: &str, body: &T) -> Result<String> {
    let Value::Object(fields) = serde_json::to_value(body).map_err(|e| Error::invalid(e.to_string()))? else {
        return Err(Error::invalid(format!("{kind} record is not a JSON object")));
    };
    let mut obj = Map::with_capacity(fields.len() + 1);
    obj.insert("record".into(), Value::String(kind.into()));
    obj.extend(fields);
    serde_json::to_string(&Value::Object(obj)).map_err(|e| Error::invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct R {
        value: f64,
        z: u64,
    }

    #[test]
    fn record_first_and_exact_floats() {
        let v = 0.1 + 0.2;
        let line = record_line("expectation", &R { value: v, z: 3 }).unwrap();
        assert!(line.starts_with(r#"{"record":"expectation","#), "{line}");
        let back: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(back["value"].as_f64().unwrap().to_bits(), v.to_bits());
        assert!(record_line("x", &3u32).is_err());
    }
}
