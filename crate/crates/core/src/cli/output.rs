//! Ordered records rendered as CSV or JSON lines.

use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Empty, Value::Num)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// 17 significant digits, enough to reproduce every double exactly.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Num(x) => format_f64(*x),
        Value::Int(i) => i.to_string(),
        Value::Text(s) => s.clone(),
        Value::Empty => String::new(),
    }
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Num(x) if x.is_finite() => format_f64(*x),
        Value::Num(_) | Value::Empty => "null".into(),
        Value::Int(i) => i.to_string(),
        Value::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
    }
}

/// Key/value pairs in output order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputRecord {
    pub fields: Vec<(String, Value)>,
}

impl OutputRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|(k, _)| k.as_str())
    }

    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| {
                format!(
                    "{}:{}",
                    serde_json::to_string(k).expect("strings always serialize"),
                    json_value(v)
                )
            })
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

/// Streams records; the CSV header is taken from the first record.
pub enum RecordWriter<W: Write> {
    Csv {
        writer: csv::Writer<W>,
        header_written: bool,
    },
    Json(W),
}

impl<W: Write> RecordWriter<W> {
    pub fn new(format: Format, out: W) -> Self {
        match format {
            Format::Csv => RecordWriter::Csv {
                writer: csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(out),
                header_written: false,
            },
            Format::Json => RecordWriter::Json(out),
        }
    }

    pub fn write(&mut self, rec: &OutputRecord) -> io::Result<()> {
        match self {
            RecordWriter::Csv {
                writer,
                header_written,
            } => {
                if !*header_written {
                    writer.write_record(rec.keys())?;
                    *header_written = true;
                }
                writer.write_record(rec.fields.iter().map(|(_, v)| csv_cell(v)))?;
            }
            RecordWriter::Json(out) => {
                out.write_all(rec.to_json().as_bytes())?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> io::Result<()> {
        match self {
            RecordWriter::Csv { mut writer, .. } => writer.flush(),
            RecordWriter::Json(mut out) => out.flush(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_round_trip() {
        for &v in &[-0.0891004, 1.0 / 3.0, 5e-324, -1.7976931348623157e308, 0.1 + 0.2] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_and_json_layout() {
        let rec = OutputRecord::new()
            .with("name", "psi0")
            .with("value", 0.5)
            .with("k", 3usize)
            .with("missing", None::<f64>);
        let mut buf = Vec::new();
        let mut w = RecordWriter::new(Format::Csv, &mut buf);
        w.write(&rec).unwrap();
        w.write(&rec).unwrap();
        w.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "name,value,k,missing\npsi0,5.0000000000000000e-1,3,\npsi0,5.0000000000000000e-1,3,\n"
        );
        let json: serde_json::Value = serde_json::from_str(&rec.to_json()).unwrap();
        assert_eq!(json["value"], 0.5);
        assert!(json["missing"].is_null());
        assert_eq!(json["name"], "psi0");
    }
}
