//! Deterministic CSV assembly: a `#`-prefixed metadata block followed by a
//! header row and data rows. Floats are written with Rust's shortest
//! round-trip formatting, so identical values always produce identical bytes.

use std::fmt::Display;

#[derive(Debug, Clone)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct CsvBuilder {
    buf: String,
}

impl CsvBuilder {
    pub fn new() -> Self {
        CsvBuilder { buf: String::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.buf.push_str(&format!("# {key}: {value}\n"));
        self
    }

    pub fn header(&mut self, columns: &str) -> &mut Self {
        self.buf.push_str(columns);
        self.buf.push('\n');
        self
    }

    pub fn row(&mut self, line: impl Display) -> &mut Self {
        self.buf.push_str(&format!("{line}\n"));
        self
    }

    pub fn finish(self, name: impl Into<String>) -> OutputFile {
        OutputFile {
            name: name.into(),
            bytes: self.buf.into_bytes(),
        }
    }
}
