use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Shortest round-trip decimal form, switching to exponent notation for very
/// large or small magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// CSV with `#` lines carrying the schema and the resolved config, then a
/// header row. Always `,`-separated with LF endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(schema: &str, config: &RunConfig, header: &[&str]) -> Self {
        let echo = serde_json::to_string(config).expect("config serializes");
        let mut text = format!("# schema: {schema}\n# config: {echo}\n");
        text.push_str(&header.join(","));
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn numbers(&mut self, xs: &[f64]) {
        let cells: Vec<String> = xs.iter().map(|&x| num(x)).collect();
        self.row(&cells);
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

/// Write to `out`, or to stdout when no path is given.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).context("writing to stdout")?;
            stdout.flush().context("writing to stdout")
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        write!(s, "{b:02x}").expect("writing to a String");
    }
    s
}
