//! Deterministic JSON rendering: fixed field order, floats at 17
//! significant digits, LF line endings. serde_json handles input only;
//! output goes through these builders so two runs with the same inputs
//! produce byte-identical documents.

use gphase_core::{Complex64, ComplexMatrix};

/// 17 significant digits, sign-stable, round-trippable.
pub fn f64_json(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn usize_json(x: usize) -> String {
    format!("{x}")
}

pub fn u64_json(x: u64) -> String {
    format!("{x}")
}

pub fn str_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Complex scalar as an [re, im] pair.
pub fn complex_json(z: Complex64) -> String {
    format!("[{},{}]", f64_json(z.re), f64_json(z.im))
}

/// Matrix as nested arrays of [re, im] pairs, row-major.
pub fn matrix_json(m: &ComplexMatrix) -> String {
    let mut rows = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols()).map(|j| complex_json(m[(i, j)])).collect();
        rows.push(format!("[{}]", cells.join(",")));
    }
    format!("[{}]", rows.join(","))
}

pub fn real_array_json(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|&v| f64_json(v)).collect();
    format!("[{}]", cells.join(","))
}

/// Compact JSON object with insertion-ordered fields.
pub struct Obj {
    parts: Vec<(String, String)>,
}

impl Obj {
    pub fn new() -> Self {
        Obj { parts: Vec::new() }
    }

    pub fn push(&mut self, key: &str, rendered: String) -> &mut Self {
        self.parts.push((key.to_string(), rendered));
        self
    }

    pub fn compact(&self) -> String {
        let fields: Vec<String> = self
            .parts
            .iter()
            .map(|(k, v)| format!("{}:{}", str_json(k), v))
            .collect();
        format!("{{{}}}", fields.join(","))
    }

    /// One top-level field per line; nested values stay compact. Keeps a
    /// trailing LF.
    pub fn multiline(&self) -> String {
        let fields: Vec<String> = self
            .parts
            .iter()
            .map(|(k, v)| format!("{}: {}", str_json(k), v))
            .collect();
        format!("{{\n{}\n}}\n", fields.join(",\n"))
    }
}

impl Default for Obj {
    fn default() -> Self {
        Self::new()
    }
}

pub fn array_json(items: &[String]) -> String {
    format!("[{}]", items.join(","))
}
