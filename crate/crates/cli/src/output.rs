use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::CliError;

/// `v` to 15 significant digits in positional notation.
pub fn significant15(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.14}");
    }
    let sci = format!("{v:.14e}");
    let exponent: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..=15).contains(&exponent) {
        let decimals = (14 - exponent).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

/// Uniform grid on `[a, b]` with both endpoints exact.
pub fn grid(a: f64, b: f64, samples: usize) -> Vec<f64> {
    let last = samples - 1;
    (0..samples)
        .map(|i| if i == last { b } else { a + (b - a) * i as f64 / last as f64 })
        .collect()
}

/// Sampled `(t, u)` pairs plus the parameters that produced them.
#[derive(Debug, Clone)]
pub struct FunctionTrace {
    pub meta: Map<String, Value>,
    pub rows: Vec<(f64, f64)>,
}

impl FunctionTrace {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\nt,u\n", Value::Object(self.meta.clone()));
        for (t, u) in &self.rows {
            // adding 0.0 folds -0.0 into 0.0
            out.push_str(&format!("{:.16e},{:.16e}\n", t + 0.0, u + 0.0));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "meta": self.meta,
            "rows": self.rows.iter().map(|&(t, u)| json!([t + 0.0, u + 0.0])).collect::<Vec<_>>(),
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json()),
        }
    }
}

pub fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Write `text` to `path`, or to `stdout` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    }
}
