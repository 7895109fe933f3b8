use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use spinent::{SweepRow, SweepTable};

pub const CSV_COLUMNS: [&str; 11] = [
    "family",
    "geometry",
    "size",
    "param",
    "energy",
    "czz",
    "cxx",
    "ev",
    "concurrence",
    "degeneracy",
    "degenerate_flag",
];

/// Twelve significant digits; `-0` is written as `0`.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.11e}", x + 0.0)
    }
}

/// Metadata shared by every output file.
pub struct Meta {
    pub config: Value,
    pub wall_clock_seconds: Option<f64>,
}

impl Meta {
    fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("spinent {}", env!("CARGO_PKG_VERSION")),
            format!("config {}", self.config),
        ];
        if let Some(t) = self.wall_clock_seconds {
            lines.push(format!("wall_clock_seconds {t:.3}"));
        }
        lines
    }
}

fn csv_row(r: &SweepRow) -> String {
    [
        r.family.name().to_string(),
        r.geometry.clone(),
        r.size.clone(),
        float(r.param),
        float(r.energy),
        float(r.czz),
        float(r.cxx),
        float(r.ev),
        r.concurrence.map(float).unwrap_or_default(),
        r.degeneracy.to_string(),
        r.degenerate_flag.to_string(),
    ]
    .join(",")
}

pub fn sweep_csv(meta: &Meta, table: &SweepTable) -> String {
    let mut out = String::new();
    for line in meta.header_lines() {
        out.push_str(&format!("# {line}\n"));
    }
    for r in table.failed() {
        out.push_str(&format!(
            "# failed size={} param={}: {}\n",
            r.size,
            float(r.param),
            r.error.as_deref().unwrap_or("")
        ));
    }
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for r in &table.rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_clock_seconds: Option<f64>,
    #[serde(flatten)]
    payload: &'a T,
}

pub fn json<T: Serialize>(meta: &Meta, payload: &T) -> String {
    let env = Envelope {
        tool: "spinent",
        version: env!("CARGO_PKG_VERSION"),
        config: &meta.config,
        wall_clock_seconds: meta.wall_clock_seconds.map(|t| (t * 1e3).round() / 1e3),
        payload,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("output is serializable");
    s.push('\n');
    s
}

pub fn emit(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => io::stdout().lock().write_all(content.as_bytes()),
    }
}
