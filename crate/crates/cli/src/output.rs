//! CSV and JSON rendering of result tables.

use serde_json::{json, Map, Value};

use crate::config::{fmt_f64, RunConfig};

/// Column-labelled numeric table; `None` marks an undefined cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub const TOOL: &str = "wgm-qed";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// CSV with a `#`-prefixed metadata header. The header lines after the
/// version line are a loadable config.
pub fn to_csv(cfg: &RunConfig, table: &Table) -> String {
    let mut out = format!("# {TOOL} {VERSION}\n");
    for (k, v) in cfg.echo_pairs() {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(fmt_f64).unwrap_or_default()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn metadata(cfg: &RunConfig) -> Value {
    let config: Map<String, Value> = cfg
        .echo_pairs()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v)))
        .collect();
    let rates: Map<String, Value> = cfg
        .resolved_rates()
        .into_iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    json!({
        "tool": TOOL,
        "version": VERSION,
        "mode": cfg.mode.name(),
        "preset": cfg.preset,
        "config": config,
        "config_text": cfg.echo_text(),
        "params_rad_per_ns": rates,
        "truncation": { "n_max_cw": cfg.n_max_cw, "n_max_ccw": cfg.n_max_ccw },
        "units": "frequencies in GHz (rate / 2pi), times in ns, T and R normalized to input power",
    })
}

pub fn to_json(cfg: &RunConfig, table: &Table) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(|c| c.map_or(Value::Null, |v| json!(v))).collect()))
        .collect();
    let doc = json!({
        "metadata": metadata(cfg),
        "columns": table.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
    s.push('\n');
    s
}
