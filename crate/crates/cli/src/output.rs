//! Report emission: stable JSON documents and plot-ready CSV tables.

use orlicz_lab::report::ReportEnvelope;

/// A CSV table with a header row and one row per grid point or check.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Deterministic cell formatting: full round-trip precision, `inf` spelled
/// out.
pub fn cell(v: f64) -> String {
    if v.is_finite() {
        // shortest representation that round-trips
        format!("{v}")
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Writes the payload to `out` or stdout. I/O errors carry the path.
pub fn emit(payload: &str, out: Option<&str>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| format!("cannot write {path}: {e}")),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

/// Renders the envelope in the requested format. CSV reports carry one row
/// per check.
pub fn render_envelope(env: &ReportEnvelope, format: &str) -> String {
    match format {
        "csv" => {
            let mut table = CsvTable::new(&["check", "status"]);
            for c in &env.checks {
                let status = match c.status {
                    orlicz_lab::report::CheckStatus::Pass => "pass",
                    orlicz_lab::report::CheckStatus::Fail => "fail",
                    orlicz_lab::report::CheckStatus::Estimate => "estimate",
                };
                table.push(vec![c.name.clone(), status.into()]);
            }
            table.render()
        }
        _ => env.to_json_string(),
    }
}
