//! Result envelopes and their JSON/CSV renderings.

use std::fs;
use std::path::PathBuf;

use amalg::freeness::ResidualFamily;
use serde::Serialize;
use serde_json::Value;

use crate::{Cli, Format};

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "AMALG_OUT_DIR";

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub seed: u64,
    /// `null` for commands without a verdict.
    pub pass: Option<bool>,
    pub result: Value,
}

/// A CSV table with a fixed header.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// `family,asserted,order,worst,queries`.
    pub fn families(families: &[ResidualFamily]) -> Self {
        let mut t = Table::new(vec!["family", "asserted", "order", "worst", "queries"]);
        for f in families {
            for o in &f.per_order {
                t.push(vec![f.name.clone(), f.asserted.to_string(), o.order.to_string(), fmt(o.worst), o.queries.to_string()]);
            }
        }
        t
    }

    fn render(&self) -> Result<String, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    }
}

/// Shortest round-trip decimal form.
pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

/// Print the envelope (or table) and write it to `--out` or the default
/// output directory. Returns the verdict, `true` when there is none.
pub fn emit(cli: &Cli, command: &str, pass: Option<bool>, result: Value, table: Table) -> Result<bool, String> {
    let env = Envelope { command: command.into(), seed: cli.seed, pass, result };
    let (text, ext) = match cli.format {
        Format::Json => (serde_json::to_string_pretty(&env).map_err(|e| e.to_string())? + "\n", "json"),
        Format::Csv => (table.render()?, "csv"),
    };
    let target = match &cli.out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(OUT_DIR_VAR).map(|dir| PathBuf::from(dir).join(format!("{}.{ext}", command.replace(' ', "_")))),
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
            }
            fs::write(&path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            if cli.out.is_none() {
                print!("{text}");
            }
        }
        None => print!("{text}"),
    }
    Ok(pass.unwrap_or(true))
}
