//! Tabular output: CSV (one file per panel) and JSON with a config echo.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One table of numbers. Multi-panel figures produce several.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Panel {
    pub fn new(name: Option<String>, columns: Vec<String>) -> Self {
        Self {
            name,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Round to `precision` significant digits.
pub fn round_significant(v: f64, precision: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    let p = precision.clamp(1, 17);
    format!("{:.*e}", p - 1, v).parse().unwrap_or(v)
}

/// Shortest round-trip text of `v` after rounding to `precision` digits.
pub fn format_value(v: f64, precision: usize) -> String {
    let r = round_significant(v, precision);
    if r == 0.0 {
        return "0".to_string();
    }
    let a = r.abs();
    if r.is_finite() && !(1e-5..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

pub fn render_csv(panel: &Panel, preset: &str, precision: usize) -> String {
    let mut out = format!("# dho v{VERSION} preset={preset}\n");
    out.push_str(&panel.columns.join(","));
    out.push('\n');
    for row in &panel.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_value(v, precision)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_number(v: f64, precision: usize) -> Value {
    let r = round_significant(v, precision);
    serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

pub fn render_json(panels: &[Panel], preset: &str, config: &Value, precision: usize) -> String {
    let panels: Vec<Value> = panels
        .iter()
        .map(|p| {
            let rows: Vec<Value> = p
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(|&v| json_number(v, precision)).collect()))
                .collect();
            json!({ "name": p.name, "columns": p.columns, "rows": rows })
        })
        .collect();
    let doc = json!({
        "dho_version": VERSION,
        "preset": preset,
        "config": config,
        "panels": panels,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

/// `<stem>-<panel>.<ext>` next to `out`.
pub fn panel_path(out: &Path, panel: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}-{panel}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{panel}"),
    };
    out.with_file_name(name)
}

/// Write every (path, contents) pair through a temporary file and rename
/// into place only once all of them were written.
pub fn write_atomically(files: &[(PathBuf, String)]) -> io::Result<()> {
    let mut temps: Vec<(PathBuf, &Path)> = Vec::with_capacity(files.len());
    let cleanup = |temps: &[(PathBuf, &Path)]| {
        for (tmp, _) in temps {
            let _ = fs::remove_file(tmp);
        }
    };
    for (path, contents) in files {
        let mut tmp_name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        tmp_name.push(".partial");
        let tmp = path.with_file_name(tmp_name);
        let written = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        });
        temps.push((tmp, path.as_path()));
        if let Err(e) = written {
            cleanup(&temps);
            return Err(e);
        }
    }
    for (i, (tmp, path)) in temps.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, path) {
            cleanup(&temps[i..]);
            return Err(e);
        }
    }
    Ok(())
}

/// Emit panels to `out` (or standard output when `None`).
pub fn emit(
    panels: &[Panel],
    out: Option<&Path>,
    format: Format,
    preset: &str,
    config: &Value,
    precision: usize,
) -> io::Result<Vec<PathBuf>> {
    let files: Vec<(Option<PathBuf>, String)> = match format {
        Format::Json => vec![(out.map(Path::to_path_buf), render_json(panels, preset, config, precision))],
        Format::Csv => panels
            .iter()
            .map(|p| {
                let path = match (out, &p.name, panels.len()) {
                    (Some(o), Some(name), n) if n > 1 => Some(panel_path(o, name)),
                    (Some(o), _, _) => Some(o.to_path_buf()),
                    (None, _, _) => None,
                };
                let mut text = String::new();
                if out.is_none() && panels.len() > 1 {
                    if let Some(name) = &p.name {
                        text.push_str(&format!("# panel={name}\n"));
                    }
                }
                text.push_str(&render_csv(p, preset, precision));
                (path, text)
            })
            .collect(),
    };
    if out.is_none() {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        for (_, text) in &files {
            lock.write_all(text.as_bytes())?;
        }
        lock.flush()?;
        return Ok(Vec::new());
    }
    let files: Vec<(PathBuf, String)> = files.into_iter().map(|(p, t)| (p.expect("path set"), t)).collect();
    write_atomically(&files)?;
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
