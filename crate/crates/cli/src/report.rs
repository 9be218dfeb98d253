//! Result tables, manifests and plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use crate::config::Task;

/// 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Line plot of columns `ys` against `x` from one table.
#[derive(Debug, Clone)]
pub struct Plot {
    pub table: usize,
    pub x: &'static str,
    pub ys: Vec<&'static str>,
    /// Leading rows to draw (a table may stack several sectors).
    pub rows: usize,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub task: Task,
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub convergence: BTreeMap<String, f64>,
    pub flags: Vec<String>,
    pub plot: Option<Plot>,
}

impl Report {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            tables: Vec::new(),
            summary: vec![String::new(); summary_columns(task).len()],
            tolerances: BTreeMap::new(),
            convergence: BTreeMap::new(),
            flags: Vec::new(),
            plot: None,
        }
    }

    pub fn set(&mut self, column: &str, value: String) {
        let i = summary_columns(self.task)
            .iter()
            .position(|c| *c == column)
            .unwrap_or_else(|| panic!("{column} is not a summary column of {}", self.task.name()));
        self.summary[i] = value;
    }

    pub fn set_num(&mut self, column: &str, x: f64) {
        self.set(column, num(x));
    }
}

pub const BREAKING_COLUMNS: [&str; 12] = [
    "lambda_q", "a_q", "lambda_p", "a_p", "delta_w", "delta_v", "eps_q", "eps_p", "eps", "f_expect",
    "f_expect_im", "phase",
];

/// Fixed per-task columns of `summary.csv` (and of each sweep row).
pub fn summary_columns(task: Task) -> &'static [&'static str] {
    match task {
        Task::Partner => &["zero_mode_q", "vacua_q", "zero_mode_p", "vacua_p", "identity_residual"],
        Task::Dynamics => &["t_final", "h_body_drift", "h_soul_drift", "witness_drift_q", "witness_drift_p"],
        Task::Groundstate => &[
            "iterations",
            "distance_to_next",
            "eps_q_log_derivative",
            "eps_p_log_derivative",
            "norm_reference_ln",
        ],
        Task::Breaking => &BREAKING_COLUMNS,
        Task::Instanton => &[
            "action",
            "delta_w",
            "action_rel_error",
            "w_prime_plus",
            "delta_q",
            "me_charge_im",
            "me_fermion",
            "eps",
            "breaking_product_re",
            "breaking_product_im",
            "phase",
        ],
        Task::ShapeCheck => &["a0", "a1", "r_est", "residual", "invariant", "chain_step_residual"],
        Task::ShapeSpectrum => &["levels", "e_1", "e_max", "truncated"],
        Task::Algebra => &["dim", "res_comm", "res_casimir", "edge_comm", "edge_casimir", "casimir"],
        Task::Selfsimilar => &["e_1", "e_n_max", "bound", "telescope_deviation"],
        Task::Oracle => &[
            "e0_q",
            "e1_q",
            "e0_p",
            "e1_p",
            "max_convergence_estimate",
            "extensions_q",
            "domain_converged",
            "under_resolved",
        ],
    }
}

fn finite_or_null(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub struct RunInfo<'a> {
    pub config_sha256: &'a str,
    pub seed: Option<u64>,
}

fn manifest_base(task: Task, info: &RunInfo, status: &str, error: Option<String>) -> Value {
    json!({
        "task": task.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": info.config_sha256,
        "seed": info.seed,
        "status": status,
        "error": error,
    })
}

fn map_json<K: AsRef<str>>(m: &BTreeMap<K, f64>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.as_ref().to_string(), finite_or_null(*v))).collect())
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

/// Write every table, `summary.csv`, `manifest.json` and optionally an SVG plot.
pub fn write_run(out: &Path, rep: &Report, info: &RunInfo, error: Option<String>, svg: bool) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut files = Vec::new();
    for t in &rep.tables {
        let name = format!("{}.csv", t.name);
        t.write(&out.join(&name))?;
        files.push(name);
    }
    let mut summary = Table::new("summary", summary_columns(rep.task));
    summary.push(rep.summary.clone());
    summary.write(&out.join("summary.csv"))?;
    files.push("summary.csv".into());
    if svg {
        if let Some(p) = &rep.plot {
            let name = format!("{}.svg", rep.task.name());
            fs::write(out.join(&name), render_svg(&rep.tables[p.table], p))?;
            files.push(name);
        }
    }
    let status = if error.is_some() { "numerical_error" } else { "ok" };
    let mut m = manifest_base(rep.task, info, status, error);
    m["tolerances"] = map_json(&rep.tolerances);
    m["convergence"] = map_json(&rep.convergence);
    m["flags"] = json!(rep.flags);
    m["files"] = json!(files);
    write_json(&out.join("manifest.json"), &m)
}

/// One sweep point: its parameter value and either a report or an error message.
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<Report, (Report, String)>,
}

pub fn write_sweep(out: &Path, task: Task, parameter: &str, rows: &[SweepRow], info: &RunInfo) -> Result<usize> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["index", parameter, "status", "error"];
    header.extend_from_slice(summary_columns(task));
    w.write_record(&header)?;
    let mut flags = Vec::new();
    let mut tolerances = BTreeMap::new();
    let mut convergence = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let (rep, status, err) = match &r.outcome {
            Ok(rep) => (rep, "ok", String::new()),
            Err((rep, e)) => {
                flags.push(format!("point {i}: {e}"));
                (rep, "failed", e.clone())
            }
        };
        tolerances.extend(rep.tolerances.iter().map(|(k, v)| (*k, *v)));
        for (k, v) in &rep.convergence {
            convergence.insert(format!("{i}.{k}"), *v);
        }
        flags.extend(rep.flags.iter().map(|f| format!("point {i}: {f}")));
        let mut rec = vec![i.to_string(), num(r.value), status.to_string(), err];
        rec.extend(rep.summary.iter().cloned());
        w.write_record(&rec)?;
    }
    w.flush()?;
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    let status = if failures > 0 { "numerical_error" } else { "ok" };
    let mut m = manifest_base(task, info, status, None);
    m["sweep"] = json!({ "parameter": parameter, "points": rows.len(), "failures": failures });
    m["tolerances"] = map_json(&tolerances);
    m["convergence"] = map_json(&convergence);
    m["flags"] = json!(flags);
    m["files"] = json!(["sweep.csv"]);
    write_json(&out.join("manifest.json"), &m)?;
    Ok(failures)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn render_svg(t: &Table, p: &Plot) -> String {
    let col = |name: &str| t.columns.iter().position(|c| *c == name);
    let parse = |i: usize| -> Vec<f64> {
        t.rows.iter().take(p.rows).map(|r| r[i].parse::<f64>().unwrap_or(f64::NAN)).collect()
    };
    let xs = col(p.x).map(parse).unwrap_or_default();
    let series: Vec<(&str, Vec<f64>)> = p.ys.iter().filter_map(|y| col(y).map(|i| (*y, parse(i)))).collect();

    let finite = |v: &[f64]| v.iter().copied().filter(|x| x.is_finite()).collect::<Vec<_>>();
    let bounds = |v: Vec<f64>| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(lo < hi) {
            (lo - 0.5, lo + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = bounds(finite(&xs));
    let (y0, y1) = bounds(series.iter().flat_map(|(_, v)| finite(v)).collect());
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, p.x);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}">{x0:.3e}</text>"#, HEIGHT - MARGIN + 14.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{x1:.3e}</text>"#, WIDTH - MARGIN, HEIGHT - MARGIN + 14.0);
    let _ = writeln!(s, r#"<text x="4" y="{}">{y0:.3e}</text>"#, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<text x="4" y="{}">{y1:.3e}</text>"#, MARGIN + 4.0);
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            WIDTH - MARGIN - 100.0,
            MARGIN + 14.0 * (k + 1) as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
