//! Run artifacts: RFC-4180 CSV tables, a stable JSON summary, and a
//! dependency-free SVG chart. Identical configs must produce byte-identical
//! tables and charts; the summary additionally carries a sha256 content hash
//! over everything except the wall-clock timestamp.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Shortest round-trip decimal for a float — deterministic across runs and
/// exact on re-parse, unlike fixed-precision formatting.
pub fn fmt(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "ragged row in {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv_bytes(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner()?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

impl Chart {
    /// Minimal line chart. Pixel coordinates are emitted with fixed
    /// precision so the output is byte-stable.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const L: f64 = 70.0;
        const R: f64 = 610.0;
        const T: f64 = 40.0;
        const B: f64 = 370.0;

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
             viewBox=\"0 0 {W} {H}\" font-family=\"monospace\" font-size=\"12\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            (L + R) / 2.0,
            xml_escape(&self.title)
        ));

        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if pts.is_empty() {
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">no data</text>\n</svg>\n",
                (L + R) / 2.0,
                (T + B) / 2.0
            ));
            return out;
        }
        let (mut x0, mut x1) = min_max(pts.iter().map(|p| p.0));
        let (mut y0, mut y1) = min_max(pts.iter().map(|p| p.1));
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let px = |x: f64| L + (x - x0) / (x1 - x0) * (R - L);
        let py = |y: f64| B - (y - y0) / (y1 - y0) * (B - T);

        for i in 0..=4 {
            let xv = x0 + (x1 - x0) * i as f64 / 4.0;
            let yv = y0 + (y1 - y0) * i as f64 / 4.0;
            out.push_str(&format!(
                "<line x1=\"{0:.2}\" y1=\"{B}\" x2=\"{0:.2}\" y2=\"{1:.2}\" stroke=\"#dddddd\"/>\n",
                px(xv),
                T
            ));
            out.push_str(&format!(
                "<line x1=\"{L}\" y1=\"{0:.2}\" x2=\"{R}\" y2=\"{0:.2}\" stroke=\"#dddddd\"/>\n",
                py(yv)
            ));
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
                px(xv),
                B + 16.0,
                tick_label(xv)
            ));
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
                L - 6.0,
                py(yv) + 4.0,
                tick_label(yv)
            ));
        }
        out.push_str(&format!(
            "<line x1=\"{L}\" y1=\"{B}\" x2=\"{R}\" y2=\"{B}\" stroke=\"black\"/>\n\
             <line x1=\"{L}\" y1=\"{T}\" x2=\"{L}\" y2=\"{B}\" stroke=\"black\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            (L + R) / 2.0,
            H - 8.0,
            xml_escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
            (T + B) / 2.0,
            (T + B) / 2.0,
            xml_escape(&self.y_label)
        ));

        for (k, series) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let path: Vec<String> = series
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            if path.len() > 1 {
                out.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                    path.join(" ")
                ));
            }
            for p in &path {
                let (x, y) = p.split_once(',').unwrap();
                out.push_str(&format!(
                    "<circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"{color}\"/>\n"
                ));
            }
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"{color}\">{}</text>\n",
                L + 10.0,
                T + 16.0 * (k as f64 + 1.0),
                xml_escape(&series.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Everything one experiment produced, ready to be written to disk.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub charts: Vec<Chart>,
    pub verdicts: Vec<Verdict>,
    pub results: serde_json::Value,
}

impl Artifacts {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Writes every table, chart, and `summary.json` into `out_dir`;
    /// returns the summary path. The content hash covers the config echo,
    /// results, verdicts, and the exact bytes of every table and chart —
    /// but not `generated_unix`.
    pub fn write(&self, config: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", out_dir.display()))?;

        let config_json = serde_json::to_value(config)?;
        let results_bytes = serde_json::to_vec(&self.results)?;
        let verdicts_bytes = serde_json::to_vec(&self.verdicts)?;

        let mut hasher = Sha256::new();
        let mut absorb = |label: &str, bytes: &[u8]| {
            hasher.update((label.len() as u64).to_le_bytes());
            hasher.update(label.as_bytes());
            hasher.update((bytes.len() as u64).to_le_bytes());
            hasher.update(bytes);
        };
        absorb("schema", b"1");
        absorb("kind", config.kind.as_str().as_bytes());
        absorb("config", &serde_json::to_vec(&config_json)?);
        absorb("results", &results_bytes);
        absorb("verdicts", &verdicts_bytes);

        let mut table_entries = Vec::new();
        for table in &self.tables {
            let bytes = table.to_csv_bytes()?;
            let file = format!("{}.csv", table.name);
            std::fs::write(out_dir.join(&file), &bytes)?;
            absorb(&file, &bytes);
            table_entries.push(serde_json::json!({
                "file": file,
                "rows": table.rows.len(),
                "sha256": hex(&Sha256::digest(&bytes)),
            }));
        }
        let mut chart_entries = Vec::new();
        for chart in &self.charts {
            let svg = chart.to_svg();
            let file = format!("{}.svg", chart.name);
            std::fs::write(out_dir.join(&file), svg.as_bytes())?;
            absorb(&file, svg.as_bytes());
            chart_entries.push(serde_json::json!({
                "file": file,
                "sha256": hex(&Sha256::digest(svg.as_bytes())),
            }));
        }
        let content_hash = hex(&hasher.finalize());

        let generated_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let summary = serde_json::json!({
            "schema_version": "1",
            "kind": config.kind.as_str(),
            "description": config.description,
            "config": config_json,
            "results": self.results,
            "verdicts": self.verdicts,
            "tables": table_entries,
            "charts": chart_entries,
            "all_pass": self.all_pass(),
            "content_hash": content_hash,
            "generated_unix": generated_unix,
        });
        let path = out_dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
