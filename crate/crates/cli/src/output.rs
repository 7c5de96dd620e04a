//! Output files: metadata preambles, CSV tables and minimal polyline SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;

use crate::config::Config;

/// Version of every file layout written by the driver.
pub const FORMAT_VERSION: u32 = 1;

/// Resolved settings of a run, echoed into each file it writes.
#[derive(Debug, Clone)]
pub struct RunInfo {
    pub config: Config,
    pub seed: u64,
}

impl RunInfo {
    /// `key=value` lines: format version, command, seed, then every resolved key.
    pub fn metadata(&self) -> Vec<String> {
        let mut lines = vec![
            format!("format_version={FORMAT_VERSION}"),
            format!("command={}", self.config.command()),
            format!("seed={}", self.seed),
        ];
        lines.extend(
            self.config
                .entries()
                .iter()
                .map(|(k, v)| format!("{k}={v}")),
        );
        lines
    }

    pub fn csv_preamble(&self, extra: &[(String, String)]) -> String {
        let mut s = String::new();
        for line in self.metadata() {
            let _ = writeln!(s, "# {line}");
        }
        for (k, v) in extra {
            let _ = writeln!(s, "# {k}={v}");
        }
        s
    }
}

/// A CSV table with a metadata preamble; every row must match the header width.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn render(&self, preamble: &str) -> String {
        let mut s = String::from(preamble);
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip decimal form, so repeated runs produce identical bytes.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_file(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn solid(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            dashed: false,
        }
    }

    pub fn dashed(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            dashed: true,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_Y: f64 = 40.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    fn transform(&self, (x, y): (f64, f64)) -> Option<(f64, f64)> {
        let tx = if self.log_x {
            (x > 0.0).then(|| x.log10())?
        } else {
            x
        };
        let ty = if self.log_y {
            (y > 0.0).then(|| y.log10())?
        } else {
            y
        };
        (tx.is_finite() && ty.is_finite()).then_some((tx, ty))
    }

    /// Renders the plot with `metadata` embedded in an XML comment.
    pub fn to_svg(&self, metadata: &[String]) -> String {
        let series: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| s.points.iter().filter_map(|&p| self.transform(p)).collect())
            .collect();
        let all = series.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = all.fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
        );
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-300 {
            (x0, x1) = (x0 - 0.5, x1 + 0.5);
        }
        if y1 - y0 < 1e-300 {
            (y0, y1) = (y0 - 0.5, y1 + 0.5);
        }
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - 2.0 * MARGIN_Y;
        let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let py = |y: f64| HEIGHT - MARGIN_Y - (y - y0) / (y1 - y0) * plot_h;

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(s, "<!--");
        for line in metadata {
            let _ = writeln!(s, "{}", line.replace("--", "- -"));
        }
        let _ = writeln!(s, "-->");
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                px(xv),
                HEIGHT - MARGIN_Y + 14.0,
                tick_label(xv, self.log_x)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 4.0,
                py(yv) + 4.0,
                tick_label(yv, self.log_y)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 8.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for (idx, (meta, pts)) in self.series.iter().zip(&series).enumerate() {
            let color = COLORS[idx % COLORS.len()];
            let dash = if meta.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            if !pts.is_empty() {
                let coords: Vec<String> = pts
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                    coords.join(" ")
                );
            }
            let ly = MARGIN_Y + 14.0 + 16.0 * idx as f64;
            let lx = WIDTH - MARGIN_RIGHT + 10.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&meta.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_renders_preamble_header_and_rows() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![num(1.0), num(0.5)]);
        assert_eq!(t.render("# x=1\n"), "# x=1\na,b\n1e0,5e-1\n");
    }

    #[test]
    fn svg_embeds_metadata_and_skips_nonpositive_log_points() {
        let plot = Plot {
            title: "t <1>".into(),
            log_x: true,
            series: vec![
                Series::solid("data", vec![(0.0, 1.0), (1.0, 2.0), (10.0, 3.0)]),
                Series::dashed("ref", vec![]),
            ],
            ..Plot::default()
        };
        let svg = plot.to_svg(&["format_version=1".into(), "a=b--c".into()]);
        assert!(svg.contains("<!--\nformat_version=1\na=b- -c\n-->"));
        assert!(svg.contains("t &lt;1&gt;"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        let polyline = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(polyline.matches(',').count(), 2);
    }
}
