use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::pr::{BaselineCurve, PrCurve, PrPoint};
use super::EvalError;
use crate::scalar::Scalar;

fn io_err(path: &Path, source: std::io::Error) -> EvalError {
    EvalError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `# ap=..,positives=..,total=..` then `threshold,precision,recall` rows.
pub fn write_pr_csv<F: Scalar, W: Write>(curve: &PrCurve<F>, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "# ap={},positives={},total={}",
        curve.average_precision, curve.positive_count, curve.total_count
    )?;
    writeln!(out, "threshold,precision,recall")?;
    for p in &curve.points {
        writeln!(out, "{},{},{}", p.threshold, p.precision, p.recall)?;
    }
    out.flush()
}

pub fn emit_pr_csv<F: Scalar>(curve: &PrCurve<F>, path: impl AsRef<Path>) -> Result<(), EvalError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_pr_csv(curve, &mut buf).map_err(|e| io_err(path, e))?;
    fs::write(path, buf).map_err(|e| io_err(path, e))
}

pub fn read_pr_csv(path: impl AsRef<Path>) -> Result<PrCurve<f64>, EvalError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |reason: String| EvalError::Format {
        path: path.display().to_string(),
        reason,
    };
    let mut lines = text.lines();
    let meta = lines
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .ok_or_else(|| bad("missing metadata line".into()))?;
    let (mut ap, mut pos, mut total) = (None, None, None);
    for kv in meta.split(',') {
        match kv.split_once('=') {
            Some(("ap", v)) => ap = v.parse::<f64>().ok(),
            Some(("positives", v)) => pos = v.parse::<usize>().ok(),
            Some(("total", v)) => total = v.parse::<usize>().ok(),
            _ => return Err(bad(format!("unexpected metadata {kv:?}"))),
        }
    }
    let (Some(ap), Some(pos), Some(total)) = (ap, pos, total) else {
        return Err(bad("incomplete metadata".into()));
    };
    if lines.next() != Some("threshold,precision,recall") {
        return Err(bad("missing column header".into()));
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let v: Vec<f64> = line
            .split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        let [threshold, precision, recall] = v[..] else {
            return Err(bad(format!("row {}: expected 3 fields", i + 1)));
        };
        points.push(PrPoint {
            threshold,
            precision,
            recall,
        });
    }
    Ok(PrCurve {
        points,
        average_precision: ap,
        positive_count: pos,
        total_count: total,
    })
}

/// One line on the precision-recall plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub ap: f64,
    /// (recall, precision) vertices.
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    /// Step outline: precision `P_k` holds over recall `(R_{k-1}, R_k]`.
    pub fn from_curve<F: Scalar>(name: impl Into<String>, curve: &PrCurve<F>) -> Self {
        let mut points = Vec::with_capacity(curve.points.len() * 2);
        let mut prev = 0.0;
        for p in &curve.points {
            let (r, pr) = (p.recall.as_f64(), p.precision.as_f64());
            points.push((prev, pr));
            points.push((r, pr));
            prev = r;
        }
        Self {
            name: name.into(),
            ap: curve.average_precision.as_f64(),
            points,
        }
    }

    pub fn from_baseline(name: impl Into<String>, baseline: &BaselineCurve) -> Self {
        let y = baseline.precision_level;
        Self {
            name: name.into(),
            ap: y,
            points: vec![(0.0, y), (1.0, y)],
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#ff7f0e"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn px(recall: f64, precision: f64) -> (f64, f64) {
    let w = WIDTH - LEFT - RIGHT;
    let h = HEIGHT - TOP - BOTTOM;
    (
        LEFT + recall.clamp(0.0, 1.0) * w,
        TOP + (1.0 - precision.clamp(0.0, 1.0)) * h,
    )
}

/// Static SVG: recall on x, precision on y, both over [0, 1].
pub fn render_pr_svg(series: &[PlotSeries]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, y0) = px(0.0, 0.0);
    let (x1, y1) = px(1.0, 1.0);
    let _ = writeln!(s, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12">"#);
    for i in 0..=4 {
        let v = f64::from(i) / 4.0;
        let (tx, _) = px(v, 0.0);
        let (_, ty) = px(0.0, v);
        let _ = writeln!(s, r#"<text x="{tx}" y="{}" text-anchor="middle">{v}</text>"#, y0 + 16.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{v}</text>"#,
            x0 - 6.0,
            ty + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">Recall</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">Precision</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    let _ = writeln!(s, "</g>");
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(r, p)| {
                let (x, y) = px(r, p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" data-name="{}" points="{}"/>"#,
            escape(&ser.name),
            pts.join(" ")
        );
    }
    let _ = writeln!(s, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{} (AP={:.3})</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&ser.name),
            ser.ap
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

pub fn emit_pr_svg(series: &[PlotSeries], path: impl AsRef<Path>) -> Result<(), EvalError> {
    let path = path.as_ref();
    fs::write(path, render_pr_svg(series)).map_err(|e| io_err(path, e))
}
