//! CSV tables and SVG rate charts.

use std::fmt::Write as _;
use std::path::Path;

use super::RateEstimate;
use crate::io::write_atomic;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "study,setting,n,classifier,successes,trials,rate,ci_low,ci_high";

pub fn table_csv(table: &[RateEstimate]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.study, r.setting, r.n, r.classifier, r.successes, r.trials, r.rate, r.ci_low, r.ci_high
        );
    }
    out
}

/// Writes the CSV and, when `svg` is given, the chart. An empty table is an
/// error and leaves both paths untouched.
pub fn emit_outputs(table: &[RateEstimate], csv: &Path, svg: Option<&Path>) -> Result<()> {
    if table.is_empty() {
        return Err(Error::InvalidArgument("refusing to write an empty results table".into()));
    }
    let chart = render_svg(table)?;
    write_atomic(csv, table_csv(table).as_bytes())?;
    if let Some(path) = svg {
        write_atomic(path, chart.as_bytes())?;
    }
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] =
    ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Line chart of rate against the swept parameter: one polyline per series
/// with its confidence band shaded behind it.
pub fn render_svg(table: &[RateEstimate]) -> Result<String> {
    if table.is_empty() {
        return Err(Error::InvalidArgument("cannot chart an empty table".into()));
    }
    let mut series: Vec<(&str, Vec<&RateEstimate>)> = Vec::new();
    for r in table {
        match series.iter_mut().find(|(name, _)| *name == r.series) {
            Some((_, rows)) => rows.push(r),
            None => series.push((&r.series, vec![r])),
        }
    }
    for (_, rows) in &mut series {
        rows.sort_by(|a, b| a.x.total_cmp(&b.x));
    }

    let (x_min, x_max) =
        table.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.x), hi.max(r.x)));
    let span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_min) / span * plot_w;
    let py = |y: f64| TOP + (1.0 - y) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">Study {}: correct selection rate</text>"#,
        LEFT + plot_w / 2.0,
        table[0].study
    );
    // Axes, horizontal grid lines and tick labels.
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = py(tick);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{tick}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let mut xs: Vec<f64> = table.iter().map(|r| r.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for &x in &xs {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x}</text>"#,
            px(x),
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}" stroke="black"/><line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        TOP + plot_h,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" transform="rotate(-90 18 {:.1})" text-anchor="middle">rate</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (i, (name, rows)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let upper = rows.iter().map(|r| format!("{:.1},{:.1}", px(r.x), py(r.ci_high)));
        let lower = rows.iter().rev().map(|r| format!("{:.1},{:.1}", px(r.x), py(r.ci_low)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = rows.iter().map(|r| format!("{:.1},{:.1}", px(r.x), py(r.rate))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ClassifierKind;
    use crate::harness::wilson_interval;

    fn row(setting: &str, n: usize, x: f64, successes: usize) -> RateEstimate {
        let (ci_low, ci_high) = wilson_interval(successes, 10);
        RateEstimate {
            study: 1,
            setting: setting.into(),
            n,
            classifier: ClassifierKind::RandomForest,
            successes,
            trials: 10,
            rate: successes as f64 / 10.0,
            ci_low,
            ci_high,
            x,
            series: format!("n={n}"),
        }
    }

    #[test]
    fn one_row_csv() {
        let csv = table_csv(&[row("theta2=0.5", 75, 0.5, 10)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("1,theta2=0.5,75,random_forest,10,10,1,"));
        assert!(lines[1].ends_with(",1"));
    }

    #[test]
    fn empty_table_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("t.csv");
        let svg = dir.path().join("t.svg");
        assert!(emit_outputs(&[], &csv, Some(&svg)).is_err());
        assert!(!csv.exists() && !svg.exists());
    }

    #[test]
    fn one_polyline_per_size() {
        let table = vec![
            row("theta2=0", 25, 0.0, 5),
            row("theta2=0.5", 25, 0.5, 8),
            row("theta2=0", 75, 0.0, 5),
            row("theta2=0.5", 75, 0.5, 10),
        ];
        let svg = render_svg(&table).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains(">n=25<") && svg.contains(">n=75<"));
        assert!(!svg.contains("href"));
        let dir = tempfile::tempdir().unwrap();
        let (csv, out) = (dir.path().join("t.csv"), dir.path().join("t.svg"));
        emit_outputs(&table, &csv, Some(&out)).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), svg);
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 5);
    }

    #[test]
    fn chart_matches_golden_file() {
        let table = vec![row("theta2=0", 25, 0.0, 5), row("theta2=0.5", 25, 0.5, 9)];
        let svg = render_svg(&table).unwrap();
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/study1_golden.svg");
        if std::env::var_os("SPECSEL_BLESS").is_some() {
            std::fs::write(path, &svg).unwrap();
        }
        assert_eq!(svg, std::fs::read_to_string(path).unwrap());
    }
}
