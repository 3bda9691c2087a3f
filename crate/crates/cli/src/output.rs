//! Run artifacts: trajectory CSV, metrics JSON and an SVG summary plot.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use vfcfc_core::analysis::{ErrorSeries, SettleMetrics, UubBounds};
use vfcfc_core::sim::TrajectoryLog;

use crate::CliError;

/// Thirteen significant digits, enough to reproduce the integrator state
/// well past its own accuracy.
fn num(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn csv_header(log: &TrajectoryLog) -> Vec<String> {
    let Some(first) = log.records.first() else {
        return Vec::new();
    };
    let s = &first.state;
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=s.q.len()).map(|i| format!("q{i}")));
    cols.extend((1..=s.qdot.len()).map(|i| format!("qdot{i}")));
    cols.push("w".into());
    cols.extend((1..=s.alpha_hat.len()).map(|i| format!("alpha_hat{i}")));
    cols.extend((1..=first.tau.len()).map(|i| format!("tau{i}")));
    cols.extend(["beta_norm", "phi_norm", "dist_hgh", "dist_phys"].map(String::from));
    cols
}

pub fn write_csv<W: Write>(
    out: W,
    log: &TrajectoryLog,
    series: &ErrorSeries,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(log))?;
    for (i, r) in log.records.iter().enumerate() {
        let s = &r.state;
        let mut row = vec![num(s.t)];
        row.extend(s.q.iter().map(|&x| num(x)));
        row.extend(s.qdot.iter().map(|&x| num(x)));
        row.push(num(s.w));
        row.extend(s.alpha_hat.iter().map(|&x| num(x)));
        row.extend(r.tau.iter().map(|&x| num(x)));
        for col in [
            &series.beta_norm,
            &series.phi_norm,
            &series.dist_hgh,
            &series.dist_phys,
        ] {
            row.push(num(col[i]));
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Terminal {
    pub t: f64,
    pub beta_norm: f64,
    pub phi_norm: f64,
    pub dist_hgh: f64,
    pub dist_phys: f64,
    pub alpha_hat: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settle {
    pub tail_fraction: f64,
    pub ultimate_bound_est: f64,
    pub settle_time: f64,
    pub mean_effort: f64,
}

/// Ultimate bound evaluated with the certified constants and the terminal
/// adaptive estimate.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub lambda_low: f64,
    pub rho_w: f64,
    pub alpha_norm: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub x1: f64,
    pub x2: f64,
    pub r: f64,
    pub dbar: f64,
    pub tail_within_dbar: bool,
}

impl BoundReport {
    pub fn new(lambda_low: f64, rho_w: f64, alpha_norm: f64, b: &UubBounds, tail: f64) -> Self {
        Self {
            lambda_low,
            rho_w,
            alpha_norm,
            k1: b.k1,
            k2: b.k2,
            k3: b.k3,
            x1: b.x1,
            x2: b.x2,
            r: b.r,
            dbar: b.dbar,
            tail_within_dbar: tail <= b.dbar,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub scenario_id: String,
    pub description: String,
    pub plant: String,
    pub plant_mode: String,
    pub path: String,
    pub controller: String,
    pub step: f64,
    pub duration: f64,
    pub samples: usize,
    pub terminal: Terminal,
    pub settle: Settle,
    pub bound: Option<BoundReport>,
}

impl Settle {
    pub fn new(tail_fraction: f64, m: &SettleMetrics) -> Self {
        Self {
            tail_fraction,
            ultimate_bound_est: m.ultimate_bound_est,
            settle_time: m.settle_time,
            mean_effort: m.mean_effort,
        }
    }
}

pub fn write_metrics<W: Write>(out: W, metrics: &Metrics) -> Result<(), CliError> {
    serde_json::to_writer_pretty(out, metrics)?;
    Ok(())
}

const MAX_POLYLINE: usize = 2000;

fn thin<T: Copy>(pts: &[T]) -> Vec<T> {
    let stride = pts.len().div_ceil(MAX_POLYLINE).max(1);
    let mut out: Vec<T> = pts.iter().step_by(stride).copied().collect();
    if let Some(&last) = pts.last() {
        if !(pts.len() - 1).is_multiple_of(stride) {
            out.push(last);
        }
    }
    out
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let u = (x - self.xr.0) / (self.xr.1 - self.xr.0);
        let v = (y - self.yr.0) / (self.yr.1 - self.yr.0);
        (self.x0 + u * self.w, self.y0 + (1.0 - v) * self.h)
    }

    fn polyline(&self, svg: &mut String, pts: &[(f64, f64)], color: &str, width: f64) {
        let mut d = String::new();
        for &(x, y) in &thin(pts) {
            let (u, v) = self.map(x, y);
            let _ = write!(d, "{u:.2},{v:.2} ");
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{}"/>"#,
            d.trim_end()
        );
    }

    fn axes(&self, svg: &mut String, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        let bottom = self.y0 + self.h;
        let right = self.x0 + self.w;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11">{:.3}</text><text x="{}" y="{}" font-size="11" text-anchor="end">{:.3}</text>"#,
            self.x0,
            bottom + 14.0,
            self.xr.0,
            right,
            bottom + 14.0,
            self.xr.1
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{:.3}</text><text x="{}" y="{}" font-size="11" text-anchor="end">{:.3}</text>"#,
            self.x0 - 4.0,
            bottom,
            self.yr.0,
            self.x0 - 4.0,
            self.y0 + 10.0,
            self.yr.1
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{xlabel}</text><text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">{ylabel}</text>"#,
            self.x0 + 0.5 * self.w,
            bottom + 28.0,
            self.x0 - 40.0,
            self.y0 + 0.5 * self.h,
            self.x0 - 40.0,
            self.y0 + 0.5 * self.h
        );
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = 0.05 * (hi - lo).max(1e-9);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Left panel: desired path and the trajectory, both in the plane of the
/// first two path coordinates. Right panel: `log10` of the constraint error
/// and the physical distance against time.
pub fn render_svg(
    title: &str,
    desired: &[(f64, f64)],
    trajectory: &[(f64, f64)],
    series: &ErrorSeries,
) -> String {
    const FLOOR: f64 = 1e-12;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="980" height="480" viewBox="0 0 980 480">"#
    );
    let _ = writeln!(svg, r#"<rect width="980" height="480" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="490" y="22" font-size="15" text-anchor="middle">{}</text>"#,
        escape(title)
    );

    // equal aspect for the geometric panel
    let (mut xr, mut yr) = (
        range(desired.iter().chain(trajectory).map(|p| p.0)),
        range(desired.iter().chain(trajectory).map(|p| p.1)),
    );
    let span = (xr.1 - xr.0).max(yr.1 - yr.0);
    let (cx, cy) = (0.5 * (xr.0 + xr.1), 0.5 * (yr.0 + yr.1));
    xr = (cx - 0.5 * span, cx + 0.5 * span);
    yr = (cy - 0.5 * span, cy + 0.5 * span);
    let geo = Frame {
        x0: 70.0,
        y0: 50.0,
        w: 360.0,
        h: 360.0,
        xr,
        yr,
    };
    geo.axes(&mut svg, "x", "y");
    geo.polyline(&mut svg, desired, "#1f77b4", 2.0);
    geo.polyline(&mut svg, trajectory, "#d62728", 1.2);

    let log_of = |v: &[f64]| -> Vec<(f64, f64)> {
        series
            .t
            .iter()
            .zip(v)
            .map(|(&t, &x)| (t, x.max(FLOOR).log10()))
            .collect()
    };
    let beta = log_of(&series.beta_norm);
    let dist = log_of(&series.dist_phys);
    let err = Frame {
        x0: 560.0,
        y0: 50.0,
        w: 380.0,
        h: 360.0,
        xr: range(series.t.iter().copied()),
        yr: range(beta.iter().chain(&dist).map(|p| p.1)),
    };
    err.axes(&mut svg, "t [s]", "log10 error");
    err.polyline(&mut svg, &beta, "#2ca02c", 1.2);
    err.polyline(&mut svg, &dist, "#9467bd", 1.2);

    let legend = [
        ("#1f77b4", "desired path"),
        ("#d62728", "trajectory"),
        ("#2ca02c", "|beta|"),
        ("#9467bd", "distance to path"),
    ];
    for (i, (color, label)) in legend.iter().enumerate() {
        let x = 120.0 + 200.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="455" x2="{}" y2="455" stroke="{color}" stroke-width="3"/><text x="{}" y="459" font-size="12">{label}</text>"#,
            x + 24.0,
            x + 30.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_thirteen_digits() {
        assert_eq!(num(1.0 / 3.0), "3.333333333333e-1");
        assert_eq!(num(0.0), "0.000000000000e0");
    }

    #[test]
    fn thinning_keeps_endpoints() {
        let pts: Vec<usize> = (0..30001).collect();
        let t = thin(&pts);
        assert!(t.len() <= MAX_POLYLINE + 1);
        assert_eq!(t[0], 0);
        assert_eq!(*t.last().unwrap(), 30000);
    }

    #[test]
    fn svg_is_well_formed() {
        let series = ErrorSeries {
            t: vec![0.0, 1.0],
            beta_norm: vec![1.0, 0.0],
            phi_norm: vec![1.0, 0.5],
            dist_hgh: vec![1.0, 0.5],
            dist_phys: vec![0.5, 0.2],
            effort: vec![1.0, 1.0],
        };
        let svg = render_svg("a < b", &[(0.0, 0.0), (1.0, 1.0)], &[(0.0, 1.0)], &series);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<polyline").count(), 4);
    }
}
