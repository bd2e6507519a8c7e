use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::ToPrimitive;

use super::{AggregateRow, ChainSpec};
use crate::hyperres::binomial;

/// Fewer distinct domain sizes than this and no slope is fitted.
pub const MIN_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingPoint {
    pub d: u32,
    pub n: u64,
    /// `n·d`, the number of Boolean variables of a sparse encoding.
    pub x: u64,
    pub mean_restarts: f64,
    /// `d^(2w-2)·C(n·d/w, 3)`.
    pub overlay: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub w: u32,
    pub scheme: String,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of log(mean restarts) against log(n·d).
    pub slope: Option<f64>,
    /// Same fit applied to the overlay function.
    pub overlay_slope: Option<f64>,
    /// `4w - 2`: twice the width `2w - 1` at which the chains are refuted.
    pub bound_slope: f64,
    pub exceeds_bound: bool,
    pub reliable: bool,
}

pub fn overlay_value(w: u32, d: u32) -> f64 {
    let spec = ChainSpec { w, d };
    let nd_over_w = spec.groups() * u64::from(d);
    let c3 = binomial(nd_over_w, 3).to_f64().unwrap_or(f64::INFINITY);
    f64::from(d).powi(2 * w as i32 - 2) * c3
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in points {
        let dx = x.ln() - mx;
        num += dx * (y.ln() - my);
        den += dx * dx;
    }
    num / den
}

impl ScalingReport {
    /// Builds a report for chain width `w` from `(d, mean restarts)` pairs.
    pub fn from_means(w: u32, scheme: &str, means: &[(u32, f64)]) -> ScalingReport {
        let mut by_d: BTreeMap<u32, f64> = BTreeMap::new();
        for &(d, m) in means {
            by_d.insert(d, m);
        }
        let points: Vec<ScalingPoint> = by_d
            .into_iter()
            .map(|(d, mean_restarts)| {
                let n = ChainSpec { w, d }.num_vars();
                ScalingPoint { d, n, x: n * u64::from(d), mean_restarts, overlay: overlay_value(w, d) }
            })
            .collect();
        // log needs positive values
        let fit: Vec<(f64, f64)> =
            points.iter().filter(|p| p.mean_restarts > 0.0).map(|p| (p.x as f64, p.mean_restarts)).collect();
        let reliable = fit.len() >= MIN_POINTS;
        let slope = reliable.then(|| log_log_slope(&fit));
        let overlay_slope = (points.len() >= MIN_POINTS)
            .then(|| log_log_slope(&points.iter().map(|p| (p.x as f64, p.overlay)).collect::<Vec<_>>()));
        let bound_slope = f64::from(4 * w - 2);
        let exceeds_bound = slope.is_some_and(|s| s > bound_slope);
        ScalingReport {
            w,
            scheme: scheme.to_string(),
            points,
            slope,
            overlay_slope,
            bound_slope,
            exceeds_bound,
            reliable,
        }
    }
}

/// One report per (w, scheme) series of chain aggregates.
pub fn scaling_report(aggs: &[AggregateRow]) -> Vec<ScalingReport> {
    let mut series: BTreeMap<(u32, &str), Vec<(u32, f64)>> = BTreeMap::new();
    for a in aggs {
        if let (Some(w), Some(d)) = (a.w, a.d) {
            series.entry((w, a.scheme)).or_default().push((d, a.mean_restarts));
        }
    }
    series.into_iter().map(|((w, scheme), means)| ScalingReport::from_means(w, scheme, &means)).collect()
}

impl fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "w={} scheme={}", self.w, self.scheme)?;
        writeln!(f, "{:>4} {:>6} {:>8} {:>14} {:>16}", "d", "n", "n*d", "mean_restarts", "overlay")?;
        for p in &self.points {
            writeln!(f, "{:>4} {:>6} {:>8} {:>14.3} {:>16.1}", p.d, p.n, p.x, p.mean_restarts, p.overlay)?;
        }
        match (self.slope, self.overlay_slope) {
            (Some(s), o) => {
                write!(f, "slope={s:.3} bound_slope={:.0}", self.bound_slope)?;
                if let Some(o) = o {
                    write!(f, " overlay_slope={o:.3}")?;
                }
                write!(f, " {}", if self.exceeds_bound { "EXCEEDS BOUND" } else { "within bound" })
            }
            (None, _) => write!(f, "unreliable: fewer than {MIN_POINTS} points, no fit"),
        }
    }
}

/// Two-column `x y` series (x = n·d, y = mean restarts), one block per report.
pub fn plotdata(reports: &[ScalingReport]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "# w={} scheme={}", r.w, r.scheme);
        for p in &r.points {
            let _ = writeln!(out, "{} {}", p.x, p.mean_restarts);
        }
    }
    out
}
