//! Branch curves `(X, b, σ)` over the waterline abscissa, with export.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::SegmentShape;
use crate::solver::{trace_branches, RootKind, RootCase};
use crate::stability::{classify_equilibrium, StabilityVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "X")]
    pub x: f64,
    pub b: f64,
    pub sigma: f64,
    pub branch: usize,
    pub kind: RootKind,
    pub case: RootCase,
    /// Verdict of `(X, b)` as an equilibrium for its own implied density.
    pub stability: StabilityVerdict,
}

/// Number of roots of `E = 0` at one grid abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCount {
    #[serde(rename = "X")]
    pub x: f64,
    pub roots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub a: f64,
    pub step: f64,
    /// Sorted by `(branch, X)`.
    pub points: Vec<CurvePoint>,
    pub gaps: Vec<(f64, f64)>,
    pub grid: Vec<GridCount>,
}

impl SweepCurve {
    pub fn branch_count(&self) -> usize {
        self.points.last().map_or(0, |p| p.branch + 1)
    }

    pub fn branch(&self, id: usize) -> impl Iterator<Item = &CurvePoint> {
        self.points.iter().filter(move |p| p.branch == id)
    }

    /// `(min X, max X)` of a branch.
    pub fn branch_span(&self, id: usize) -> Option<(f64, f64)> {
        let mut it = self.branch(id);
        let first = it.next()?.x;
        Some((first, it.last().map_or(first, |p| p.x)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Samples every branch at the given step.
///
/// Branch ids follow the order of the first abscissa of each branch.
pub fn sweep_branches(shape: &SegmentShape, step: f64, refine_steep: bool) -> Result<SweepCurve> {
    let set = trace_branches(shape, step, refine_steep)?;
    let mut points = Vec::new();
    for (id, branch) in set.branches.iter().enumerate() {
        for s in &branch.samples {
            points.push(CurvePoint {
                x: s.x,
                b: s.b,
                sigma: s.sigma,
                branch: id,
                kind: branch.kind,
                case: s.case,
                stability: classify_equilibrium(shape, s.x, s.b, s.sigma)?,
            });
        }
    }
    let grid = set.grid.iter().map(|g| GridCount { x: g.x, roots: g.roots.roots.len() }).collect();
    Ok(SweepCurve { a: shape.axis(), step, points, gaps: set.gaps, grid })
}

/// Shortest decimal rendering with 12 significant digits.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

pub fn csv_string(curve: &SweepCurve) -> String {
    let mut out = String::from("X,b,sigma,branch,stability,case\n");
    for p in &curve.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_sig12(p.x),
            format_sig12(p.b),
            format_sig12(p.sigma),
            p.branch,
            p.stability.label(),
            p.case.letter()
        );
    }
    out
}

pub fn export_curve<W: io::Write>(curve: &SweepCurve, format: ExportFormat, mut out: W) -> io::Result<()> {
    match format {
        ExportFormat::Csv => out.write_all(csv_string(curve).as_bytes()),
        ExportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, curve)?;
            out.write_all(b"\n")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(-1.78), "-1.78");
        assert_eq!(format_sig12(0.510_004_181_234_567_9), "0.510004181235");
        assert_eq!(format_sig12(-12.687956810086574), "-12.6879568101");
        assert_eq!(format_sig12(1.5e-9), "1.5e-9");
        assert_eq!(format_sig12(0.0), "0");
        for v in [std::f64::consts::PI, -1234567.891011, 3.3e-7, 9.999999999999e11] {
            let back: f64 = format_sig12(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-11 * v.abs(), "{v}");
        }
    }

    #[test]
    fn empty_curve_is_header_only() {
        let c = SweepCurve { a: 1.0, step: 0.01, points: vec![], gaps: vec![], grid: vec![] };
        assert_eq!(csv_string(&c), "X,b,sigma,branch,stability,case\n");
    }

    #[test]
    fn single_point_row() {
        let s = SegmentShape::new(1.0).unwrap();
        let full = sweep_branches(&s, 0.25, false).unwrap();
        let c = SweepCurve { points: full.points[..1].to_vec(), ..full };
        let csv = csv_string(&c);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].split(',').count(), 6);
        assert!(rows[1].ends_with(",d"));
    }

    #[test]
    fn sorted_by_branch_then_x() {
        let s = SegmentShape::new(3.17690918).unwrap();
        let c = sweep_branches(&s, 0.05, true).unwrap();
        for w in c.points.windows(2) {
            assert!((w[0].branch, w[0].x) < (w[1].branch, w[1].x));
        }
        assert!(c.points.iter().all(|p| p.sigma > 0.0 && p.sigma < 1.0));
    }
}
