//! Tracing the curves `E(X, b) = 0` over a grid of abscissae.
//!
//! A branch is a maximal run of grid points carrying a root of one kind,
//! extended towards the abscissa where it ends (a fold in `b`, a domain
//! boundary, or the escape of `b` to `−∞`). Along a branch the implied
//! density `σ(X)` is continuous, which is what the search relies on.

use serde::{Deserialize, Serialize};

use super::roots::{roots_e_for_x, RootKind, RootSet, RootCase};
use crate::conditions::sigma_implied;
use crate::error::{domain, Result};
use crate::geometry::SegmentShape;
use crate::stability::equilibrium_hessian;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub x: f64,
    pub b: f64,
    /// `(V₁ − V₂)/V` at `(X, b)`.
    pub sigma: f64,
    pub case: RootCase,
    /// Determinant of the equilibrium-form Hessian; changes sign at folds.
    pub det: f64,
    pub on_grid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub kind: RootKind,
    /// Ascending in `X`.
    pub samples: Vec<BranchSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub roots: RootSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSet {
    pub step: f64,
    pub grid: Vec<GridPoint>,
    pub branches: Vec<Branch>,
    /// Abscissa intervals without any root, ends located by bisection.
    pub gaps: Vec<(f64, f64)>,
}

/// Bisection steps used to locate where a branch ends.
const END_BISECTIONS: usize = 60;
/// Geometric samples placed between the last grid point and a branch end.
const END_SAMPLES: i32 = 24;
/// Sub-steps per steep grid cell.
const STEEP_SUBDIVISION: usize = 100;
/// Branches escaping to `b → −∞` are followed up to this slope.
pub const SLOPE_LIMIT: f64 = 1e6;

/// Grid `k·step` strictly inside `(−√a, √a)`.
///
/// Integer multiples of the step give the `−1.78, …, 1.78` grid for
/// `a ≈ 3.1769`.
pub fn grid_abscissae(shape: &SegmentShape, step: f64) -> Result<Vec<f64>> {
    let r = shape.basis_radius();
    if !(step.is_finite() && step > 0.0 && step < r) {
        return Err(domain(format!("step must lie in (0, √a) = (0, {r}), got {step}")));
    }
    let lo = (-r / step).floor() as i64 - 1;
    let hi = (r / step).ceil() as i64 + 1;
    Ok((lo..=hi).map(|k| k as f64 * step).filter(|&x| shape.contains_waterline(x)).collect())
}

pub(crate) fn sample(shape: &SegmentShape, x: f64, b: f64, case: RootCase, on_grid: bool) -> Option<BranchSample> {
    if b < -SLOPE_LIMIT {
        return None;
    }
    let sigma = sigma_implied(shape, x, b).ok()?;
    let det = equilibrium_hessian(shape, x, b)
        .map(|h| h[0][0] * h[1][1] - h[0][1] * h[1][0])
        .unwrap_or(f64::NAN);
    sigma.is_finite().then_some(BranchSample { x, b, sigma, case, det, on_grid })
}

pub(crate) fn sample_kind(shape: &SegmentShape, x: f64, kind: RootKind) -> Option<BranchSample> {
    let set = roots_e_for_x(shape, x).ok()?;
    let root = set.of_kind(kind)?;
    sample(shape, x, root.b, set.case, false)
}

/// Bisection between `inside` (predicate true) and `outside` (false);
/// returns the last abscissa known to satisfy the predicate.
fn boundary<P: Fn(f64) -> bool>(mut inside: f64, mut outside: f64, pred: P) -> f64 {
    for _ in 0..END_BISECTIONS {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Samples approaching the end of a branch from the grid point `anchor`.
fn end_samples(
    shape: &SegmentShape,
    kind: RootKind,
    anchor: f64,
    beyond: Option<f64>,
    domain_end: f64,
) -> Vec<BranchSample> {
    let has = |x: f64| sample_kind(shape, x, kind).is_some();
    // `beyond` is the neighbouring grid point that lacks the root
    let (end, end_included) = match beyond {
        Some(out) => (boundary(anchor, out, has), true),
        None => (domain_end, false),
    };
    let mut out = Vec::new();
    for j in 1..=END_SAMPLES {
        let x = end + (anchor - end) * 0.5f64.powi(j);
        if x == anchor || x == end {
            break;
        }
        match sample_kind(shape, x, kind) {
            Some(s) => out.push(s),
            None => break,
        }
    }
    if end_included && end != anchor {
        if let Some(s) = sample_kind(shape, end, kind) {
            out.push(s);
        }
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

fn refine_steep(shape: &SegmentShape, kind: RootKind, step: f64, samples: &mut Vec<BranchSample>) {
    let grid: Vec<BranchSample> = samples.iter().copied().filter(|s| s.on_grid).collect();
    let mut diffs: Vec<f64> = grid.windows(2).map(|w| (w[1].sigma - w[0].sigma).abs()).collect();
    let med = median(&mut diffs);
    for w in grid.windows(2) {
        if (w[1].sigma - w[0].sigma).abs() > 10.0 * med && (w[1].x - w[0].x) < 1.5 * step {
            let h = (w[1].x - w[0].x) / STEEP_SUBDIVISION as f64;
            for j in 1..STEEP_SUBDIVISION {
                if let Some(s) = sample_kind(shape, w[0].x + j as f64 * h, kind) {
                    samples.push(s);
                }
            }
        }
    }
}

/// Traces every branch on the grid of the given step.
pub fn trace_branches(shape: &SegmentShape, step: f64, refine: bool) -> Result<BranchSet> {
    let xs = grid_abscissae(shape, step)?;
    let grid: Vec<GridPoint> =
        xs.iter().map(|&x| roots_e_for_x(shape, x).map(|roots| GridPoint { x, roots })).collect::<Result<_>>()?;
    let r = shape.basis_radius();

    let mut branches = Vec::new();
    for kind in [RootKind::Lower, RootKind::Upper] {
        let mut i = 0;
        while i < grid.len() {
            if grid[i].roots.of_kind(kind).is_none() {
                i += 1;
                continue;
            }
            let start = i;
            while i < grid.len() && grid[i].roots.of_kind(kind).is_some() {
                i += 1;
            }
            let end = i - 1;
            let mut samples: Vec<BranchSample> = (start..=end)
                .filter_map(|k| {
                    let g = &grid[k];
                    sample(shape, g.x, g.roots.of_kind(kind)?.b, g.roots.case, true)
                })
                .collect();
            let before = start.checked_sub(1).map(|k| grid[k].x);
            let after = grid.get(end + 1).map(|g| g.x);
            samples.extend(end_samples(shape, kind, grid[start].x, before, -r));
            samples.extend(end_samples(shape, kind, grid[end].x, after, r));
            if refine {
                refine_steep(shape, kind, step, &mut samples);
            }
            samples.sort_by(|p, q| p.x.total_cmp(&q.x));
            samples.dedup_by(|p, q| p.x == q.x);
            branches.push(Branch { kind, samples });
        }
    }
    branches.sort_by(|p, q| {
        let px = p.samples.first().map_or(f64::INFINITY, |s| s.x);
        let qx = q.samples.first().map_or(f64::INFINITY, |s| s.x);
        px.total_cmp(&qx).then(p.kind.cmp(&q.kind))
    });

    let any_root = |x: f64| roots_e_for_x(shape, x).is_ok_and(|s| !s.roots.is_empty());
    let mut gaps = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if !grid[i].roots.roots.is_empty() {
            i += 1;
            continue;
        }
        let start = i;
        while i < grid.len() && grid[i].roots.roots.is_empty() {
            i += 1;
        }
        let lo = match start.checked_sub(1) {
            Some(k) => boundary(grid[k].x, grid[start].x, any_root),
            None => -r,
        };
        let hi = match grid.get(i) {
            Some(g) => boundary(g.x, grid[i - 1].x, any_root),
            None => r,
        };
        gaps.push((lo, hi));
    }

    Ok(BranchSet { step, grid, branches, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_grid() {
        let s = SegmentShape::new(3.17690918).unwrap();
        let g = grid_abscissae(&s, 0.01).unwrap();
        assert_eq!(g.len(), 357);
        assert!((g[0] + 1.78).abs() < 1e-12 && (g[356] - 1.78).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_step() {
        let s = SegmentShape::new(1.0).unwrap();
        assert!(grid_abscissae(&s, 0.0).is_err());
        assert!(grid_abscissae(&s, 1.5).is_err());
    }

    #[test]
    fn short_segment_has_one_branch() {
        let s = SegmentShape::new(1.0).unwrap();
        let set = trace_branches(&s, 0.01, false).unwrap();
        assert_eq!(set.branches.len(), 1);
        assert!(set.branches[0].samples.iter().all(|p| p.x > 0.0));
    }
}
