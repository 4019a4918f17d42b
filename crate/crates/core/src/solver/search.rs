//! Global search for all equilibria of a given shape and density.

use serde::{Deserialize, Serialize};

use super::branches::{sample_kind, trace_branches, Branch, BranchSample, BranchSet};
use super::closed_form::{archimedean_equilibria, horizontal_equilibrium};
use super::roots::RootKind;
use super::{tilt_deg, CaseKind, Equilibrium, Position, Residuals};
use crate::conditions::{evaluate, require_density};
use crate::error::{Error, Result};
use crate::geometry::{SegmentShape, Side};
use crate::stability::classify_equilibrium;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub sweep_step: f64,
    pub refine_steep: bool,
    /// Bound on `|E|` and `|F|/V` for an accepted equilibrium.
    pub residual_tol: f64,
    /// Solutions closer than this in `(X, b)` are merged.
    pub dedup_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { sweep_step: 0.01, refine_steep: true, residual_tol: 1e-8, dedup_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    pub grid_points: usize,
    pub branches: usize,
    pub branch_samples: usize,
    pub folds: usize,
    /// Folds reported directly because their density matched.
    pub merged_folds: usize,
    pub candidates: usize,
    pub newton_converged: usize,
    pub bisection_fallbacks: usize,
    pub duplicates: usize,
    /// One message per candidate that could not be polished.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub equilibria: Vec<Equilibrium>,
    pub diagnostics: SearchDiagnostics,
}

/// Point on a branch together with its density offset.
#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    b: f64,
    sigma: f64,
    /// Index of the fold this node represents, if any.
    fold: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Fold {
    x: f64,
    b: f64,
    sigma: f64,
}

fn det_sign_change(p: &BranchSample, q: &BranchSample) -> bool {
    p.det.is_finite() && q.det.is_finite() && p.det != 0.0 && (p.det > 0.0) != (q.det > 0.0)
}

/// Locates a zero of the equilibrium-Hessian determinant between two samples.
fn locate_fold(shape: &SegmentShape, kind: RootKind, p: &BranchSample, q: &BranchSample) -> Option<Fold> {
    let (mut lo, mut hi) = (*p, *q);
    for _ in 0..80 {
        let mid = 0.5 * (lo.x + hi.x);
        if mid <= lo.x || mid >= hi.x {
            break;
        }
        let s = sample_kind(shape, mid, kind)?;
        if !s.det.is_finite() {
            return None;
        }
        if (s.det > 0.0) == (lo.det > 0.0) {
            lo = s;
        } else {
            hi = s;
        }
    }
    let best = if lo.det.abs() <= hi.det.abs() { lo } else { hi };
    Some(Fold { x: best.x, b: best.b, sigma: best.sigma })
}

/// Residual vector `(F/V, E)` at `(X, b)`.
fn residual(shape: &SegmentShape, x: f64, b: f64, sigma: f64) -> Option<[f64; 2]> {
    if b.is_nan() || b >= 0.0 {
        return None;
    }
    let ev = evaluate(shape, x, b, sigma).ok()?;
    let r = [ev.f / shape.volume(), ev.e];
    (r[0].is_finite() && r[1].is_finite()).then_some(r)
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

/// Damped Newton iteration on `(F/V, E) = 0` with a finite-difference Jacobian.
fn newton(shape: &SegmentShape, x0: f64, b0: f64, sigma: f64) -> Option<(f64, f64)> {
    let (mut x, mut b) = (x0, b0);
    let mut r = residual(shape, x, b, sigma)?;
    for _ in 0..60 {
        if norm(r) <= 1e-15 {
            break;
        }
        let hx = 1e-7 * x.abs().max(1.0);
        let hb = 1e-7 * b.abs().max(1.0);
        let rxp = residual(shape, x + hx, b, sigma)?;
        let rxm = residual(shape, x - hx, b, sigma)?;
        let rbp = residual(shape, x, b + hb, sigma)?;
        let rbm = residual(shape, x, b - hb, sigma)?;
        let j = [
            [(rxp[0] - rxm[0]) / (2.0 * hx), (rbp[0] - rbm[0]) / (2.0 * hb)],
            [(rxp[1] - rxm[1]) / (2.0 * hx), (rbp[1] - rbm[1]) / (2.0 * hb)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (-r[0] * j[1][1] + r[1] * j[0][1]) / det;
        let db = (-r[1] * j[0][0] + r[0] * j[1][0]) / det;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=20 {
            let (xn, bn) = (x + t * dx, b + t * db);
            if let Some(rn) = residual(shape, xn, bn, sigma) {
                if norm(rn) < norm(r) {
                    accepted = Some((xn, bn, rn));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, bn, rn)) = accepted else { break };
        let moved = (xn - x).abs() + (bn - b).abs();
        (x, b, r) = (xn, bn, rn);
        if moved <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    Some((x, b))
}

/// Bisection in `X` of `σ(X) − σ_eff` along a branch.
fn bisect_branch(shape: &SegmentShape, kind: RootKind, lo: Node, hi: Node, sigma: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (lo, hi);
    let mut best = if (lo.sigma - sigma).abs() <= (hi.sigma - sigma).abs() { lo } else { hi };
    for _ in 0..100 {
        let mid = 0.5 * (lo.x + hi.x);
        if mid <= lo.x.min(hi.x) || mid >= lo.x.max(hi.x) {
            break;
        }
        let s = sample_kind(shape, mid, kind)?;
        let node = Node { x: s.x, b: s.b, sigma: s.sigma, fold: None };
        if (node.sigma - sigma).abs() < (best.sigma - sigma).abs() {
            best = node;
        }
        if node.sigma == sigma {
            break;
        }
        if (node.sigma > sigma) == (lo.sigma > sigma) {
            lo = node;
        } else {
            hi = node;
        }
    }
    Some((best.x, best.b))
}

fn within_tol(shape: &SegmentShape, x: f64, b: f64, sigma: f64, tol: f64) -> Option<Residuals> {
    let r = residual(shape, x, b, sigma)?;
    let res = Residuals { e: r[1].abs(), f_rel: r[0].abs() };
    (res.e <= tol && res.f_rel <= tol).then_some(res)
}

struct SideSearch<'a> {
    shape: &'a SegmentShape,
    side: Side,
    sigma: f64,
    sigma_eff: f64,
    opts: &'a SearchOptions,
}

impl SideSearch<'_> {
    fn equilibrium(&self, x: f64, b: f64, residuals: Residuals) -> Result<Equilibrium> {
        Ok(Equilibrium {
            side: self.side.into(),
            case_kind: CaseKind::NonArchimedean,
            x: Some(x),
            b: Some(b),
            c: Some(self.shape.axis() - b * x),
            sigma: self.sigma,
            tilt_deg: tilt_deg(b, self.side),
            stability: classify_equilibrium(self.shape, x, b, self.sigma_eff)?,
            residuals,
        })
    }

    /// Polishes a bracketed crossing; Newton first, bisection along the branch
    /// when Newton leaves the bracket or the branch.
    fn polish(&self, kind: RootKind, lo: Node, hi: Node, diag: &mut SearchDiagnostics) -> Option<(f64, f64, Residuals)> {
        let tol = self.opts.residual_tol;
        let (xl, xh) = (lo.x.min(hi.x), lo.x.max(hi.x));
        let t = if hi.sigma != lo.sigma { (self.sigma_eff - lo.sigma) / (hi.sigma - lo.sigma) } else { 0.5 };
        let t = t.clamp(0.0, 1.0);
        let (x0, b0) = (lo.x + t * (hi.x - lo.x), lo.b + t * (hi.b - lo.b));
        let on_branch = |x: f64, b: f64| {
            x >= xl - 1e-12
                && x <= xh + 1e-12
                && sample_kind(self.shape, x, kind).is_some_and(|s| (s.b - b).abs() <= 1e-6 * b.abs().max(1.0))
        };
        if let Some((x, b)) = newton(self.shape, x0, b0, self.sigma_eff) {
            if on_branch(x, b) {
                if let Some(res) = within_tol(self.shape, x, b, self.sigma_eff, tol) {
                    diag.newton_converged += 1;
                    return Some((x, b, res));
                }
            }
        }
        diag.bisection_fallbacks += 1;
        let (x, b) = bisect_branch(self.shape, kind, lo, hi, self.sigma_eff)?;
        if let Some(res) = within_tol(self.shape, x, b, self.sigma_eff, tol) {
            return Some((x, b, res));
        }
        // polish the bisection result, which sits on the branch already
        let (x, b) = newton(self.shape, x, b, self.sigma_eff)?;
        within_tol(self.shape, x, b, self.sigma_eff, tol).map(|res| (x, b, res))
    }

    fn scan_branch(&self, branch: &Branch, out: &mut Vec<Equilibrium>, diag: &mut SearchDiagnostics) {
        let s = &branch.samples;
        if s.is_empty() {
            return;
        }
        let mut folds = Vec::new();
        let mut nodes = vec![Node { x: s[0].x, b: s[0].b, sigma: s[0].sigma, fold: None }];
        for w in s.windows(2) {
            if det_sign_change(&w[0], &w[1]) {
                if let Some(f) = locate_fold(self.shape, branch.kind, &w[0], &w[1]) {
                    nodes.push(Node { x: f.x, b: f.b, sigma: f.sigma, fold: Some(folds.len()) });
                    folds.push(f);
                }
            }
            nodes.push(Node { x: w[1].x, b: w[1].b, sigma: w[1].sigma, fold: None });
        }
        diag.folds += folds.len();

        // a fold at the requested density is itself the (merged) solution
        let mut merged = vec![false; folds.len()];
        for (k, f) in folds.iter().enumerate() {
            if (f.sigma - self.sigma_eff).abs() <= self.opts.residual_tol {
                diag.candidates += 1;
                match within_tol(self.shape, f.x, f.b, self.sigma_eff, self.opts.residual_tol) {
                    Some(res) => match self.equilibrium(f.x, f.b, res) {
                        Ok(eq) => {
                            merged[k] = true;
                            diag.merged_folds += 1;
                            out.push(eq);
                        }
                        Err(e) => diag.failures.push(format!("fold at X = {}: {e}", f.x)),
                    },
                    None => diag.failures.push(format!("fold at X = {} misses the tolerance", f.x)),
                }
            }
        }

        for w in nodes.windows(2) {
            let (p, q) = (w[0], w[1]);
            if [p.fold, q.fold].iter().flatten().any(|&k| merged[k]) {
                continue;
            }
            let (dp, dq) = (p.sigma - self.sigma_eff, q.sigma - self.sigma_eff);
            // an exact hit on a node is owned by the segment starting there
            let crossing = dp == 0.0 || (dp > 0.0) != (dq > 0.0) && dq != 0.0;
            if !crossing {
                continue;
            }
            diag.candidates += 1;
            match self.polish(branch.kind, p, q, diag) {
                Some((x, b, res)) => match self.equilibrium(x, b, res) {
                    Ok(eq) => out.push(eq),
                    Err(e) => diag.failures.push(format!("crossing near X = {}: {e}", p.x)),
                },
                None => diag.failures.push(format!(
                    "crossing between X = {} and X = {} did not converge",
                    p.x, q.x
                )),
            }
        }
    }
}

fn dedup(eqs: &mut Vec<Equilibrium>, tol: f64) -> usize {
    let mut kept: Vec<Equilibrium> = Vec::with_capacity(eqs.len());
    let mut removed = 0;
    for e in eqs.drain(..) {
        let dup = kept.iter().any(|k| {
            k.side == e.side
                && k.case_kind == e.case_kind
                && match (k.x, k.b, e.x, e.b) {
                    (Some(kx), Some(kb), Some(ex), Some(eb)) => (kx - ex).hypot(kb - eb) < tol,
                    (None, Some(kb), None, Some(eb)) => (kb - eb).abs() < tol,
                    _ => k.x == e.x && k.b == e.b,
                }
        });
        if dup {
            removed += 1;
        } else {
            kept.push(e);
        }
    }
    *eqs = kept;
    removed
}

/// Every equilibrium found by sweeping the branches at the option's step.
///
/// Candidates that fail to converge are recorded in the diagnostics and
/// skipped; the search itself only fails on invalid input.
pub fn find_all_equilibria(shape: &SegmentShape, sigma: f64, opts: &SearchOptions) -> Result<SearchResult> {
    require_density(sigma)?;
    if !(opts.residual_tol > 0.0 && opts.dedup_tol >= 0.0) {
        return Err(Error::Domain("tolerances must be positive".into()));
    }
    let set: BranchSet = trace_branches(shape, opts.sweep_step, opts.refine_steep)?;
    let mut diag = SearchDiagnostics {
        grid_points: set.grid.len(),
        branches: set.branches.len(),
        branch_samples: set.branches.iter().map(|b| b.samples.len()).sum(),
        ..Default::default()
    };
    let mut eqs = Vec::new();
    for side in [Side::LeftHand, Side::RightHand] {
        eqs.extend(archimedean_equilibria(shape, sigma, side)?);
        let search = SideSearch { shape, side, sigma, sigma_eff: side.effective_density(sigma), opts };
        for branch in &set.branches {
            search.scan_branch(branch, &mut eqs, &mut diag);
        }
    }
    eqs.extend(horizontal_equilibrium(shape, sigma));
    eqs.sort_by(|p, q| {
        p.side
            .cmp(&q.side)
            .then(p.case_kind.cmp(&q.case_kind))
            .then(p.x.unwrap_or(f64::NEG_INFINITY).total_cmp(&q.x.unwrap_or(f64::NEG_INFINITY)))
            .then(p.b.unwrap_or(0.0).total_cmp(&q.b.unwrap_or(0.0)))
    });
    diag.duplicates = dedup(&mut eqs, opts.dedup_tol);
    Ok(SearchResult { equilibria: eqs, diagnostics: diag })
}

impl Position {
    /// Side whose effective density is used for this position, if any.
    pub fn side(self) -> Option<Side> {
        match self {
            Position::LeftHand => Some(Side::LeftHand),
            Position::RightHand => Some(Side::RightHand),
            Position::Horizontal => None,
        }
    }
}
