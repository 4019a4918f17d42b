//! Potential energy of a floating position, its analytic derivatives and the
//! eigenvalue classification of equilibria.
//!
//! Non-archimedean positions use the variables `(X, b)`, archimedean ones
//! `(c, b)`. All potentials are written for the left-hand geometry (or, in the
//! archimedean case, the right-hand geometry) at an *effective* density; the
//! solver performs the `σ ↔ 1 − σ` swap.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conditions::{e_from, require_density};
use crate::error::{domain, Error, Result};
use crate::geometry::{derive, oblique_sector_volume, right_sector_volume, SegmentShape};
use crate::oracle::fd_directional_third;

pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityKind {
    Stable,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateDetail {
    /// Unit vector spanning the kernel of the Hessian.
    pub null_direction: (f64, f64),
    /// Third derivative of `U` along `(λ, 1)`, i.e. `∂³U/∂b³` with `Y` fixed
    /// after substituting `X = Y + λb`.
    pub cubic_coefficient: f64,
    pub resolved: Resolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub kind: StabilityKind,
    /// `(λ_min, λ_max)`.
    pub eigenvalues: (f64, f64),
    pub degenerate: Option<DegenerateDetail>,
}

impl StabilityVerdict {
    /// Label used in tables and CSV output.
    pub fn label(&self) -> &'static str {
        match (self.kind, self.degenerate.map(|d| d.resolved)) {
            (StabilityKind::Stable, _) => "stable",
            (StabilityKind::Saddle, _) => "saddle",
            (StabilityKind::Degenerate, Some(Resolution::Unstable)) => "degenerate-unstable",
            (StabilityKind::Degenerate, _) => "degenerate-inconclusive",
        }
    }

    /// Whether the position is a strict local minimum of the potential.
    pub fn is_stable(&self) -> bool {
        self.kind == StabilityKind::Stable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialEval {
    pub u: f64,
    pub grad: [f64; 2],
    pub hessian: Matrix2,
    /// `(F₁, E₁)`: the parts of `∂²U/∂b²` proportional to `F` and `E`.
    pub aux: (f64, f64),
}

/// Eigenvalues `(λ_min, λ_max)` of a symmetric 2×2 matrix.
pub fn symmetric_eigenvalues(h: &Matrix2) -> (f64, f64) {
    let (p, q, r) = (h[0][0], 0.5 * (h[0][1] + h[1][0]), h[1][1]);
    let mean = 0.5 * (p + r);
    let rad = (0.5 * (p - r)).hypot(q);
    let (hi, lo) = (mean + rad, mean - rad);
    // recover the small eigenvalue from the determinant when it cancels
    let det = p * r - q * q;
    if hi.abs() >= lo.abs() && hi != 0.0 {
        (det / hi, hi)
    } else if lo != 0.0 {
        (lo, det / lo)
    } else {
        (lo, hi)
    }
}

/// `1e-9·max(1, λ_max)`.
pub fn eigen_tolerance(lambda_max: f64) -> f64 {
    1e-9 * lambda_max.max(1.0)
}

/// Classification by eigenvalues alone; a degenerate result carries no detail.
pub fn classify(hessian: &Matrix2) -> StabilityVerdict {
    let (lo, hi) = symmetric_eigenvalues(hessian);
    let tol = eigen_tolerance(hi);
    let kind = if lo.abs() <= tol {
        StabilityKind::Degenerate
    } else if lo > tol {
        StabilityKind::Stable
    } else {
        StabilityKind::Saddle
    };
    StabilityVerdict { kind, eigenvalues: (lo, hi), degenerate: None }
}

fn require_slope(b: f64) -> Result<()> {
    if b < 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("non-archimedean potential needs b < 0, got {b}")))
    }
}

/// `U(X, b)` alone.
pub fn potential_value_nonarchimedean(shape: &SegmentShape, x: f64, b: f64, sigma: f64) -> Result<f64> {
    require_density(sigma)?;
    require_slope(b)?;
    let g = derive(shape, x, b)?;
    let a = shape.axis();
    let v1 = right_sector_volume(a, x)?;
    let v2 = oblique_sector_volume(&g);
    Ok(((a / 3.0 - b * x) * (sigma * shape.volume() - v1) + g.shifted_axis * v2 / 3.0
        - 2.0 * b * g.chord_pow5() / 9.0)
        / g.normal_len)
}

struct Parts {
    hxx: f64,
    hxb: f64,
    hbb: f64,
    /// Coefficients multiplying `F` and `E` in `(H_Xb, H_bb)`.
    f_xb: f64,
    e_xb: f64,
    f_bb: f64,
    e_bb: f64,
}

fn hessian_parts(shape: &SegmentShape, x: f64, b: f64) -> Result<(Parts, f64, f64, f64, f64)> {
    require_slope(b)?;
    let g = derive(shape, x, b)?;
    let a = shape.axis();
    let v2 = oblique_sector_volume(&g);
    let (ap, beta) = (g.shifted_axis, g.normal_len);
    let (b2, b3) = (b * b, b * b * b);
    let b4 = b2 * b2;
    let beta3 = beta * beta * beta;
    let beta5 = beta3 * beta * beta;
    let hxx = 2.0 * b2 / (3.0 * ap * beta) * (3.0 * v2 + g.shifted_x * g.chord_pow3());
    let hxb = (b2 + 6.0) * v2 / (4.0 * ap * beta);
    let poly = -2.0 * x * b4 + (4.0 * a - 7.0) * b3 + 14.0 * x * b2 - 6.0 * b + 12.0 * x;
    let hbb = poly * v2 / (8.0 * ap * b * beta3);
    let f_bb = (-2.0 * a * b2 - 9.0 * x * b + a) / (3.0 * beta5);
    let e_bb = (4.0 * b4 * b - 4.0 * x * b4 + (13.0 - 8.0 * a) * b3 - 28.0 * x * b2
        + (4.0 * a + 6.0) * b
        - 12.0 * x)
        / (4.0 * ap * b * beta5);
    let parts = Parts { hxx, hxb, hbb, f_xb: 1.0 / beta3, e_xb: -3.0 / (ap * beta), f_bb, e_bb };
    let v1 = right_sector_volume(a, x)?;
    Ok((parts, v1, v2, e_from(&g, v2), beta))
}

/// Potential, gradient and Hessian in `(X, b)` at effective density `sigma`.
pub fn potential_nonarchimedean(shape: &SegmentShape, x: f64, b: f64, sigma: f64) -> Result<PotentialEval> {
    let u = potential_value_nonarchimedean(shape, x, b, sigma)?;
    let (p, v1, v2, e, beta) = hessian_parts(shape, x, b)?;
    let f = v1 - v2 - sigma * shape.volume();
    let beta3 = beta * beta * beta;
    let grad = [b * f / beta, (b * e + (x + b * shape.axis() / 3.0) * f) / beta3];
    let (f1, e1) = (p.f_bb * f, p.e_bb * e);
    let hxb = p.hxb + p.f_xb * f + p.e_xb * e;
    let hessian = [[p.hxx, hxb], [hxb, p.hbb + f1 + e1]];
    Ok(PotentialEval { u, grad, hessian, aux: (f1, e1) })
}

/// The Hessian with `F = E = 0` substituted; at an equilibrium it equals the
/// full Hessian and it depends on `(X, b)` only.
pub fn equilibrium_hessian(shape: &SegmentShape, x: f64, b: f64) -> Result<Matrix2> {
    let (p, ..) = hessian_parts(shape, x, b)?;
    Ok([[p.hxx, p.hxb], [p.hxb, p.hbb]])
}

/// Archimedean potential `U(c, b)` alone.
pub fn potential_value_archimedean(shape: &SegmentShape, c: f64, b: f64, sigma: f64) -> Result<f64> {
    let (ap, vp, beta) = archimedean_geometry(c, b, sigma)?;
    let a = shape.axis();
    Ok(((2.0 * a / 3.0 - c) * sigma * shape.volume() + ap * vp / 3.0) / beta)
}

fn archimedean_geometry(c: f64, b: f64, sigma: f64) -> Result<(f64, f64, f64)> {
    require_density(sigma)?;
    if !(b <= 0.0 && b.is_finite() && c.is_finite()) {
        return Err(domain(format!("archimedean plane needs finite c and b ≤ 0, got c = {c}, b = {b}")));
    }
    let ap = b * b / 4.0 + c;
    if ap <= 0.0 {
        return Err(domain(format!("plane misses the paraboloid: a' = {ap}")));
    }
    Ok((ap, ap * ap * PI / 2.0, b.hypot(1.0)))
}

/// Potential, gradient `(∂U/∂c, ∂U/∂b)` and Hessian of the archimedean case.
pub fn potential_archimedean(shape: &SegmentShape, c: f64, b: f64, sigma: f64) -> Result<PotentialEval> {
    let u = potential_value_archimedean(shape, c, b, sigma)?;
    let (ap, vp, beta) = archimedean_geometry(c, b, sigma)?;
    let a = shape.axis();
    let f0 = vp - sigma * shape.volume();
    let e0 = crate::conditions::balance_from_intercept(a, b, c) * vp;
    let lever = (2.0 * a / 3.0 - c) * f0 + e0;
    let beta2 = beta * beta;
    let beta3 = beta2 * beta;
    let beta5 = beta3 * beta2;
    let grad = [f0 / beta, b / beta3 * lever];
    let ucc = 2.0 * vp / (ap * beta);
    let ucb = b / beta * (vp / ap - f0 / beta2);
    let ubb = b * b * vp / (ap * beta3) * (5.0 * b * b / 8.0 + (c + 1.0) / 2.0)
        + (1.0 - 2.0 * b * b) / beta5 * lever;
    Ok(PotentialEval { u, grad, hessian: [[ucc, ucb], [ucb, ubb]], aux: (f0, e0) })
}

/// Archimedean verdict; the upright boundary `a = 3/(4(1 − √σ))` counts as stable.
pub fn classify_archimedean(shape: &SegmentShape, c: f64, b: f64, sigma: f64) -> Result<StabilityVerdict> {
    let pe = potential_archimedean(shape, c, b, sigma)?;
    let mut v = classify(&pe.hessian);
    if b == 0.0 && v.kind == StabilityKind::Degenerate {
        v.kind = StabilityKind::Stable;
    }
    Ok(v)
}

/// Threshold above which the horizontal equilibrium is stable.
pub const HORIZONTAL_THRESHOLD: f64 = 35.0 / 12.0;

/// Verdict for the horizontal equilibrium at `X = 0`, `σ = 1/2`.
///
/// Eigenvalues come from the local quadratic form in `(X, 1/X')`; at the
/// threshold the cubic term vanishes by symmetry and the quartic one is
/// negative, so the boundary is unstable.
pub fn horizontal_verdict(shape: &SegmentShape) -> StabilityVerdict {
    let a = shape.axis();
    let s = a.sqrt();
    let (a32, a52) = (a * s, a * a * s);
    let h = [
        [4.0 * a32 / 3.0, 4.0 * a52 / 15.0],
        [4.0 * a52 / 15.0, 2.0 * (4.0 * a52 * a / 105.0 - a52 / 30.0)],
    ];
    let (lo, hi) = symmetric_eigenvalues(&h);
    if (a - HORIZONTAL_THRESHOLD).abs() <= 1e-12 * HORIZONTAL_THRESHOLD {
        let dir = unit(-h[0][1], h[0][0]);
        return StabilityVerdict {
            kind: StabilityKind::Degenerate,
            eigenvalues: (0.0, hi),
            degenerate: Some(DegenerateDetail {
                null_direction: dir,
                cubic_coefficient: 0.0,
                resolved: Resolution::Unstable,
            }),
        };
    }
    let kind = if a > HORIZONTAL_THRESHOLD { StabilityKind::Stable } else { StabilityKind::Saddle };
    StabilityVerdict { kind, eigenvalues: (lo, hi), degenerate: None }
}

fn unit(x: f64, y: f64) -> (f64, f64) {
    let n = x.hypot(y);
    (x / n, y / n)
}

/// Step of the cubic probe along the unit null direction.
pub const PROBE_STEP: f64 = 1e-3;
/// `|cubic_coefficient|` above which a degenerate point is unstable.
pub const CUBIC_THRESHOLD: f64 = 1e-6;

/// Third-derivative probe of an arbitrary potential at a degenerate point.
///
/// `lambda` defines the substitution `X = Y + λb`; the cubic coefficient is
/// reported along `(λ, 1)` and the null direction as a unit vector.
pub fn probe_with<F>(potential: &F, point: (f64, f64), lambda: f64) -> Result<DegenerateDetail>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if !lambda.is_finite() {
        return Err(Error::Probe(format!("substitution multiplier is not finite: {lambda}")));
    }
    let dir = unit(lambda, 1.0);
    let scale = lambda.hypot(1.0).powi(3);
    let est = fd_directional_third(potential, point, dir, PROBE_STEP)
        .map_err(|e| Error::Probe(e.to_string()))?;
    let value = est.value * scale;
    // the halving estimate guards against cancellation at this step size
    if est.halving_error * scale > 1e-3 * value.abs().max(1.0) {
        return Err(Error::Probe(format!(
            "third derivative unstable under step halving: {} vs error {}",
            value,
            est.halving_error * scale
        )));
    }
    let resolved = if value.abs() > CUBIC_THRESHOLD { Resolution::Unstable } else { Resolution::Inconclusive };
    Ok(DegenerateDetail { null_direction: dir, cubic_coefficient: value, resolved })
}

/// Probe of the non-archimedean potential at `(X₀, b₀)`.
pub fn degenerate_probe(shape: &SegmentShape, x0: f64, b0: f64, sigma: f64) -> Result<DegenerateDetail> {
    let pe = potential_nonarchimedean(shape, x0, b0, sigma).map_err(|e| Error::Probe(e.to_string()))?;
    let h = pe.hessian;
    if h[0][0] == 0.0 {
        return Err(Error::Probe("∂²U/∂X² vanishes; no substitution X = Y + λb".into()));
    }
    let lambda = -h[0][1] / h[0][0];
    probe_with(&|x, b| potential_value_nonarchimedean(shape, x, b, sigma), (x0, b0), lambda)
}

/// Full verdict at a non-archimedean equilibrium, probing degenerate cases.
///
/// The Hessian is taken in its equilibrium form so that residuals of order
/// `1e-8` in `F` do not blur the singular case.
pub fn classify_equilibrium(shape: &SegmentShape, x: f64, b: f64, sigma: f64) -> Result<StabilityVerdict> {
    let h = equilibrium_hessian(shape, x, b)?;
    let mut v = classify(&h);
    if v.kind == StabilityKind::Degenerate {
        let detail = match degenerate_probe(shape, x, b, sigma) {
            Ok(d) => d,
            Err(_) => DegenerateDetail {
                null_direction: unit(-h[0][1], h[0][0]),
                cubic_coefficient: f64::NAN,
                resolved: Resolution::Inconclusive,
            },
        };
        v.degenerate = Some(detail);
    }
    Ok(v)
}
