//! Floating and equilibrium conditions of the non-archimedean case, the
//! normalized condition `Ẽ`, its bracketing cubic `P` and the zeros of `f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    derive, derived_geometry, oblique_sector_volume, right_sector_volume, DerivedGeometry,
    SegmentShape, WaterPlane,
};

/// `|f|` below which `Ẽ` is treated as sitting on a pole.
pub const POLE_TOL: f64 = 1e-12;
/// Negative roots of `P` closer than this are reported as one double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-9;

/// `E = f·V₂ + (2b/9)·A^{5/2}` from precomputed geometry and `V₂`.
#[inline]
pub(crate) fn e_from(geom: &DerivedGeometry, v2: f64) -> f64 {
    geom.balance * v2 + 2.0 * geom.b / 9.0 * geom.chord_pow5()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionEval {
    pub e: f64,
    pub f: f64,
    /// `E/(f·a'²)`; absent on a pole of `f`.
    pub e_tilde: Option<f64>,
    /// `(V₁ − V₂)/V`.
    pub sigma_implied: f64,
}

pub fn equilibrium_e(shape: &SegmentShape, plane: &WaterPlane) -> Result<f64> {
    equilibrium_e_at(shape, plane.x, plane.b)
}

/// `E` at bare `(X, b)`.
pub fn equilibrium_e_at(shape: &SegmentShape, x: f64, b: f64) -> Result<f64> {
    let geom = derive(shape, x, b)?;
    Ok(e_from(&geom, oblique_sector_volume(&geom)))
}

/// Relative submerged volume `(V₁ − V₂)/V` of the left-hand position.
pub fn sigma_implied(shape: &SegmentShape, x: f64, b: f64) -> Result<f64> {
    let geom = derive(shape, x, b)?;
    let v1 = right_sector_volume(shape.axis(), x)?;
    Ok((v1 - oblique_sector_volume(&geom)) / shape.volume())
}

fn check_density(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDensity(sigma))
    }
}

/// `F = V₁ − V₂ − σV`. Right-hand callers pass `1 − σ`.
pub fn floating_f(shape: &SegmentShape, plane: &WaterPlane, sigma: f64) -> Result<f64> {
    check_density(sigma)?;
    let s = sigma_implied(shape, plane.x, plane.b)?;
    Ok((s - sigma) * shape.volume())
}

pub fn evaluate(shape: &SegmentShape, x: f64, b: f64, sigma: f64) -> Result<ConditionEval> {
    check_density(sigma)?;
    let geom = derive(shape, x, b)?;
    let v1 = right_sector_volume(shape.axis(), x)?;
    let v2 = oblique_sector_volume(&geom);
    let e = e_from(&geom, v2);
    let scale = geom.balance * geom.shifted_axis * geom.shifted_axis;
    Ok(ConditionEval {
        e,
        f: v1 - v2 - sigma * shape.volume(),
        e_tilde: (geom.balance.abs() >= POLE_TOL).then(|| e / scale),
        sigma_implied: (v1 - v2) / shape.volume(),
    })
}

/// Convenience wrapper taking a plane.
pub fn evaluate_plane(shape: &SegmentShape, plane: &WaterPlane, sigma: f64) -> Result<ConditionEval> {
    derived_geometry(shape, plane)?;
    evaluate(shape, plane.x, plane.b, sigma)
}

/// `P(b) = 6X·b³ + (21 − 10a)·b² − 36X·b + 12a + 18`.
#[inline]
pub fn p_value(a: f64, x: f64, b: f64) -> f64 {
    ((6.0 * x * b + (21.0 - 10.0 * a)) * b - 36.0 * x) * b + 12.0 * a + 18.0
}

/// `Ẽ` and `∂Ẽ/∂b = P·A^{5/2} / (108·a'³·f²)`.
pub fn e_tilde_and_derivative(shape: &SegmentShape, x: f64, b: f64) -> Result<(f64, f64)> {
    let geom = derive(shape, x, b)?;
    let f = geom.balance;
    if f.abs() < POLE_TOL {
        return Err(Error::Pole { b, f: f.abs() });
    }
    let ap = geom.shifted_axis;
    let e = e_from(&geom, oblique_sector_volume(&geom));
    let et = e / (f * ap * ap);
    let det = p_value(shape.axis(), x, b) * geom.chord_pow5() / (108.0 * ap * ap * ap * f * f);
    Ok((et, det))
}

/// Zeros `b₁ ≤ b₂` of `f` as a function of `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FPoles {
    pub b1: f64,
    pub b2: f64,
    pub exists: bool,
}

/// Threshold `√(15/8)`: `f` has real zeros iff `X ≤ −√(15/8)`.
pub fn pole_threshold() -> f64 {
    (15.0f64 / 8.0).sqrt()
}

pub fn f_poles(x: f64) -> FPoles {
    let disc = 16.0 * x * x - 30.0;
    if x <= -pole_threshold() {
        let r = disc.max(0.0).sqrt() / 5.0;
        FPoles { b1: 0.8 * x - r, b2: 0.8 * x + r, exists: true }
    } else {
        FPoles { b1: f64::NAN, b2: f64::NAN, exists: false }
    }
}

/// The cubic `P` for fixed `(a, X)` with its negative real zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketPolynomial {
    /// `[c₃, c₂, c₁, c₀]`, highest degree first.
    pub coefficients: [f64; 4],
    /// Ascending; a double root appears once.
    pub negative_roots: Vec<f64>,
    /// Whether the negative roots collapsed into a double root.
    pub double_root: bool,
}

impl BracketPolynomial {
    pub fn eval(&self, b: f64) -> f64 {
        let [c3, c2, c1, c0] = self.coefficients;
        ((c3 * b + c2) * b + c1) * b + c0
    }

    fn derivative(&self, b: f64) -> f64 {
        let [c3, c2, c1, _] = self.coefficients;
        (3.0 * c3 * b + 2.0 * c2) * b + c1
    }

    /// Bound on the rounding error of [`Self::eval`] at `b`.
    pub fn certification_bound(&self, b: f64) -> f64 {
        let s: f64 = self.coefficients.iter().map(|c| c.abs()).sum();
        1e-10 * s * b.abs().max(1.0).powi(3)
    }
}

pub fn bracket_polynomial(shape: &SegmentShape, x: f64) -> BracketPolynomial {
    let a = shape.axis();
    let mut poly = BracketPolynomial {
        coefficients: [6.0 * x, 21.0 - 10.0 * a, -36.0 * x, 12.0 * a + 18.0],
        negative_roots: Vec::new(),
        double_root: false,
    };
    let (roots, double) = negative_roots(&poly);
    poly.negative_roots = roots;
    poly.double_root = double;
    poly
}

/// Negative stationary points of `P`, ascending.
fn negative_critical_points(p: &BracketPolynomial) -> Vec<f64> {
    let [c3, c2, c1, _] = p.coefficients;
    let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
    let mut pts = Vec::new();
    if qa == 0.0 {
        if qb != 0.0 {
            pts.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            // numerically stable pair
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            if q != 0.0 {
                pts.push(q / qa);
                pts.push(qc / q);
            } else {
                pts.push(0.0);
            }
        }
    }
    pts.retain(|t| t.is_finite() && *t < 0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn bisect_monotone(p: &BracketPolynomial, mut lo: f64, mut hi: f64) -> f64 {
    let mut plo = p.eval(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let pm = p.eval(mid);
        if pm == 0.0 {
            return mid;
        }
        if (pm > 0.0) == (plo > 0.0) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
        }
    }
    let (l, h) = (lo, hi);
    let mut r = 0.5 * (l + h);
    // Newton polish kept inside the final bracket
    for _ in 0..3 {
        let d = p.derivative(r);
        if d == 0.0 {
            break;
        }
        let next = r - p.eval(r) / d;
        if next.is_finite() && next >= l && next <= h {
            r = next;
        }
    }
    r
}

fn negative_roots(p: &BracketPolynomial) -> (Vec<f64>, bool) {
    let crit = negative_critical_points(p);
    let mut knots: Vec<f64> = crit.clone();
    // left end: expand by doubling below the lowest knot until the asymptotic sign shows
    let [c3, c2, c1, _] = p.coefficients;
    let asymptotic = if c3 != 0.0 {
        -c3.signum()
    } else if c2 != 0.0 {
        c2.signum()
    } else if c1 != 0.0 {
        -c1.signum()
    } else {
        0.0
    };
    let base = knots.first().copied().unwrap_or(0.0);
    let mut step = 1.0;
    let mut left = base - step;
    if asymptotic != 0.0 {
        for _ in 0..60 {
            if p.eval(left).signum() == asymptotic {
                break;
            }
            step *= 2.0;
            left = base - step;
        }
    }
    knots.insert(0, left);
    knots.push(0.0);

    let mut roots = Vec::new();
    let mut double = false;
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let (plo, phi) = (p.eval(lo), p.eval(hi));
        if plo == 0.0 && lo < 0.0 {
            roots.push(lo);
        } else if plo.signum() * phi.signum() < 0.0 {
            roots.push(bisect_monotone(p, lo, hi));
        }
    }
    // a stationary point sitting on the axis is a double root
    for (i, &cp) in crit.iter().enumerate() {
        // knots[i + 1] == cp; a sign-change root beside it already covers it
        let (lo, hi) = (knots[i], knots[i + 2]);
        if p.eval(cp).abs() <= p.certification_bound(cp) * 1e-2
            && roots.iter().all(|r| !(*r >= lo && *r <= hi))
        {
            roots.push(cp);
            double = true;
        }
    }
    roots.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::new();
    for r in roots {
        match merged.last_mut() {
            Some(last) if (r - *last).abs() < DOUBLE_ROOT_TOL => {
                *last = 0.5 * (*last + r);
                double = true;
            }
            _ => merged.push(r),
        }
    }
    merged.dedup();
    (merged, double)
}

/// `f` written through the intercept, `5b²/12 + 2(c − a)/3 + 1/2`.
pub fn balance_from_intercept(a: f64, b: f64, c: f64) -> f64 {
    5.0 * b * b / 12.0 + 2.0 * (c - a) / 3.0 + 0.5
}

pub(crate) fn require_density(sigma: f64) -> Result<()> {
    check_density(sigma)
}
