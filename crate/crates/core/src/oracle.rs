//! Independent numerical ground truth.
//!
//! Adaptive quadrature of the sector integrals straight from their
//! definitions, plus finite-difference stencils. Nothing here calls into the
//! closed-form geometry; the tests compare the two routes.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Hard cap on integrand evaluations per call.
pub const EVALUATION_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// 7-point Gauss / 15-point Kronrod pair per panel.
    GaussKronrod,
    /// Simpson's rule with one Richardson step per panel.
    Simpson,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Budget {
    used: usize,
}

impl Budget {
    fn charge(&mut self, n: usize) -> Result<()> {
        self.used += n;
        if self.used > EVALUATION_BUDGET {
            Err(Error::Tolerance { evaluations: self.used, error_estimate: f64::INFINITY })
        } else {
            Ok(())
        }
    }
}

fn adapt_gk<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: (f64, f64),
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> Result<(f64, f64)> {
    budget.charge(15)?;
    let (value, err) = gk15(f, lo, hi);
    if !err.is_finite() {
        return Err(domain("integrand produced a non-finite value"));
    }
    let share = tol * (hi - lo) / (whole.1 - whole.0);
    let mid = 0.5 * (lo + hi);
    if err <= share || depth >= 60 || mid <= lo || mid >= hi {
        return Ok((value, err));
    }
    let (v1, e1) = adapt_gk(f, lo, mid, whole, tol, depth + 1, budget)?;
    let (v2, e2) = adapt_gk(f, mid, hi, whole, tol, depth + 1, budget)?;
    Ok((v1 + v2, e1 + e2))
}

#[allow(clippy::too_many_arguments)]
fn adapt_simpson<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    coarse: f64,
    whole: (f64, f64),
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> Result<(f64, f64)> {
    budget.charge(2)?;
    let mid = 0.5 * (lo + hi);
    let lm = 0.5 * (lo + mid);
    let rm = 0.5 * (mid + hi);
    let f_lm = f(lm);
    let f_rm = f(rm);
    if !(f_lm.is_finite() && f_rm.is_finite()) {
        return Err(domain("integrand produced a non-finite value"));
    }
    let left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
    let right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi);
    let fine = left + right;
    let err = (fine - coarse).abs() / 15.0;
    let share = tol * (hi - lo) / (whole.1 - whole.0);
    if err <= share || depth >= 50 || lm <= lo || rm >= hi {
        return Ok((fine + (fine - coarse) / 15.0, err));
    }
    let (v1, e1) = adapt_simpson(f, lo, mid, f_lo, f_lm, f_mid, left, whole, tol, depth + 1, budget)?;
    let (v2, e2) = adapt_simpson(f, mid, hi, f_mid, f_rm, f_hi, right, whole, tol, depth + 1, budget)?;
    Ok((v1 + v2, e1 + e2))
}

/// Adaptive integration of `f` over `[lo, hi]` to `max(abs_tol, rel_tol·|I|)`.
///
/// The tolerance is apportioned to panels in proportion to their width.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rule: Rule,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(domain("integration limits must be finite"));
    }
    if hi <= lo {
        return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let mut budget = Budget { used: 0 };
    // coarse pass fixes the scale of the relative tolerance
    let (rough, _) = gk15(&f, lo, hi);
    budget.charge(15)?;
    let tol = abs_tol.max(rel_tol * rough.abs());
    let whole = (lo, hi);
    let (value, err) = match rule {
        Rule::GaussKronrod => adapt_gk(&f, lo, hi, whole, tol, 0, &mut budget)?,
        Rule::Simpson => {
            budget.charge(3)?;
            let (fl, fm, fh) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let coarse = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
            adapt_simpson(&f, lo, hi, fl, fm, fh, coarse, whole, tol, 0, &mut budget)?
        }
    };
    if !value.is_finite() {
        return Err(domain("integrand produced a non-finite value"));
    }
    if err > 10.0 * tol {
        return Err(Error::Tolerance { evaluations: budget.used, error_estimate: err });
    }
    Ok(QuadratureResult { value, error_estimate: err, evaluations: budget.used })
}

/// Tolerance used by the sector oracles.
pub const SECTOR_REL_TOL: f64 = 1e-13;

fn sector_limits(a: f64, x: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(domain(format!("axis length must be positive, got {a}")));
    }
    let r = a.sqrt();
    if !(x >= -r * (1.0 + 1e-14) && x <= r * (1.0 + 1e-14)) {
        return Err(domain(format!("X = {x} outside [−√a, √a]")));
    }
    Ok(r)
}

/// `4/3 ∫_X^{√a} (a − x²)^{3/2} dx` with the given rule.
pub fn quad_sector_volume_with(a: f64, x: f64, rule: Rule) -> Result<QuadratureResult> {
    let r = sector_limits(a, x)?;
    integrate(
        |t| 4.0 / 3.0 * (a - t * t).max(0.0).powf(1.5),
        x.max(-r),
        r,
        rule,
        SECTOR_REL_TOL,
        1e-13,
    )
}

pub fn quad_sector_volume(a: f64, x: f64) -> Result<QuadratureResult> {
    quad_sector_volume_with(a, x, Rule::GaussKronrod)
}

/// `(x₁V₁, z₁V₁)`: cross-sections `x = t` are parabolic segments of area
/// `4/3 (a − t²)^{3/2}` with centroid height `(3a + 2t²)/5`.
pub fn quad_sector_moments(a: f64, x: f64) -> Result<(QuadratureResult, QuadratureResult)> {
    let r = sector_limits(a, x)?;
    let lo = x.max(-r);
    let area = move |t: f64| 4.0 / 3.0 * (a - t * t).max(0.0).powf(1.5);
    let mx = integrate(|t| t * area(t), lo, r, Rule::GaussKronrod, SECTOR_REL_TOL, 1e-13)?;
    let mz = integrate(
        |t| (3.0 * a + 2.0 * t * t) / 5.0 * area(t),
        lo,
        r,
        Rule::GaussKronrod,
        SECTOR_REL_TOL,
        1e-13,
    )?;
    Ok((mx, mz))
}

/// Volume and moments of a region by nested quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadMoments {
    pub volume: f64,
    pub moment_x: f64,
    pub moment_z: f64,
}

/// Integrates over `{x ≥ x_lo, x² + y² ≤ z ≤ top(x)}` where `top` is affine in
/// `x`: outer adaptive quadrature in `x`, `z` done exactly. The `y` integrands
/// are polynomials of degree ≤ 4, so one Kronrod panel integrates them exactly.
fn nested_region<T: Fn(f64) -> f64 + Copy>(x_lo: f64, x_hi: f64, top: T) -> Result<QuadMoments> {
    let inner = |x: f64, weight: &dyn Fn(f64, f64) -> f64| -> f64 {
        let h = top(x) - x * x;
        if h <= 0.0 {
            return 0.0;
        }
        let w = h.sqrt();
        gk15(&|y| weight(h, y), -w, w).0
    };
    let height = |h: f64, y: f64| (h - y * y).max(0.0);
    // (top² − (x² + y²)²)/2 factored so the rim does not cancel
    let zmoment = move |x: f64| {
        move |h: f64, y: f64| 0.5 * (h - y * y).max(0.0) * (top(x) + x * x + y * y)
    };
    let outer = |f: &dyn Fn(f64) -> f64| {
        integrate(f, x_lo, x_hi, Rule::GaussKronrod, 1e-12, 1e-14)
    };
    let volume = outer(&|x| inner(x, &height))?.value;
    let moment_x = outer(&|x| x * inner(x, &height))?.value;
    let moment_z = outer(&|x| inner(x, &zmoment(x)))?.value;
    Ok(QuadMoments { volume, moment_x, moment_z })
}

/// Oblique sector `P ∩ {x ≥ X, z ≤ b·x + c}` with `c = a − b·X`, integrated
/// directly over its own region (no shear argument involved).
pub fn quad_oblique_sector(a: f64, x: f64, b: f64) -> Result<QuadMoments> {
    let r = sector_limits(a, x)?;
    if b > 0.0 {
        return Err(domain("slope must satisfy b ≤ 0"));
    }
    let c = a - b * x;
    // the plane meets the paraboloid's trace z = x² where x² − bx − c = 0
    let disc = (b * b / 4.0 + c).max(0.0).sqrt();
    let x_hi = (b / 2.0 + disc).min(r);
    nested_region(x.max(-r), x_hi, move |t| (b * t + c).min(a))
}

/// Right sector `P ∩ {x ≥ X}` by the same nested quadrature.
pub fn quad_right_sector(a: f64, x: f64) -> Result<QuadMoments> {
    let r = sector_limits(a, x)?;
    nested_region(x.max(-r), r, move |_| a)
}

/// A finite-difference estimate at step `h` with its step-halving companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate<T> {
    /// Raw central difference at step `h`.
    pub value: T,
    /// Richardson combination of the `h` and `h/2` estimates.
    pub extrapolated: T,
    /// Largest component of `|D(h) − D(h/2)|`.
    pub halving_error: f64,
}

fn eval2<F>(f: &F, x: f64, y: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    match f(x, y) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(Error::Stencil(format!("non-finite value {v} at ({x}, {y})"))),
        Err(e) => Err(Error::Stencil(format!("at ({x}, {y}): {e}"))),
    }
}

fn check_step(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("finite-difference step must be positive, got {h}")))
    }
}

/// Second-order central gradient.
pub fn central_gradient<F>(f: &F, p: (f64, f64), h: f64) -> Result<[f64; 2]>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    check_step(h)?;
    let gx = (eval2(f, p.0 + h, p.1)? - eval2(f, p.0 - h, p.1)?) / (2.0 * h);
    let gy = (eval2(f, p.0, p.1 + h)? - eval2(f, p.0, p.1 - h)?) / (2.0 * h);
    Ok([gx, gy])
}

/// Second-order central Hessian (symmetric by construction).
pub fn central_hessian<F>(f: &F, p: (f64, f64), h: f64) -> Result<[[f64; 2]; 2]>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    check_step(h)?;
    let (x, y) = p;
    let f0 = eval2(f, x, y)?;
    let hxx = (eval2(f, x + h, y)? - 2.0 * f0 + eval2(f, x - h, y)?) / (h * h);
    let hyy = (eval2(f, x, y + h)? - 2.0 * f0 + eval2(f, x, y - h)?) / (h * h);
    let hxy = (eval2(f, x + h, y + h)? - eval2(f, x + h, y - h)? - eval2(f, x - h, y + h)?
        + eval2(f, x - h, y - h)?)
        / (4.0 * h * h);
    Ok([[hxx, hxy], [hxy, hyy]])
}

/// Five-point antisymmetric stencil for the third derivative along `dir`.
pub fn central_third<F>(f: &F, p: (f64, f64), dir: (f64, f64), h: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    check_step(h)?;
    let g = |t: f64| eval2(f, p.0 + t * dir.0, p.1 + t * dir.1);
    Ok((g(2.0 * h)? - 2.0 * g(h)? + 2.0 * g(-h)? - g(-2.0 * h)?) / (2.0 * h * h * h))
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

pub fn fd_gradient<F>(f: &F, p: (f64, f64), h: f64) -> Result<FdEstimate<[f64; 2]>>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let g1 = central_gradient(f, p, h)?;
    let g2 = central_gradient(f, p, h / 2.0)?;
    Ok(FdEstimate {
        value: g1,
        extrapolated: [richardson(g1[0], g2[0]), richardson(g1[1], g2[1])],
        halving_error: (g1[0] - g2[0]).abs().max((g1[1] - g2[1]).abs()),
    })
}

pub fn fd_hessian<F>(f: &F, p: (f64, f64), h: f64) -> Result<FdEstimate<[[f64; 2]; 2]>>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let h1 = central_hessian(f, p, h)?;
    let h2 = central_hessian(f, p, h / 2.0)?;
    let mut ext = [[0.0; 2]; 2];
    let mut err: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            ext[i][j] = richardson(h1[i][j], h2[i][j]);
            err = err.max((h1[i][j] - h2[i][j]).abs());
        }
    }
    Ok(FdEstimate { value: h1, extrapolated: ext, halving_error: err })
}

pub fn fd_directional_third<F>(f: &F, p: (f64, f64), dir: (f64, f64), h: f64) -> Result<FdEstimate<f64>>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let d1 = central_third(f, p, dir, h)?;
    let d2 = central_third(f, p, dir, h / 2.0)?;
    Ok(FdEstimate { value: d1, extrapolated: richardson(d1, d2), halving_error: (d1 - d2).abs() })
}
