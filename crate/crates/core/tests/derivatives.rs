//! Analytic gradients and Hessians of the potential against finite differences.

mod common;

use common::{rng, shape};
use paraboloid_float::conditions::{e_tilde_and_derivative, equilibrium_e_at};
use paraboloid_float::geometry::derive;
use paraboloid_float::oracle::{fd_gradient, fd_hessian};
use paraboloid_float::stability::{
    potential_archimedean, potential_nonarchimedean, potential_value_archimedean, potential_value_nonarchimedean,
};
use rand::RngExt;

const REL: f64 = 1e-5;
const STEP: f64 = 1e-3;

fn max_abs2(m: &[[f64; 2]; 2]) -> f64 {
    m.iter().flatten().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

fn diff2(p: &[[f64; 2]; 2], q: &[[f64; 2]; 2]) -> f64 {
    (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).fold(0.0, |acc: f64, (i, j)| acc.max((p[i][j] - q[i][j]).abs()))
}

fn diff(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).abs().max((p[1] - q[1]).abs())
}

#[test]
fn nonarchimedean_potential() {
    let mut r = rng(21);
    let mut checked = 0;
    while checked < 100 {
        let a: f64 = r.random_range(0.5..6.0);
        let x = r.random_range(-0.9..0.9) * a.sqrt();
        let b = -10f64.powf(r.random_range(-1.0..1.0));
        let sigma = r.random_range(0.05..0.95);
        let s = shape(a);
        let Ok(pe) = potential_nonarchimedean(&s, x, b, sigma) else { continue };
        let u = |x: f64, b: f64| potential_value_nonarchimedean(&s, x, b, sigma);
        // keep the stencil inside the domain
        let h = STEP * b.abs().min(1.0);
        let (Ok(g), Ok(hs)) = (fd_gradient(&u, (x, b), h), fd_hessian(&u, (x, b), h)) else { continue };
        let gscale = pe.grad[0].abs().max(pe.grad[1].abs()).max(max_abs2(&pe.hessian) * h);
        assert!(
            diff(pe.grad, g.extrapolated) <= REL * gscale,
            "grad a={a} X={x} b={b} σ={sigma}: {:?} vs {:?}",
            pe.grad,
            g.extrapolated
        );
        assert!(
            diff2(&pe.hessian, &hs.extrapolated) <= REL * max_abs2(&pe.hessian),
            "hessian a={a} X={x} b={b} σ={sigma}: {:?} vs {:?}",
            pe.hessian,
            hs.extrapolated
        );
        checked += 1;
    }
}

#[test]
fn archimedean_potential() {
    let mut r = rng(22);
    let mut checked = 0;
    while checked < 100 {
        let a: f64 = r.random_range(0.5..6.0);
        let b: f64 = -r.random_range(0.0..1.5);
        // the plane stays below the basis circle: c − b√a ≤ a
        let c_hi = a + b * a.sqrt();
        let c_lo = -b * b / 4.0;
        if c_hi - c_lo < 0.05 {
            continue;
        }
        let c = r.random_range(c_lo + 0.02 * (c_hi - c_lo)..c_hi);
        let sigma = r.random_range(0.05..0.95);
        // the stencil must not cross b = 0
        if b > -2.0 * STEP {
            continue;
        }
        let s = shape(a);
        let pe = potential_archimedean(&s, c, b, sigma).unwrap();
        let u = |c: f64, b: f64| potential_value_archimedean(&s, c, b, sigma);
        let g = fd_gradient(&u, (c, b), STEP).unwrap();
        let hs = fd_hessian(&u, (c, b), STEP).unwrap();
        let gscale = pe.grad[0].abs().max(pe.grad[1].abs()).max(max_abs2(&pe.hessian) * STEP);
        assert!(diff(pe.grad, g.extrapolated) <= REL * gscale, "grad a={a} c={c} b={b}");
        assert!(
            diff2(&pe.hessian, &hs.extrapolated) <= REL * max_abs2(&pe.hessian),
            "hessian a={a} c={c} b={b}: {:?} vs {:?}",
            pe.hessian,
            hs.extrapolated
        );
        checked += 1;
    }
}

/// `∂Ẽ/∂b = P·A^{5/2}/(108 a'³ f²)` against a difference quotient of `E/(f a'²)`.
#[test]
fn e_tilde_derivative() {
    let mut r = rng(23);
    let mut checked = 0;
    while checked < 100 {
        let a: f64 = r.random_range(0.5..6.0);
        let x = r.random_range(-0.95..0.95) * a.sqrt();
        let b = -10f64.powf(r.random_range(-1.5..1.0));
        let s = shape(a);
        let g = derive(&s, x, b).unwrap();
        if g.balance.abs() <= 0.01 {
            continue;
        }
        let (_, analytic) = e_tilde_and_derivative(&s, x, b).unwrap();
        let et = |b: f64| {
            let g = derive(&s, x, b).unwrap();
            equilibrium_e_at(&s, x, b).unwrap() / (g.balance * g.shifted_axis * g.shifted_axis)
        };
        let h = 1e-4 * b.abs().clamp(0.1, 1.0) * g.balance.abs().min(1.0);
        let d = |h: f64| (et(b + h) - et(b - h)) / (2.0 * h);
        let fd = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        assert!(
            (fd - analytic).abs() <= 1e-6 * analytic.abs().max(1e-12),
            "a={a} X={x} b={b}: {analytic} vs {fd}"
        );
        checked += 1;
    }
}
