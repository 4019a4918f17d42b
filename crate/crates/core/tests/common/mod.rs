#![allow(dead_code)]

use paraboloid_float::conditions::equilibrium_e_at;
use paraboloid_float::geometry::SegmentShape;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn shape(a: f64) -> SegmentShape {
    SegmentShape::new(a).unwrap()
}

/// `a` recovered from the base angle 74.33°.
pub fn reference_shape() -> SegmentShape {
    SegmentShape::from_base_angle_deg(74.33).unwrap()
}

pub const SCAN_LO: f64 = -1e4;
pub const SCAN_HI: f64 = -1e-6;
pub const SCAN_POINTS: usize = 100_000;

/// Sign changes of `E(X, ·)` on a logarithmic grid over `[−10⁴, −10⁻⁶]`,
/// each refined by bisection. Independent of the root-isolation theory.
pub fn brute_force_roots(shape: &SegmentShape, x: f64) -> Vec<f64> {
    let e = |b: f64| equilibrium_e_at(shape, x, b).unwrap();
    let (l0, l1) = ((-SCAN_HI).ln(), (-SCAN_LO).ln());
    let grid = |k: usize| -(l1 + (l0 - l1) * k as f64 / (SCAN_POINTS - 1) as f64).exp();
    let mut roots = Vec::new();
    let mut prev_b = grid(0);
    let mut prev_e = e(prev_b);
    for k in 1..SCAN_POINTS {
        let b = grid(k);
        let eb = e(b);
        if eb == 0.0 || (eb > 0.0) != (prev_e > 0.0) {
            let (mut lo, mut hi, elo) = (prev_b, b, prev_e);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (e(mid) > 0.0) == (elo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_b = b;
        prev_e = eb;
    }
    roots
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

pub fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}
