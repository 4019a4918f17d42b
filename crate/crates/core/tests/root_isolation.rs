//! Root counts and isolating intervals against a brute-force sign scan of `E`.

mod common;

use common::{brute_force_roots, rng, shape};
use paraboloid_float::conditions::pole_threshold;
use paraboloid_float::solver::{no_solution_region, roots_e_for_x, RootSet, RootCase};
use rand::RngExt;

/// Configurations whose roots all lie inside the scanned `b` range.
fn sample_case(r: &mut impl RngExt, case: RootCase) -> (f64, f64) {
    let t = pole_threshold();
    match case {
        RootCase::A => {
            let a: f64 = r.random_range(1.95..6.0);
            (a, r.random_range(-a.sqrt() * 0.999..-t - 1e-6))
        }
        RootCase::B => {
            let a: f64 = r.random_range(0.3..6.0);
            (a, r.random_range((-a.sqrt() * 0.999).max(-t + 1e-6)..-1e-3))
        }
        RootCase::C => (r.random_range(0.3..6.0), 0.0),
        RootCase::D => {
            let a: f64 = r.random_range(0.3..6.0);
            (a, r.random_range(1e-3..a.sqrt() * 0.999))
        }
    }
}

fn discrepancy(set: &RootSet, brute: &[f64]) -> Option<String> {
    if set.roots.len() != brute.len() {
        return Some(format!("count {} vs brute force {} ({:?} vs {brute:?})", set.roots.len(), brute.len(), set.roots));
    }
    for (r, bf) in set.roots.iter().zip(brute) {
        let (lo, hi) = r.interval;
        if !(r.b > lo && r.b < hi) {
            return Some(format!("root {} outside its interval ({lo}, {hi})", r.b));
        }
        if !(*bf > lo && *bf < hi) {
            return Some(format!("brute-force root {bf} outside ({lo}, {hi})"));
        }
        if (r.b - bf).abs() > 1e-6 * bf.abs().max(1.0) {
            return Some(format!("root {} vs brute force {bf}", r.b));
        }
    }
    None
}

#[test]
fn conformance_on_all_four_cases() {
    let mut r = rng(0x7e02);
    let mut failures = Vec::new();
    let mut total = 0;
    for case in [RootCase::A, RootCase::B, RootCase::C, RootCase::D] {
        for _ in 0..50 {
            let (a, x) = sample_case(&mut r, case);
            let s = shape(a);
            let set = roots_e_for_x(&s, x).unwrap();
            assert_eq!(set.case, case);
            let brute = brute_force_roots(&s, x);
            if let Some(msg) = discrepancy(&set, &brute) {
                failures.push(format!("a = {a}, X = {x}: {msg}"));
            }
            total += 1;
        }
    }
    assert_eq!(total, 200);
    assert!(failures.is_empty(), "{} discrepancies:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn no_roots_inside_the_region() {
    let mut r = rng(0x9e61);
    for _ in 0..20 {
        let a: f64 = r.random_range(0.5..3.0);
        let s = shape(a);
        let reg = no_solution_region(&s);
        let Some((lo, hi)) = reg.interval else { continue };
        let x = r.random_range(lo.max(-a.sqrt() * 0.999)..hi.min(-1e-3));
        assert!(reg.contains(x));
        assert!(roots_e_for_x(&s, x).unwrap().roots.is_empty(), "a = {a}, X = {x}");
        assert!(brute_force_roots(&s, x).is_empty(), "a = {a}, X = {x}");
    }
}

#[test]
fn center_roots_follow_the_threshold() {
    for (a, n) in [(2.0, 0), (2.09, 0), (2.2, 1), (3.0, 1)] {
        let s = shape(a);
        assert_eq!(roots_e_for_x(&s, 0.0).unwrap().roots.len(), n, "a = {a}");
        assert_eq!(brute_force_roots(&s, 0.0).len(), n, "a = {a}");
    }
}
