//! Isolation of the roots of `E(b) = 0` for fixed `(a, X)`.

use serde::{Deserialize, Serialize};

use crate::conditions::{bracket_polynomial, e_from, f_poles, pole_threshold};
use crate::error::{domain, Result};
use crate::geometry::{derive, oblique_sector_volume, SegmentShape};

/// Which of the four root-isolation cases applies to `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RootCase {
    /// `X ≤ −√(15/8)`: `f` has zeros and two roots always exist.
    A,
    /// `−√(15/8) < X < 0`: zero, one double or two roots.
    B,
    /// `X = 0`.
    C,
    /// `X > 0`: exactly one root.
    D,
}

impl RootCase {
    pub fn letter(self) -> char {
        match self {
            RootCase::A => 'a',
            RootCase::B => 'b',
            RootCase::C => 'c',
            RootCase::D => 'd',
        }
    }

    pub fn of(x: f64) -> Self {
        if x <= -pole_threshold() {
            RootCase::A
        } else if x < 0.0 {
            RootCase::B
        } else if x == 0.0 {
            RootCase::C
        } else {
            RootCase::D
        }
    }
}

/// Position of a root among the isolating intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    /// The more negative root, in `(b̃₁, b₁)` or `(b̃₁, b̃₂)`.
    Lower,
    /// The root nearer to `b = 0`; also the single root for `X ≥ 0`.
    Upper,
    /// The two roots coincide at `b̃₂`.
    Double,
}

impl RootKind {
    /// Whether a root of this kind lies on the branch of kind `branch`.
    pub fn serves(self, branch: RootKind) -> bool {
        self == branch || self == RootKind::Double
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRoot {
    pub b: f64,
    pub kind: RootKind,
    /// Open isolating interval.
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub case: RootCase,
    /// Ascending in `b`.
    pub roots: Vec<EquilibriumRoot>,
}

impl RootSet {
    pub fn of_kind(&self, kind: RootKind) -> Option<&EquilibriumRoot> {
        self.roots.iter().find(|r| r.kind.serves(kind))
    }
}

fn e_parts(shape: &SegmentShape, x: f64, b: f64) -> Result<(f64, f64)> {
    let g = derive(shape, x, b)?;
    let v2 = oblique_sector_volume(&g);
    let e = e_from(&g, v2);
    let scale = (g.balance * v2).abs() + (2.0 * b / 9.0 * g.chord_pow5()).abs();
    Ok((e, scale))
}

fn e_at(shape: &SegmentShape, x: f64, b: f64) -> Result<f64> {
    e_parts(shape, x, b).map(|p| p.0)
}

/// Bisection of `E` on `[lo, hi]`, whose end values must differ in sign.
fn bisect_e(shape: &SegmentShape, x: f64, mut lo: f64, mut hi: f64) -> Result<Option<f64>> {
    let mut elo = e_at(shape, x, lo)?;
    let ehi = e_at(shape, x, hi)?;
    if elo == 0.0 || ehi == 0.0 || (elo > 0.0) == (ehi > 0.0) {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let em = e_at(shape, x, mid)?;
        if em == 0.0 {
            return Ok(Some(mid));
        }
        if (em > 0.0) == (elo > 0.0) {
            lo = mid;
            elo = em;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Walks downward from `start` by doubling until `E` becomes positive.
fn positive_e_below(shape: &SegmentShape, x: f64, start: f64) -> Result<Option<f64>> {
    let mut step = 1.0;
    for _ in 0..60 {
        let b = start - step;
        if e_at(shape, x, b)? > 0.0 {
            return Ok(Some(b));
        }
        step *= 2.0;
    }
    Ok(None)
}

fn push_root(
    shape: &SegmentShape,
    x: f64,
    interval: (f64, f64),
    kind: RootKind,
    out: &mut Vec<EquilibriumRoot>,
) -> Result<()> {
    if let Some(b) = bisect_e(shape, x, interval.0, interval.1)? {
        out.push(EquilibriumRoot { b, kind, interval });
    }
    Ok(())
}

/// All `b < 0` with `E(X, b) = 0`, tagged with their isolating interval.
pub fn roots_e_for_x(shape: &SegmentShape, x: f64) -> Result<RootSet> {
    if !shape.contains_waterline(x) {
        return Err(domain(format!(
            "X = {x} outside (−√a, √a) for a = {}",
            shape.axis()
        )));
    }
    let a = shape.axis();
    let case = RootCase::of(x);
    let mut roots = Vec::new();
    match case {
        RootCase::A => {
            let poles = f_poles(x);
            let p = bracket_polynomial(shape, x);
            // E(b̃₁) > 0 > E(b₁); fall back to doubling if rounding disagrees
            let mut lo = p.negative_roots.first().copied().filter(|&r| r < poles.b1);
            if lo.is_none_or(|l| e_at(shape, x, l).map_or(true, |e| e <= 0.0)) {
                lo = positive_e_below(shape, x, poles.b1)?;
            }
            if let Some(lo) = lo {
                push_root(shape, x, (lo, poles.b1), RootKind::Lower, &mut roots)?;
            }
            push_root(shape, x, (poles.b2, 0.0), RootKind::Upper, &mut roots)?;
        }
        RootCase::B => {
            let p = bracket_polynomial(shape, x);
            if p.negative_roots.len() == 2 {
                let (t1, t2) = (p.negative_roots[0], p.negative_roots[1]);
                let (e2, scale) = e_parts(shape, x, t2)?;
                if e2.abs() <= 8.0 * f64::EPSILON * scale {
                    roots.push(EquilibriumRoot { b: t2, kind: RootKind::Double, interval: (t1, 0.0) });
                } else if e2 < 0.0 {
                    push_root(shape, x, (t1, t2), RootKind::Lower, &mut roots)?;
                    push_root(shape, x, (t2, 0.0), RootKind::Upper, &mut roots)?;
                }
            }
        }
        RootCase::C => {
            if a > 2.1 {
                let t1 = -((12.0 * a + 18.0) / (10.0 * a - 21.0)).sqrt();
                push_root(shape, x, (t1, 0.0), RootKind::Upper, &mut roots)?;
            }
        }
        RootCase::D => {
            let p = bracket_polynomial(shape, x);
            if let Some(&t1) = p.negative_roots.first() {
                push_root(shape, x, (t1, 0.0), RootKind::Upper, &mut roots)?;
            }
        }
    }
    roots.sort_by(|p, q| p.b.total_cmp(&q.b));
    Ok(RootSet { case, roots })
}

/// The root of the given branch kind at `X`, if present.
pub fn root_of_kind(shape: &SegmentShape, x: f64, kind: RootKind) -> Option<f64> {
    roots_e_for_x(shape, x).ok()?.of_kind(kind).map(|r| r.b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(a: f64) -> SegmentShape {
        SegmentShape::new(a).unwrap()
    }

    #[test]
    fn case_a_has_two_roots() {
        let s = shape(3.17690918);
        let set = roots_e_for_x(&s, -1.5).unwrap();
        assert_eq!(set.case, RootCase::A);
        assert_eq!(set.roots.len(), 2);
        for r in &set.roots {
            assert!(r.b > r.interval.0 && r.b < r.interval.1);
        }
    }

    #[test]
    fn inside_the_empty_region() {
        assert!(roots_e_for_x(&shape(2.5), -0.5).unwrap().roots.is_empty());
        assert!(roots_e_for_x(&shape(2.0), 0.0).unwrap().roots.is_empty());
    }

    #[test]
    fn positive_x_has_one_root() {
        let set = roots_e_for_x(&shape(1.0), 0.5).unwrap();
        assert_eq!(set.case, RootCase::D);
        assert_eq!(set.roots.len(), 1);
        assert_eq!(set.roots[0].kind, RootKind::Upper);
    }

    #[test]
    fn center_root_for_long_segments() {
        let set = roots_e_for_x(&shape(2.5), 0.0).unwrap();
        assert_eq!(set.roots.len(), 1);
        assert!(set.roots[0].interval.0 == -(12f64).sqrt());
    }

    #[test]
    fn roots_satisfy_the_condition() {
        let s = shape(3.17690918);
        for x in [-1.7, -1.2, -0.6, -0.05, 0.0, 0.9, 1.7] {
            for r in roots_e_for_x(&s, x).unwrap().roots {
                let g = derive(&s, x, r.b).unwrap();
                let scale = 1f64.max(oblique_sector_volume(&g)).max(g.chord_pow5());
                assert!(e_at(&s, x, r.b).unwrap().abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(roots_e_for_x(&shape(1.0), 1.0).is_err());
    }
}
