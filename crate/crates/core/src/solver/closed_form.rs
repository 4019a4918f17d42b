//! Archimedean and horizontal equilibria, both available in closed form.

use std::f64::consts::PI;

use super::{tilt_deg, CaseKind, Equilibrium, Position, Residuals};
use crate::conditions::{balance_from_intercept, require_density};
use crate::error::Result;
use crate::geometry::{SegmentShape, Side};
use crate::stability::{classify_archimedean, horizontal_verdict};

/// Density entering the archimedean formulas, which are written for the
/// right-hand position: `σ` itself there and `1 − σ` for the left hand.
pub fn archimedean_density(sigma: f64, side: Side) -> f64 {
    match side {
        Side::RightHand => sigma,
        Side::LeftHand => 1.0 - sigma,
    }
}

/// Upright position and, when admissible, the tilted one.
pub fn archimedean_equilibria(shape: &SegmentShape, sigma: f64, side: Side) -> Result<Vec<Equilibrium>> {
    require_density(sigma)?;
    let a = shape.axis();
    let s_eff = archimedean_density(sigma, side);
    let root = s_eff.sqrt();
    let mut out = Vec::with_capacity(2);

    let c = a * root;
    let vp = c * c * PI / 2.0;
    out.push(Equilibrium {
        side: side.into(),
        case_kind: CaseKind::Archimedean,
        x: None,
        b: Some(0.0),
        c: Some(c),
        sigma,
        tilt_deg: tilt_deg(0.0, side),
        stability: classify_archimedean(shape, c, 0.0, s_eff)?,
        residuals: Residuals { e: 0.0, f_rel: (vp - s_eff * shape.volume()).abs() / shape.volume() },
    });

    if a > 0.75 {
        let b2 = 8.0 * a / 3.0 * (1.0 - root) - 2.0;
        if b2 > 0.0 {
            let b = -b2.sqrt();
            // the plane may touch the basis circle in at most one point;
            // the equality case (tangency) is accepted
            let admissible = a <= 15.0 / 8.0 || -b * a.sqrt() <= (5.0 * b2 / 8.0 + 0.75) * (1.0 + 1e-12);
            if admissible {
                let c = a * root - b2 / 4.0;
                let ap = b2 / 4.0 + c;
                let vp = ap * ap * PI / 2.0;
                out.push(Equilibrium {
                    side: side.into(),
                    case_kind: CaseKind::Archimedean,
                    x: Some((a - c) / b),
                    b: Some(b),
                    c: Some(c),
                    sigma,
                    tilt_deg: tilt_deg(b, side),
                    stability: classify_archimedean(shape, c, b, s_eff)?,
                    residuals: Residuals {
                        e: (balance_from_intercept(a, b, c) * vp).abs(),
                        f_rel: (vp - s_eff * shape.volume()).abs() / shape.volume(),
                    },
                });
            }
        }
    }
    Ok(out)
}

/// Half-density tolerance for the horizontal position.
pub const HALF_DENSITY_TOL: f64 = 1e-12;

/// The horizontal position `X = 0`, which exists only for `σ = 1/2`.
pub fn horizontal_equilibrium(shape: &SegmentShape, sigma: f64) -> Option<Equilibrium> {
    if (sigma - 0.5).abs() > HALF_DENSITY_TOL {
        return None;
    }
    Some(Equilibrium {
        side: Position::Horizontal,
        case_kind: CaseKind::Horizontal,
        x: Some(0.0),
        b: None,
        c: None,
        sigma,
        tilt_deg: 90.0,
        stability: horizontal_verdict(shape),
        residuals: Residuals { e: 0.0, f_rel: (sigma - 0.5).abs() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::StabilityKind;

    fn shape(a: f64) -> SegmentShape {
        SegmentShape::new(a).unwrap()
    }

    #[test]
    fn short_segment_only_floats_upright() {
        for sigma in [0.1, 0.5, 0.9] {
            let eqs = archimedean_equilibria(&shape(0.5), sigma, Side::RightHand).unwrap();
            assert_eq!(eqs.len(), 1);
            assert_eq!(eqs[0].b, Some(0.0));
            assert!((eqs[0].c.unwrap() - 0.5 * sigma.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn tilted_hand_values() {
        let eqs = archimedean_equilibria(&shape(1.5), 0.16, Side::RightHand).unwrap();
        assert_eq!(eqs.len(), 2);
        let t = &eqs[1];
        assert!((t.b.unwrap() + 0.4f64.sqrt()).abs() < 1e-14);
        assert!((t.c.unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(t.stability.kind, StabilityKind::Stable);
    }

    #[test]
    fn tilted_candidate_leaving_the_archimedean_case() {
        let eqs = archimedean_equilibria(&shape(3.0), 0.25, Side::RightHand).unwrap();
        assert_eq!(eqs.len(), 1);
    }

    #[test]
    fn left_hand_uses_complementary_density() {
        let r = archimedean_equilibria(&shape(1.5), 0.16, Side::RightHand).unwrap();
        let l = archimedean_equilibria(&shape(1.5), 0.84, Side::LeftHand).unwrap();
        assert_eq!(r.len(), l.len());
        assert!((r[1].b.unwrap() - l[1].b.unwrap()).abs() < 1e-14);
        assert!((l[1].tilt_deg - (180.0 - r[1].tilt_deg)).abs() < 1e-12);
    }

    #[test]
    fn horizontal_requires_half_density() {
        assert!(horizontal_equilibrium(&shape(3.0), 0.5 + 1e-6).is_none());
        let h = horizontal_equilibrium(&shape(3.0), 0.5).unwrap();
        assert_eq!(h.stability.kind, StabilityKind::Stable);
        assert_eq!(h.tilt_deg, 90.0);
    }
}
