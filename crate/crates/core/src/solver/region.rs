//! Abscissae `X < 0` for which `E = 0` has no solution.

use serde::{Deserialize, Serialize};

use crate::geometry::SegmentShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionCase {
    /// `a ≤ a₁`: all of `(−√a, 0)`.
    WholeLeftHalf,
    /// `a₁ < a ≤ 21/10`: `[X₁, 0)`.
    UpToCenter,
    /// `21/10 < a ≤ 3`: `[X₁, X₂]`.
    Bounded,
    /// `a > 3`: no such region.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoSolutionRegion {
    pub a1: f64,
    pub gamma: f64,
    pub delta: f64,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub case: RegionCase,
    /// `(lo, hi)` of the region; see [`NoSolutionRegion::contains`] for which
    /// ends are closed.
    pub interval: Option<(f64, f64)>,
}

impl NoSolutionRegion {
    pub fn contains(&self, x: f64) -> bool {
        let Some((lo, hi)) = self.interval else { return false };
        match self.case {
            RegionCase::WholeLeftHalf => x > lo && x < hi,
            RegionCase::UpToCenter => x >= lo && x < hi,
            RegionCase::Bounded => x >= lo && x <= hi,
            RegionCase::Empty => false,
        }
    }
}

/// `a₁ = (−213 + 198√11)/250`.
pub fn a1() -> f64 {
    (-213.0 + 198.0 * 11f64.sqrt()) / 250.0
}

pub fn no_solution_region(shape: &SegmentShape) -> NoSolutionRegion {
    let a = shape.axis();
    let a1 = a1();
    let gamma = -11.0 * a * a / 54.0 + 5.0 * a / 9.0 + 13.0 / 24.0;
    let delta = (3.0 - a) * (a + 6.0).powi(3);
    let (x1, x2) = if delta >= 0.0 {
        let r = delta.sqrt() / 27.0;
        let y2 = gamma - r;
        (Some(-(gamma + r).sqrt()), (y2 >= 0.0).then(|| -y2.sqrt()))
    } else {
        (None, None)
    };
    let (case, interval) = if a <= a1 {
        (RegionCase::WholeLeftHalf, Some((-a.sqrt(), 0.0)))
    } else if a <= 2.1 {
        (RegionCase::UpToCenter, x1.map(|l| (l, 0.0)))
    } else if a <= 3.0 {
        (RegionCase::Bounded, x1.zip(x2))
    } else {
        (RegionCase::Empty, None)
    };
    NoSolutionRegion { a1, gamma, delta, x1, x2, case, interval }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_interval() {
        let r = no_solution_region(&SegmentShape::new(2.5).unwrap());
        assert_eq!(r.case, RegionCase::Bounded);
        assert!((r.x1.unwrap() + 1.143).abs() < 1e-3);
        assert!((r.x2.unwrap() + 0.0917).abs() < 1e-3);
        assert!(r.contains(-0.5) && !r.contains(-1.2) && !r.contains(0.0));
    }

    #[test]
    fn threshold_value() {
        assert!((a1() - 1.7748).abs() < 1e-4);
    }

    #[test]
    fn short_segments_have_no_left_roots() {
        let r = no_solution_region(&SegmentShape::new(1.5).unwrap());
        assert_eq!(r.case, RegionCase::WholeLeftHalf);
        assert!(r.contains(-1.2) && !r.contains(0.0));
    }

    #[test]
    fn interval_collapses_at_three() {
        let r = no_solution_region(&SegmentShape::new(3.0).unwrap());
        assert_eq!(r.delta, 0.0);
        assert_eq!(r.x1, r.x2);
        assert!((r.x1.unwrap() + r.gamma.sqrt()).abs() < 1e-15);
        let r = no_solution_region(&SegmentShape::new(3.5).unwrap());
        assert_eq!(r.case, RegionCase::Empty);
        assert!(!r.contains(-0.5));
    }
}
