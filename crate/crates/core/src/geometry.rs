//! Paraboloid segment geometry.
//!
//! The solid is `{x² + y² ≤ z ≤ a}`; the fluid surface is the plane
//! `z = b·x + c` with `b ≤ 0`. In the non-archimedean case the plane is
//! parameterized by the abscissa `X` where it crosses the basis height
//! `z = a`, so that `c = a − b·X`.
//!
//! The submerged part of a left-hand position is `P ∩ {z ≥ bx + c}`. Its
//! volume and moments are obtained as differences between a right sector
//! `P ∩ {x ≥ X}` and an oblique sector `P ∩ {x ≥ X, z ≤ bx + c}`. The oblique
//! sector is the image of another right sector (axis `a'`, abscissa `X'`)
//! under a unimodular shear, which is what makes everything closed-form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative threshold below which `a − X²` is treated as the boundary value 0.
pub const DEGENERATE_CHORD_REL: f64 = 1e-14;

/// Below this sector angle the sin⁴ integral is summed as a power series.
const SERIES_ANGLE: f64 = 0.3;

/// Shape of the floating body: the axis length `a` of the segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentShape {
    a: f64,
}

impl SegmentShape {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(domain(format!("axis length must be positive, got {a}")));
        }
        Ok(Self { a })
    }

    /// Shape from a base angle in degrees, `a = tan²(φ)/4`.
    pub fn from_base_angle_deg(phi_deg: f64) -> Result<Self> {
        if !(phi_deg.is_finite() && phi_deg > 0.0 && phi_deg < 90.0) {
            return Err(domain(format!(
                "base angle must lie in (0°, 90°), got {phi_deg}"
            )));
        }
        let t = phi_deg.to_radians().tan();
        Self::new(t * t / 4.0)
    }

    #[inline]
    pub fn axis(&self) -> f64 {
        self.a
    }

    /// Total volume `a²π/2`.
    #[inline]
    pub fn volume(&self) -> f64 {
        self.a * self.a * PI / 2.0
    }

    /// Height of the centroid on the axis, `2a/3`.
    #[inline]
    pub fn centroid_height(&self) -> f64 {
        2.0 * self.a / 3.0
    }

    /// Radius of the basis circle, `√a`.
    #[inline]
    pub fn basis_radius(&self) -> f64 {
        self.a.sqrt()
    }

    /// Whether `X` lies strictly inside the basis circle's diameter.
    pub fn contains_waterline(&self, x: f64) -> bool {
        let r = self.basis_radius();
        x > -r && x < r
    }
}

/// Which side of the waterplane is dry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// `P ∩ {z < bx + c}` is outside the fluid.
    LeftHand,
    /// `P ∩ {z > bx + c}` is outside the fluid.
    RightHand,
}

impl Side {
    /// Density that the left-hand geometry must carry to represent this side.
    pub fn effective_density(self, sigma: f64) -> f64 {
        match self {
            Side::LeftHand => sigma,
            Side::RightHand => 1.0 - sigma,
        }
    }
}

/// A waterplane `z = b·x + (a − b·X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterPlane {
    pub b: f64,
    pub x: f64,
    pub side: Side,
}

impl WaterPlane {
    /// Plane of the non-archimedean case; requires `b ≤ 0` and `−√a < X < √a`.
    pub fn non_archimedean(shape: &SegmentShape, x: f64, b: f64, side: Side) -> Result<Self> {
        if !(b.is_finite() && b <= 0.0) {
            return Err(domain(format!("slope must satisfy b ≤ 0, got {b}")));
        }
        if !shape.contains_waterline(x) {
            return Err(domain(format!(
                "waterline abscissa X = {x} outside (−√a, √a) = (±{})",
                shape.basis_radius()
            )));
        }
        Ok(Self { b, x, side })
    }

    /// Intercept `c = a − b·X`; never stored.
    #[inline]
    pub fn intercept(&self, shape: &SegmentShape) -> f64 {
        shape.axis() - self.b * self.x
    }
}

/// Quantities shared by nearly every closed-form expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGeometry {
    pub a: f64,
    pub x: f64,
    pub b: f64,
    /// `A = a − X²`, the squared half chord cut from the basis circle by `x = X`.
    pub chord_sq: f64,
    /// `a' = b²/4 − bX + a`, axis of the sheared right sector.
    pub shifted_axis: f64,
    /// `X' = X − b/2`.
    pub shifted_x: f64,
    /// `β = √(b² + 1)`, length of the plane normal `(b, 0, −1)`.
    pub normal_len: f64,
    /// `f = 5b²/12 − 2bX/3 + 1/2`, the coefficient of `V₂` in the equilibrium condition.
    pub balance: f64,
}

impl DerivedGeometry {
    /// `A^{5/2}`.
    #[inline]
    pub fn chord_pow5(&self) -> f64 {
        let s = self.chord_sq.sqrt();
        self.chord_sq * self.chord_sq * s
    }

    #[inline]
    pub fn chord_pow3(&self) -> f64 {
        self.chord_sq * self.chord_sq.sqrt()
    }
}

/// `f(b, X) = 5b²/12 − 2bX/3 + 1/2`.
#[inline]
pub fn balance_coeff(x: f64, b: f64) -> f64 {
    5.0 * b * b / 12.0 - 2.0 * b * x / 3.0 + 0.5
}

fn clamp_chord(a: f64, x: f64) -> f64 {
    let chord = a - x * x;
    if chord.abs() < DEGENERATE_CHORD_REL * a.max(1.0) {
        0.0
    } else {
        chord
    }
}

pub fn derived_geometry(shape: &SegmentShape, plane: &WaterPlane) -> Result<DerivedGeometry> {
    derive(shape, plane.x, plane.b)
}

/// Same as [`derived_geometry`] from bare `(X, b)`.
pub fn derive(shape: &SegmentShape, x: f64, b: f64) -> Result<DerivedGeometry> {
    let a = shape.axis();
    if !(x.is_finite() && b.is_finite()) {
        return Err(domain(format!("non-finite plane parameters X = {x}, b = {b}")));
    }
    if !shape.contains_waterline(x) {
        return Err(domain(format!("X = {x} outside (−√a, √a) for a = {a}")));
    }
    let chord_sq = clamp_chord(a, x);
    if chord_sq <= 0.0 {
        return Err(domain(format!("A = a − X² = {chord_sq} is not positive")));
    }
    let shifted_x = x - 0.5 * b;
    // a' = X'² + A avoids the cancellation in b²/4 − bX + a when bX > 0.
    let shifted_axis = shifted_x * shifted_x + chord_sq;
    Ok(DerivedGeometry {
        a,
        x,
        b,
        chord_sq,
        shifted_axis,
        shifted_x,
        normal_len: b.hypot(1.0),
        balance: balance_coeff(x, b),
    })
}

/// `∫₀^θ sin⁴t dt`.
fn sin4_integral(theta: f64) -> f64 {
    if theta < SERIES_ANGLE {
        // sin⁴ = 3/8 − cos2t/2 + cos4t/8; the linear and cubic terms cancel.
        // coefficient of θ^{2n+1}: (−1)ⁿ (2^{4n−3} − 2^{2n−1}) / (2n+1)!
        let t2 = theta * theta;
        let mut pow = theta * t2 * t2; // θ⁵
        let mut fact = 120.0; // 5!
        let mut sum = 0.0;
        for n in 2..20 {
            let coeff = 2f64.powi(4 * n - 3) - 2f64.powi(2 * n - 1);
            let term = coeff * pow / fact;
            sum += if n % 2 == 0 { term } else { -term };
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pow *= t2;
            fact *= ((2 * n + 2) * (2 * n + 3)) as f64;
        }
        sum
    } else {
        3.0 * theta / 8.0 - (2.0 * theta).sin() / 4.0 + (4.0 * theta).sin() / 32.0
    }
}

/// Volume of the right sector `{x² + y² ≤ z ≤ axis, x ≥ x0}` given the
/// precomputed `chord_sq = axis − x0²` (which may carry more precision than
/// recomputing it).
pub(crate) fn sector_volume(axis: f64, x0: f64, chord_sq: f64) -> f64 {
    let root = chord_sq.max(0.0).sqrt();
    // θ = π/2 − arctan(X/√A), with the A → 0 limits built in.
    let theta = root.atan2(x0);
    if theta < SERIES_ANGLE {
        4.0 / 3.0 * axis * axis * sin4_integral(theta)
    } else {
        axis * axis * theta / 2.0 + (2.0 * x0 * x0 * x0 - 5.0 * axis * x0) / 6.0 * root
    }
}

/// `V(a, X) = (a²/2)(π/2 − arctan(X/√A)) + ((2X³ − 5aX)/6)√A`.
///
/// Endpoints are allowed: `V(a, −√a) = a²π/2` and `V(a, √a) = 0`.
pub fn right_sector_volume(a: f64, x: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(domain(format!("axis length must be positive, got {a}")));
    }
    let r = a.sqrt();
    let tol = DEGENERATE_CHORD_REL * r.max(1.0);
    if !(x.is_finite() && x >= -r - tol && x <= r + tol) {
        return Err(domain(format!("X = {x} outside [−√a, √a] for a = {a}")));
    }
    Ok(sector_volume(a, x, clamp_chord(a, x)))
}

/// Volume `V₂ = V(a', X')` of the oblique sector, evaluated with the shared `A`.
pub fn oblique_sector_volume(geom: &DerivedGeometry) -> f64 {
    sector_volume(geom.shifted_axis, geom.shifted_x, geom.chord_sq)
}

/// Volume together with the first moments `x·V` and `z·V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorMoments {
    pub volume: f64,
    pub moment_x: f64,
    pub moment_z: f64,
}

impl SectorMoments {
    /// Centroid `(x, z)`, defined only for a positive volume.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        (self.volume > 0.0).then(|| (self.moment_x / self.volume, self.moment_z / self.volume))
    }
}

/// Moments of the right sector: `x₁V₁ = (4/15)A^{5/2}`, `z₁V₁ = (2a/3)V₁ + (4X/45)A^{5/2}`.
pub fn right_sector_moments(a: f64, x: f64) -> Result<SectorMoments> {
    let volume = right_sector_volume(a, x)?;
    let chord = clamp_chord(a, x).max(0.0);
    let a52 = chord * chord * chord.sqrt();
    Ok(SectorMoments {
        volume,
        moment_x: 4.0 / 15.0 * a52,
        moment_z: 2.0 * a / 3.0 * volume + 4.0 * x / 45.0 * a52,
    })
}

/// Moments of the oblique sector, carried over from the sheared right sector.
pub fn oblique_sector_moments(geom: &DerivedGeometry) -> SectorMoments {
    let (b, x, a) = (geom.b, geom.x, geom.a);
    let v2 = oblique_sector_volume(geom);
    let a52 = geom.chord_pow5();
    SectorMoments {
        volume: v2,
        moment_x: b / 2.0 * v2 + 4.0 / 15.0 * a52,
        moment_z: (5.0 * b * b / 12.0 - 2.0 * b * x / 3.0 + 2.0 * a / 3.0) * v2
            + (4.0 * x / 45.0 + 2.0 * b / 9.0) * a52,
    }
}

/// Centroid and volume of the submerged part of a left-hand position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubmergedPart {
    pub x: f64,
    pub z: f64,
    pub volume: f64,
}

/// Volume below which the submerged part counts as empty.
pub const EMPTY_SUBMERSION_REL: f64 = 1e-14;

pub fn submerged_centroid(shape: &SegmentShape, plane: &WaterPlane) -> Result<SubmergedPart> {
    let geom = derived_geometry(shape, plane)?;
    let right = right_sector_moments(shape.axis(), plane.x)?;
    let oblique = oblique_sector_moments(&geom);
    let volume = right.volume - oblique.volume;
    if volume <= EMPTY_SUBMERSION_REL * shape.volume() {
        return Err(Error::Degenerate(format!(
            "submerged volume {volume:e} is empty at X = {}, b = {}",
            plane.x, plane.b
        )));
    }
    Ok(SubmergedPart {
        x: (right.moment_x - oblique.moment_x) / volume,
        z: (right.moment_z - oblique.moment_z) / volume,
        volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn shape_rejects_nonpositive_axis() {
        assert!(SegmentShape::new(0.0).is_err());
        assert!(SegmentShape::new(-1.0).is_err());
        assert!(SegmentShape::new(f64::NAN).is_err());
    }

    #[test]
    fn base_angle_conversion() {
        let s = SegmentShape::from_base_angle_deg(74.33).unwrap();
        assert!((s.axis() - 3.17690918).abs() < 5e-9);
        assert!(SegmentShape::from_base_angle_deg(90.0).is_err());
    }

    #[test]
    fn upright_symmetric_geometry() {
        let s = SegmentShape::new(1.0).unwrap();
        let g = derive(&s, 0.0, 0.0).unwrap();
        assert_eq!(g.chord_sq, 1.0);
        assert_eq!(g.shifted_axis, 1.0);
        assert_eq!(g.shifted_x, 0.0);
        assert_eq!(g.normal_len, 1.0);
        assert_eq!(g.balance, 0.5);
    }

    #[test]
    fn derived_geometry_hand_values() {
        let s = SegmentShape::new(2.0).unwrap();
        let g = derive(&s, 1.0, -2.0).unwrap();
        assert!(close(g.chord_sq, 1.0, 1e-15));
        assert!(close(g.shifted_x, 2.0, 1e-15));
        assert!(close(g.shifted_axis, 5.0, 1e-15));
        let direct = 4.0 / 4.0 + 2.0 + 2.0;
        assert!(close(g.shifted_axis, direct, 1e-15));
    }

    #[test]
    fn chord_identity_at_reference_point() {
        let s = SegmentShape::new(3.17690918).unwrap();
        let (x, b) = (-1.03304236, -1.12424322);
        let g = derive(&s, x, b).unwrap();
        let a = s.axis();
        let direct_axis = b * b / 4.0 - b * x + a;
        assert!(close(g.shifted_axis, direct_axis, 1e-13));
        let via_shift = direct_axis - g.shifted_x * g.shifted_x;
        assert!((via_shift - (a - x * x)).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn derive_rejects_out_of_range() {
        let s = SegmentShape::new(1.0).unwrap();
        assert!(matches!(derive(&s, 1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(derive(&s, -1.5, -1.0), Err(Error::Domain(_))));
        assert!(WaterPlane::non_archimedean(&s, 0.0, 0.5, Side::LeftHand).is_err());
    }

    #[test]
    fn sector_volume_endpoints() {
        assert_eq!(right_sector_volume(1.0, 1.0).unwrap(), 0.0);
        assert!(close(right_sector_volume(1.0, -1.0).unwrap(), PI / 2.0, 1e-15));
        for a in [0.3, 2.0, 7.5] {
            let r: f64 = a;
            let r = r.sqrt();
            assert!(right_sector_volume(a, r).unwrap().abs() <= 1e-12);
            assert!(close(right_sector_volume(a, -r).unwrap(), a * a * PI / 2.0, 1e-12));
        }
        assert!(right_sector_volume(1.0, 1.1).is_err());
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        for theta in [SERIES_ANGLE * 0.999, SERIES_ANGLE * 0.5] {
            let closed = 3.0 * theta / 8.0 - (2.0 * theta).sin() / 4.0 + (4.0 * theta).sin() / 32.0;
            let series = sin4_integral(theta);
            // the closed form itself only carries absolute accuracy here
            assert!((closed - series).abs() <= 1e-16, "{closed} {series}");
        }
    }

    #[test]
    fn half_volume_at_center() {
        let v = right_sector_volume(2.7, 0.0).unwrap();
        assert!(close(v, 2.7 * 2.7 * PI / 4.0, 1e-15));
    }

    #[test]
    fn oblique_equals_right_when_level() {
        let s = SegmentShape::new(2.3).unwrap();
        for x in [-1.2, -0.3, 0.0, 0.9, 1.4] {
            let g = derive(&s, x, 0.0).unwrap();
            let v1 = right_sector_volume(2.3, x).unwrap();
            assert!(close(oblique_sector_volume(&g), v1, 1e-14));
            let m1 = right_sector_moments(2.3, x).unwrap();
            let m2 = oblique_sector_moments(&g);
            assert!(close(m1.moment_x, m2.moment_x, 1e-14));
            assert!(close(m1.moment_z, m2.moment_z, 1e-14));
        }
    }

    #[test]
    fn full_segment_moments_recover_centroid() {
        let a: f64 = 1.7;
        let x = -a.sqrt() + 1e-9;
        let m = right_sector_moments(a, x).unwrap();
        assert!(m.moment_x.abs() < 1e-12);
        assert!(close(m.moment_z, 2.0 * a / 3.0 * a * a * PI / 2.0, 1e-9));
    }

    #[test]
    fn unit_moments() {
        let m = right_sector_moments(1.0, 0.0).unwrap();
        assert!(close(m.moment_x, 4.0 / 15.0, 1e-15));
        assert!(close(m.volume, PI / 4.0, 1e-15));
        let (cx, _) = m.centroid().unwrap();
        assert!(close(cx, 16.0 / (15.0 * PI), 1e-14));
    }

    #[test]
    fn oblique_sector_is_small_for_steep_planes() {
        let s = SegmentShape::new(2.0).unwrap();
        let g = derive(&s, 0.3, -1e6).unwrap();
        let v2 = oblique_sector_volume(&g);
        assert!(v2 > 0.0 && v2 < 1e-5);
        let m = oblique_sector_moments(&g);
        assert!(m.moment_z.abs() < 1e-4, "{}", m.moment_z);
    }

    #[test]
    fn oblique_never_exceeds_right() {
        let s = SegmentShape::new(3.0).unwrap();
        for &x in &[-1.6, -0.5, 0.2, 1.5] {
            let v1 = right_sector_volume(3.0, x).unwrap();
            for &b in &[-0.01, -0.7, -3.0, -40.0] {
                let v2 = oblique_sector_volume(&derive(&s, x, b).unwrap());
                assert!(v2 >= 0.0 && v2 <= v1 * (1.0 + 1e-14), "x={x} b={b}");
            }
        }
    }

    #[test]
    fn empty_submersion_is_degenerate() {
        let s = SegmentShape::new(1.0).unwrap();
        let plane = WaterPlane { b: 0.0, x: 1.0 - 1e-17, side: Side::LeftHand };
        assert!(submerged_centroid(&s, &plane).is_err());
    }

    #[test]
    fn whole_submersion_centroid() {
        let s = SegmentShape::new(1.3).unwrap();
        // left-hand submersion is P ∩ {z ≥ bx + c}; it fills P as the plane turns vertical
        let plane = WaterPlane { b: -1e7, x: -1.3f64.sqrt() + 1e-6, side: Side::LeftHand };
        let p = submerged_centroid(&s, &plane).unwrap();
        assert!(p.x.abs() < 1e-6, "{}", p.x);
        assert!((p.z - 2.0 * 1.3 / 3.0).abs() < 1e-6, "{}", p.z);
    }
}
