//! Equilibrium positions for a given shape and density.

mod branches;
mod closed_form;
mod region;
mod roots;
mod search;

use serde::{Deserialize, Serialize};

pub use branches::{trace_branches, Branch, BranchSample, BranchSet};
pub use closed_form::{archimedean_equilibria, archimedean_density, horizontal_equilibrium};
pub use region::{a1, no_solution_region, NoSolutionRegion, RegionCase};
pub use roots::{root_of_kind, roots_e_for_x, EquilibriumRoot, RootKind, RootSet, RootCase};
pub use search::{find_all_equilibria, SearchDiagnostics, SearchOptions, SearchResult};

use crate::geometry::Side;
use crate::stability::StabilityVerdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Position {
    LeftHand,
    RightHand,
    Horizontal,
}

impl From<Side> for Position {
    fn from(side: Side) -> Self {
        match side {
            Side::LeftHand => Position::LeftHand,
            Side::RightHand => Position::RightHand,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    Archimedean,
    NonArchimedean,
    Horizontal,
}

/// `|E|` and `|F|/V` at the reported position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub e: f64,
    pub f_rel: f64,
}

/// A solved floating position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub side: Position,
    pub case_kind: CaseKind,
    /// Waterline abscissa; absent for an upright archimedean position.
    #[serde(rename = "X")]
    pub x: Option<f64>,
    /// Slope; absent (`−∞`) for the horizontal position.
    pub b: Option<f64>,
    pub c: Option<f64>,
    /// Density of the body (not the effective one).
    pub sigma: f64,
    pub tilt_deg: f64,
    pub stability: StabilityVerdict,
    pub residuals: Residuals,
}

/// Tilt angle in degrees: `arccos(1/β)` for right-hand positions and its
/// supplement for left-hand ones.
pub fn tilt_deg(b: f64, side: Side) -> f64 {
    let angle = (1.0 / b.hypot(1.0)).acos().to_degrees();
    match side {
        Side::RightHand => angle,
        Side::LeftHand => 180.0 - angle,
    }
}
