//! Parameter classification, the fundamental domain `Omega` and the cut set.

mod cut;
mod export;
mod omega;

use serde::Serialize;

use crate::params::{Kappa, Params};

pub use cut::{cut_set, CutKind, CutSet};
pub use export::{boundary_samples, BoundaryExport, BoundarySample, EXPORT_RADIUS};
pub use omega::{
    boundary_infty, boundary_point, membership, omega_description, polar_roots, theta_star,
    y_star_infty, y_zero, Asymptote, DomainCase, DomainDescription, Membership, BOUNDARY_BAND,
};

/// Parameter regions on which a main branch exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `0 < kappa < 1`, `gamma <= 0`.
    I,
    /// `kappa >= 1`, `gamma <= (1 + 1/kappa)^2 / 4`.
    II,
    /// `-1 < kappa < 0`, `gamma <= 1/kappa`.
    III,
    /// `kappa <= -1`, `gamma <= (1 + 1/kappa)^2 / 4`.
    IV,
    /// infinite kappa, `gamma <= 1/4`.
    V,
}

/// Why no main branch exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Failure {
    /// Points of the boundary of `Omega` map off the real line.
    DomainObstruction,
    /// The map covers the upper half-plane twice.
    TwoToOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchClass {
    Exists(Region),
    NotExists(Failure),
}

impl BranchClass {
    pub fn exists(self) -> bool {
        matches!(self, BranchClass::Exists(_))
    }

    pub fn tag(self) -> &'static str {
        match self {
            BranchClass::Exists(Region::I) => "i",
            BranchClass::Exists(Region::II) => "ii",
            BranchClass::Exists(Region::III) => "iii",
            BranchClass::Exists(Region::IV) => "iv",
            BranchClass::Exists(Region::V) => "v",
            BranchClass::NotExists(Failure::DomainObstruction) => "domain_obstruction",
            BranchClass::NotExists(Failure::TwoToOne) => "two_to_one",
        }
    }
}

/// `(1 + 1/kappa)^2 / 4`, the largest gamma with real critical points.
pub fn critical_gamma(kappa: f64) -> f64 {
    let c = 1.0 + 1.0 / kappa;
    0.25 * c * c
}

/// Decides whether a main branch exists for `params`.
pub fn classify(params: &Params) -> BranchClass {
    use BranchClass::*;
    let g = params.gamma;
    match params.kappa {
        Kappa::Infinite => {
            if g <= 0.25 {
                Exists(Region::V)
            } else {
                NotExists(Failure::TwoToOne)
            }
        }
        Kappa::Finite(k) if k > 0.0 && k < 1.0 && !params.kappa.is_one() => {
            if g <= 0.0 {
                Exists(Region::I)
            } else {
                NotExists(Failure::DomainObstruction)
            }
        }
        Kappa::Finite(k) if k > 0.0 => {
            if g <= critical_gamma(k) {
                Exists(Region::II)
            } else {
                NotExists(Failure::TwoToOne)
            }
        }
        Kappa::Finite(k) if k > -1.0 => {
            if g <= 1.0 / k {
                Exists(Region::III)
            } else {
                NotExists(Failure::DomainObstruction)
            }
        }
        Kappa::Finite(k) => {
            if g <= critical_gamma(k) {
                Exists(Region::IV)
            } else {
                NotExists(Failure::TwoToOne)
            }
        }
    }
}

/// Distance in gamma from `params` to the nearest region boundary, and in kappa
/// to the lines `kappa = 1` and `kappa = -1` where the region formulas switch.
pub fn distance_to_region_boundary(params: &Params) -> f64 {
    let g = params.gamma;
    match params.kappa {
        Kappa::Infinite => (g - 0.25).abs(),
        Kappa::Finite(k) => {
            let dg = if k > 0.0 && k < 1.0 {
                g.abs()
            } else if k >= 1.0 || k <= -1.0 {
                (g - critical_gamma(k)).abs()
            } else {
                (g - 1.0 / k).abs()
            };
            // vertical boundary segments at kappa = 1 and kappa = -1
            let dk = if k > 0.0 && g > 0.0 && g <= 1.0 {
                (k - 1.0).abs()
            } else if k < 0.0 && g > -1.0 && g <= 0.0 {
                (k + 1.0).abs()
            } else {
                f64::INFINITY
            };
            dg.min(dk)
        }
    }
}
