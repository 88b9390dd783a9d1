//! Obnoxious facility location with predictions.
//!
//! Deterministic voting mechanisms that place an undesirable facility on the
//! segment, the square, the circle or a tree, trusting a predicted optimum to
//! a degree `λ ∈ [0, 1]`, plus a dual-preference variant on the segment.
//! Around them sit exact welfare optimisation, strategyproofness and
//! coalition checkers, and experiment drivers for approximation ratios.
//!
//! Everything is generic over [`Scalar`]. The aliases at the crate root fix
//! the scalar to `f64`; [`exact`] fixes it to `Ratio<i128>` for checks that
//! must hold with zero tolerance.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod game_checks;
pub mod mechanisms;
pub mod scalar;
pub mod spaces;
pub mod welfare;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Space = spaces::Space<f64>;
pub type Point = spaces::Point<f64>;
pub type TreeGraph = spaces::TreeGraph<f64>;
pub type TreePoint = spaces::TreePoint<f64>;
pub type LocationProfile = welfare::LocationProfile<f64>;
pub type Instance = mechanisms::Instance<f64>;
pub type MechanismConfig = mechanisms::MechanismConfig<f64>;
pub type MechanismTrace = mechanisms::MechanismTrace<f64>;
pub type EvaluationReport = experiments::EvaluationReport<f64>;
pub type DeviationReport = game_checks::DeviationReport<f64>;

/// Aliases over exact rationals.
pub mod exact {
    use num_rational::Ratio;

    pub type Q = Ratio<i128>;
    pub type Space = crate::spaces::Space<Q>;
    pub type Point = crate::spaces::Point<Q>;
    pub type TreeGraph = crate::spaces::TreeGraph<Q>;
    pub type TreePoint = crate::spaces::TreePoint<Q>;
    pub type LocationProfile = crate::welfare::LocationProfile<Q>;
    pub type Instance = crate::mechanisms::Instance<Q>;
    pub type MechanismConfig = crate::mechanisms::MechanismConfig<Q>;
    pub type EvaluationReport = crate::experiments::EvaluationReport<Q>;
}
