//! Rotation of trajectories: absolute and signed rotation of curves around
//! points and subspaces, Gauss linking integrals, Crofton length estimates
//! and checks of upper bounds on rotation for flows of Lipschitz fields.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod crofton;
pub mod curve;
pub mod error;
pub mod fields;
pub mod flow;
pub mod gauss;
pub mod io;
pub mod rotation;
pub mod sampling;
pub mod scenarios;
pub mod vecops;

pub use bounds::{
    check_any_point_bound, check_invariant_subspace_bound, check_log_sink_bound, check_pair_bound,
    check_pair_bound_refined, check_stationary_point_bound, log_sink_study, BoundReport, KChoice, LogSinkStudy,
    TheoremId,
};
pub use crofton::{
    crofton_constants, crofton_length_estimate, find_circle_witness, find_equator_witness, find_euclidean_witness,
    CroftonConstants, CroftonEstimate, EquatorWitness, EuclideanWitness, Relation,
};
pub use curve::{AffineSubspace, Convention, Curve, RotationResult, SphericalCurve};
pub use error::{Error, Result};
pub use fields::{FieldKind, FieldSpec, LipschitzEstimate, LipschitzMethod};
pub use flow::{
    integrate_observed, integrate_polar, integrate_trajectory, IntegratorConfig, Observer, PolarState, PolarTrajectory,
};
pub use gauss::{
    gauss_rotation_pair, line_rotation_crosscheck, linking_coefficient, topological_linking_planar, LineCrosscheck,
    LinkingResult,
};
pub use rotation::{absolute_rotation_point, rotation_around_subspace, signed_winding_plane, Mode};
pub use scenarios::{verify, Scenario, ScenarioName};
