//! Thickness and criticality of stiff space curves.
//!
//! The library models piecewise-analytic curves (lines, circular arcs,
//! tangent-angle curvature profiles, helices), computes their reach and
//! σ-thickness together with the contact set (struts and kinks), certifies
//! criticality by solving for balancing strut/kink measures, integrates the
//! strut-free kink-tension ODE, and constructs the four-regime family of
//! tight clasps with their excess lengths and tip gaps.

pub mod balance;
pub mod clasp;
pub mod curve;
pub mod geom;
pub mod nnls;
pub mod quad;
pub mod strutfree;
#[cfg(test)]
pub(crate) mod testutil;
pub mod thickness;
pub mod variation;

pub use curve::{Component, Curve, CurvePoint, EndpointConstraint, Segment, TangentConstraint};
pub use geom::{CurveGeom, SampledCurve, Sampling};
pub use thickness::{Kink, Strut, ThicknessOptions, ThicknessReport};

/// Junction tolerance for C¹ validation (absolute; curves live at unit scale).
pub const JUNCTION_TOL: f64 = 1e-9;
