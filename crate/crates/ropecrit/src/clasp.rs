//! The four-regime family of tight (τ, σ)-clasps.
//!
//! Two congruent arcs in perpendicular planes, linked through each other
//! with unit thickness, ends making angle arcsin τ with the horizontal and
//! radius of curvature at least σ. Depending on (τ, σ) the critical curve
//! is fully kinked (a circle arc of radius σ plus rays), transitional
//! (kink, segment, unit shoulder arc, ray), generic (kink, segment,
//! Gehring arc, segment, shoulder, ray — eleven analytic pieces in all),
//! or the pure Gehring clasp (no active curvature constraint).
//!
//! Each constructed clasp carries the strut measure and kink tension that
//! certify its criticality, plus its excess length (length minus four
//! inradii of the bounding tetrahedron) and tip-to-tip gap.

use serde::Serialize;

use crate::balance::{KinkTension, StrutAtom, StrutFamilyDensity, StrutMeasure};
use crate::curve::profile::Profile;
use crate::curve::{
    Component, Curve, EndpointConstraint, PositionConstraint, Segment, TangentConstraint, V3,
};
use crate::thickness::Loc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    FullyKinked,
    Transitional,
    Generic,
    Gehring,
}

#[derive(Debug, thiserror::Error)]
pub enum ClaspError {
    #[error("τ must lie in [0, 1] (got {0})")]
    BadTau(f64),
    #[error("σ must be nonnegative (got {0})")]
    BadSigma(f64),
    #[error("σ = {sigma} is outside the open generic interval ({lo}, {hi}) at τ = {tau}")]
    NotGeneric { tau: f64, sigma: f64, lo: f64, hi: f64 },
    #[error("construction inconsistency: {0}")]
    Inconsistent(String),
    #[error("profile construction failed: {0}")]
    Profile(#[from] crate::quad::QuadError),
}

/// Generic/transitional boundary σ = (√(4+τ²)−2)/(2−√(4−τ²)); tends to 1
/// as τ → 0.
pub fn generic_upper_boundary(tau: f64) -> f64 {
    if tau < 1e-9 {
        return 1.0;
    }
    ((4.0 + tau * tau).sqrt() - 2.0) / (2.0 - (4.0 - tau * tau).sqrt())
}

/// Gehring/generic boundary σ = √(1−τ²).
pub fn gehring_boundary(tau: f64) -> f64 {
    (1.0 - tau * tau).max(0.0).sqrt()
}

/// Regime classification; boundary values go to the closed side (with an
/// ulp-scale guard so that e.g. σ = 0.6 at τ = 0.8 lands on the Gehring
/// side of √(1−τ²) despite rounding).
pub fn classify_regime(tau: f64, sigma: f64) -> Result<Regime, ClaspError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(ClaspError::BadTau(tau));
    }
    if !(sigma >= 0.0) {
        return Err(ClaspError::BadSigma(sigma));
    }
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
    Ok(if sigma >= 1.0 || near(sigma, 1.0) {
        Regime::FullyKinked
    } else if sigma >= generic_upper_boundary(tau) || near(sigma, generic_upper_boundary(tau)) {
        Regime::Transitional
    } else if sigma > gehring_boundary(tau) && !near(sigma, gehring_boundary(tau)) {
        Regime::Generic
    } else {
        Regime::Gehring
    })
}

/// σ(α) = (1+cos α)cos β / (cos γ + cos α) with sin β = τ − sin α and
/// sin γ = sin α sin β, strictly increasing on [0, arcsin(τ/2)].
pub fn sigma_of_alpha(tau: f64, alpha: f64) -> f64 {
    let sin_a = alpha.sin();
    let sin_b = tau - sin_a;
    let sin_g = sin_a * sin_b;
    let cos_a = alpha.cos();
    let cos_b = (1.0 - sin_b * sin_b).sqrt();
    let cos_g = (1.0 - sin_g * sin_g).sqrt();
    (1.0 + cos_a) * cos_b / (cos_g + cos_a)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GenericParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
}

/// Invert σ(α) on [0, arcsin(τ/2)] by bisection and recover (β, γ, a, b)
/// from the closed forms; all five printed equations hold to 1e−10.
pub fn solve_generic(tau: f64, sigma: f64) -> Result<GenericParams, ClaspError> {
    let lo = gehring_boundary(tau);
    let hi = generic_upper_boundary(tau);
    if !(sigma > lo && sigma < hi) {
        return Err(ClaspError::NotGeneric { tau, sigma, lo, hi });
    }
    let mut a_lo = 0.0_f64;
    let mut a_hi = (tau / 2.0).asin();
    for _ in 0..200 {
        let mid = 0.5 * (a_lo + a_hi);
        if sigma_of_alpha(tau, mid) < sigma {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
    }
    let alpha = 0.5 * (a_lo + a_hi);
    if (sigma_of_alpha(tau, alpha) - sigma).abs() > 1e-13 {
        return Err(ClaspError::Inconsistent(format!(
            "bisection for α did not reach 1e-13 (off by {})",
            (sigma_of_alpha(tau, alpha) - sigma).abs()
        )));
    }
    let sin_a = alpha.sin();
    let sin_b = tau - sin_a;
    let beta = sin_b.asin();
    let sin_g = sin_a * sin_b;
    let gamma = sin_g.asin();
    let (cos_a, cos_b, cos_g) = (alpha.cos(), beta.cos(), gamma.cos());
    let b = (sin_b - cos_a * sin_b / cos_g) / cos_b;
    let a = (sin_a * cos_b / cos_g - sigma * sin_a) / cos_a;
    let params = GenericParams { alpha, beta, gamma, a, b };
    let residuals = [
        sin_a + sin_b - tau,
        sin_g - sin_a * sin_b,
        b / sin_b - a * sin_a - sigma * (1.0 - cos_a),
        b * cos_b - sin_b + cos_a * sin_b / cos_g,
        a * cos_a - sin_a * cos_b / cos_g + sigma * sin_a,
    ];
    for (i, r) in residuals.iter().enumerate() {
        if r.abs() > 1e-10 {
            return Err(ClaspError::Inconsistent(format!(
                "clasp system equation {i} residual {r}"
            )));
        }
    }
    // Cross-check a against the factored closed form.
    let a_alt = alpha.tan() * cos_b * (cos_a * (1.0 - cos_g)) / (cos_g * (cos_g + cos_a));
    if (a - a_alt).abs() > 1e-10 {
        return Err(ClaspError::Inconsistent(format!(
            "segment length a = {a} disagrees with its factored form {a_alt}"
        )));
    }
    Ok(params)
}

/// Completion of a perpendicular-plane critical pair: any two of
/// (x₁, x₂, u₁, u₂) determine the other two at chord length ρ.
pub mod perp {
    /// Complete from the tangent sines (u₁, u₂).
    pub fn from_u(u1: f64, u2: f64, rho: f64) -> (f64, f64, f64) {
        let x1 = rho * u1 * (1.0 - u2 * u2).sqrt() / (1.0 - u1 * u1 * u2 * u2).sqrt();
        let x2 = rho * u2 * (1.0 - u1 * u1).sqrt() / (1.0 - u1 * u1 * u2 * u2).sqrt();
        let dz = if u1 > 0.0 {
            x1 / u1 * (1.0 - u1 * u1).sqrt()
        } else {
            rho * (1.0 - u2 * u2).sqrt() / (1.0 - u1 * u1 * u2 * u2).sqrt()
        };
        (x1, x2, dz)
    }

    /// Complete from the axis distances (x₁, x₂).
    pub fn from_x(x1: f64, x2: f64, rho: f64) -> (f64, f64, f64) {
        let u1 = (x1 * x1 / (rho * rho - x2 * x2)).sqrt();
        let u2 = (x2 * x2 / (rho * rho - x1 * x1)).sqrt();
        let dz = (rho * rho - x1 * x1 - x2 * x2).max(0.0).sqrt();
        (u1, u2, dz)
    }
}

/// Critical-pair distance between the straight segments of the
/// transitional construction; the curve is thick exactly when this is at
/// least 1 (or the pair falls off the physical segments).
pub fn transitional_segment_pair_distance(tau: f64, sigma: f64) -> f64 {
    (2.0 + sigma * (2.0 - (4.0 - tau * tau).sqrt())) / (tau * tau + 4.0).sqrt()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClaspParams {
    pub tau: f64,
    pub sigma: f64,
}

pub struct ClaspSolution {
    pub params: ClaspParams,
    /// τ actually used by Gehring-profile pieces (clamped to 1 − 1e−9).
    pub tau_effective: f64,
    pub regime: Regime,
    pub curve: Curve,
    pub generic: Option<GenericParams>,
    pub tip_gap: f64,
    pub excess_length: f64,
    /// Tips of the two components as (component, arclength).
    pub tips: [Loc; 2],
    pub ray_depth: f64,
    /// Strut measure certifying criticality.
    pub measure: StrutMeasure,
    /// Kink tension on the tip kink arcs (zero in the Gehring regime).
    pub phi: KinkTension,
    /// Arclengths of the arm pieces, from the tip outward.
    pub arm: ArmLayout,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArmLayout {
    pub kink: f64,
    pub seg_a: f64,
    pub gehring: f64,
    pub seg_b: f64,
    pub shoulder: f64,
    pub ray: f64,
}

impl ArmLayout {
    pub fn curved(&self) -> f64 {
        self.kink + self.seg_a + self.gehring + self.seg_b + self.shoulder
    }

    pub fn half(&self) -> f64 {
        self.curved() + self.ray
    }
}

/// Mirror across the yz-plane combined with traversal reversal; prepending
/// these to the unmirrored pieces keeps the concatenation C¹ through the
/// tip.
fn mirrored_reversed(seg: &Segment) -> Segment {
    let mx = |v: V3| V3::new(-v.x, v.y, v.z);
    match seg {
        Segment::Line { start, end } => Segment::Line { start: mx(*end), end: mx(*start) },
        Segment::Arc { center, radius, e1, e2, angle0, angle1 } => Segment::Arc {
            center: mx(*center),
            radius: *radius,
            e1: mx(*e1),
            e2: mx(*e2),
            angle0: *angle1,
            angle1: *angle0,
        },
        Segment::Profile(p) => {
            let crate::curve::profile::ProfileKind::Gehring { tau } = p.kind;
            let (end, _, _) = p.eval(p.length());
            let mut q =
                Profile::gehring(mx(end), p.e1, p.e2, tau, -p.theta1.sin(), -p.theta0.sin())
                    .expect("mirrored profile is valid");
            q.scale = p.scale;
            Segment::Profile(q)
        }
        Segment::Helix { .. } => unreachable!("clasps contain no helix pieces"),
    }
}

/// The 2*2 rotary reflection taking component 1 to component 2:
/// (x, y, z) ↦ (−y, x, 2 z_c − z).
fn rotary(seg: &Segment, zc: f64) -> Segment {
    let lin = |v: V3| V3::new(-v.y, v.x, -v.z);
    let aff = |v: V3| lin(v) + V3::new(0.0, 0.0, 2.0 * zc);
    match seg {
        Segment::Line { start, end } => Segment::Line { start: aff(*start), end: aff(*end) },
        Segment::Arc { center, radius, e1, e2, angle0, angle1 } => Segment::Arc {
            center: aff(*center),
            radius: *radius,
            e1: lin(*e1),
            e2: lin(*e2),
            angle0: *angle0,
            angle1: *angle1,
        },
        Segment::Profile(p) => {
            let crate::curve::profile::ProfileKind::Gehring { tau } = p.kind;
            let mut q = Profile::gehring(
                aff(p.origin),
                lin(p.e1),
                lin(p.e2),
                tau,
                p.theta0.sin(),
                p.theta1.sin(),
            )
            .expect("rotated profile is valid");
            q.scale = p.scale;
            Segment::Profile(q)
        }
        Segment::Helix { .. } => unreachable!("clasps contain no helix pieces"),
    }
}

/// Arcs in the construction sit at angle θ from the downward vertical:
/// point = center + r(sin θ x̂ − cos θ ẑ), tangent (cos θ, 0, sin θ).
fn radial(theta: f64) -> V3 {
    V3::new(theta.sin(), 0.0, -theta.cos())
}

fn tangent_at(theta: f64) -> V3 {
    V3::new(theta.cos(), 0.0, theta.sin())
}

/// Construct the (τ, σ)-clasp with terminal rays of length `depth`.
pub fn build_clasp(tau: f64, sigma: f64, depth: f64) -> Result<ClaspSolution, ClaspError> {
    let regime = classify_regime(tau, sigma)?;
    // The Gehring-regime arc reaches the singular tip u = 0 where the
    // curvature diverges as τ → 1, so that regime clamps τ away from 1.
    // The generic construction cuts the tip out (its arc starts at
    // u = sin α > 0) and is regular at τ = 1, as are the kinked and
    // transitional ones.
    let tau_effective = match regime {
        Regime::Gehring => tau.min(1.0 - 1e-13),
        _ => tau,
    };
    let t = tau_effective;
    let end_angle = t.asin();

    // Right half of component 1 (tip at the origin), listed tip → outward.
    let mut right: Vec<Segment> = Vec::new();
    let mut layout =
        ArmLayout { kink: 0.0, seg_a: 0.0, gehring: 0.0, seg_b: 0.0, shoulder: 0.0, ray: depth };
    let mut generic = None;

    let kink_half_angle = match regime {
        Regime::FullyKinked => end_angle,
        Regime::Transitional => (t / 2.0).asin(),
        Regime::Generic => {
            let p = solve_generic(t, sigma)?;
            generic = Some(p);
            p.alpha
        }
        Regime::Gehring => 0.0,
    };
    let mut cursor = V3::zeros();
    let mut cursor_angle = 0.0;
    if kink_half_angle > 0.0 {
        let kink = Segment::Arc {
            center: V3::new(0.0, 0.0, sigma),
            radius: sigma,
            e1: -V3::z(),
            e2: V3::x(),
            angle0: 0.0,
            angle1: kink_half_angle,
        };
        layout.kink = kink.length();
        cursor = kink.eval(kink.length()).0;
        cursor_angle = kink_half_angle;
        right.push(kink);
    }

    // Boundary cases can shrink a segment below float resolution; a line
    // that short would lose its direction to cancellation, so it is
    // dropped (the next piece continues from the cursor, keeping the
    // concatenation exactly C¹; the geometric change is below 1e−7).
    let push_line = |right: &mut Vec<Segment>, cursor: &mut V3, angle: f64, len: f64| -> f64 {
        if len > 1e-7 {
            let end = *cursor + len * tangent_at(angle);
            right.push(Segment::Line { start: *cursor, end });
            *cursor = end;
            len
        } else {
            0.0
        }
    };
    let push_shoulder = |right: &mut Vec<Segment>,
                         cursor: &mut V3,
                         from_angle: f64,
                         to_angle: f64|
     -> f64 {
        let c4 = *cursor - radial(from_angle);
        let shoulder = Segment::Arc {
            center: c4,
            radius: 1.0,
            e1: -V3::z(),
            e2: V3::x(),
            angle0: from_angle,
            angle1: to_angle,
        };
        let len = shoulder.length();
        *cursor = shoulder.eval(len).0;
        right.push(shoulder);
        len
    };

    match regime {
        Regime::FullyKinked => {}
        Regime::Transitional => {
            let seg_len = t * (1.0 - sigma) / (4.0 - t * t).sqrt();
            layout.seg_a = push_line(&mut right, &mut cursor, cursor_angle, seg_len);
            layout.shoulder = push_shoulder(&mut right, &mut cursor, cursor_angle, end_angle);
            cursor_angle = end_angle;
        }
        Regime::Generic => {
            let p = generic.unwrap();
            layout.seg_a = push_line(&mut right, &mut cursor, cursor_angle, p.a);
            let geh = Profile::gehring(cursor, V3::x(), V3::z(), t, p.alpha.sin(), p.beta.sin())?;
            layout.gehring = geh.length();
            cursor = geh.eval(geh.length()).0;
            cursor_angle = p.beta;
            right.push(Segment::Profile(geh));
            layout.seg_b = push_line(&mut right, &mut cursor, cursor_angle, p.b);
            layout.shoulder = push_shoulder(&mut right, &mut cursor, cursor_angle, end_angle);
            cursor_angle = end_angle;
        }
        Regime::Gehring => {
            let geh = Profile::gehring(V3::zeros(), V3::x(), V3::z(), t, 0.0, t)?;
            layout.gehring = geh.length();
            cursor = geh.eval(geh.length()).0;
            cursor_angle = end_angle;
            right.push(Segment::Profile(geh));
        }
    }

    let ray_dir = tangent_at(cursor_angle);
    let ray_start = cursor;
    right.push(Segment::Line { start: ray_start, end: ray_start + depth * ray_dir });

    // Tip of the second component.
    let gap = match regime {
        Regime::FullyKinked => 1.0,
        Regime::Transitional | Regime::Generic => {
            let shoulder_center = ray_start - radial(end_angle);
            if shoulder_center.x.abs() > 1e-9 {
                return Err(ClaspError::Inconsistent(format!(
                    "shoulder center off the axis by {}",
                    shoulder_center.x
                )));
            }
            shoulder_center.z
        }
        // z-normalization: the arc end is at unit distance from the other
        // tip, so gap = √(1−τ²) + z(arc end).
        Regime::Gehring => (1.0 - t * t).sqrt() + ray_start.z,
    };

    // Component 1 = mirrored-reversed pieces, then the right half.
    let mut segments: Vec<Segment> = right.iter().rev().map(mirrored_reversed).collect();
    segments.extend(right.iter().cloned());

    let ep = |seg: &Segment, at_start: bool| {
        let (p, t, _) = if at_start { seg.eval(0.0) } else { seg.eval(seg.length()) };
        EndpointConstraint {
            h0: PositionConstraint::plane_with_normal(p, t),
            h1: TangentConstraint::Fixed(t),
        }
    };
    let endpoints = (ep(&segments[0], true), ep(segments.last().unwrap(), false));
    let comp1 = Component::open(segments.clone(), Some(endpoints.clone()));

    let zc = 0.5 * gap;
    let segments2: Vec<Segment> = segments.iter().map(|s| rotary(s, zc)).collect();
    let comp2 = Component::open(
        segments2,
        Some((rotate_endpoint(&endpoints.0, zc), rotate_endpoint(&endpoints.1, zc))),
    );

    let curve = Curve::new(vec![comp1, comp2])
        .map_err(|e| ClaspError::Inconsistent(format!("curve construction: {e}")))?;
    let c1_report = curve.validate_c1();
    if !c1_report.ok() {
        return Err(ClaspError::Inconsistent(format!(
            "clasp is not C¹: {:?}",
            c1_report.violations
        )));
    }

    let half = layout.half();
    let tips = [Loc { comp: 0, s: half }, Loc { comp: 1, s: half }];

    // Excess length, checked at two truncation depths.
    let excess_at = |d: f64| {
        let center = V3::new(0.0, 0.0, zc);
        let arm = layout.curved() + (d - (ray_start - center).dot(&ray_dir));
        4.0 * (arm - d)
    };
    let excess = excess_at(10.0);
    if (excess - excess_at(20.0)).abs() > 1e-10 {
        return Err(ClaspError::Inconsistent(
            "excess length not truncation-independent".into(),
        ));
    }

    let (measure, phi) = attach_certificate(&curve, regime, t, sigma, &layout);

    Ok(ClaspSolution {
        params: ClaspParams { tau, sigma },
        tau_effective: t,
        regime,
        curve,
        generic,
        tip_gap: gap,
        excess_length: excess,
        tips,
        ray_depth: depth,
        measure,
        phi,
        arm: layout,
    })
}

fn rotate_endpoint(e: &EndpointConstraint, zc: f64) -> EndpointConstraint {
    let lin = |v: V3| V3::new(-v.y, v.x, -v.z);
    let aff = |v: V3| lin(v) + V3::new(0.0, 0.0, 2.0 * zc);
    EndpointConstraint {
        h0: PositionConstraint {
            point: aff(e.h0.point),
            basis: e.h0.basis.iter().map(|b| lin(*b)).collect(),
        },
        h1: match &e.h1 {
            TangentConstraint::Fixed(t) => TangentConstraint::Fixed(lin(*t)),
            TangentConstraint::Free => TangentConstraint::Free,
        },
    }
}

/// Strut measure and kink tension certifying the construction: a tip atom
/// of weight τ in the kinked regime, shoulder-to-tip families of density
/// 1/2, Gehring conjugate families of density κ/(4‖in-plane chord‖), and
/// the tip-kink tension φ(ω) = 1 − cos(Θ − |ω|).
fn attach_certificate(
    curve: &Curve,
    regime: Regime,
    tau: f64,
    sigma: f64,
    layout: &ArmLayout,
) -> (StrutMeasure, KinkTension) {
    let half = layout.half();
    let mut measure = StrutMeasure::default();

    let phi = if layout.kink > 0.0 {
        let theta = layout.kink / sigma;
        let s_lo = half - layout.kink;
        let s_hi = half + layout.kink;
        let sg = sigma;
        KinkTension::Analytic(Box::new(move |_, s: f64| {
            if s < s_lo || s > s_hi {
                return (0.0, 0.0);
            }
            let omega = (s - 0.5 * (s_lo + s_hi)) / sg;
            let phi = 1.0 - (theta - omega.abs()).cos();
            let dphi = -omega.signum() * (theta - omega.abs()).sin() / sg;
            (phi, dphi)
        }))
    } else {
        KinkTension::Zero
    };

    match regime {
        Regime::FullyKinked => {
            measure.atoms.push(StrutAtom {
                x: Loc { comp: 0, s: half },
                y: Loc { comp: 1, s: half },
                weight: tau,
            });
        }
        Regime::Transitional => {
            add_shoulder_families(&mut measure, layout, half);
        }
        Regime::Generic => {
            add_shoulder_families(&mut measure, layout, half);
            add_gehring_families(&mut measure, curve, layout, half, tau);
        }
        Regime::Gehring => {
            add_gehring_families(&mut measure, curve, layout, half, tau);
        }
    }
    (measure, phi)
}

/// Shoulder arcs bear unit struts to the tip of the other component;
/// density 1/2 per unordered pair gives force density −κ on the
/// unit-radius shoulder.
fn add_shoulder_families(measure: &mut StrutMeasure, layout: &ArmLayout, half: f64) {
    let inner = layout.kink + layout.seg_a + layout.gehring + layout.seg_b;
    for comp in 0..2 {
        let other_tip = Loc { comp: 1 - comp, s: half };
        for side in [-1.0_f64, 1.0] {
            let a = half + side * inner;
            let b = half + side * (inner + layout.shoulder);
            let (s0, s1) = if side > 0.0 { (a, b) } else { (b, a) };
            measure.families.push(StrutFamilyDensity {
                comp,
                s0,
                s1,
                partner: Box::new(move |_| other_tip),
                density: Box::new(|_| 0.5),
            });
        }
    }
}

/// Gehring conjugate families: each point u on a Gehring piece of
/// component 1 is joined by unit struts to the two conjugate points at
/// u* = τ − u on component 2; hosting all four families on component 1
/// covers component 2 through the reactions.
fn add_gehring_families(
    measure: &mut StrutMeasure,
    curve: &Curve,
    layout: &ArmLayout,
    half: f64,
    tau: f64,
) {
    let inner = layout.kink + layout.seg_a;
    let geh_len = layout.gehring;
    if geh_len <= 0.0 {
        return;
    }
    let profile = curve.components[0]
        .segments
        .iter()
        .find_map(|seg| match seg {
            Segment::Profile(p) if p.theta0 >= -1e-12 => Some(p.clone()),
            _ => None,
        })
        .expect("component 1 carries the right-half Gehring piece");

    for host_side in [1.0_f64, -1.0] {
        for partner_side in [1.0_f64, -1.0] {
            let a = half + host_side * inner;
            let b = half + host_side * (inner + geh_len);
            let (s0, s1) = if host_side > 0.0 { (a, b) } else { (b, a) };
            let prof_theta = profile.clone();
            let prof_arc = profile.clone();
            let partner = move |s: f64| {
                let from_tip = (s - half) * host_side;
                let into_geh = (from_tip - inner).clamp(0.0, geh_len);
                let u = prof_theta.theta_at(into_geh).sin();
                let u_star = (tau - u).clamp(0.0, 1.0);
                let s_partner = inner + prof_arc.arclength_of(u_star.asin());
                Loc { comp: 1, s: half + partner_side * s_partner }
            };
            let partner_for_density = {
                let prof_theta = profile.clone();
                let prof_arc = profile.clone();
                move |s: f64| {
                    let from_tip = (s - half) * host_side;
                    let into_geh = (from_tip - inner).clamp(0.0, geh_len);
                    let u = prof_theta.theta_at(into_geh).sin();
                    let u_star = (tau - u).clamp(0.0, 1.0);
                    let s_partner = inner + prof_arc.arclength_of(u_star.asin());
                    Loc { comp: 1, s: half + partner_side * s_partner }
                }
            };
            let curve_ref = curve.clone();
            let density = move |s: f64| {
                let p = curve_ref.eval_at(0, s).expect("host location valid");
                let q_loc = partner_for_density(s);
                let q = curve_ref.eval_at(q_loc.comp, q_loc.s).expect("partner valid");
                let chord = p.position - q.position;
                let in_plane = V3::new(chord.x, 0.0, chord.z);
                p.curvature.norm() / (4.0 * in_plane.norm())
            };
            measure.families.push(StrutFamilyDensity {
                comp: 0,
                s0,
                s1,
                partner: Box::new(partner),
                density: Box::new(density),
            });
        }
    }
}

impl ClaspSolution {
    pub fn summary_json(&self, ts: Option<f64>) -> serde_json::Value {
        #[derive(Serialize)]
        struct Summary {
            tau: f64,
            sigma: f64,
            regime: Regime,
            alpha: Option<f64>,
            beta: Option<f64>,
            gamma: Option<f64>,
            a: Option<f64>,
            b: Option<f64>,
            excess_length: f64,
            tip_gap: f64,
            ts: Option<f64>,
        }
        serde_json::to_value(Summary {
            tau: self.params.tau,
            sigma: self.params.sigma,
            regime: self.regime,
            alpha: self.generic.map(|g| g.alpha),
            beta: self.generic.map(|g| g.beta),
            gamma: self.generic.map(|g| g.gamma),
            a: self.generic.map(|g| g.a),
            b: self.generic.map(|g| g.b),
            excess_length: self.excess_length,
            tip_gap: self.tip_gap,
            ts,
        })
        .expect("summary serializes")
    }
}

/// Closed-form excess length of the fully kinked clasp:
/// 4(σ·arcsin τ − τ(σ − 1/2)).
pub fn kinked_excess(tau: f64, sigma: f64) -> f64 {
    4.0 * (sigma * tau.asin() - tau * (sigma - 0.5))
}
