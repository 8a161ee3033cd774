//! Piecewise-analytic space curves: lines, circular arcs, tangent-angle
//! curvature profiles and helices, joined C¹ into components with optional
//! endpoint constraints.
//!
//! Arclength is the parameter everywhere. At segment junctions the curvature
//! vector may jump; evaluation returns the one-sided data of the later
//! segment, and the two-sided values are available separately.

pub mod json;
pub mod profile;

use nalgebra::Vector3;

use crate::JUNCTION_TOL;
use profile::Profile;

pub type V3 = Vector3<f64>;

/// Point data on a curve: position, unit tangent, curvature vector, and
/// where it came from.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub position: V3,
    pub tangent: V3,
    /// Curvature vector κ = T′ (normal to T; may jump at junctions).
    pub curvature: V3,
    pub s: f64,
    pub component: usize,
    pub segment: usize,
}

#[derive(Debug, Clone)]
pub enum Segment {
    Line {
        start: V3,
        end: V3,
    },
    /// Circular arc `center + radius (cos θ e1 + sin θ e2)` traversed from
    /// `angle0` to `angle1` (either direction, nonempty).
    Arc {
        center: V3,
        radius: f64,
        e1: V3,
        e2: V3,
        angle0: f64,
        angle1: f64,
    },
    /// Planar arc parametrized by tangent angle with a strictly positive
    /// curvature profile; see [`profile::Profile`].
    Profile(Profile),
    /// Circular helix `origin + radius(cos t e1 + sin t e2) + pitch·t·axis`,
    /// `t` from `t0` to `t1`. `pitch` is the rise per radian.
    Helix {
        origin: V3,
        axis: V3,
        radius: f64,
        pitch: f64,
        e1: V3,
        e2: V3,
        t0: f64,
        t1: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CurveError {
    #[error("segment {index} in component {component} is degenerate: {reason}")]
    BadSegment {
        component: usize,
        index: usize,
        reason: String,
    },
    #[error("component {0} has no segments")]
    EmptyComponent(usize),
    #[error("curve has no components")]
    Empty,
    #[error("arclength {s} out of range [0, {len}] for component {component}")]
    OutOfRange { component: usize, s: f64, len: f64 },
    #[error("unknown component index {0}")]
    UnknownComponent(usize),
    #[error("profile arc construction failed: {0}")]
    Profile(#[from] crate::quad::QuadError),
}

impl Segment {
    pub fn length(&self) -> f64 {
        match self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc { radius, angle0, angle1, .. } => radius * (angle1 - angle0).abs(),
            Segment::Profile(p) => p.length(),
            Segment::Helix { radius, pitch, t0, t1, .. } => {
                (radius * radius + pitch * pitch).sqrt() * (t1 - t0).abs()
            }
        }
    }

    /// Position, tangent and curvature vector at arclength `s ∈ [0, length]`.
    pub fn eval(&self, s: f64) -> (V3, V3, V3) {
        match self {
            Segment::Line { start, end } => {
                let t = (end - start).normalize();
                (start + t * s, t, V3::zeros())
            }
            Segment::Arc { center, radius, e1, e2, angle0, angle1 } => {
                let dir = (angle1 - angle0).signum();
                let theta = angle0 + dir * s / radius;
                let radial = theta.cos() * e1 + theta.sin() * e2;
                let tangent = dir * (-theta.sin() * e1 + theta.cos() * e2);
                (center + *radius * radial, tangent, -radial / *radius)
            }
            Segment::Profile(p) => p.eval(s),
            Segment::Helix { origin, axis, radius, pitch, e1, e2, t0, t1 } => {
                let speed = (radius * radius + pitch * pitch).sqrt();
                let dir = (t1 - t0).signum();
                let t = t0 + dir * s / speed;
                let radial = t.cos() * e1 + t.sin() * e2;
                let dradial = -t.sin() * e1 + t.cos() * e2;
                let pos = origin + *radius * radial + *pitch * t * axis;
                let tangent = dir * (*radius * dradial + *pitch * axis) / speed;
                let curvature = -(*radius / (speed * speed)) * radial;
                (pos, tangent, curvature)
            }
        }
    }

    /// Arclength derivative of the unit principal normal at `s` (zero for
    /// lines, where the normal is undefined).
    pub fn normal_derivative(&self, s: f64) -> V3 {
        match self {
            Segment::Line { .. } => V3::zeros(),
            Segment::Arc { radius, angle0, angle1, e1, e2, .. } => {
                let dir = (angle1 - angle0).signum();
                let theta = angle0 + dir * s / radius;
                let tangent = dir * (-theta.sin() * e1 + theta.cos() * e2);
                -tangent / *radius
            }
            Segment::Profile(p) => {
                let theta = p.theta_at(s);
                let tangent = theta.cos() * p.e1 + theta.sin() * p.e2;
                -p.kind.kappa(theta) / p.scale * tangent
            }
            Segment::Helix { radius, pitch, e1, e2, t0, t1, .. } => {
                let speed = (radius * radius + pitch * pitch).sqrt();
                let dir = (t1 - t0).signum();
                let t = t0 + dir * s / speed;
                let dradial = -t.sin() * e1 + t.cos() * e2;
                -dradial * dir / speed
            }
        }
    }

    /// Largest curvature magnitude attained on the segment.
    pub fn max_curvature(&self) -> f64 {
        match self {
            Segment::Line { .. } => 0.0,
            Segment::Arc { radius, .. } => 1.0 / radius,
            Segment::Profile(p) => p.max_curvature(),
            Segment::Helix { radius, pitch, .. } => radius / (radius * radius + pitch * pitch),
        }
    }

    fn check(&self, component: usize, index: usize) -> Result<(), CurveError> {
        let bad = |reason: &str| CurveError::BadSegment {
            component,
            index,
            reason: reason.to_string(),
        };
        match self {
            Segment::Line { start, end } => {
                if (end - start).norm() <= 0.0 {
                    return Err(bad("line has zero length"));
                }
            }
            Segment::Arc { radius, e1, e2, angle0, angle1, .. } => {
                if !(*radius > 0.0) {
                    return Err(bad("arc radius must be positive"));
                }
                if angle0 == angle1 {
                    return Err(bad("arc angle interval is empty"));
                }
                if (e1.norm() - 1.0).abs() > 1e-9
                    || (e2.norm() - 1.0).abs() > 1e-9
                    || e1.dot(e2).abs() > 1e-9
                {
                    return Err(bad("arc plane basis is not orthonormal"));
                }
            }
            Segment::Profile(p) => p.check().map_err(|reason| bad(&reason))?,
            Segment::Helix { axis, radius, e1, e2, t0, t1, .. } => {
                if !(*radius > 0.0) {
                    return Err(bad("helix radius must be positive"));
                }
                if t0 == t1 {
                    return Err(bad("helix parameter interval is empty"));
                }
                for (v, name) in [(axis, "axis"), (e1, "e1"), (e2, "e2")] {
                    if (v.norm() - 1.0).abs() > 1e-9 {
                        return Err(bad(&format!("helix {name} is not unit")));
                    }
                }
                if e1.dot(e2).abs() > 1e-9 || e1.dot(axis).abs() > 1e-9 || e2.dot(axis).abs() > 1e-9
                {
                    return Err(bad("helix frame is not orthonormal"));
                }
            }
        }
        Ok(())
    }
}

/// Position constraint H⁰ at an endpoint: an affine subspace of dimension
/// 0 (point), 1 (line) or 2 (plane), given by a base point and a basis of
/// its direction space.
#[derive(Debug, Clone)]
pub struct PositionConstraint {
    pub point: V3,
    pub basis: Vec<V3>,
}

impl PositionConstraint {
    pub fn point(p: V3) -> Self {
        Self { point: p, basis: vec![] }
    }

    pub fn plane(p: V3, u: V3, v: V3) -> Self {
        Self { point: p, basis: vec![u.normalize(), v.normalize()] }
    }

    /// Plane through `p` with normal `n`.
    pub fn plane_with_normal(p: V3, n: V3) -> Self {
        let n = n.normalize();
        let a = if n.x.abs() < 0.9 { V3::x() } else { V3::y() };
        let u = n.cross(&a).normalize();
        let v = n.cross(&u);
        Self { point: p, basis: vec![u, v] }
    }

    /// Projection of `v` onto the direction space of H⁰.
    pub fn project(&self, v: V3) -> V3 {
        self.basis.iter().map(|b| b.dot(&v) * b).sum()
    }
}

#[derive(Debug, Clone)]
pub enum TangentConstraint {
    Fixed(V3),
    Free,
}

#[derive(Debug, Clone)]
pub struct EndpointConstraint {
    pub h0: PositionConstraint,
    pub h1: TangentConstraint,
}

#[derive(Debug, Clone)]
pub struct Component {
    pub segments: Vec<Segment>,
    pub closed: bool,
    /// Constraints at (start, end), for open components.
    pub endpoints: Option<(EndpointConstraint, EndpointConstraint)>,
    cum_len: Vec<f64>,
}

impl Component {
    pub fn open(
        segments: Vec<Segment>,
        endpoints: Option<(EndpointConstraint, EndpointConstraint)>,
    ) -> Self {
        let cum_len = cumulative(&segments);
        Self { segments, closed: false, endpoints, cum_len }
    }

    pub fn closed(segments: Vec<Segment>) -> Self {
        let cum_len = cumulative(&segments);
        Self { segments, closed: true, endpoints: None, cum_len }
    }

    pub fn length(&self) -> f64 {
        *self.cum_len.last().unwrap_or(&0.0)
    }

    /// Arclengths of the interior segment junctions (and, for closed
    /// components, the seam at s = 0).
    pub fn junctions(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.cum_len[..self.cum_len.len() - 1].to_vec();
        if !self.closed {
            out.retain(|&s| s > 0.0);
        }
        out
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        // Later segment at exact junctions: first segment whose end exceeds s.
        let n = self.segments.len();
        let mut lo = 0usize;
        for i in 0..n {
            if self.cum_len[i + 1] > s {
                lo = i;
                break;
            }
            lo = n - 1;
        }
        (lo, s - self.cum_len[lo])
    }

    pub fn eval(&self, s: f64) -> (V3, V3, V3, usize) {
        let (i, local) = self.locate(s);
        let (p, t, k) = self.segments[i].eval(local.clamp(0.0, self.segments[i].length()));
        (p, t, k, i)
    }

    pub fn normal_derivative(&self, s: f64) -> V3 {
        let (i, local) = self.locate(s);
        self.segments[i].normal_derivative(local.clamp(0.0, self.segments[i].length()))
    }

    /// One-sided curvature vectors (κ⁻, κ⁺) at arclength `s`.
    pub fn curvature_two_sided(&self, s: f64) -> (V3, V3) {
        let len = self.length();
        let plus = {
            let (_, _, k, _) = self.eval(if self.closed && s >= len { 0.0 } else { s });
            k
        };
        let minus = {
            let sm = if s <= 0.0 {
                if self.closed {
                    len
                } else {
                    0.0
                }
            } else {
                s
            };
            // Evaluate on the earlier segment by backing off the junction.
            let (i, local) = self.locate(sm - 1e-13 * len.max(1.0));
            let seg = &self.segments[i];
            let (_, _, k) = seg.eval((local).clamp(0.0, seg.length()));
            k
        };
        (minus, plus)
    }
}

fn cumulative(segments: &[Segment]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(segments.len() + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for seg in segments {
        acc += seg.length();
        cum.push(acc);
    }
    cum
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub components: Vec<Component>,
}

/// One C¹ violation found by [`Curve::validate_c1`].
#[derive(Debug, Clone)]
pub struct JunctionViolation {
    pub component: usize,
    /// Index of the junction (between segment `i` and `i+1`; the closing
    /// junction of a closed component reports `i = segments.len()-1`).
    pub junction: usize,
    pub position_gap: f64,
    pub tangent_gap: f64,
}

#[derive(Debug, Clone, Default)]
pub struct C1Report {
    pub violations: Vec<JunctionViolation>,
}

impl C1Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Curve {
    pub fn new(components: Vec<Component>) -> Result<Self, CurveError> {
        if components.is_empty() {
            return Err(CurveError::Empty);
        }
        for (ci, comp) in components.iter().enumerate() {
            if comp.segments.is_empty() {
                return Err(CurveError::EmptyComponent(ci));
            }
            for (si, seg) in comp.segments.iter().enumerate() {
                seg.check(ci, si)?;
            }
        }
        Ok(Self { components })
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(|c| c.length()).sum()
    }

    pub fn eval_at(&self, component: usize, s: f64) -> Result<CurvePoint, CurveError> {
        let comp = self
            .components
            .get(component)
            .ok_or(CurveError::UnknownComponent(component))?;
        let len = comp.length();
        if !(0.0..=len * (1.0 + 1e-12)).contains(&s) {
            return Err(CurveError::OutOfRange { component, s, len });
        }
        let (position, tangent, curvature, segment) = comp.eval(s.min(len));
        Ok(CurvePoint { position, tangent, curvature, s, component, segment })
    }

    /// Check position and tangent continuity at every junction.
    pub fn validate_c1(&self) -> C1Report {
        let mut report = C1Report::default();
        for (ci, comp) in self.components.iter().enumerate() {
            let n = comp.segments.len();
            let pairs: Vec<(usize, usize)> = if comp.closed {
                (0..n).map(|i| (i, (i + 1) % n)).collect()
            } else {
                (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()
            };
            for (i, j) in pairs {
                let a = &comp.segments[i];
                let b = &comp.segments[j];
                let (pa, ta, _) = a.eval(a.length());
                let (pb, tb, _) = b.eval(0.0);
                let position_gap = (pa - pb).norm();
                let tangent_gap = (ta - tb).norm();
                if position_gap > JUNCTION_TOL || tangent_gap > JUNCTION_TOL {
                    report.violations.push(JunctionViolation {
                        component: ci,
                        junction: i,
                        position_gap,
                        tangent_gap,
                    });
                }
            }
        }
        report
    }

    /// Similarity copy of the whole curve: all positions multiply by
    /// `factor` (curvatures divide, lengths multiply).
    pub fn scaled(&self, factor: f64) -> Curve {
        assert!(factor > 0.0, "scale factor must be positive");
        let components = self
            .components
            .iter()
            .map(|c| {
                let segments = c
                    .segments
                    .iter()
                    .map(|s| match s {
                        Segment::Line { start, end } => {
                            Segment::Line { start: start * factor, end: end * factor }
                        }
                        Segment::Arc { center, radius, e1, e2, angle0, angle1 } => Segment::Arc {
                            center: center * factor,
                            radius: radius * factor,
                            e1: *e1,
                            e2: *e2,
                            angle0: *angle0,
                            angle1: *angle1,
                        },
                        Segment::Profile(p) => Segment::Profile(p.scaled(factor)),
                        Segment::Helix { origin, axis, radius, pitch, e1, e2, t0, t1 } => {
                            Segment::Helix {
                                origin: origin * factor,
                                axis: *axis,
                                radius: radius * factor,
                                pitch: pitch * factor,
                                e1: *e1,
                                e2: *e2,
                                t0: *t0,
                                t1: *t1,
                            }
                        }
                    })
                    .collect();
                let endpoints = c.endpoints.as_ref().map(|(a, b)| {
                    let scale_ep = |e: &EndpointConstraint| EndpointConstraint {
                        h0: PositionConstraint {
                            point: e.h0.point * factor,
                            basis: e.h0.basis.clone(),
                        },
                        h1: e.h1.clone(),
                    };
                    (scale_ep(a), scale_ep(b))
                });
                if c.closed {
                    Component::closed(segments)
                } else {
                    Component::open(segments, endpoints)
                }
            })
            .collect();
        Curve { components }
    }

    /// Largest curvature magnitude over the whole curve.
    pub fn sup_curvature(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.segments.iter())
            .map(|s| s.max_curvature())
            .fold(0.0, f64::max)
    }

    /// Smallest pairwise distance between samples of distinct components.
    pub fn min_component_separation(&self, n: usize) -> f64 {
        let pts: Vec<Vec<V3>> = self
            .components
            .iter()
            .map(|c| {
                let len = c.length();
                (0..n)
                    .map(|i| c.eval(len * i as f64 / (n - 1).max(1) as f64).0)
                    .collect()
            })
            .collect();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for a in &pts[i] {
                    for b in &pts[j] {
                        best = best.min((a - b).norm());
                    }
                }
            }
        }
        best
    }
}
