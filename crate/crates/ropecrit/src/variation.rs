//! First variations of length, circle radius and σ-thickness under
//! deformation fields, with endpoint-compatibility checks.
//!
//! δ length = ∫⟨ξ′, T⟩ ds, δR = 2R⟨ξ′,T⟩ − R³⟨ξ″,κ⟩, and δTs is the
//! minimum of the strut chord-length derivatives and the kink radius
//! derivatives (a right derivative, by the min-function structure).

use nalgebra::Matrix3;

use crate::curve::{CurvePoint, TangentConstraint, V3};
use crate::geom::{CurveGeom, SampledCurve, SampledNode, Sampling};
use crate::quad;
use crate::thickness::{Kink, ThicknessReport};

/// ξ, D ξ and D²ξ supplied as callables.
pub struct AnalyticField {
    pub xi: Box<dyn Fn(V3) -> V3 + Sync>,
    /// v ↦ D_xξ(v).
    pub d: Box<dyn Fn(V3, V3) -> V3 + Sync>,
    /// (u, v) ↦ D²_xξ(u, v).
    pub d2: Box<dyn Fn(V3, V3, V3) -> V3 + Sync>,
}

/// ξ and its first two arclength derivatives at nodes along the curve.
pub struct SampledField {
    /// Per component, sorted by arclength: (s, ξ, ξ′, ξ″).
    pub nodes: Vec<Vec<(f64, V3, V3, V3)>>,
}

pub enum DeformationField {
    Affine {
        translation: V3,
        /// Antisymmetric generator; the field contribution is `rotation·x`.
        rotation: Matrix3<f64>,
        scaling: f64,
    },
    Analytic(AnalyticField),
    Sampled(SampledField),
}

impl DeformationField {
    pub fn translation(v: V3) -> Self {
        Self::Affine { translation: v, rotation: Matrix3::zeros(), scaling: 0.0 }
    }

    /// Infinitesimal rotation about `axis` (through the origin).
    pub fn rotation(axis: V3) -> Self {
        let a = axis;
        let gen = Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0);
        Self::Affine { translation: V3::zeros(), rotation: gen, scaling: 0.0 }
    }

    /// The Euler field ξ(x) = x generating homotheties.
    pub fn euler() -> Self {
        Self::Affine { translation: V3::zeros(), rotation: Matrix3::zeros(), scaling: 1.0 }
    }

    pub fn value(&self, x: V3) -> V3 {
        match self {
            Self::Affine { translation, rotation, scaling } => {
                translation + rotation * x + *scaling * x
            }
            Self::Analytic(f) => (f.xi)(x),
            Self::Sampled(_) => panic!("sampled fields are only defined along their curve"),
        }
    }

    pub fn derivative(&self, x: V3, v: V3) -> V3 {
        match self {
            Self::Affine { rotation, scaling, .. } => rotation * v + *scaling * v,
            Self::Analytic(f) => (f.d)(x, v),
            Self::Sampled(_) => panic!("sampled fields are only defined along their curve"),
        }
    }

    pub fn second_derivative(&self, x: V3, u: V3, v: V3) -> V3 {
        match self {
            Self::Affine { .. } => V3::zeros(),
            Self::Analytic(f) => (f.d2)(x, u, v),
            Self::Sampled(_) => panic!("sampled fields are only defined along their curve"),
        }
    }

    fn sampled_lookup(&self, comp: usize, s: f64) -> Option<(V3, V3, V3)> {
        let Self::Sampled(f) = self else { return None };
        let nodes = &f.nodes[comp];
        let idx = match nodes.binary_search_by(|n| n.0.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
        .min(nodes.len().saturating_sub(2));
        let (s0, a, da, dda) = nodes[idx];
        let (s1, b, db, ddb) = nodes[idx + 1];
        let t = ((s - s0) / (s1 - s0).max(1e-300)).clamp(0.0, 1.0);
        Some((a + t * (b - a), da + t * (db - da), dda + t * (ddb - dda)))
    }

    /// ξ at a curve point.
    pub fn at(&self, p: &CurvePoint) -> V3 {
        match self {
            Self::Sampled(_) => self.sampled_lookup(p.component, p.s).unwrap().0,
            _ => self.value(p.position),
        }
    }

    /// Arclength derivative ξ′ = D_xξ(T) at a curve point.
    pub fn prime(&self, p: &CurvePoint) -> V3 {
        match self {
            Self::Sampled(_) => self.sampled_lookup(p.component, p.s).unwrap().1,
            _ => self.derivative(p.position, p.tangent),
        }
    }

    /// Second arclength derivative ξ″ = D²ξ(T,T) + D ξ(κ) at a curve point.
    pub fn second(&self, p: &CurvePoint) -> V3 {
        match self {
            Self::Sampled(_) => self.sampled_lookup(p.component, p.s).unwrap().2,
            _ => {
                self.second_derivative(p.position, p.tangent, p.tangent)
                    + self.derivative(p.position, p.curvature)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompatibilityViolation {
    pub component: usize,
    pub end: usize,
    pub description: String,
    pub magnitude: f64,
}

/// Check that ξ is tangent to every H⁰ₚ and ξ′(p) ∈ H¹ₚ.
pub fn check_compatible(
    geom: &dyn CurveGeom,
    field: &DeformationField,
) -> (bool, Vec<CompatibilityViolation>) {
    const TOL: f64 = 1e-9;
    let mut violations = Vec::new();
    for comp in 0..geom.component_count() {
        let Some((start, end)) = geom.endpoint_constraints(comp) else { continue };
        let len = geom.component_length(comp);
        for (which, (constraint, s)) in [(start, 0.0), (end, len)].iter().enumerate() {
            let p = geom.eval(comp, *s);
            let v = field.at(&p);
            let h0_res = (v - constraint.h0.project(v)).norm();
            if h0_res > TOL {
                violations.push(CompatibilityViolation {
                    component: comp,
                    end: which,
                    description: "ξ(p) not tangent to H⁰".into(),
                    magnitude: h0_res,
                });
            }
            if let TangentConstraint::Fixed(t) = &constraint.h1 {
                let t = t.normalize();
                let dp = field.prime(&p);
                let h1_res = (dp - t * t.dot(&dp)).norm();
                if h1_res > TOL {
                    violations.push(CompatibilityViolation {
                        component: comp,
                        end: which,
                        description: "ξ′(p) not in H¹".into(),
                        magnitude: h1_res,
                    });
                }
            }
        }
    }
    (violations.is_empty(), violations)
}

/// δ_ξ length = ∫ ⟨ξ′, T⟩ ds, junction-aware.
pub fn delta_length(geom: &dyn CurveGeom, field: &DeformationField) -> f64 {
    match field {
        DeformationField::Sampled(f) => {
            let mut acc = 0.0;
            for (comp, nodes) in f.nodes.iter().enumerate() {
                for w in nodes.windows(2) {
                    let (s0, _, d0, _) = w[0];
                    let (s1, _, d1, _) = w[1];
                    let t0 = geom.eval(comp, s0).tangent;
                    let t1 = geom.eval(comp, s1).tangent;
                    acc += 0.5 * (d0.dot(&t0) + d1.dot(&t1)) * (s1 - s0);
                }
            }
            acc
        }
        _ => {
            let mut acc = 0.0;
            for comp in 0..geom.component_count() {
                let len = geom.component_length(comp);
                let mut cuts = geom.junctions(comp);
                cuts.insert(0, 0.0);
                cuts.push(len);
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * len.max(1.0));
                for w in cuts.windows(2) {
                    acc += quad::integrate(
                        |s| {
                            let p = geom.eval(comp, s);
                            field.prime(&p).dot(&p.tangent)
                        },
                        w[0],
                        w[1],
                        1e-12,
                    )
                    .expect("variation integrand is smooth per segment");
                }
            }
            acc
        }
    }
}

/// δ_ξ R at a kink: 2R⟨ξ′,T⟩ − R³⟨ξ″,κ⟩ with κ = n/R.
pub fn delta_radius(geom: &dyn CurveGeom, kink: &Kink, field: &DeformationField) -> f64 {
    let p = geom.eval(kink.loc.comp, kink.loc.s);
    let r = kink.radius;
    let kappa = kink.normal / r;
    let point = CurvePoint { curvature: kappa, tangent: kink.tangent, ..p };
    let prime = field.prime(&point);
    let second = field.second(&point);
    2.0 * r * prime.dot(&point.tangent) - r.powi(3) * second.dot(&kappa)
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaOptions {
    /// Use the factor ½ on the strut term instead of the self-consistent
    /// convention. With ½ the Euler field gives δTs = Ts/2, violating
    /// homogeneity Ts(λL) = λTs(L); kept only for comparison.
    pub printed_half_factor: bool,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        Self { printed_half_factor: false }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DeltaError {
    #[error("thickness report has finite Ts but no struts or kinks; recompute with finer sampling")]
    EmptyContactSet,
}

/// Right derivative of σ-thickness in the direction of `field`: the minimum
/// over detected struts of the chord-length derivative and over detected
/// kinks of δR/σ. Accuracy is bounded by the detection tolerances used to
/// build `report`.
pub fn delta_thickness(
    geom: &dyn CurveGeom,
    sigma: f64,
    field: &DeformationField,
    report: &ThicknessReport,
    opts: &DeltaOptions,
) -> Result<f64, DeltaError> {
    if !report.ts.is_finite() {
        return Ok(0.0);
    }
    if report.struts.is_empty() && report.kinks.is_empty() {
        return Err(DeltaError::EmptyContactSet);
    }
    let strut_factor = if opts.printed_half_factor { 0.5 } else { 1.0 };
    let mut best = f64::INFINITY;
    for s in &report.struts {
        let px = geom.eval(s.x.comp, s.x.s);
        let py = geom.eval(s.y.comp, s.y.s);
        let xi_x = field.at(&px);
        let xi_y = field.at(&py);
        best = best.min(strut_factor * s.direction.dot(&(xi_x - xi_y)));
    }
    for k in &report.kinks {
        best = best.min(delta_radius(geom, k, field) / sigma);
    }
    Ok(best)
}

/// Push a curve through x ↦ x + t ξ(x) and return the image as a dense
/// sampled curve. Tangent and curvature push forward exactly through the
/// velocity/acceleration of the deformed parametrization.
pub fn deform(
    geom: &dyn CurveGeom,
    field: &DeformationField,
    t: f64,
    samples_per_component: usize,
) -> SampledCurve {
    let sampling = Sampling::of(geom, samples_per_component);
    let mut all = Vec::new();
    let mut closed = Vec::new();
    for (ci, nodes) in sampling.components.iter().enumerate() {
        let mut out: Vec<SampledNode> = Vec::with_capacity(nodes.len() + 1);
        let mut s_acc = 0.0;
        let mut prev: Option<(f64, f64)> = None; // (speed, source s)
        for n in nodes.iter() {
            let p = &n.point;
            let position = p.position + t * field.value(p.position);
            let v = p.tangent + t * field.derivative(p.position, p.tangent);
            let a = t * field.second_derivative(p.position, p.tangent, p.tangent)
                + p.curvature
                + t * field.derivative(p.position, p.curvature);
            let speed = v.norm();
            let tangent = v / speed;
            let curvature = a / (speed * speed) - a.dot(&v) * v / speed.powi(4);
            if let Some((speed0, s0)) = prev {
                s_acc += 0.5 * (speed0 + speed) * (p.s - s0);
            }
            prev = Some((speed, p.s));
            out.push(SampledNode::new(s_acc, position, tangent, curvature));
        }
        if sampling.closed[ci] {
            // Seam node closing the parametrization.
            let first = out[0].clone();
            let (speed0, s0) = prev.unwrap();
            let p0 = geom.eval(ci, 0.0);
            let v0 = p0.tangent + t * field.derivative(p0.position, p0.tangent);
            s_acc += 0.5 * (speed0 + v0.norm()) * (sampling.lengths[ci] - s0);
            out.push(SampledNode { s: s_acc, ..first });
        }
        all.push(out);
        closed.push(sampling.closed[ci]);
    }
    SampledCurve::new(all, closed)
}
