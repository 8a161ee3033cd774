//! A common geometry interface for analytic curves and dense samplings.
//!
//! Thickness, variation and balance all run against [`CurveGeom`], so a
//! reconstructed supercoiled helix (dense samples with frame data) or a
//! re-ingested geometry CSV uses the same code paths as an analytic curve.

use crate::curve::{Curve, CurvePoint, EndpointConstraint, V3};

pub trait CurveGeom: Sync {
    fn component_count(&self) -> usize;
    fn is_closed(&self, comp: usize) -> bool;
    fn component_length(&self, comp: usize) -> f64;
    /// One-sided data of the later piece at junctions.
    fn eval(&self, comp: usize, s: f64) -> CurvePoint;
    /// Interior junction arclengths (sorted).
    fn junctions(&self, comp: usize) -> Vec<f64>;
    fn endpoint_constraints(&self, comp: usize) -> Option<&(EndpointConstraint, EndpointConstraint)>;
    /// One-sided curvature vectors (κ⁻, κ⁺) at arclength `s`.
    fn curvature_two_sided(&self, comp: usize, s: f64) -> (V3, V3);
    /// Supremum of ‖κ‖ over the curve.
    fn sup_curvature(&self) -> f64;
    /// Arclength derivative of the unit principal normal N = κ/‖κ‖,
    /// one-sided from the later piece at junctions. Zero where κ = 0.
    fn normal_derivative(&self, comp: usize, s: f64) -> V3;
}

impl CurveGeom for Curve {
    fn component_count(&self) -> usize {
        self.components.len()
    }

    fn is_closed(&self, comp: usize) -> bool {
        self.components[comp].closed
    }

    fn component_length(&self, comp: usize) -> f64 {
        self.components[comp].length()
    }

    fn eval(&self, comp: usize, s: f64) -> CurvePoint {
        let c = &self.components[comp];
        let len = c.length();
        let s = if c.closed { s.rem_euclid(len.max(1e-300)) } else { s.clamp(0.0, len) };
        let (position, tangent, curvature, segment) = c.eval(s);
        CurvePoint { position, tangent, curvature, s, component: comp, segment }
    }

    fn junctions(&self, comp: usize) -> Vec<f64> {
        self.components[comp].junctions()
    }

    fn endpoint_constraints(&self, comp: usize) -> Option<&(EndpointConstraint, EndpointConstraint)> {
        self.components[comp].endpoints.as_ref()
    }

    fn curvature_two_sided(&self, comp: usize, s: f64) -> (V3, V3) {
        self.components[comp].curvature_two_sided(s)
    }

    fn sup_curvature(&self) -> f64 {
        Curve::sup_curvature(self)
    }

    fn normal_derivative(&self, comp: usize, s: f64) -> V3 {
        let c = &self.components[comp];
        let len = c.length();
        let s = if c.closed { s.rem_euclid(len.max(1e-300)) } else { s.clamp(0.0, len) };
        c.normal_derivative(s)
    }
}

/// One node of a curve sampling, with both one-sided curvature vectors at
/// junction nodes (elsewhere they coincide).
#[derive(Debug, Clone)]
pub struct SampleNode {
    pub point: CurvePoint,
    pub kappa_minus: V3,
    pub kappa_plus: V3,
    pub is_junction: bool,
}

/// Near-uniform arclength sampling of a curve; junction points are always
/// included exactly.
#[derive(Debug, Clone)]
pub struct Sampling {
    pub components: Vec<Vec<SampleNode>>,
    pub lengths: Vec<f64>,
    pub closed: Vec<bool>,
}

impl Sampling {
    pub fn of(geom: &dyn CurveGeom, n_per_component: usize) -> Self {
        let n = n_per_component.max(2);
        let mut components = Vec::new();
        let mut lengths = Vec::new();
        let mut closed = Vec::new();
        for comp in 0..geom.component_count() {
            let len = geom.component_length(comp);
            let is_closed = geom.is_closed(comp);
            let junctions = geom.junctions(comp);
            let count = if is_closed { n } else { n - 1 };
            let mut ss: Vec<f64> = (0..=count)
                .map(|i| len * i as f64 / count as f64)
                .collect();
            if is_closed {
                ss.pop(); // s = len duplicates s = 0
            }
            ss.extend_from_slice(&junctions);
            ss.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ss.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * len.max(1.0));
            let spacing = len / count as f64;
            let nodes = ss
                .iter()
                .map(|&s| {
                    let point = geom.eval(comp, s);
                    let is_junction = junctions
                        .iter()
                        .any(|&j| (j - s).abs() < 0.25 * spacing.min(1.0) * 1e-6 + 1e-12);
                    let (kappa_minus, kappa_plus) = if is_junction || (is_closed && s == 0.0) {
                        geom.curvature_two_sided(comp, s)
                    } else {
                        (point.curvature, point.curvature)
                    };
                    SampleNode { point, kappa_minus, kappa_plus, is_junction }
                })
                .collect();
            components.push(nodes);
            lengths.push(len);
            closed.push(is_closed);
        }
        Self { components, lengths, closed }
    }

    /// Largest gap between consecutive sample arclengths.
    pub fn max_spacing(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (ci, nodes) in self.components.iter().enumerate() {
            for w in nodes.windows(2) {
                worst = worst.max(w[1].point.s - w[0].point.s);
            }
            if self.closed[ci] {
                if let (Some(first), Some(last)) = (nodes.first(), nodes.last()) {
                    worst = worst.max(self.lengths[ci] - last.point.s + first.point.s);
                }
            }
        }
        worst
    }
}

/// A curve given only by dense samples carrying frame data. Evaluation uses
/// cubic Hermite interpolation of positions (anchored on the stored
/// tangents) and linear interpolation of the curvature vectors.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    /// Per component: sorted by arclength.
    pub nodes: Vec<Vec<SampledNode>>,
    pub closed: Vec<bool>,
    pub endpoints: Vec<Option<(EndpointConstraint, EndpointConstraint)>>,
}

#[derive(Debug, Clone)]
pub struct SampledNode {
    pub s: f64,
    pub position: V3,
    pub tangent: V3,
    pub curvature: V3,
    /// Exact N′ when the producer knows it (e.g. Frenet integration);
    /// otherwise it is recovered by finite differences of the normals.
    pub normal_derivative: Option<V3>,
    /// Exact N″, used to keep N′ interpolation at the same order.
    pub normal_second: Option<V3>,
}

impl SampledNode {
    pub fn new(s: f64, position: V3, tangent: V3, curvature: V3) -> Self {
        Self { s, position, tangent, curvature, normal_derivative: None, normal_second: None }
    }
}

impl SampledCurve {
    pub fn new(nodes: Vec<Vec<SampledNode>>, closed: Vec<bool>) -> Self {
        let n = nodes.len();
        Self { nodes, closed, endpoints: vec![None; n] }
    }

    fn bracket(&self, comp: usize, s: f64) -> (usize, usize, f64) {
        let nodes = &self.nodes[comp];
        let idx = match nodes.binary_search_by(|n| n.s.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
        .min(nodes.len() - 2);
        let h = nodes[idx + 1].s - nodes[idx].s;
        let t = ((s - nodes[idx].s) / h.max(1e-300)).clamp(0.0, 1.0);
        (idx, idx + 1, t)
    }
}

impl CurveGeom for SampledCurve {
    fn component_count(&self) -> usize {
        self.nodes.len()
    }

    fn is_closed(&self, comp: usize) -> bool {
        self.closed[comp]
    }

    fn component_length(&self, comp: usize) -> f64 {
        self.nodes[comp].last().map(|n| n.s).unwrap_or(0.0)
    }

    fn eval(&self, comp: usize, s: f64) -> CurvePoint {
        let len = self.component_length(comp);
        let s = if self.closed[comp] { s.rem_euclid(len.max(1e-300)) } else { s.clamp(0.0, len) };
        let (i, j, t) = self.bracket(comp, s);
        let (a, b) = (&self.nodes[comp][i], &self.nodes[comp][j]);
        let h = b.s - a.s;
        // Cubic Hermite with exact endpoint tangents (unit speed).
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let position = h00 * a.position + h10 * h * a.tangent + h01 * b.position + h11 * h * b.tangent;
        let d00 = 6.0 * t * (t - 1.0);
        let d10 = (1.0 - t) * (1.0 - 3.0 * t);
        let d01 = -d00;
        let d11 = t * (3.0 * t - 2.0);
        let deriv = (d00 / h) * a.position + d10 * a.tangent + (d01 / h) * b.position + d11 * b.tangent;
        let tangent = deriv.normalize();
        // Hermite curvature when the producer supplied κ′ (= N′ for
        // unit-curvature samples); linear otherwise.
        let curvature = match (a.normal_derivative, b.normal_derivative) {
            (Some(da), Some(db)) => {
                h00 * a.curvature + h10 * h * da + h01 * b.curvature + h11 * h * db
            }
            _ => (1.0 - t) * a.curvature + t * b.curvature,
        };
        CurvePoint { position, tangent, curvature, s, component: comp, segment: i }
    }

    fn junctions(&self, _comp: usize) -> Vec<f64> {
        vec![]
    }

    fn endpoint_constraints(&self, comp: usize) -> Option<&(EndpointConstraint, EndpointConstraint)> {
        self.endpoints[comp].as_ref()
    }

    fn curvature_two_sided(&self, comp: usize, s: f64) -> (V3, V3) {
        let k = self.eval(comp, s).curvature;
        (k, k)
    }

    fn sup_curvature(&self) -> f64 {
        self.nodes
            .iter()
            .flatten()
            .map(|n| n.curvature.norm())
            .fold(0.0, f64::max)
    }

    fn normal_derivative(&self, comp: usize, s: f64) -> V3 {
        let nodes = &self.nodes[comp];
        let (i, j, t) = self.bracket(comp, s);
        if let (Some(a), Some(b)) = (nodes[i].normal_derivative, nodes[j].normal_derivative) {
            // Hermite when N″ is available, linear otherwise.
            if let (Some(dda), Some(ddb)) = (nodes[i].normal_second, nodes[j].normal_second) {
                let h = nodes[j].s - nodes[i].s;
                let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
                let h10 = t * (1.0 - t) * (1.0 - t);
                let h01 = t * t * (3.0 - 2.0 * t);
                let h11 = t * t * (t - 1.0);
                return h00 * a + h10 * h * dda + h01 * b + h11 * h * ddb;
            }
            return a + t * (b - a);
        }
        // Finite differences of the interpolated unit normal.
        let len = self.component_length(comp);
        let h = (nodes[j].s - nodes[i].s).max(1e-9 * len.max(1.0));
        let unit_normal = |s: f64| -> V3 {
            let k = self.eval(comp, s.clamp(0.0, len)).curvature;
            let n = k.norm();
            if n > 0.0 {
                k / n
            } else {
                V3::zeros()
            }
        };
        let lo = (s - h).max(0.0);
        let hi = (s + h).min(len);
        (unit_normal(hi) - unit_normal(lo)) / (hi - lo).max(1e-300)
    }
}
