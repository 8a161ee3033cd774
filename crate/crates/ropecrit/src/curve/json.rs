//! JSON schema for curve ingestion and emission.

use serde::{Deserialize, Serialize};

use super::profile::Profile;
use super::{
    Component, Curve, CurveError, EndpointConstraint, PositionConstraint, Segment,
    TangentConstraint, V3,
};

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveJson {
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComponentJson {
    pub closed: bool,
    pub segments: Vec<SegmentJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<Vec<EndpointJson>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum SegmentJson {
    #[serde(rename = "line")]
    Line { start: [f64; 3], end: [f64; 3] },
    #[serde(rename = "arc")]
    Arc {
        center: [f64; 3],
        radius: f64,
        e1: [f64; 3],
        e2: [f64; 3],
        angle0: f64,
        angle1: f64,
    },
    #[serde(rename = "gehring_profile")]
    GehringProfile {
        tau: f64,
        u0: f64,
        u1: f64,
        origin: [f64; 3],
        e1: [f64; 3],
        e2: [f64; 3],
        #[serde(default = "one")]
        scale: f64,
    },
    #[serde(rename = "helix")]
    Helix {
        origin: [f64; 3],
        axis: [f64; 3],
        radius: f64,
        pitch: f64,
        e1: [f64; 3],
        e2: [f64; 3],
        t0: f64,
        t1: f64,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EndpointJson {
    pub h0: H0Json,
    pub h1: H1Json,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct H0Json {
    pub point: [f64; 3],
    #[serde(default)]
    pub basis: Vec<[f64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum H1Json {
    FixedTangent { fixed_tangent: [f64; 3] },
    Free { free: bool },
}

fn one() -> f64 {
    1.0
}

fn v3(a: [f64; 3]) -> V3 {
    V3::new(a[0], a[1], a[2])
}

fn arr(v: &V3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

#[derive(Debug, thiserror::Error)]
pub enum CurveJsonError {
    #[error("curve construction: {0}")]
    Curve(#[from] CurveError),
    #[error("profile construction: {0}")]
    Profile(#[from] crate::quad::QuadError),
    #[error("component {0}: open components need exactly 2 endpoint entries")]
    Endpoints(usize),
}

impl CurveJson {
    pub fn to_curve(&self) -> Result<Curve, CurveJsonError> {
        let mut components = Vec::new();
        for (ci, cj) in self.components.iter().enumerate() {
            let mut segments = Vec::new();
            for sj in &cj.segments {
                segments.push(match sj {
                    SegmentJson::Line { start, end } => {
                        Segment::Line { start: v3(*start), end: v3(*end) }
                    }
                    SegmentJson::Arc { center, radius, e1, e2, angle0, angle1 } => Segment::Arc {
                        center: v3(*center),
                        radius: *radius,
                        e1: v3(*e1),
                        e2: v3(*e2),
                        angle0: *angle0,
                        angle1: *angle1,
                    },
                    SegmentJson::GehringProfile { tau, u0, u1, origin, e1, e2, scale } => {
                        let mut p =
                            Profile::gehring(v3(*origin), v3(*e1), v3(*e2), *tau, *u0, *u1)?;
                        p.scale = *scale;
                        Segment::Profile(p)
                    }
                    SegmentJson::Helix { origin, axis, radius, pitch, e1, e2, t0, t1 } => {
                        Segment::Helix {
                            origin: v3(*origin),
                            axis: v3(*axis),
                            radius: *radius,
                            pitch: *pitch,
                            e1: v3(*e1),
                            e2: v3(*e2),
                            t0: *t0,
                            t1: *t1,
                        }
                    }
                });
            }
            let component = if cj.closed {
                Component::closed(segments)
            } else {
                let endpoints = match &cj.endpoints {
                    None => None,
                    Some(eps) => {
                        if eps.len() != 2 {
                            return Err(CurveJsonError::Endpoints(ci));
                        }
                        Some((convert_endpoint(&eps[0]), convert_endpoint(&eps[1])))
                    }
                };
                Component::open(segments, endpoints)
            };
            components.push(component);
        }
        Ok(Curve::new(components)?)
    }

    pub fn from_curve(curve: &Curve) -> Self {
        let components = curve
            .components
            .iter()
            .map(|c| ComponentJson {
                closed: c.closed,
                segments: c
                    .segments
                    .iter()
                    .map(|s| match s {
                        Segment::Line { start, end } => {
                            SegmentJson::Line { start: arr(start), end: arr(end) }
                        }
                        Segment::Arc { center, radius, e1, e2, angle0, angle1 } => {
                            SegmentJson::Arc {
                                center: arr(center),
                                radius: *radius,
                                e1: arr(e1),
                                e2: arr(e2),
                                angle0: *angle0,
                                angle1: *angle1,
                            }
                        }
                        Segment::Profile(p) => {
                            let super::profile::ProfileKind::Gehring { tau } = p.kind;
                            SegmentJson::GehringProfile {
                                tau,
                                u0: p.theta0.sin(),
                                u1: p.theta1.sin(),
                                origin: arr(&p.origin),
                                e1: arr(&p.e1),
                                e2: arr(&p.e2),
                                scale: p.scale,
                            }
                        }
                        Segment::Helix { origin, axis, radius, pitch, e1, e2, t0, t1 } => {
                            SegmentJson::Helix {
                                origin: arr(origin),
                                axis: arr(axis),
                                radius: *radius,
                                pitch: *pitch,
                                e1: arr(e1),
                                e2: arr(e2),
                                t0: *t0,
                                t1: *t1,
                            }
                        }
                    })
                    .collect(),
                endpoints: c.endpoints.as_ref().map(|(a, b)| {
                    vec![endpoint_json(a), endpoint_json(b)]
                }),
            })
            .collect();
        CurveJson { components }
    }
}

fn convert_endpoint(e: &EndpointJson) -> EndpointConstraint {
    EndpointConstraint {
        h0: PositionConstraint {
            point: v3(e.h0.point),
            basis: e.h0.basis.iter().map(|b| v3(*b)).collect(),
        },
        h1: match &e.h1 {
            H1Json::FixedTangent { fixed_tangent } => TangentConstraint::Fixed(v3(*fixed_tangent)),
            H1Json::Free { .. } => TangentConstraint::Free,
        },
    }
}

fn endpoint_json(e: &EndpointConstraint) -> EndpointJson {
    EndpointJson {
        h0: H0Json {
            point: arr(&e.h0.point),
            basis: e.h0.basis.iter().map(arr).collect(),
        },
        h1: match &e.h1 {
            TangentConstraint::Fixed(t) => H1Json::FixedTangent { fixed_tangent: arr(t) },
            TangentConstraint::Free => H1Json::Free { free: true },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_roundtrip() {
        let text = r#"{ "components": [ { "closed": true, "segments": [
            {"type":"arc","center":[0,0,0],"radius":1.0,"e1":[1,0,0],"e2":[0,1,0],
             "angle0":0.0,"angle1":6.283185307179586} ] } ] }"#;
        let cj: CurveJson = serde_json::from_str(text).unwrap();
        let curve = cj.to_curve().unwrap();
        assert!((curve.total_length() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let back = serde_json::to_string(&CurveJson::from_curve(&curve)).unwrap();
        let curve2 = serde_json::from_str::<CurveJson>(&back).unwrap().to_curve().unwrap();
        assert!((curve2.total_length() - curve.total_length()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_constraints_parse() {
        let text = r#"{ "components": [ { "closed": false, "segments": [
            {"type":"line","start":[0,0,0],"end":[1,0,0]} ],
            "endpoints": [
              {"h0":{"point":[0,0,0],"basis":[]}, "h1":{"fixed_tangent":[1,0,0]}},
              {"h0":{"point":[1,0,0],"basis":[[0,1,0],[0,0,1]]}, "h1":{"free":true}} ] } ] }"#;
        let cj: CurveJson = serde_json::from_str(text).unwrap();
        let curve = cj.to_curve().unwrap();
        let (a, b) = curve.components[0].endpoints.as_ref().unwrap();
        assert!(matches!(a.h1, TangentConstraint::Fixed(_)));
        assert!(matches!(b.h1, TangentConstraint::Free));
        assert_eq!(b.h0.basis.len(), 2);
    }
}
