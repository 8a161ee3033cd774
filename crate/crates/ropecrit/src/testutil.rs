//! Shared fixtures for unit tests.

use crate::curve::{Component, Curve, Segment, V3};
use std::f64::consts::PI;

pub fn circle(r: f64) -> Curve {
    Curve::new(vec![Component::closed(vec![Segment::Arc {
        center: V3::zeros(),
        radius: r,
        e1: V3::x(),
        e2: V3::y(),
        angle0: 0.0,
        angle1: 2.0 * PI,
    }])])
    .unwrap()
}

/// Symmetric double helix: strands (±cos θ, ±sin θ, kθ)/2.
pub fn double_helix(k: f64, turns: f64) -> Curve {
    let span = turns * 2.0 * PI;
    let strand = |flip: bool| {
        Component::open(
            vec![Segment::Helix {
                origin: V3::zeros(),
                axis: V3::z(),
                radius: 0.5,
                pitch: k / 2.0,
                e1: if flip { -V3::x() } else { V3::x() },
                e2: if flip { -V3::y() } else { V3::y() },
                t0: -span / 2.0,
                t1: span / 2.0,
            }],
            None,
        )
    };
    Curve::new(vec![strand(false), strand(true)]).unwrap()
}
