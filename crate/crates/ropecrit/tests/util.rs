//! Shared fixtures and independent oracles for the integration tests.
//! The brute-force reach oracle minimizes r*(x, y) over all sample pairs
//! with its own refinement, sharing only point evaluation with the library.

#![allow(dead_code)]

use ropecrit::curve::{Component, Curve, Segment, V3};
use ropecrit::geom::CurveGeom;
use ropecrit::quad;
use ropecrit::thickness::{chord_angles, Loc};
use ropecrit::variation::{AnalyticField, DeformationField};
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

/// Deterministic xorshift for reproducible "random" fixtures.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [-1, 1].
    pub fn sym(&mut self) -> f64 {
        2.0 * self.next() - 1.0
    }

    pub fn vector(&mut self) -> V3 {
        V3::new(self.sym(), self.sym(), self.sym())
    }
}

/// Random trigonometric field with exact first and second derivatives:
/// ξ(x) = Σ_k a_k sin(⟨w_k, x⟩ + c_k).
pub fn random_trig_field(rng: &mut Rng) -> DeformationField {
    let terms: Vec<(V3, V3, f64)> = (0..3)
        .map(|_| (rng.vector() * 0.5, rng.vector() * 1.2, rng.sym() * PI))
        .collect();
    let t1 = terms.clone();
    let t2 = terms.clone();
    let t3 = terms;
    DeformationField::Analytic(AnalyticField {
        xi: Box::new(move |x: V3| {
            t1.iter().map(|(a, w, c)| a * (w.dot(&x) + c).sin()).sum()
        }),
        d: Box::new(move |x: V3, v: V3| {
            t2.iter()
                .map(|(a, w, c)| a * ((w.dot(&x) + c).cos() * w.dot(&v)))
                .sum()
        }),
        d2: Box::new(move |x: V3, u: V3, v: V3| {
            t3.iter()
                .map(|(a, w, c)| a * (-(w.dot(&x) + c).sin() * w.dot(&u) * w.dot(&v)))
                .sum()
        }),
    })
}

/// Random trig field windowed by the C² bump g(q) = (1 − q/R²)³ on the
/// ball of radius R about x₀, hence compatible with any constraints met
/// outside the ball.
pub fn bump_windowed_field(rng: &mut Rng, x0: V3, radius: f64) -> DeformationField {
    let terms: Vec<(V3, V3, f64)> = (0..3)
        .map(|_| (rng.vector() * 0.5, rng.vector() * 1.1, rng.sym() * PI))
        .collect();
    let r2 = radius * radius;
    let g = move |q: f64| {
        let t = 1.0 - q / r2;
        if t > 0.0 {
            t * t * t
        } else {
            0.0
        }
    };
    let dg = move |q: f64| {
        let t = 1.0 - q / r2;
        if t > 0.0 {
            -3.0 * t * t / r2
        } else {
            0.0
        }
    };
    let ddg = move |q: f64| {
        let t = 1.0 - q / r2;
        if t > 0.0 {
            6.0 * t / (r2 * r2)
        } else {
            0.0
        }
    };
    let base = move |terms: &[(V3, V3, f64)], x: V3| -> V3 {
        terms.iter().map(|(a, w, c)| a * (w.dot(&x) + c).sin()).sum()
    };
    let dbase = move |terms: &[(V3, V3, f64)], x: V3, v: V3| -> V3 {
        terms
            .iter()
            .map(|(a, w, c)| a * ((w.dot(&x) + c).cos() * w.dot(&v)))
            .sum()
    };
    let ddbase = move |terms: &[(V3, V3, f64)], x: V3, u: V3, v: V3| -> V3 {
        terms
            .iter()
            .map(|(a, w, c)| a * (-(w.dot(&x) + c).sin() * w.dot(&u) * w.dot(&v)))
            .sum()
    };
    let (ta, tb, tc) = (terms.clone(), terms.clone(), terms);
    DeformationField::Analytic(AnalyticField {
        xi: Box::new(move |x: V3| {
            let d = x - x0;
            g(d.norm_squared()) * base(&ta, x)
        }),
        d: Box::new(move |x: V3, v: V3| {
            let d = x - x0;
            let q = d.norm_squared();
            dg(q) * 2.0 * d.dot(&v) * base(&tb, x) + g(q) * dbase(&tb, x, v)
        }),
        d2: Box::new(move |x: V3, u: V3, v: V3| {
            let d = x - x0;
            let q = d.norm_squared();
            ddg(q) * 4.0 * d.dot(&u) * d.dot(&v) * base(&tc, x)
                + dg(q) * 2.0 * u.dot(&v) * base(&tc, x)
                + dg(q) * 2.0 * d.dot(&u) * dbase(&tc, x, v)
                + dg(q) * 2.0 * d.dot(&v) * dbase(&tc, x, u)
                + g(q) * ddbase(&tc, x, u, v)
        }),
    })
}

/// ∫ (2⟨ξ′, T⟩ − σ⟨ξ″, N⟩) φ ds over the kink support.
pub fn kink_pairing(
    geom: &dyn CurveGeom,
    phi: &ropecrit::balance::KinkTension,
    sigma: f64,
    field: &DeformationField,
) -> f64 {
    let mut acc = 0.0;
    for comp in 0..geom.component_count() {
        let len = geom.component_length(comp);
        let mut cuts = geom.junctions(comp);
        cuts.insert(0, 0.0);
        cuts.push(len);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * len.max(1.0));
        for w in cuts.windows(2) {
            acc += quad::integrate(
                |s| {
                    let (phi_v, _) = phi.eval(comp, s);
                    if phi_v == 0.0 {
                        return 0.0;
                    }
                    let p = geom.eval(comp, s);
                    let k = p.curvature.norm();
                    let n = p.curvature / k;
                    let xi_p = field.prime(&p);
                    let xi_pp = field.second(&p);
                    (2.0 * xi_p.dot(&p.tangent) - sigma * xi_pp.dot(&n)) * phi_v
                },
                w[0],
                w[1],
                1e-10,
            )
            .unwrap_or(0.0);
        }
    }
    acc
}

/// Smallest cross-component distance, golden-refined.
pub fn min_component_separation(curve: &Curve, n: usize) -> f64 {
    let comps = curve.components.len();
    let mut best = f64::INFINITY;
    let mut seed = (0usize, 0.0f64, 1usize, 0.0f64);
    for a in 0..comps {
        let la = curve.components[a].length();
        for b in (a + 1)..comps {
            let lb = curve.components[b].length();
            for i in 0..n {
                let sa = la * i as f64 / (n - 1) as f64;
                let pa = curve.eval(a, sa).position;
                for j in 0..n {
                    let sb = lb * j as f64 / (n - 1) as f64;
                    let d = (pa - curve.eval(b, sb).position).norm();
                    if d < best {
                        best = d;
                        seed = (a, sa, b, sb);
                    }
                }
            }
        }
    }
    // Local refinement in both arclengths.
    let (a, mut sa, b, mut sb) = seed;
    let la = curve.components[a].length();
    let lb = curve.components[b].length();
    let mut width = (la.max(lb)) / n as f64 * 2.0;
    let dist = |x: f64, y: f64| {
        (curve.eval(a, x.clamp(0.0, la)).position - curve.eval(b, y.clamp(0.0, lb)).position)
            .norm()
    };
    for _ in 0..40 {
        sa = golden(|x| dist(x, sb), sa - width, sa + width);
        sb = golden(|y| dist(sa, y), sb - width, sb + width);
        width *= 0.5;
        if width < 1e-12 {
            break;
        }
    }
    dist(sa, sb)
}

fn golden<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let mut a = lo + phi * (hi - lo);
    let mut b = hi - phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..48 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = lo + phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = hi - phi * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (a + b)
}

/// A random C¹ chain of circular arcs plus a parallel offset copy, built
/// so that the reach is pair-limited (close approach below the curvature
/// radii). Returns None when the construction self-intersects too closely.
pub fn random_arc_pair(rng: &mut Rng) -> Option<Curve> {
    let arcs = 3 + (rng.next() * 3.0) as usize;
    let mut segments = Vec::new();
    let mut point = V3::zeros();
    let mut tangent = V3::new(1.0, 0.0, 0.0);
    let mut normal = V3::new(0.0, 1.0, 0.0);
    for _ in 0..arcs {
        let radius = 1.2 + 1.5 * rng.next();
        let angle = 0.25 + 0.8 * rng.next();
        // Rotate the osculating plane about the tangent.
        let twist = rng.sym() * 0.8;
        let binormal = tangent.cross(&normal);
        let n = (normal * twist.cos() + binormal * twist.sin()).normalize();
        let center = point + radius * n;
        let e1 = -n;
        let e2 = tangent;
        let seg = Segment::Arc { center, radius, e1, e2, angle0: 0.0, angle1: angle };
        let (end, t_end, k_end) = seg.eval(seg.length());
        segments.push(seg);
        point = end;
        tangent = t_end;
        normal = -k_end.normalize();
    }
    let base = Component::open(segments.clone(), None);
    // Offset copy at a distance below the smallest curvature radius.
    let min_radius = segments
        .iter()
        .map(|s| match s {
            Segment::Arc { radius, .. } => *radius,
            _ => f64::INFINITY,
        })
        .fold(f64::INFINITY, f64::min);
    let gap = 0.35 + 0.3 * rng.next();
    // Offset along a direction roughly normal to the chain's plane.
    let dir = V3::new(rng.sym() * 0.2, rng.sym() * 0.2, 1.0).normalize();
    let shifted: Vec<Segment> = segments
        .iter()
        .map(|s| match s {
            Segment::Arc { center, radius, e1, e2, angle0, angle1 } => Segment::Arc {
                center: center + gap * dir,
                radius: *radius,
                e1: *e1,
                e2: *e2,
                angle0: *angle0,
                angle1: *angle1,
            },
            _ => unreachable!(),
        })
        .collect();
    let curve = Curve::new(vec![base, Component::open(shifted, None)]).ok()?;
    // Need clear pair-limited reach: separation between 0.2 and
    // 0.8·min_radius so neither degenerate nor ρ-limited.
    let sep = min_component_separation(&curve, 80);
    if sep < 0.2 || sep > 0.8 * min_radius {
        return None;
    }
    Some(curve)
}

/// Independent reach oracle: brute-force all-pairs minimization of
/// r*(x, y) over the samples, refined by coordinate golden section on
/// r* itself (no pruning, no penalized distance).
pub fn brute_force_reach(curve: &Curve, n: usize) -> f64 {
    let mut samples: Vec<(usize, f64)> = Vec::new();
    for (ci, comp) in curve.components.iter().enumerate() {
        let len = comp.length();
        for i in 0..n {
            samples.push((ci, len * i as f64 / (n - 1) as f64));
        }
    }
    let r_star = |x: Loc, y: Loc| -> f64 {
        let px = curve.eval(x.comp, x.s);
        let py = curve.eval(y.comp, y.s);
        let d = (py.position - px.position).norm();
        if d == 0.0 {
            return f64::INFINITY;
        }
        let (_, psx) = chord_angles(curve, &px, py.position).unwrap();
        let c = psx.cos();
        if c <= 1e-12 {
            f64::INFINITY
        } else {
            d / (2.0 * c)
        }
    };
    let mut best = f64::INFINITY;
    let mut arg = (samples[0], samples[1]);
    for i in 0..samples.len() {
        for j in 0..samples.len() {
            if i == j {
                continue;
            }
            let (ca, sa) = samples[i];
            let (cb, sb) = samples[j];
            if ca == cb && (sa - sb).abs() < 1e-9 {
                continue;
            }
            let v = r_star(Loc { comp: ca, s: sa }, Loc { comp: cb, s: sb });
            if v < best {
                best = v;
                arg = (samples[i], samples[j]);
            }
        }
    }
    // Refine r*(s1, s2) by shrinking 7x7 grid search: slow but immune to
    // the diagonal valleys that stall coordinate methods.
    let ((ca, mut sa), (cb, mut sb)) = arg;
    let la = curve.components[ca].length();
    let lb = curve.components[cb].length();
    let mut width = la.max(lb) / n as f64 * 2.0;
    for _ in 0..46 {
        let mut best_local = f64::INFINITY;
        let (mut na, mut nb) = (sa, sb);
        for i in -3i32..=3 {
            for j in -3i32..=3 {
                let x = (sa + width * i as f64 / 3.0).clamp(0.0, la);
                let y = (sb + width * j as f64 / 3.0).clamp(0.0, lb);
                let v = r_star(Loc { comp: ca, s: x }, Loc { comp: cb, s: y });
                if v < best_local {
                    best_local = v;
                    na = x;
                    nb = y;
                }
            }
        }
        sa = na;
        sb = nb;
        width *= if (na - sa).abs().max((nb - sb).abs()) < width / 3.0 { 0.45 } else { 0.9 };
        if width < 1e-14 {
            break;
        }
    }
    r_star(Loc { comp: ca, s: sa }, Loc { comp: cb, s: sb })
}
