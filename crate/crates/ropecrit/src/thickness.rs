//! Penalized distances, reach, ρ, σ-thickness and the contact set.
//!
//! The σ-thickness of a curve L is
//!     Ts(L) = min( min_{x,y} pd*(x,y), (1/σ) min_L ρ ),
//! where pd*(x,y) = ‖x−y‖ sec²ψ*(x,y) is the (endpoint-aware) penalized
//! distance and ρ(x) is the smallest limiting osculating radius at x.
//! Struts are pairs realizing the first minimum, kinks are locations
//! realizing the second.

use nalgebra::clamp;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

use crate::curve::{CurvePoint, TangentConstraint, V3};
use crate::geom::{CurveGeom, Sampling};

/// A location on a curve: component index plus arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loc {
    pub comp: usize,
    pub s: f64,
}

/// A contact pair realizing the thickness: both endpoints lie in each
/// other's normal cone and the chord has length Ts.
#[derive(Debug, Clone)]
pub struct Strut {
    pub x: Loc,
    pub y: Loc,
    pub length: f64,
    /// Unit vector (x − y)/‖x − y‖.
    pub direction: V3,
    pub psi_star_x: f64,
    pub psi_star_y: f64,
    /// Part of a contiguous one-parameter contact family.
    pub family: bool,
}

/// A limiting osculating circle of radius exactly σ·Ts.
#[derive(Debug, Clone)]
pub struct Kink {
    pub loc: Loc,
    pub tangent: V3,
    pub normal: V3,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct ThicknessOptions {
    /// Samples per component for the pairwise sweep.
    pub samples: usize,
    /// Relative tolerance for the local pair refinement.
    pub refine_tol: f64,
    /// Relative band above Ts within which refined pairs count as struts.
    pub strut_tol: f64,
    /// Relative band above σ·Ts within which radii count as kinks.
    pub kink_tol: f64,
}

impl Default for ThicknessOptions {
    fn default() -> Self {
        Self { samples: 2048, refine_tol: 1e-10, strut_tol: 1e-6, kink_tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct ThicknessReport {
    pub reach: f64,
    pub min_rho: f64,
    pub ts: f64,
    pub sigma: f64,
    pub struts: Vec<Strut>,
    pub kinks: Vec<Kink>,
}

#[derive(Debug, thiserror::Error)]
pub enum ThicknessError {
    #[error("σ must be at least 1/2 (got {0}); smaller σ is handled by the clasp module's modified Gehring checks")]
    SigmaTooSmall(f64),
    #[error("sampling too coarse: adjacent-sample spacing {spacing} is not below the reach estimate {reach}")]
    SamplingTooCoarse { spacing: f64, reach: f64 },
    #[error("coincident points")]
    Coincident,
}

/// ψ and ψ* at `x` toward `y`.
///
/// ψ = arcsin |⟨T(x), w⟩| measures the angle between the chord and the
/// normal plane. At an endpoint of an open component, ψ* is the angle to
/// the normal halfspace: zero when the chord points outward, ψ otherwise.
pub fn chord_angles(
    geom: &dyn CurveGeom,
    x: &CurvePoint,
    y_position: V3,
) -> Result<(f64, f64), ThicknessError> {
    let w = y_position - x.position;
    let d = w.norm();
    if d == 0.0 {
        return Err(ThicknessError::Coincident);
    }
    let w = w / d;
    let psi = clamp(x.tangent.dot(&w).abs(), 0.0, 1.0).asin();
    let len = geom.component_length(x.component);
    let psi_star = if !geom.is_closed(x.component) && (x.s <= 0.0 || x.s >= len) {
        let t_out = if x.s <= 0.0 { -x.tangent } else { x.tangent };
        if t_out.dot(&w) >= 0.0 {
            0.0
        } else {
            psi
        }
    } else {
        psi
    };
    Ok((psi, psi_star))
}

/// Penalized distance pd(x,y) = ‖x−y‖ sec²ψ (or sec²ψ* with
/// `endpoint_variant`); +∞ on the diagonal and where the angle is π/2.
pub fn penalized_distance(geom: &dyn CurveGeom, x: Loc, y: Loc, endpoint_variant: bool) -> f64 {
    let px = geom.eval(x.comp, x.s);
    let py = geom.eval(y.comp, y.s);
    pd_of_points(geom, &px, &py, endpoint_variant)
}

fn pd_of_points(
    geom: &dyn CurveGeom,
    x: &CurvePoint,
    y: &CurvePoint,
    endpoint_variant: bool,
) -> f64 {
    let d = (y.position - x.position).norm();
    if d == 0.0 {
        return f64::INFINITY;
    }
    let (psi, psi_star) = chord_angles(geom, x, y.position).expect("distinct points");
    let ang = if endpoint_variant { psi_star } else { psi };
    let c = ang.cos();
    if c <= 1e-12 {
        f64::INFINITY
    } else {
        d / (c * c)
    }
}

/// Tangent-circle radius r(x,y) = ‖x−y‖ / (2 cos ψ); with `endpoint_variant`
/// this is r*(x,y) ≤ r(x,y).
pub fn tangent_circle_radius(
    geom: &dyn CurveGeom,
    x: &CurvePoint,
    y: &CurvePoint,
    endpoint_variant: bool,
) -> f64 {
    let d = (y.position - x.position).norm();
    if d == 0.0 {
        return f64::INFINITY;
    }
    let (psi, psi_star) = chord_angles(geom, x, y.position).expect("distinct points");
    let ang = if endpoint_variant { psi_star } else { psi };
    let c = ang.cos();
    if c <= 1e-12 {
        f64::INFINITY
    } else {
        d / (2.0 * c)
    }
}

/// ρ at each sampling node (1 / max one-sided ‖κ‖) plus the curve-wide
/// minimum (from the analytic curvature supremum).
pub fn rho_profile(geom: &dyn CurveGeom, sampling: &Sampling) -> (Vec<Vec<f64>>, f64) {
    let per_node = sampling
        .components
        .iter()
        .map(|nodes| {
            nodes
                .iter()
                .map(|n| {
                    let k = n.kappa_minus.norm().max(n.kappa_plus.norm());
                    if k > 0.0 {
                        1.0 / k
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();
    let sup = geom.sup_curvature();
    let min_rho = if sup > 0.0 { 1.0 / sup } else { f64::INFINITY };
    (per_node, min_rho)
}

/// Circular-aware arclength separation of two locations on one component.
fn arc_separation(len: f64, closed: bool, s1: f64, s2: f64) -> f64 {
    let d = (s1 - s2).abs();
    if closed {
        d.min(len - d)
    } else {
        d
    }
}

/// The near-diagonal exclusion: a same-component pair whose subarc is
/// shorter than π·min(r(x,y), r(y,x)) is dominated by the ρ term and is
/// skipped. Boundary pairs are kept, so circle strut families survive.
fn near_diagonal(geom: &dyn CurveGeom, x: &CurvePoint, y: &CurvePoint) -> bool {
    if x.component != y.component {
        return false;
    }
    let len = geom.component_length(x.component);
    let sep = arc_separation(len, geom.is_closed(x.component), x.s, y.s);
    let r1 = tangent_circle_radius(geom, x, y, true);
    let r2 = tangent_circle_radius(geom, y, x, true);
    sep < std::f64::consts::PI * r1.min(r2) * (1.0 - 1e-6)
}

struct Grid {
    cell: f64,
    map: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl Grid {
    fn build(points: &[CurvePoint], cell: f64) -> Self {
        let mut map: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, s) in points.iter().enumerate() {
            map.entry(Self::key(s.position, cell)).or_default().push(i);
        }
        Grid { cell, map }
    }

    fn key(p: V3, cell: f64) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    fn neighbors(&self, p: V3) -> impl Iterator<Item = usize> + '_ {
        let (kx, ky, kz) = Self::key(p, self.cell);
        (-1..=1).flat_map(move |dx| {
            (-1..=1).flat_map(move |dy| {
                (-1..=1).flat_map(move |dz| {
                    self.map
                        .get(&(kx + dx, ky + dy, kz + dz))
                        .into_iter()
                        .flatten()
                        .copied()
                })
            })
        })
    }
}

/// pd* for the unordered pair (best of both orders), honoring the
/// near-diagonal rule.
fn sweep_value(geom: &dyn CurveGeom, x: &CurvePoint, y: &CurvePoint) -> f64 {
    if near_diagonal(geom, x, y) {
        f64::INFINITY
    } else {
        pd_of_points(geom, x, y, true).min(pd_of_points(geom, y, x, true))
    }
}

/// Coarse global minimum of pd* over the sampling, spatial-grid pruned:
/// a pair whose chord already exceeds the running minimum cannot win.
fn coarse_minimum(geom: &dyn CurveGeom, points: &[CurvePoint]) -> f64 {
    // Strided seed pass so the grid gets a realistic cell size.
    let stride = (points.len() / 256).max(1);
    let mut seed = f64::INFINITY;
    for i in (0..points.len()).step_by(stride) {
        for j in ((i + stride)..points.len()).step_by(stride) {
            seed = seed.min(sweep_value(geom, &points[i], &points[j]));
        }
    }
    let seed_is_value = seed.is_finite();
    if !seed_is_value {
        // No strided pair was admissible (e.g. a straight arc); sweep the
        // full bounding-box scale to be sure nothing is missed.
        let mut lo = V3::repeat(f64::INFINITY);
        let mut hi = V3::repeat(f64::NEG_INFINITY);
        for p in points {
            lo = lo.inf(&p.position);
            hi = hi.sup(&p.position);
        }
        seed = ((hi - lo).norm() * 1.01).max(1e-6);
    }

    let grid = Grid::build(points, seed.max(1e-9));
    let swept = points
        .par_iter()
        .enumerate()
        .map(|(i, pi)| {
            let mut local = f64::INFINITY;
            for j in grid.neighbors(pi.position) {
                if j <= i {
                    continue;
                }
                let pj = &points[j];
                if (pj.position - pi.position).norm() >= seed {
                    continue;
                }
                local = local.min(sweep_value(geom, pi, pj));
            }
            local
        })
        .reduce(|| f64::INFINITY, f64::min);
    if seed_is_value {
        swept.min(seed)
    } else {
        swept
    }
}

/// Near-minimal sample pairs, reduced to at most a few partners per first
/// index: for each sample i the in-band partners j are clustered by
/// contiguity along their component and only the best of each cluster is
/// kept. This caps the refinement work while still yielding one refined
/// strut per sample along a contact family.
fn collect_candidates(
    geom: &dyn CurveGeom,
    points: &[CurvePoint],
    min_pd: f64,
    band: f64,
    spacing: f64,
) -> Vec<(usize, usize)> {
    let cutoff = min_pd * (1.0 + band);
    let grid = Grid::build(points, cutoff);
    let mut flat: Vec<(usize, usize)> = points
        .par_iter()
        .enumerate()
        .map(|(i, pi)| {
            let mut in_band: Vec<(usize, f64)> = Vec::new();
            for j in grid.neighbors(pi.position) {
                if j == i {
                    continue;
                }
                let pj = &points[j];
                if (pj.position - pi.position).norm() > cutoff {
                    continue;
                }
                let v = sweep_value(geom, pi, pj);
                if v <= cutoff {
                    in_band.push((j, v));
                }
            }
            // Cluster partners that are contiguous along their component.
            in_band.sort_by(|a, b| {
                (points[a.0].component, points[a.0].s)
                    .partial_cmp(&(points[b.0].component, points[b.0].s))
                    .unwrap()
            });
            let mut best: Vec<(usize, f64)> = Vec::new();
            let mut cluster_best: Option<(usize, f64)> = None;
            let mut prev: Option<usize> = None;
            for (j, v) in in_band {
                let new_cluster = match prev {
                    None => true,
                    Some(p) => {
                        points[p].component != points[j].component
                            || (points[j].s - points[p].s).abs() > 3.0 * spacing
                    }
                };
                if new_cluster {
                    if let Some(cb) = cluster_best.take() {
                        best.push(cb);
                    }
                }
                match cluster_best {
                    Some((_, bv)) if bv <= v => {}
                    _ => cluster_best = Some((j, v)),
                }
                prev = Some(j);
            }
            if let Some(cb) = cluster_best {
                best.push(cb);
            }
            best.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            best.truncate(4);
            best.into_iter().map(|(j, _)| (i, j)).collect::<Vec<_>>()
        })
        .reduce(Vec::new, |mut a, b| {
            a.extend(b);
            a
        });
    flat.sort_unstable();
    flat
}

/// Golden-section minimization of `f` on [lo, hi]; returns the abscissa.
fn golden<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let mut a = lo + phi * (hi - lo);
    let mut b = hi - phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..iters {
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
    if fa < fb {
        a
    } else {
        b
    }
}

fn clamp_param(geom: &dyn CurveGeom, comp: usize, s: f64) -> f64 {
    let len = geom.component_length(comp);
    if geom.is_closed(comp) {
        s.rem_euclid(len.max(1e-300))
    } else {
        s.clamp(0.0, len)
    }
}

#[derive(Debug, Clone)]
struct RefinedPair {
    x: Loc,
    y: Loc,
    value: f64,
}

/// Locally minimize pd*(s₁, s₂) from a sample pair. Coordinate
/// golden-section is robust against corner minima at junctions and the
/// flat valleys along contact families.
fn refine_pair(geom: &dyn CurveGeom, x0: Loc, y0: Loc, delta: f64, tol: f64) -> RefinedPair {
    let f = |s1: f64, s2: f64| {
        let px = geom.eval(x0.comp, clamp_param(geom, x0.comp, s1));
        let py = geom.eval(y0.comp, clamp_param(geom, y0.comp, s2));
        pd_of_points(geom, &px, &py, true)
    };
    let mut s1 = x0.s;
    let mut s2 = y0.s;
    let mut width = delta;
    let mut value = f(s1, s2);
    for round in 0..12 {
        let new_s1 = golden(|t| f(t, s2), s1 - width, s1 + width, 34);
        let new_s2 = golden(|t| f(new_s1, t), s2 - width, s2 + width, 34);
        let new_value = f(new_s1, new_s2);
        let moved = (new_s1 - s1).abs().max((new_s2 - s2).abs());
        s1 = new_s1;
        s2 = new_s2;
        let improved = value - new_value;
        value = new_value;
        // Along a flat contact family the position never settles; the
        // value does, which is what Ts needs.
        if round >= 1 && improved.abs() <= tol * value.abs() {
            break;
        }
        width = (4.0 * moved).clamp(1e-13, width);
    }
    // Newton polish handles the diagonal valleys where coordinate descent
    // crawls (skew cross-component contacts). Kept only when it improves.
    let h = (delta * 1e-4).max(1e-9);
    for _ in 0..6 {
        let f0 = f(s1, s2);
        if !f0.is_finite() {
            break;
        }
        let fp1 = f(s1 + h, s2);
        let fm1 = f(s1 - h, s2);
        let fp2 = f(s1, s2 + h);
        let fm2 = f(s1, s2 - h);
        let fpp = f(s1 + h, s2 + h);
        let g1 = (fp1 - fm1) / (2.0 * h);
        let g2 = (fp2 - fm2) / (2.0 * h);
        let h11 = (fp1 - 2.0 * f0 + fm1) / (h * h);
        let h22 = (fp2 - 2.0 * f0 + fm2) / (h * h);
        let h12 = (fpp - fp1 - fp2 + f0) / (h * h);
        let det = h11 * h22 - h12 * h12;
        if !(det > 0.0 && h11 > 0.0) {
            break;
        }
        let d1 = -(h22 * g1 - h12 * g2) / det;
        let d2 = -(h11 * g2 - h12 * g1) / det;
        let step = d1.abs().max(d2.abs());
        if !step.is_finite() || step > delta {
            break;
        }
        let cand = f(s1 + d1, s2 + d2);
        if cand <= f0 {
            s1 += d1;
            s2 += d2;
            value = cand;
            if step < 1e-13 {
                break;
            }
        } else {
            break;
        }
    }
    RefinedPair {
        x: Loc { comp: x0.comp, s: clamp_param(geom, x0.comp, s1) },
        y: Loc { comp: y0.comp, s: clamp_param(geom, y0.comp, s2) },
        value,
    }
}

/// Compute reach, ρ, σ-thickness and the strut/kink sets.
pub fn compute_thickness(
    geom: &dyn CurveGeom,
    sigma: f64,
    opts: &ThicknessOptions,
) -> Result<ThicknessReport, ThicknessError> {
    if sigma < 0.5 {
        return Err(ThicknessError::SigmaTooSmall(sigma));
    }
    let sampling = Sampling::of(geom, opts.samples);
    let (_, min_rho) = rho_profile(geom, &sampling);

    let points: Vec<CurvePoint> = sampling
        .components
        .iter()
        .flat_map(|nodes| nodes.iter().map(|n| n.point))
        .collect();
    let min_pd = coarse_minimum(geom, &points);

    if !min_pd.is_finite() && !min_rho.is_finite() {
        // Straight arcs only: thickness is infinite, nothing realizes it.
        return Ok(ThicknessReport {
            reach: f64::INFINITY,
            min_rho,
            ts: f64::INFINITY,
            sigma,
            struts: vec![],
            kinks: vec![],
        });
    }

    let spacing = sampling.max_spacing();
    let band = (opts.strut_tol * 8.0).max(2e-2);
    let mut refined: Vec<RefinedPair> = Vec::new();
    if min_pd.is_finite() {
        let candidates = collect_candidates(geom, &points, min_pd, band, spacing);
        let mut pairs: Vec<RefinedPair> = candidates
            .par_iter()
            .flat_map_iter(|&(i, j)| {
                let xi = points[i];
                let yj = points[j];
                let a = refine_pair(
                    geom,
                    Loc { comp: xi.component, s: xi.s },
                    Loc { comp: yj.component, s: yj.s },
                    spacing,
                    opts.refine_tol,
                );
                let b = refine_pair(
                    geom,
                    Loc { comp: yj.component, s: yj.s },
                    Loc { comp: xi.component, s: xi.s },
                    spacing,
                    opts.refine_tol,
                );
                [a, b]
            })
            .collect();
        pairs.sort_by(|a, b| {
            (a.x.comp, a.y.comp)
                .cmp(&(b.x.comp, b.y.comp))
                .then(a.x.s.partial_cmp(&b.x.s).unwrap())
                .then(a.y.s.partial_cmp(&b.y.s).unwrap())
        });
        refined = pairs;
    }

    let refined_min = refined
        .iter()
        .map(|p| p.value)
        .fold(f64::INFINITY, f64::min)
        .min(min_pd);

    let ts = refined_min.min(min_rho / sigma);
    let reach = (refined_min / 2.0).min(min_rho);

    if spacing >= reach {
        return Err(ThicknessError::SamplingTooCoarse { spacing, reach });
    }

    // Struts: refined minimizers within the strut band, post-filtered by the
    // near-diagonal rule (pairs that slid toward the diagonal are kink
    // shadows, not contacts).
    let mut struts: Vec<Strut> = Vec::new();
    for p in &refined {
        if !(p.value <= ts * (1.0 + opts.strut_tol)) {
            continue;
        }
        let px = geom.eval(p.x.comp, p.x.s);
        let py = geom.eval(p.y.comp, p.y.s);
        if near_diagonal(geom, &px, &py) {
            continue;
        }
        let w = px.position - py.position;
        let d = w.norm();
        if d == 0.0 {
            continue;
        }
        let (_, psx) = chord_angles(geom, &px, py.position)?;
        let (_, psy) = chord_angles(geom, &py, px.position)?;
        let dup = struts.iter().any(|s| {
            s.x.comp == p.x.comp
                && s.y.comp == p.y.comp
                && arc_separation(
                    geom.component_length(s.x.comp),
                    geom.is_closed(s.x.comp),
                    s.x.s,
                    p.x.s,
                ) < 0.35 * spacing
                && arc_separation(
                    geom.component_length(s.y.comp),
                    geom.is_closed(s.y.comp),
                    s.y.s,
                    p.y.s,
                ) < 0.35 * spacing
        });
        if dup {
            continue;
        }
        struts.push(Strut {
            x: p.x,
            y: p.y,
            length: d,
            direction: w / d,
            psi_star_x: psx,
            psi_star_y: psy,
            family: false,
        });
    }
    mark_families(geom, &mut struts, spacing, ts, opts.strut_tol);

    // Kinks: sampling nodes whose limiting radius is ≤ σ·Ts·(1+tol).
    let mut kinks = Vec::new();
    if ts.is_finite() {
        let r_thr = sigma * ts * (1.0 + opts.kink_tol);
        for (ci, nodes) in sampling.components.iter().enumerate() {
            for n in nodes {
                let k = n.kappa_minus.norm().max(n.kappa_plus.norm());
                if k > 0.0 && 1.0 / k <= r_thr {
                    let kv = if n.kappa_minus.norm() >= n.kappa_plus.norm() {
                        n.kappa_minus
                    } else {
                        n.kappa_plus
                    };
                    kinks.push(Kink {
                        loc: Loc { comp: ci, s: n.point.s },
                        tangent: n.point.tangent,
                        normal: kv / kv.norm(),
                        radius: 1.0 / k,
                    });
                }
            }
        }
    }

    Ok(ThicknessReport { reach, min_rho, ts, sigma, struts, kinks })
}

/// Flag struts that belong to contiguous one-parameter families: at least
/// 10 consecutive refined minimizers along a component agreeing in value.
fn mark_families(
    geom: &dyn CurveGeom,
    struts: &mut [Strut],
    spacing: f64,
    ts: f64,
    strut_tol: f64,
) {
    let mut order: Vec<usize> = (0..struts.len()).collect();
    order.sort_by(|&a, &b| {
        (struts[a].x.comp, struts[a].y.comp)
            .cmp(&(struts[b].x.comp, struts[b].y.comp))
            .then(struts[a].x.s.partial_cmp(&struts[b].x.s).unwrap())
    });
    let mut run: Vec<usize> = Vec::new();
    fn flush(run: &mut Vec<usize>, struts: &mut [Strut]) {
        if run.len() >= 10 {
            for &i in run.iter() {
                struts[i].family = true;
            }
        }
        run.clear();
    }
    for &i in &order {
        if let Some(&prev) = run.last() {
            let same_pair =
                struts[prev].x.comp == struts[i].x.comp && struts[prev].y.comp == struts[i].y.comp;
            let contiguous = same_pair
                && arc_separation(
                    geom.component_length(struts[i].x.comp),
                    geom.is_closed(struts[i].x.comp),
                    struts[prev].x.s,
                    struts[i].x.s,
                ) <= 2.5 * spacing;
            let same_value =
                (struts[prev].length - struts[i].length).abs() <= strut_tol * ts.max(1e-300);
            if !(contiguous && same_value) {
                flush(&mut run, struts);
            }
        }
        run.push(i);
    }
    flush(&mut run, struts);
}

impl ThicknessReport {
    pub fn json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct LocJson {
            comp: usize,
            s: f64,
        }
        #[derive(Serialize)]
        struct StrutJson {
            x: LocJson,
            y: LocJson,
            len: f64,
        }
        #[derive(Serialize)]
        struct KinkJson {
            comp: usize,
            s: f64,
            n: [f64; 3],
            r: f64,
        }
        #[derive(Serialize)]
        struct ReportJson {
            reach: f64,
            min_rho: f64,
            ts: f64,
            sigma: f64,
            struts: Vec<StrutJson>,
            kinks: Vec<KinkJson>,
        }
        serde_json::to_value(ReportJson {
            reach: self.reach,
            min_rho: self.min_rho,
            ts: self.ts,
            sigma: self.sigma,
            struts: self
                .struts
                .iter()
                .map(|s| StrutJson {
                    x: LocJson { comp: s.x.comp, s: s.x.s },
                    y: LocJson { comp: s.y.comp, s: s.y.s },
                    len: s.length,
                })
                .collect(),
            kinks: self
                .kinks
                .iter()
                .map(|k| KinkJson {
                    comp: k.loc.comp,
                    s: k.loc.s,
                    n: [k.normal.x, k.normal.y, k.normal.z],
                    r: k.radius,
                })
                .collect(),
        })
        .expect("report serializes")
    }
}

/// Outward tangent sign at an endpoint location, if `loc` is one.
pub fn outward_sign(geom: &dyn CurveGeom, loc: Loc) -> Option<f64> {
    if geom.is_closed(loc.comp) {
        return None;
    }
    let len = geom.component_length(loc.comp);
    if loc.s <= 1e-9 * len.max(1.0) {
        Some(-1.0)
    } else if loc.s >= len * (1.0 - 1e-9) {
        Some(1.0)
    } else {
        None
    }
}

/// Whether the endpoint nearest to `loc` carries a fixed-tangent constraint.
pub fn endpoint_tangent_fixed(geom: &dyn CurveGeom, loc: Loc) -> bool {
    if let Some((a, b)) = geom.endpoint_constraints(loc.comp) {
        let len = geom.component_length(loc.comp);
        let e = if loc.s < 0.5 * len { a } else { b };
        matches!(e.h1, TangentConstraint::Fixed(_))
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Component, Curve, Segment};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    use crate::testutil::{circle, double_helix};

    #[test]
    fn chord_angle_on_unit_circle_quarter() {
        // Central angle π/2 on the unit circle: chord-tangent geometry
        // gives ψ = π/4.
        let c = circle(1.0);
        let x = c.eval(0, 0.0);
        let y = c.eval(0, PI / 2.0);
        let (psi, psi_star) = chord_angles(&c, &x, y.position).unwrap();
        assert_relative_eq!(psi, PI / 4.0, epsilon = 1e-12);
        assert_eq!(psi, psi_star);
    }

    #[test]
    fn chord_angle_extremes() {
        let c = Curve::new(vec![Component::open(
            vec![Segment::Line { start: V3::zeros(), end: V3::new(1.0, 0.0, 0.0) }],
            None,
        )])
        .unwrap();
        let x = c.eval(0, 0.5);
        // y on the tangent line: ψ = π/2.
        let (psi, _) = chord_angles(&c, &x, V3::new(0.9, 0.0, 0.0)).unwrap();
        assert_relative_eq!(psi, PI / 2.0, epsilon = 1e-12);
        // y in the normal plane: ψ = 0.
        let (psi0, _) = chord_angles(&c, &x, V3::new(0.5, 1.0, 0.0)).unwrap();
        assert_relative_eq!(psi0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn endpoint_halfspace_convention() {
        // Outward chords see ψ* = 0; inward chords see ψ* = ψ.
        let c = Curve::new(vec![Component::open(
            vec![Segment::Line { start: V3::zeros(), end: V3::new(1.0, 0.0, 0.0) }],
            None,
        )])
        .unwrap();
        let x = c.eval(0, 0.0); // endpoint with T_out = -x̂
        let (_, ps_out) = chord_angles(&c, &x, V3::new(-1.0, 0.2, 0.0)).unwrap();
        assert_eq!(ps_out, 0.0);
        let (psi, ps_in) = chord_angles(&c, &x, V3::new(1.0, 0.2, 0.0)).unwrap();
        assert!(ps_in > 0.0);
        assert_eq!(psi, ps_in);
    }

    #[test]
    fn pd_on_circle_closed_form() {
        // pd = 2/sin(θ/2) for central angle θ on the unit circle, min 2 at π.
        let c = circle(1.0);
        for i in 1..=7 {
            let theta = PI * i as f64 / 7.0;
            let v =
                penalized_distance(&c, Loc { comp: 0, s: 0.0 }, Loc { comp: 0, s: theta }, false);
            assert_relative_eq!(v, 2.0 / (theta / 2.0).sin(), epsilon = 1e-10);
        }
        let x = c.eval(0, 0.0);
        let y = c.eval(0, 1.234);
        assert_relative_eq!(tangent_circle_radius(&c, &x, &y, false), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pd_antipodal_and_diagonal() {
        let r = 0.5;
        let c = circle(r);
        let v = penalized_distance(&c, Loc { comp: 0, s: 0.0 }, Loc { comp: 0, s: PI * r }, false);
        assert_relative_eq!(v, 2.0 * r, epsilon = 1e-12);
        let d = penalized_distance(&c, Loc { comp: 0, s: 0.3 }, Loc { comp: 0, s: 0.3 }, false);
        assert!(d.is_infinite());
    }

    #[test]
    fn rho_of_line_and_circle() {
        let line = Curve::new(vec![Component::open(
            vec![Segment::Line { start: V3::zeros(), end: V3::new(1.0, 0.0, 0.0) }],
            None,
        )])
        .unwrap();
        let smp = Sampling::of(&line, 32);
        let (vals, min_rho) = rho_profile(&line, &smp);
        assert!(min_rho.is_infinite());
        assert!(vals[0].iter().all(|v| v.is_infinite()));

        let c = circle(0.7);
        let smp = Sampling::of(&c, 32);
        let (vals, min_rho) = rho_profile(&c, &smp);
        assert_relative_eq!(min_rho, 0.7, epsilon = 1e-12);
        assert!(vals[0].iter().all(|v| (v - 0.7).abs() < 1e-12));
    }

    #[test]
    fn circle_thickness_at_half() {
        // Round circle radius 1, σ = 1/2: reach 1, Ts 2, antipodal strut
        // family, and the whole circle is kinked (R = 1 = σ·Ts).
        let c = circle(1.0);
        let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
        assert_relative_eq!(rep.reach, 1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.ts, 2.0, epsilon = 1e-9);
        assert!(!rep.struts.is_empty());
        assert!(rep.struts.iter().all(|s| (s.length - 2.0).abs() < 1e-8));
        assert!(rep.struts.iter().any(|s| s.family));
        assert!(!rep.kinks.is_empty());
        assert!(rep.kinks.iter().all(|k| (k.radius - 1.0).abs() < 1e-9));
        // Struts are critical pairs.
        assert!(rep.struts.iter().all(|s| s.psi_star_x < 1e-6 && s.psi_star_y < 1e-6));
    }

    #[test]
    fn double_helix_unit_thickness_at_k1() {
        // k = 1 is the marginal pitch: the equal-height contact is a
        // degenerate (quartic) minimum, so heights are only loosely pinned.
        let c = double_helix(1.0, 1.5);
        let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
        assert!((rep.ts - 1.0).abs() < 1e-6, "Ts = {}", rep.ts);
        for s in rep.struts.iter().take(20) {
            let px = c.eval(s.x.comp, s.x.s);
            let py = c.eval(s.y.comp, s.y.s);
            assert!((px.position.z - py.position.z).abs() < 5e-3);
        }
    }

    #[test]
    fn double_helix_equal_height_struts_above_critical_pitch() {
        let c = double_helix(1.2, 1.5);
        let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
        assert!((rep.ts - 1.0).abs() < 1e-8, "Ts = {}", rep.ts);
        assert!(!rep.struts.is_empty());
        for s in &rep.struts {
            let px = c.eval(s.x.comp, s.x.s);
            let py = c.eval(s.y.comp, s.y.s);
            assert!((px.position.z - py.position.z).abs() < 1e-6, "struts at equal heights");
        }
    }

    #[test]
    fn double_helix_below_critical_pitch_is_thin() {
        let c = double_helix(0.8, 1.5);
        let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
        assert!(rep.ts < 1.0 - 1e-4, "Ts = {}", rep.ts);
    }

    #[test]
    fn straight_arc_reports_infinite_thickness() {
        let line = Curve::new(vec![Component::open(
            vec![Segment::Line { start: V3::zeros(), end: V3::new(3.0, 0.0, 0.0) }],
            None,
        )])
        .unwrap();
        let rep = compute_thickness(&line, 0.5, &ThicknessOptions::default()).unwrap();
        assert!(rep.ts.is_infinite());
        assert!(rep.struts.is_empty() && rep.kinks.is_empty());
    }

    #[test]
    fn sigma_below_half_rejected() {
        let c = circle(1.0);
        assert!(matches!(
            compute_thickness(&c, 0.4, &ThicknessOptions::default()),
            Err(ThicknessError::SigmaTooSmall(_))
        ));
    }

    #[test]
    fn scaling_homogeneity() {
        let c = double_helix(1.2, 1.0);
        let opts = ThicknessOptions { samples: 512, ..Default::default() };
        let base = compute_thickness(&c, 0.5, &opts).unwrap();
        for lambda in [0.5, 2.0, 3.0] {
            let scaled = c.scaled(lambda);
            let rep = compute_thickness(&scaled, 0.5, &opts).unwrap();
            assert!(
                (rep.ts - lambda * base.ts).abs() <= 1e-9 * lambda * base.ts,
                "λ={lambda}: {} vs {}",
                rep.ts,
                lambda * base.ts
            );
        }
    }

    #[test]
    fn strut_set_is_interchange_symmetric() {
        let c = double_helix(1.2, 1.0);
        let opts = ThicknessOptions { samples: 512, ..Default::default() };
        let rep = compute_thickness(&c, 0.5, &opts).unwrap();
        assert!(!rep.struts.is_empty());
        let spacing = 4.0 * c.components[0].length() / 512.0;
        for s in &rep.struts {
            let mirrored = rep.struts.iter().any(|t| {
                t.x.comp == s.y.comp
                    && t.y.comp == s.x.comp
                    && (t.x.s - s.y.s).abs() < spacing
                    && (t.y.s - s.x.s).abs() < spacing
                    && (t.length - s.length).abs() < 1e-8
            });
            assert!(mirrored, "no interchange partner for {:?}", (s.x, s.y));
        }
    }
}
