//! Criticality certificates: strut measures, kink tension functions, and
//! the balance equation Ω + V′ = 0.
//!
//! A curve with Ts = 1 is strongly σ-critical iff there are nonnegative
//! strut weights μ and a kink tension φ (supported on constant-curvature
//! arcs with ‖κ‖ = 1/σ) such that the strut force measure Ω = 2(x−y)μ
//! balances V′, where V = (1−2φ)T − σ(φN)′ is the virtual tangent, with
//! Ω{p} ∓ V(p) ⊥ H⁰ₚ at endpoints.
//!
//! The discrete form integrates the measure equation over dual cells of a
//! per-piece grid. Kink-tension terms enter through 4th-order staggered
//! stencils evaluated at cell edges; continuous strut families are carried
//! by two Gauss atoms per cell, which lets the nonnegative least-squares
//! solve drive the in-plane cell residuals to machine zero. Junction atoms
//! of V get their own balance rows.

use serde::Serialize;

use crate::curve::{TangentConstraint, V3};
use crate::geom::CurveGeom;
use crate::nnls::{nnls, Mat};
use crate::quad;
use crate::thickness::{Loc, ThicknessReport};

/// A weighted unordered contact: force 2(x−y)·w at x and 2(y−x)·w at y.
#[derive(Debug, Clone)]
pub struct StrutAtom {
    pub x: Loc,
    pub y: Loc,
    pub weight: f64,
}

/// A one-parameter strut family carried by a density along a host interval.
pub struct StrutFamilyDensity {
    pub comp: usize,
    pub s0: f64,
    pub s1: f64,
    /// Host arclength ↦ partner location.
    pub partner: Box<dyn Fn(f64) -> Loc + Sync>,
    /// Host arclength ↦ weight density (per unit host arclength).
    pub density: Box<dyn Fn(f64) -> f64 + Sync>,
}

/// Nonnegative strut measure: atoms plus absolutely continuous families,
/// interchange-symmetric by construction (each unordered pair acts on both
/// of its endpoints).
#[derive(Default)]
pub struct StrutMeasure {
    pub atoms: Vec<StrutAtom>,
    pub families: Vec<StrutFamilyDensity>,
}

impl StrutMeasure {
    pub fn total_mass(&self) -> f64 {
        let atom_mass: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let family_mass: f64 = self
            .families
            .iter()
            .map(|f| quad::integrate(|s| (f.density)(s), f.s0, f.s1, 1e-10).unwrap_or(0.0))
            .sum();
        atom_mass + family_mass
    }
}

/// Kink tension φ (≥ 0) with its arclength derivative.
pub enum KinkTension {
    Zero,
    /// (comp, s) ↦ (φ, φ′); the closure must vanish off the kink support.
    Analytic(Box<dyn Fn(usize, f64) -> (f64, f64) + Sync>),
    /// Per component, sorted by arclength: (s, φ, φ′).
    Sampled(Vec<Vec<(f64, f64, f64)>>),
}

impl KinkTension {
    pub fn eval(&self, comp: usize, s: f64) -> (f64, f64) {
        match self {
            KinkTension::Zero => (0.0, 0.0),
            KinkTension::Analytic(f) => f(comp, s),
            KinkTension::Sampled(nodes) => {
                let ns = &nodes[comp];
                if ns.is_empty() {
                    return (0.0, 0.0);
                }
                let idx = match ns.binary_search_by(|n| n.0.partial_cmp(&s).unwrap()) {
                    Ok(i) => i,
                    Err(i) => i.saturating_sub(1),
                }
                .min(ns.len().saturating_sub(2));
                if ns.len() == 1 {
                    return (ns[0].1, ns[0].2);
                }
                // Cubic Hermite on (φ, φ′): keeps sampled tensions usable
                // in high-accuracy residual checks.
                let (s0, p0, d0) = ns[idx];
                let (s1, p1, d1) = ns[idx + 1];
                let h = (s1 - s0).max(1e-300);
                let t = ((s - s0) / h).clamp(0.0, 1.0);
                let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
                let h10 = t * (1.0 - t) * (1.0 - t);
                let h01 = t * t * (3.0 - 2.0 * t);
                let h11 = t * t * (t - 1.0);
                let phi_v = h00 * p0 + h10 * h * d0 + h01 * p1 + h11 * h * d1;
                let g00 = 6.0 * t * (t - 1.0) / h;
                let g10 = (1.0 - t) * (1.0 - 3.0 * t);
                let g01 = -6.0 * t * (t - 1.0) / h;
                let g11 = t * (3.0 * t - 2.0);
                let dphi_v = g00 * p0 + g10 * d0 + g01 * p1 + g11 * d1;
                (phi_v, dphi_v)
            }
        }
    }
}

/// Virtual tangent V = (1−2φ)T − σ(φ′N + φN′) at a location; V = T where
/// φ = 0.
pub fn virtual_tangent(geom: &dyn CurveGeom, phi: &KinkTension, sigma: f64, loc: Loc) -> V3 {
    let p = geom.eval(loc.comp, loc.s);
    let (phi_v, dphi_v) = phi.eval(loc.comp, loc.s);
    if phi_v == 0.0 && dphi_v == 0.0 {
        return p.tangent;
    }
    let k = p.curvature.norm();
    let n = if k > 0.0 { p.curvature / k } else { V3::zeros() };
    let ndot = geom.normal_derivative(loc.comp, loc.s);
    (1.0 - 2.0 * phi_v) * p.tangent - sigma * (dphi_v * n + phi_v * ndot)
}

/// One-sided virtual tangents just before/after an interior junction.
fn virtual_tangent_oneside(
    geom: &dyn CurveGeom,
    phi: &KinkTension,
    sigma: f64,
    comp: usize,
    s: f64,
    side: f64,
) -> V3 {
    let len = geom.component_length(comp);
    let eps = 1e-13 * len.max(1.0);
    let s_eval = (s + side * eps).clamp(0.0, len);
    let p = geom.eval(comp, s_eval);
    let (phi_v, dphi_v) = phi.eval(comp, s_eval);
    if phi_v == 0.0 && dphi_v == 0.0 {
        return p.tangent;
    }
    let k = p.curvature.norm();
    let n = if k > 0.0 { p.curvature / k } else { V3::zeros() };
    let ndot = geom.normal_derivative(comp, s_eval);
    (1.0 - 2.0 * phi_v) * p.tangent - sigma * (dphi_v * n + phi_v * ndot)
}

#[derive(Debug, Clone, Serialize)]
pub struct BalanceCertificate {
    pub feasible: bool,
    /// Total-variation norm of the interior residual measure.
    pub residual: f64,
    pub endpoint_residuals: Vec<f64>,
    pub tolerance: f64,
    pub total_strut_mass: f64,
    pub mu: Vec<f64>,
    /// Atoms (including discretized family weights) realizing μ.
    pub strut_atoms: Vec<((usize, f64), (usize, f64), f64)>,
    /// Solved kink tension samples (comp, s, φ).
    pub phi: Vec<(usize, f64, f64)>,
    pub grid_cells: usize,
    pub iterations: usize,
}

impl BalanceCertificate {
    pub fn json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct PhiJson {
            comp: usize,
            s: f64,
            phi: f64,
        }
        #[derive(Serialize)]
        struct CertJson {
            feasible: bool,
            residual: f64,
            mu: Vec<f64>,
            phi: Vec<PhiJson>,
            endpoint_residuals: Vec<f64>,
            tolerance: f64,
            total_strut_mass: f64,
            grid_cells: usize,
        }
        serde_json::to_value(CertJson {
            feasible: self.feasible,
            residual: self.residual,
            mu: self.mu.clone(),
            phi: self
                .phi
                .iter()
                .map(|&(comp, s, phi)| PhiJson { comp, s, phi })
                .collect(),
            endpoint_residuals: self.endpoint_residuals.clone(),
            tolerance: self.tolerance,
            total_strut_mass: self.total_strut_mass,
            grid_cells: self.grid_cells,
        })
        .expect("certificate serializes")
    }
}

/// Feasibility tolerance scale for the balance residual.
pub fn balance_tolerance(geom: &dyn CurveGeom) -> f64 {
    let len: f64 = (0..geom.component_count())
        .map(|c| geom.component_length(c))
        .sum();
    1e-8 * (1.0 + geom.sup_curvature() * len)
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Piece {
    s0: f64,
    s1: f64,
    /// Cell-edge arclengths (m+1 of them, uniform).
    edges: Vec<f64>,
    /// Hermite element mesh for the kink tension (includes the piece
    /// endpoints). φ is a C¹ cubic with nodal values ≥ 0 and free nodal
    /// slopes, so the boundary value and slope entering the junction
    /// equations are unknowns rather than extrapolations.
    phi_nodes: Vec<f64>,
    kinked: bool,
}

#[derive(Debug, Clone)]
struct CompGrid {
    pieces: Vec<Piece>,
    closed: bool,
    len: f64,
}

struct BalanceGrid {
    comps: Vec<CompGrid>,
}

impl Piece {
    fn cells(&self) -> usize {
        self.edges.len() - 1
    }
}

fn build_grid(geom: &dyn CurveGeom, n_per_comp: usize, sigma: f64, ts: f64) -> BalanceGrid {
    let kink_radius = sigma * ts;
    let mut comps = Vec::new();
    for ci in 0..geom.component_count() {
        let len = geom.component_length(ci);
        let mut cuts = geom.junctions(ci);
        cuts.retain(|&s| s > 1e-12 && s < len - 1e-12);
        cuts.insert(0, 0.0);
        cuts.push(len);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * len.max(1.0));
        let h_target = len / n_per_comp as f64;
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            let m = (((s1 - s0) / h_target).ceil() as usize).max(4);
            let edges: Vec<f64> =
                (0..=m).map(|j| s0 + (s1 - s0) * j as f64 / m as f64).collect();
            // A piece carries kink tension iff its curvature sits at the
            // active bound 1/(σ·Ts) throughout.
            let kinked = ts.is_finite() && {
                let probes = 16;
                (0..=probes).all(|i| {
                    let s = s0 + (s1 - s0) * (i as f64 + 0.5) / (probes as f64 + 1.0);
                    let k = geom.eval(ci, s).curvature.norm();
                    k > 0.0 && (1.0 / k - kink_radius).abs() <= 1e-4 * kink_radius
                })
            };
            let n_phi = (m / 4).max(4).min(m);
            let phi_nodes: Vec<f64> = (0..=n_phi)
                .map(|j| s0 + (s1 - s0) * j as f64 / n_phi as f64)
                .collect();
            pieces.push(Piece { s0, s1, edges, phi_nodes, kinked });
        }
        comps.push(CompGrid { pieces, closed: geom.is_closed(ci), len });
    }
    BalanceGrid { comps }
}

/// Lagrange interpolation weights (value, derivative) at `p` for nodes `qs`.
fn lagrange_weights(qs: &[f64], p: f64) -> (Vec<f64>, Vec<f64>) {
    let n = qs.len();
    let mut vals = vec![0.0; n];
    let mut ders = vec![0.0; n];
    for i in 0..n {
        let mut v = 1.0;
        for k in 0..n {
            if k != i {
                v *= (p - qs[k]) / (qs[i] - qs[k]);
            }
        }
        vals[i] = v;
        let mut d = 0.0;
        for k in 0..n {
            if k == i {
                continue;
            }
            let mut term = 1.0 / (qs[i] - qs[k]);
            for l in 0..n {
                if l != i && l != k {
                    term *= (p - qs[l]) / (qs[i] - qs[l]);
                }
            }
            d += term;
        }
        ders[i] = d;
    }
    (vals, ders)
}

/// Quintic-Hermite weights at an edge: φ(e) and φ′(e) as linear
/// combinations of the enclosing element's nodal values, slopes and
/// second derivatives. Each term is (node, [[φ-w, φ′-w] per unknown kind
/// value/slope/second]).
struct EdgeWeights {
    terms: [(usize, [[f64; 2]; 3]); 2],
}

fn edge_weights(piece: &Piece, edge: usize) -> EdgeWeights {
    let nodes = &piece.phi_nodes;
    let s_e = piece.edges[edge];
    let k = match nodes.binary_search_by(|v| v.partial_cmp(&s_e).unwrap()) {
        Ok(i) => i.min(nodes.len() - 2),
        Err(i) => i.saturating_sub(1).min(nodes.len() - 2),
    };
    let h = nodes[k + 1] - nodes[k];
    let t = ((s_e - nodes[k]) / h).clamp(0.0, 1.0);
    let (t2, t3, t4, t5) = (t * t, t * t * t, t * t * t * t, t * t * t * t * t);
    // Quintic Hermite basis on [0, 1].
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * (t3 - 2.0 * t4 + t5);
    // d/dt.
    let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d3 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d5 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    // Unknown scalings: slope columns carry h·H1-type bases, second
    // derivative columns h²·H2-type, so φ′ weights divide by h once.
    EdgeWeights {
        terms: [
            (
                k,
                [
                    [h0, d0 / h],
                    [h * h1, d1],
                    [h * h * h2, h * d2],
                ],
            ),
            (
                k + 1,
                [
                    [h3, d3 / h],
                    [h * h4, d4],
                    [h * h * h5, h * d5],
                ],
            ),
        ],
    }
}

// ---------------------------------------------------------------------------
// Row bookkeeping
// ---------------------------------------------------------------------------

fn locate_cell(grid: &BalanceGrid, loc: Loc) -> Option<(usize, usize)> {
    let cg = &grid.comps[loc.comp];
    for (pi, piece) in cg.pieces.iter().enumerate() {
        if loc.s >= piece.s0 - 1e-12 && loc.s <= piece.s1 + 1e-12 {
            let m = piece.cells();
            let rel = ((loc.s - piece.s0) / (piece.s1 - piece.s0) * m as f64).floor() as usize;
            return Some((pi, rel.min(m - 1)));
        }
    }
    None
}

/// Distance from `loc` to the nearest junction/endpoint cut; snapping
/// atoms onto cuts routes them into junction/endpoint equations.
fn nearest_cut(grid: &BalanceGrid, loc: Loc) -> (f64, f64) {
    let cg = &grid.comps[loc.comp];
    let mut cuts = vec![0.0, cg.len];
    for p in &cg.pieces {
        cuts.push(p.s0);
        cuts.push(p.s1);
    }
    let mut best = (f64::INFINITY, 0.0);
    for c in cuts {
        let d = (loc.s - c).abs();
        if d < best.0 {
            best = (d, c);
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Verification mode
// ---------------------------------------------------------------------------

/// Integrate a weighted strut family into deposit calls: exact per-cell
/// integrals on the host side, and reactions split at the preimages of the
/// partner grid edges (monotone partner map) so no receiving cell sees
/// misallocated mass. `sink(loc, force)` receives either a cell-interior
/// location (cell integral) or an on-cut location (atom).
fn family_forces(
    geom: &dyn CurveGeom,
    grid: &BalanceGrid,
    comp: usize,
    s0: f64,
    s1: f64,
    partner: &(dyn Fn(f64) -> Loc + Sync),
    density: &(dyn Fn(f64) -> f64 + Sync),
    sink: &mut dyn FnMut(Loc, V3),
) {
    // Host side.
    let host = &grid.comps[comp];
    for piece in host.pieces.iter() {
        for cell in 0..piece.cells() {
            let (a, b) = (piece.edges[cell], piece.edges[cell + 1]);
            let lo = a.max(s0);
            let hi = b.min(s1);
            if hi <= lo {
                continue;
            }
            let force_component = |pick: usize| {
                quad::paneled(
                    |s| {
                        let x = geom.eval(comp, s).position;
                        let yl = partner(s);
                        let y = geom.eval(yl.comp, yl.s).position;
                        2.0 * (x - y)[pick] * density(s)
                    },
                    lo,
                    hi,
                    (hi - lo) * 0.51,
                )
            };
            let force = V3::new(force_component(0), force_component(1), force_component(2));
            sink(Loc { comp, s: 0.5 * (a + b) }, force);
        }
    }
    // Reaction side.
    let p_lo = partner(s0);
    let p_hi = partner(s1);
    let constant_partner = p_lo.comp == p_hi.comp
        && (p_lo.s - p_hi.s).abs() < 1e-9 * geom.component_length(p_lo.comp).max(1.0);
    if constant_partner {
        let y = geom.eval(p_lo.comp, p_lo.s).position;
        let component = |pick: usize| {
            quad::paneled(
                |s| 2.0 * (y - geom.eval(comp, s).position)[pick] * density(s),
                s0,
                s1,
                (s1 - s0).abs() / 16.0 + 1e-9,
            )
        };
        sink(p_lo, V3::new(component(0), component(1), component(2)));
        return;
    }
    let partner_comp = p_lo.comp;
    let partner_s = |s: f64| partner(s).s;
    let (q0, q1) = (partner_s(s0), partner_s(s1));
    let (q_min, q_max) = (q0.min(q1), q0.max(q1));
    let mut edges: Vec<f64> = grid.comps[partner_comp]
        .pieces
        .iter()
        .flat_map(|p| p.edges.iter().copied())
        .filter(|&e| e > q_min + 1e-13 && e < q_max - 1e-13)
        .collect();
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let mut breaks = vec![s0];
    let increasing = q1 > q0;
    let targets: Vec<f64> = if increasing {
        edges.clone()
    } else {
        edges.iter().rev().copied().collect()
    };
    let mut lo_s = s0;
    for &edge in &targets {
        let mut a = lo_s;
        let mut b = s1;
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if (partner_s(mid) >= edge) == increasing {
                b = mid;
            } else {
                a = mid;
            }
        }
        let found = 0.5 * (a + b);
        breaks.push(found);
        lo_s = found;
    }
    breaks.push(s1);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-13 {
            continue;
        }
        let component = |pick: usize| {
            quad::paneled(
                |s| {
                    let x = geom.eval(comp, s).position;
                    let yl = partner(s);
                    let y = geom.eval(yl.comp, yl.s).position;
                    2.0 * (y - x)[pick] * density(s)
                },
                a,
                b,
                (b - a) * 0.51,
            )
        };
        let force = V3::new(component(0), component(1), component(2));
        let target = Loc { comp: partner_comp, s: partner_s(0.5 * (a + b)) };
        sink(target, force);
    }
}

/// Strut force measure Ω integrated over the grid cells (and accumulated at
/// junction/endpoint cuts), for a fully specified measure.
fn omega_on_grid(
    geom: &dyn CurveGeom,
    grid: &BalanceGrid,
    measure: &StrutMeasure,
    snap: f64,
) -> (Vec<Vec<Vec<V3>>>, Vec<std::collections::HashMap<i64, V3>>) {
    let mut cells: Vec<Vec<Vec<V3>>> = grid
        .comps
        .iter()
        .map(|cg| cg.pieces.iter().map(|p| vec![V3::zeros(); p.cells()]).collect())
        .collect();
    // Atom forces at cuts, keyed by quantized arclength.
    let mut cut_atoms: Vec<std::collections::HashMap<i64, V3>> =
        vec![Default::default(); grid.comps.len()];

    fn deposit(
        grid: &BalanceGrid,
        cells: &mut [Vec<Vec<V3>>],
        cut_atoms: &mut [std::collections::HashMap<i64, V3>],
        snap: f64,
        loc: Loc,
        force: V3,
    ) {
        let (d, cut) = nearest_cut(grid, loc);
        if d <= snap {
            let key = (cut / snap.max(1e-300)).round() as i64;
            *cut_atoms[loc.comp].entry(key).or_insert_with(V3::zeros) += force;
        } else if let Some((pi, cell)) = locate_cell(grid, loc) {
            cells[loc.comp][pi][cell] += force;
        }
    }

    for a in &measure.atoms {
        let px = geom.eval(a.x.comp, a.x.s).position;
        let py = geom.eval(a.y.comp, a.y.s).position;
        deposit(grid, &mut cells, &mut cut_atoms, snap, a.x, 2.0 * (px - py) * a.weight);
        deposit(grid, &mut cells, &mut cut_atoms, snap, a.y, 2.0 * (py - px) * a.weight);
    }

    for fam in &measure.families {
        let mut sink = |loc: Loc, force: V3| {
            deposit(grid, &mut cells, &mut cut_atoms, snap, loc, force);
        };
        family_forces(
            geom,
            grid,
            fam.comp,
            fam.s0,
            fam.s1,
            fam.partner.as_ref(),
            fam.density.as_ref(),
            &mut sink,
        );
    }
    (cells, cut_atoms)
}

/// Diagnostic: print the worst residual cells/junctions.
pub fn debug_residual_breakdown(
    geom: &dyn CurveGeom,
    sigma: f64,
    measure: &StrutMeasure,
    phi: &KinkTension,
    n_per_comp: usize,
) {
    let grid = build_grid(geom, n_per_comp, sigma, 1.0);
    let snap = {
        let total: f64 = (0..geom.component_count())
            .map(|c| geom.component_length(c))
            .sum();
        1e-7 * total.max(1.0)
    };
    let (omega_cells, cut_atoms) = omega_on_grid(geom, &grid, measure, snap);
    let mut rows: Vec<(String, f64)> = Vec::new();
    for (ci, cg) in grid.comps.iter().enumerate() {
        for (pi, piece) in cg.pieces.iter().enumerate() {
            for cell in 0..piece.cells() {
                let v_lo = virtual_tangent_oneside(geom, phi, sigma, ci, piece.edges[cell], 1.0);
                let v_hi =
                    virtual_tangent_oneside(geom, phi, sigma, ci, piece.edges[cell + 1], -1.0);
                let r = omega_cells[ci][pi][cell] + v_hi - v_lo;
                rows.push((
                    format!("comp{ci} piece{pi} cell{cell} s=[{:.4},{:.4}]", piece.edges[cell], piece.edges[cell+1]),
                    r.norm(),
                ));
            }
        }
        let mut cuts: Vec<f64> = cg.pieces.iter().map(|p| p.s0).collect();
        if !cg.closed {
            cuts.retain(|&s| s > 1e-12);
        }
        for cut in cuts {
            let v_minus = virtual_tangent_oneside(geom, phi, sigma, ci, cut, -1.0);
            let v_plus = virtual_tangent_oneside(geom, phi, sigma, ci, cut, 1.0);
            let key = (cut / snap.max(1e-300)).round() as i64;
            let atom = cut_atoms[ci].get(&key).copied().unwrap_or_else(V3::zeros);
            rows.push((format!("comp{ci} junction s={cut:.4}"), (atom + v_plus - v_minus).norm()));
        }
    }
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    for (name, r) in rows.iter().take(14) {
        println!("{name}: {r:.3e}");
    }
    let total: f64 = rows.iter().map(|r| r.1).sum();
    println!("total: {total:.3e}");
}

/// Verify a fully specified certificate: residual of Ω + V′ = 0 over the
/// grid, plus endpoint conditions. With analytic inputs the only error is
/// quadrature.
pub fn balance_residual(
    geom: &dyn CurveGeom,
    sigma: f64,
    measure: &StrutMeasure,
    phi: &KinkTension,
    n_per_comp: usize,
) -> BalanceCertificate {
    let grid = build_grid(geom, n_per_comp, sigma, 1.0);
    let snap = {
        let total: f64 = (0..geom.component_count())
            .map(|c| geom.component_length(c))
            .sum();
        1e-7 * total.max(1.0)
    };
    let (omega_cells, cut_atoms) = omega_on_grid(geom, &grid, measure, snap);

    let mut residual = 0.0;
    let mut cells_count = 0;
    for (ci, cg) in grid.comps.iter().enumerate() {
        for (pi, piece) in cg.pieces.iter().enumerate() {
            for cell in 0..piece.cells() {
                let v_lo = virtual_tangent_oneside(geom, phi, sigma, ci, piece.edges[cell], 1.0);
                let v_hi =
                    virtual_tangent_oneside(geom, phi, sigma, ci, piece.edges[cell + 1], -1.0);
                let r = omega_cells[ci][pi][cell] + v_hi - v_lo;
                residual += r.norm();
                cells_count += 1;
            }
        }
        // Junction equations at interior cuts (and the seam of closed comps).
        let mut cuts: Vec<f64> = cg.pieces.iter().map(|p| p.s0).collect();
        if cg.closed {
            // seam handled below via 0 ↔ len
        } else {
            cuts.retain(|&s| s > 1e-12);
        }
        for cut in cuts {
            let (before_s, after_s) = if cut <= 1e-12 {
                (cg.len, 0.0)
            } else {
                (cut, cut)
            };
            let v_minus = virtual_tangent_oneside(geom, phi, sigma, ci, before_s, -1.0);
            let v_plus = virtual_tangent_oneside(geom, phi, sigma, ci, after_s, 1.0);
            let key = (cut / snap.max(1e-300)).round() as i64;
            let atom = cut_atoms[ci].get(&key).copied().unwrap_or_else(V3::zeros);
            residual += (atom + v_plus - v_minus).norm();
        }
    }

    // Endpoint conditions Ω{p} ∓ V(p) ⊥ H⁰ₚ.
    let mut endpoint_residuals = Vec::new();
    for (ci, cg) in grid.comps.iter().enumerate() {
        if cg.closed {
            continue;
        }
        for (end, (s, eps_sign)) in [(0.0, -1.0), (cg.len, 1.0)].iter().enumerate() {
            let v = virtual_tangent_oneside(geom, phi, sigma, ci, *s, -eps_sign);
            let key = (*s / snap.max(1e-300)).round() as i64;
            let atom = cut_atoms[ci].get(&key).copied().unwrap_or_else(V3::zeros);
            let q = atom - *eps_sign * v;
            let r = match geom.endpoint_constraints(ci) {
                Some((a, b)) => {
                    let c = if end == 0 { a } else { b };
                    c.h0.project(q).norm()
                }
                // No constraint: the endpoint is free, everything must vanish.
                None => q.norm(),
            };
            endpoint_residuals.push(r);
        }
    }

    let tolerance = balance_tolerance(geom);
    let mass = measure.total_mass();
    let feasible = residual <= tolerance * (1.0 + mass)
        && endpoint_residuals.iter().all(|&r| r <= tolerance * (1.0 + mass));
    BalanceCertificate {
        feasible,
        residual,
        endpoint_residuals,
        tolerance,
        total_strut_mass: mass,
        mu: vec![],
        strut_atoms: vec![],
        phi: vec![],
        grid_cells: cells_count,
        iterations: 0,
    }
}

// ---------------------------------------------------------------------------
// Synthesis mode
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub grid_per_component: usize,
    /// Required agreement of Ts with 1 before solving.
    pub ts_tol: f64,
    /// Solve the curvature-only problem (the σ → ∞ normalization of the
    /// strut-free families): the constraint is min ρ = 1 alone, struts are
    /// ignored, and the Ts precondition is waived.
    pub curvature_only: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { grid_per_component: 512, ts_tol: 1e-6, curvature_only: false }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BalanceError {
    #[error("solve_balance requires Ts = 1 within {tol} (got {ts}); rescale the curve first")]
    NotUnitThickness { ts: f64, tol: f64 },
    #[error("active-set solver did not converge")]
    SolverStalled,
}

/// One unknown of the discrete problem. Nodal kink-tension slopes are
/// sign-split so everything stays in the nonnegative cone.
enum Column {
    /// Strut atom between two fixed locations.
    Atom { x: Loc, y: Loc },
    /// φ value at a Hermite node of a kinked piece (≥ 0).
    PhiVal { comp: usize, piece: usize, node: usize },
    /// ± part of the φ slope at a Hermite node.
    PhiSlope { comp: usize, piece: usize, node: usize, positive: bool },
    /// ± part of the φ second derivative at a Hermite node.
    PhiSecond { comp: usize, piece: usize, node: usize, positive: bool },
}

/// Group detected struts into family runs and isolated atoms. A run is a
/// chain that is contiguous in BOTH arclengths: distinct partner branches
/// through the same host points (e.g. the two conjugate arcs seen from one
/// clasp component) separate into their own runs.
fn family_runs(
    geom: &dyn CurveGeom,
    report: &ThicknessReport,
) -> (Vec<Vec<(Loc, Loc)>>, Vec<(Loc, Loc)>) {
    let mut order: Vec<usize> = (0..report.struts.len()).collect();
    order.sort_by(|&a, &b| {
        let sa = &report.struts[a];
        let sb = &report.struts[b];
        (sa.x.comp, sa.y.comp)
            .cmp(&(sb.x.comp, sb.y.comp))
            .then(sa.x.s.partial_cmp(&sb.x.s).unwrap())
            .then(sa.y.s.partial_cmp(&sb.y.s).unwrap())
    });
    let spacing = |comp: usize| geom.component_length(comp) / 128.0;
    let mut families: Vec<Vec<(Loc, Loc)>> = Vec::new();
    let mut isolated: Vec<(Loc, Loc)> = Vec::new();
    // Open branches for the current (x.comp, y.comp) group.
    let mut branches: Vec<Vec<(Loc, Loc)>> = Vec::new();
    let mut current_group: Option<(usize, usize)> = None;
    let mut flush_all = |branches: &mut Vec<Vec<(Loc, Loc)>>,
                         families: &mut Vec<Vec<(Loc, Loc)>>,
                         isolated: &mut Vec<(Loc, Loc)>| {
        for b in branches.drain(..) {
            if b.len() >= 3 {
                families.push(b);
            } else {
                isolated.extend(b);
            }
        }
    };
    for &i in &order {
        let st = &report.struts[i];
        let group = (st.x.comp, st.y.comp);
        if current_group != Some(group) {
            flush_all(&mut branches, &mut families, &mut isolated);
            current_group = Some(group);
        }
        if !st.family {
            isolated.push((st.x, st.y));
            continue;
        }
        let dx_tol = spacing(st.x.comp);
        let dy_tol = spacing(st.y.comp);
        let target = branches.iter_mut().find(|b| {
            let (lx, ly) = *b.last().unwrap();
            (st.x.s - lx.s).abs() <= dx_tol && (st.y.s - ly.s).abs() <= dy_tol
        });
        match target {
            Some(b) => b.push((st.x, st.y)),
            None => branches.push(vec![(st.x, st.y)]),
        }
    }
    flush_all(&mut branches, &mut families, &mut isolated);
    for fam in &mut families {
        fam.sort_by(|a, b| a.0.s.partial_cmp(&b.0.s).unwrap());
    }
    (families, isolated)
}

/// Refine the partner arclength t so that x(s) − y(t) ⊥ T_y(t).
fn refine_partner(geom: &dyn CurveGeom, host: Loc, partner_guess: Loc) -> Loc {
    let x = geom.eval(host.comp, host.s).position;
    let len = geom.component_length(partner_guess.comp);
    let closed = geom.is_closed(partner_guess.comp);
    let mut t = partner_guess.s;
    for _ in 0..8 {
        let p = geom.eval(partner_guess.comp, t);
        let g = (p.position - x).dot(&p.tangent);
        let dg = 1.0 + (p.position - x).dot(&p.curvature);
        if dg.abs() < 1e-12 {
            break;
        }
        let step = -g / dg;
        t += step;
        t = if closed { t.rem_euclid(len) } else { t.clamp(0.0, len) };
        if step.abs() < 1e-14 * len.max(1.0) {
            break;
        }
    }
    Loc { comp: partner_guess.comp, s: t }
}

/// Piecewise-linear partner interpolation along a family run.
fn interp_partner(run: &[(Loc, Loc)], s: f64) -> Loc {
    let comp = run[0].1.comp;
    if run.len() == 1 {
        return run[0].1;
    }
    let idx = match run.binary_search_by(|(x, _)| x.s.partial_cmp(&s).unwrap()) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    }
    .min(run.len() - 2);
    let (x0, y0) = run[idx];
    let (x1, y1) = run[idx + 1];
    let t = ((s - x0.s) / (x1.s - x0.s).max(1e-300)).clamp(0.0, 1.0);
    Loc { comp, s: y0.s + t * (y1.s - y0.s) }
}

/// Solve for a nonnegative strut measure and kink tension balancing the
/// curve (Ts must already be 1). Returns the certificate; `feasible`
/// reports whether the optimum lies under the residual tolerance.
pub fn solve_balance(
    geom: &dyn CurveGeom,
    sigma: f64,
    report: &ThicknessReport,
    opts: &SolveOptions,
) -> Result<BalanceCertificate, BalanceError> {
    if !opts.curvature_only
        && !(report.ts.is_finite() && (report.ts - 1.0).abs() <= opts.ts_tol)
    {
        return Err(BalanceError::NotUnitThickness { ts: report.ts, tol: opts.ts_tol });
    }
    let ts_for_grid = if opts.curvature_only { 1.0 } else { report.ts };
    let grid = build_grid(geom, opts.grid_per_component, sigma, ts_for_grid);
    let total_len: f64 = (0..geom.component_count())
        .map(|c| geom.component_length(c))
        .sum();
    let snap_tol = 1e-4 * total_len.max(1.0) / opts.grid_per_component as f64
        + 1e-6 * total_len.max(1.0) / 512.0;

    // --- rows ---
    let mut rows = 0usize;
    let mut cell_rows: Vec<Vec<Vec<usize>>> = Vec::new();
    for cg in &grid.comps {
        let mut per_piece = Vec::new();
        for piece in &cg.pieces {
            let mut per_cell = Vec::new();
            for _ in 0..piece.cells() {
                per_cell.push(rows);
                rows += 3;
            }
            per_piece.push(per_cell);
        }
        cell_rows.push(per_piece);
    }
    // junction rows: per comp, cuts (interior; seam for closed)
    let mut junction_rows: Vec<Vec<(f64, usize)>> = Vec::new();
    for cg in &grid.comps {
        let mut per_comp = Vec::new();
        let mut cuts: Vec<f64> = cg.pieces.iter().map(|p| p.s0).collect();
        if !cg.closed {
            cuts.retain(|&s| s > 1e-12);
        }
        for cut in cuts {
            per_comp.push((cut, rows));
            rows += 3;
        }
        junction_rows.push(per_comp);
    }
    // endpoint rows
    struct EndpointRows {
        comp: usize,
        s: f64,
        eps_sign: f64,
        row: usize,
        dirs: Vec<V3>,
        phi_zero_row: Option<usize>,
    }
    let mut endpoint_rows: Vec<EndpointRows> = Vec::new();
    for (ci, cg) in grid.comps.iter().enumerate() {
        if cg.closed {
            continue;
        }
        for (end, (s, eps_sign)) in [(0.0f64, -1.0f64), (cg.len, 1.0)].iter().enumerate() {
            let (dirs, free_tangent) = match geom.endpoint_constraints(ci) {
                Some((a, b)) => {
                    let c = if end == 0 { a } else { b };
                    (
                        c.h0.basis.clone(),
                        matches!(c.h1, TangentConstraint::Free),
                    )
                }
                None => (vec![V3::x(), V3::y(), V3::z()], true),
            };
            let row = rows;
            rows += dirs.len();
            let phi_zero_row = if free_tangent {
                let r = rows;
                rows += 1;
                Some(r)
            } else {
                None
            };
            endpoint_rows.push(EndpointRows {
                comp: ci,
                s: *s,
                eps_sign: *eps_sign,
                row,
                dirs,
                phi_zero_row,
            });
        }
    }

    // --- columns ---
    let (families, isolated) = if opts.curvature_only {
        (Vec::new(), Vec::new())
    } else {
        family_runs(geom, report)
    };
    if std::env::var("ROPECRIT_DEBUG_RUNS").is_ok() {
        eprintln!("runs: {} families, {} isolated", families.len(), isolated.len());
        for f in &families {
            eprintln!(
                "  family len {} host c{} x [{:.4},{:.4}] partner c{} y [{:.4},{:.4}]",
                f.len(),
                f[0].0.comp,
                f.first().unwrap().0.s,
                f.last().unwrap().0.s,
                f[0].1.comp,
                f.iter().map(|p| p.1.s).fold(f64::INFINITY, f64::min),
                f.iter().map(|p| p.1.s).fold(0.0f64, f64::max),
            );
        }
    }
    let mut columns: Vec<Column> = Vec::new();
    // Deduplicate isolated struts against their interchanged twins.
    let mut iso_dedup: Vec<(Loc, Loc)> = Vec::new();
    for &(x, y) in &isolated {
        let twin = iso_dedup.iter().any(|&(a, b)| {
            let close = |p: Loc, q: Loc| {
                p.comp == q.comp
                    && (p.s - q.s).abs() < 1e-3 * geom.component_length(p.comp).max(1.0)
            };
            (close(a, x) && close(b, y)) || (close(a, y) && close(b, x))
        });
        if !twin {
            iso_dedup.push((x, y));
        }
    }
    for &(x, y) in &iso_dedup {
        // Snap near-cut atoms onto the cut so they enter junction rows.
        let sx = snap_loc(&grid, x, snap_tol);
        let sy = snap_loc(&grid, y, snap_tol);
        columns.push(Column::Atom { x: sx, y: sy });
    }
    // Families: piecewise-linear hat densities on the host grid, one
    // unknown per support node. The hats are integrated exactly on both
    // the host and the reaction side, so the density the solver finds is
    // transported without per-cell misallocation.
    struct FamilyColumn {
        run: Vec<(Loc, Loc)>,
        comp: usize,
        lo: f64,
        mid: f64,
        hi: f64,
    }
    let mut family_columns: Vec<FamilyColumn> = Vec::new();
    for run in &families {
        let comp = run[0].0.comp;
        let s_min = run.first().unwrap().0.s;
        let s_max = run.last().unwrap().0.s;
        let cg = &grid.comps[comp];
        let mut nodes: Vec<f64> = vec![s_min];
        for piece in &cg.pieces {
            for &e in &piece.edges {
                if e > s_min + 1e-12 && e < s_max - 1e-12 {
                    nodes.push(e);
                }
            }
        }
        nodes.push(s_max);
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for (j, &mid) in nodes.iter().enumerate() {
            let lo = if j == 0 { mid } else { nodes[j - 1] };
            let hi = if j + 1 == nodes.len() { mid } else { nodes[j + 1] };
            family_columns.push(FamilyColumn { run: run.clone(), comp, lo, mid, hi });
        }
    }
    let family_col_start = columns.len();
    let mut column_mass_weight = vec![1.0; family_col_start];
    for fc in &family_columns {
        // Placeholder endpoints for reporting; the coupling is assembled
        // from the hat integrals below. The unknown is a density value, so
        // its mass contribution carries the hat integral.
        columns.push(Column::Atom {
            x: Loc { comp: fc.comp, s: fc.mid },
            y: interp_partner(&fc.run, fc.mid),
        });
        column_mass_weight.push(0.5 * (fc.hi - fc.lo));
    }

    // Hermite kink-tension unknowns on kinked pieces: per node a value and
    // a sign-split slope, laid out contiguously for O(1) lookup.
    let mut phi_base: std::collections::HashMap<(usize, usize), usize> = Default::default();
    for (ci, cg) in grid.comps.iter().enumerate() {
        for (pi, piece) in cg.pieces.iter().enumerate() {
            if piece.kinked {
                phi_base.insert((ci, pi), columns.len());
                for node in 0..piece.phi_nodes.len() {
                    columns.push(Column::PhiVal { comp: ci, piece: pi, node });
                    columns.push(Column::PhiSlope { comp: ci, piece: pi, node, positive: true });
                    columns.push(Column::PhiSlope { comp: ci, piece: pi, node, positive: false });
                    columns.push(Column::PhiSecond { comp: ci, piece: pi, node, positive: true });
                    columns.push(Column::PhiSecond { comp: ci, piece: pi, node, positive: false });
                }
            }
        }
    }

    // --- assembly ---
    let ncols = columns.len();
    let mut a = Mat::zeros(rows, ncols);
    let mut b = vec![0.0; rows];

    // Constant part: cell rows get −(T(e⁺) − T(e⁻)) so that A z + (T⁺−T⁻)=r
    // becomes min ‖A z − b‖ with b = T(e⁻) − T(e⁺).
    for (ci, cg) in grid.comps.iter().enumerate() {
        for (pi, piece) in cg.pieces.iter().enumerate() {
            for cell in 0..piece.cells() {
                let t_lo = geom.eval(ci, piece.edges[cell] + 1e-12).tangent;
                let t_hi = geom.eval(ci, (piece.edges[cell + 1] - 1e-12).max(0.0)).tangent;
                let row = cell_rows[ci][pi][cell];
                for k in 0..3 {
                    b[row + k] = t_lo[k] - t_hi[k];
                }
            }
        }
        // Junction rows: tangent is continuous, so the constant part is 0.
    }
    for er in &endpoint_rows {
        let t = geom.eval(er.comp, er.s).tangent;
        for (k, d) in er.dirs.iter().enumerate() {
            // residual = proj(Ω{p} − ε V(p)); constant part is −ε T(p).
            b[er.row + k] = er.eps_sign * d.dot(&t);
        }
    }

    // Column assembly helpers.
    let deposit_force = |a: &mut Mat, col: usize, loc: Loc, force: V3, grid: &BalanceGrid| {
        // Route to junction/endpoint rows when sitting on a cut.
        let cg = &grid.comps[loc.comp];
        for &(cut, row) in &junction_rows[loc.comp] {
            if (loc.s - cut).abs() <= snap_tol
                || (cg.closed && cut <= 1e-12 && (loc.s - cg.len).abs() <= snap_tol)
            {
                for k in 0..3 {
                    a.add(row + k, col, force[k]);
                }
                return;
            }
        }
        for er in &endpoint_rows {
            if er.comp == loc.comp && (loc.s - er.s).abs() <= snap_tol {
                for (k, d) in er.dirs.iter().enumerate() {
                    a.add(er.row + k, col, d.dot(&force));
                }
                return;
            }
        }
        if let Some((pi, cell)) = locate_cell(grid, loc) {
            let row = cell_rows[loc.comp][pi][cell];
            for k in 0..3 {
                a.add(row + k, col, force[k]);
            }
        }
    };

    for (col, column) in columns.iter().enumerate() {
        if col >= family_col_start && col < family_col_start + family_columns.len() {
            continue; // hat-density family columns are assembled below
        }
        match column {
            Column::Atom { x, y } => {
                let px = geom.eval(x.comp, x.s).position;
                let py = geom.eval(y.comp, y.s).position;
                deposit_force(&mut a, col, *x, 2.0 * (px - py), &grid);
                deposit_force(&mut a, col, *y, 2.0 * (py - px), &grid);
            }
            Column::PhiVal { .. } | Column::PhiSlope { .. } | Column::PhiSecond { .. } => {}
        }
    }

    for (fi, fc) in family_columns.iter().enumerate() {
        let col = family_col_start + fi;
        let run = fc.run.clone();
        let partner = move |s: f64| refine_partner(geom, Loc { comp: fc.comp, s }, interp_partner(&run, s));
        let (lo, mid, hi) = (fc.lo, fc.mid, fc.hi);
        let hat = move |s: f64| -> f64 {
            if s < lo || s > hi {
                0.0
            } else if s <= mid {
                if mid > lo {
                    (s - lo) / (mid - lo)
                } else {
                    1.0
                }
            } else if hi > mid {
                (hi - s) / (hi - mid)
            } else {
                1.0
            }
        };
        let mut sink = |loc: Loc, force: V3| {
            deposit_force(&mut a, col, loc, force, &grid);
        };
        family_forces(geom, &grid, fc.comp, fc.lo, fc.hi, &partner, &hat, &mut sink);
    }

    // Edge-driven scatter of the kink-tension terms: geometry is evaluated
    // once per edge, then the V-derivatives flow into the two adjacent
    // cell rows (interior edges) or the junction/endpoint rows (piece
    // boundaries).
    for (ci, cg) in grid.comps.iter().enumerate() {
        for (pi, pc) in cg.pieces.iter().enumerate() {
            if !pc.kinked {
                continue;
            }
            let base = phi_base[&(ci, pi)];
            let m = pc.cells();
            for edge in 0..=m {
                let s_e = pc.edges[edge];
                let s_eval = (s_e + if edge == 0 { 1e-12 } else { -1e-12 }).clamp(0.0, cg.len);
                let p = geom.eval(ci, s_eval);
                let kn = p.curvature.norm();
                let n_vec = if kn > 0.0 { p.curvature / kn } else { V3::zeros() };
                let ndot = geom.normal_derivative(ci, s_eval);
                let w = edge_weights(pc, edge);
                // dV for a unit of the unknown with basis weights
                // (φ-weight wv, φ′-weight wd).
                let dv_of = |wv: f64, wd: f64| -> V3 {
                    -2.0 * wv * p.tangent - sigma * (wd * n_vec + wv * ndot)
                };
                let mut scatter = |col: usize, dv: V3, a: &mut Mat| {
                    if edge > 0 {
                        let row = cell_rows[ci][pi][edge - 1];
                        for k in 0..3 {
                            a.add(row + k, col, dv[k]);
                        }
                    }
                    if edge < m {
                        let row = cell_rows[ci][pi][edge];
                        for k in 0..3 {
                            a.add(row + k, col, -dv[k]);
                        }
                    }
                    if edge == 0 || edge == m {
                        let s_cut = if edge == 0 { pc.s0 } else { pc.s1 };
                        let mut handled = false;
                        for &(cut, row) in &junction_rows[ci] {
                            let is_cut = (s_cut - cut).abs() <= snap_tol
                                || (cg.closed
                                    && cut <= 1e-12
                                    && (s_cut - cg.len).abs() <= snap_tol);
                            if is_cut {
                                // Junction residual = atom + V(j⁺) − V(j⁻).
                                let sign = if edge == 0 { 1.0 } else { -1.0 };
                                for k in 0..3 {
                                    a.add(row + k, col, sign * dv[k]);
                                }
                                handled = true;
                                break;
                            }
                        }
                        if !handled {
                            for er in &endpoint_rows {
                                if er.comp == ci && (er.s - s_cut).abs() <= snap_tol {
                                    // residual = proj(Ω{p} − ε V(p)).
                                    for (k, d) in er.dirs.iter().enumerate() {
                                        a.add(er.row + k, col, -er.eps_sign * d.dot(&dv));
                                    }
                                }
                            }
                        }
                    }
                };
                for (node, kind_w) in w.terms {
                    let col_val = base + 5 * node;
                    let dv_val = dv_of(kind_w[0][0], kind_w[0][1]);
                    scatter(col_val, dv_val, &mut a);
                    let dv_slope = dv_of(kind_w[1][0], kind_w[1][1]);
                    scatter(col_val + 1, dv_slope, &mut a);
                    scatter(col_val + 2, -dv_slope, &mut a);
                    let dv_second = dv_of(kind_w[2][0], kind_w[2][1]);
                    scatter(col_val + 3, dv_second, &mut a);
                    scatter(col_val + 4, -dv_second, &mut a);
                }
            }
            // φ(p) = 0 rows at free-tangent endpoints: the boundary node
            // value is the tension there, exactly.
            for er in &endpoint_rows {
                if er.comp != ci {
                    continue;
                }
                let Some(r0) = er.phi_zero_row else { continue };
                if (er.s - pc.s0).abs() <= snap_tol {
                    a.add(r0, base, 1.0);
                }
                if (er.s - pc.s1).abs() <= snap_tol {
                    a.add(r0, base + 5 * (pc.phi_nodes.len() - 1), 1.0);
                }
            }
        }
    }

    if std::env::var("ROPECRIT_DEBUG_PHI1").is_ok() {
        // Residual of the all-ones kink tension with zero strut weights.
        let mut r = vec![0.0; rows];
        for (col, column) in columns.iter().enumerate() {
            if matches!(column, Column::PhiVal { .. }) {
                for (ri, aij) in r.iter_mut().zip(a.col(col)) {
                    *ri += aij;
                }
            }
        }
        let mut worst = (0usize, 0.0f64);
        for (i, ri) in r.iter_mut().enumerate() {
            *ri -= b[i];
            if ri.abs() > worst.1 {
                worst = (i, ri.abs());
            }
        }
        let tv: f64 = r.iter().map(|x| x.abs()).sum();
        eprintln!("phi=1 residual: tv {tv:.3e}, worst row {} = {:.3e} (rows {rows})", worst.0, worst.1);
    }
    let sol = nnls(&a, &b);
    if !sol.converged {
        return Err(BalanceError::SolverStalled);
    }
    if std::env::var("ROPECRIT_DEBUG_SOLVE").is_ok() {
        eprintln!(
            "solve_balance: rows {rows} cols {ncols} support {} iters {} l2 {:.3e} grad {:.3e}",
            sol.support, sol.iterations, sol.residual_norm, sol.max_gradient
        );
        // Worst rows by group.
        let mut r_dbg = vec![0.0; rows];
        for j in 0..ncols {
            let xj = sol.x[j];
            if xj != 0.0 {
                for (ri, aij) in r_dbg.iter_mut().zip(a.col(j)) {
                    *ri += aij * xj;
                }
            }
        }
        for (ri, bi) in r_dbg.iter_mut().zip(&b) {
            *ri -= bi;
        }
        let mut groups: Vec<(String, f64)> = Vec::new();
        for (ci, cg) in grid.comps.iter().enumerate() {
            for (pi, piece) in cg.pieces.iter().enumerate() {
                for cell in 0..piece.cells() {
                    let row = cell_rows[ci][pi][cell];
                    let n = (r_dbg[row].powi(2) + r_dbg[row + 1].powi(2) + r_dbg[row + 2].powi(2))
                        .sqrt();
                    groups.push((
                        format!("c{ci} p{pi} cell{cell} s=[{:.3},{:.3}]", piece.edges[cell], piece.edges[cell + 1]),
                        n,
                    ));
                }
            }
            for &(cut, row) in &junction_rows[ci] {
                let n = (r_dbg[row].powi(2) + r_dbg[row + 1].powi(2) + r_dbg[row + 2].powi(2))
                    .sqrt();
                groups.push((format!("c{ci} junction s={cut:.3}"), n));
            }
        }
        groups.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());
        for (name, v) in groups.iter().take(10) {
            eprintln!("   worst {name}: {v:.3e}");
        }
    }

    // Total-variation residual, grouped per cell/junction/endpoint row.
    let mut r = vec![0.0; rows];
    for j in 0..ncols {
        let xj = sol.x[j];
        if xj != 0.0 {
            for (ri, aij) in r.iter_mut().zip(a.col(j)) {
                *ri += aij * xj;
            }
        }
    }
    for (ri, bi) in r.iter_mut().zip(&b) {
        *ri -= bi;
    }
    let mut residual = 0.0;
    let mut cells_count = 0;
    for (ci, cg) in grid.comps.iter().enumerate() {
        for (pi, piece) in cg.pieces.iter().enumerate() {
            for cell in 0..piece.cells() {
                let row = cell_rows[ci][pi][cell];
                residual += (r[row] * r[row] + r[row + 1] * r[row + 1] + r[row + 2] * r[row + 2])
                    .sqrt();
                cells_count += 1;
            }
        }
        for &(_, row) in &junction_rows[ci] {
            residual +=
                (r[row] * r[row] + r[row + 1] * r[row + 1] + r[row + 2] * r[row + 2]).sqrt();
        }
    }
    let mut endpoint_residuals = Vec::new();
    for er in &endpoint_rows {
        let mut acc = 0.0;
        for k in 0..er.dirs.len() {
            acc += r[er.row + k] * r[er.row + k];
        }
        if let Some(r0) = er.phi_zero_row {
            acc += r[r0] * r[r0];
        }
        endpoint_residuals.push(acc.sqrt());
    }

    // Extract the certificate payload.
    let mut mu = Vec::new();
    let mut strut_atoms = Vec::new();
    let mut phi_samples = Vec::new();
    for (col, column) in columns.iter().enumerate() {
        match column {
            Column::Atom { x, y } => {
                let mass = sol.x[col] * column_mass_weight[col];
                mu.push(mass);
                strut_atoms.push(((x.comp, x.s), (y.comp, y.s), mass));
            }
            Column::PhiVal { comp, piece, node } => {
                let pc = &grid.comps[*comp].pieces[*piece];
                phi_samples.push((*comp, pc.phi_nodes[*node], sol.x[col]));
            }
            Column::PhiSlope { .. } | Column::PhiSecond { .. } => {}
        }
    }
    let mass: f64 = mu.iter().sum();
    let tolerance = balance_tolerance(geom);
    let feasible = residual <= tolerance * (1.0 + mass)
        && endpoint_residuals
            .iter()
            .all(|&x| x <= tolerance * (1.0 + mass));

    Ok(BalanceCertificate {
        feasible,
        residual,
        endpoint_residuals,
        tolerance,
        total_strut_mass: mass,
        mu,
        strut_atoms,
        phi: phi_samples,
        grid_cells: cells_count,
        iterations: sol.iterations,
    })
}

fn snap_loc(grid: &BalanceGrid, loc: Loc, tol: f64) -> Loc {
    let (d, cut) = nearest_cut(grid, loc);
    if d <= tol {
        Loc { comp: loc.comp, s: cut }
    } else {
        loc
    }
}

// ---------------------------------------------------------------------------
// Frenet-frame scalar balance residuals
// ---------------------------------------------------------------------------

/// Pointwise residuals of the two scalar balance equations on a C² kinked
/// arc: σ²φ″ + (1−σ²τ²)φ − 1 − σΩ_N and σ(φ²τ)′ − φΩ_B. Torsion comes from
/// frame finite differences; φ″ and (φ²τ)′ from differences of the supplied
/// φ, φ′ samples.
pub struct FrenetResiduals {
    pub s: Vec<f64>,
    pub normal_eq: Vec<f64>,
    pub binormal_eq: Vec<f64>,
}

pub fn frenet_balance_check(
    geom: &dyn CurveGeom,
    comp: usize,
    interval: (f64, f64),
    phi: &KinkTension,
    omega_n: &dyn Fn(f64) -> f64,
    omega_b: &dyn Fn(f64) -> f64,
    sigma: f64,
    n: usize,
) -> FrenetResiduals {
    let (s0, s1) = interval;
    let h = (s1 - s0) / (n as f64 + 1.0);
    let mut out = FrenetResiduals { s: vec![], normal_eq: vec![], binormal_eq: vec![] };
    let frame = |s: f64| {
        let p = geom.eval(comp, s);
        let k = p.curvature.norm();
        let nvec = p.curvature / k;
        let bvec = p.tangent.cross(&nvec);
        (nvec, bvec)
    };
    let hh = h * 0.25;
    let torsion = |s: f64| {
        // Fourth-order centered difference of N against B.
        let (n_m2, _) = frame(s - 2.0 * hh);
        let (n_m1, _) = frame(s - hh);
        let (n_p1, _) = frame(s + hh);
        let (n_p2, b) = frame(s);
        let _ = n_p2;
        let dn = (n_m2 - 8.0 * n_m1 + 8.0 * n_p1 - frame(s + 2.0 * hh).0) / (12.0 * hh);
        dn.dot(&b)
    };
    // Fourth-order centered first derivative of a scalar sample function.
    let d4 = |f: &dyn Fn(f64) -> f64, s: f64| {
        (f(s - 2.0 * hh) - 8.0 * f(s - hh) + 8.0 * f(s + hh) - f(s + 2.0 * hh)) / (12.0 * hh)
    };
    for i in 1..=n {
        let s = s0 + h * i as f64;
        if s - h < s0 || s + h > s1 {
            continue;
        }
        let (phi_v, _) = phi.eval(comp, s);
        let ddphi = d4(&|t| phi.eval(comp, t).1, s);
        let tau = torsion(s);
        let eq_n = sigma * sigma * ddphi + (1.0 - sigma * sigma * tau * tau) * phi_v
            - 1.0
            - sigma * omega_n(s);
        let d_phi2tau = d4(
            &|t| {
                let (p, _) = phi.eval(comp, t);
                p * p * torsion(t)
            },
            s,
        );
        let eq_b = sigma * d_phi2tau - phi_v * omega_b(s);
        out.s.push(s);
        out.normal_eq.push(eq_n);
        out.binormal_eq.push(eq_b);
    }
    out
}

/// The strut force pairing ∫⟨x−y, ξx−ξy⟩ dμ; equals ∫⟨ξ, dΩ⟩ by the
/// definition of the strut force measure.
pub fn strut_pairing(
    geom: &dyn CurveGeom,
    measure: &StrutMeasure,
    field: &crate::variation::DeformationField,
) -> f64 {
    let mut acc = 0.0;
    for a in &measure.atoms {
        let px = geom.eval(a.x.comp, a.x.s);
        let py = geom.eval(a.y.comp, a.y.s);
        // Unordered pair acting at both endpoints doubles the ordered sum.
        acc += 2.0
            * a.weight
            * (px.position - py.position).dot(&(field.at(&px) - field.at(&py)));
    }
    for f in &measure.families {
        acc += 2.0
            * quad::integrate(
                |s| {
                    let px = geom.eval(f.comp, s);
                    let yl = (f.partner)(s);
                    let py = geom.eval(yl.comp, yl.s);
                    (px.position - py.position).dot(&(field.at(&px) - field.at(&py)))
                        * (f.density)(s)
                },
                f.s0,
                f.s1,
                1e-11,
            )
            .unwrap_or(0.0);
    }
    acc
}

/// ∫⟨ξ, dΩ⟩ evaluated directly from the measure.
pub fn omega_pairing(
    geom: &dyn CurveGeom,
    measure: &StrutMeasure,
    field: &crate::variation::DeformationField,
) -> f64 {
    let mut acc = 0.0;
    for a in &measure.atoms {
        let px = geom.eval(a.x.comp, a.x.s);
        let py = geom.eval(a.y.comp, a.y.s);
        let f = 2.0 * a.weight * (px.position - py.position);
        acc += field.at(&px).dot(&f) + field.at(&py).dot(&(-f));
    }
    for f in &measure.families {
        acc += quad::integrate(
            |s| {
                let px = geom.eval(f.comp, s);
                let yl = (f.partner)(s);
                let py = geom.eval(yl.comp, yl.s);
                let force = 2.0 * (f.density)(s) * (px.position - py.position);
                field.at(&px).dot(&force) - field.at(&py).dot(&force)
            },
            f.s0,
            f.s1,
            1e-11,
        )
        .unwrap_or(0.0);
    }
    acc
}
