//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Three sub-checks assert literature values that are irreproducible
//! from the exact constructions (the computations here agree with
//! independent 30-digit quadrature; see the test messages) — those asserts
//! are kept faithful and fail honestly rather than being loosened.

mod util;

use ropecrit::balance::{
    balance_residual, solve_balance, KinkTension, SolveOptions, StrutMeasure,
};
use ropecrit::clasp::{
    build_clasp, classify_regime, gehring_boundary, generic_upper_boundary, kinked_excess, Regime,
};
use ropecrit::curve::V3;
use ropecrit::geom::CurveGeom;
use ropecrit::strutfree::{
    build_circle, build_helix, build_segment, build_supercoil, build_wave, helix_constants,
    reconstruct_supercoil, supercoil_energy, supercoil_equilibrium, supercoil_integrate,
    supercoil_period,
};
use ropecrit::thickness::{compute_thickness, ThicknessOptions};
use ropecrit::variation::{delta_thickness, deform, DeformationField};
use std::time::Instant;

fn check(criterion: &str, ok: bool, detail: String) -> bool {
    println!("[{}] {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

/// Criterion 1: excess lengths at τ = 0.8 (fully kinked σ = 1 and Gehring),
/// tolerance 1e−6, under 10 s each.
#[test]
fn acceptance_1_excess_tau_08() {
    let t0 = Instant::now();
    let kinked = build_clasp(0.8, 1.0, 10.0).unwrap();
    let ok1 = check(
        "criterion 1a",
        (kinked.excess_length - 2.109180872).abs() <= 1e-6,
        format!("kinked (0.8, 1.0) excess = {:.9} vs 2.109180872", kinked.excess_length),
    );
    let t_kinked = t0.elapsed();
    let t1 = Instant::now();
    let gehring = build_clasp(0.8, 0.5, 10.0).unwrap();
    let ok2 = check(
        "criterion 1b",
        (gehring.excess_length - 2.103080861).abs() <= 1e-6,
        format!("Gehring (0.8, ≤0.6) excess = {:.9} vs 2.103080861", gehring.excess_length),
    );
    let t_gehring = t1.elapsed();
    let ok3 = check(
        "criterion 1 runtime",
        t_kinked.as_secs_f64() < 10.0 && t_gehring.as_secs_f64() < 10.0,
        format!("kinked {t_kinked:?}, gehring {t_gehring:?} (< 10 s each)"),
    );
    assert!(ok1 && ok2 && ok3);
}

/// Criterion 2: excess lengths as τ → 1 (the kinked construction is
/// regular at τ = 1 and is evaluated there; the printed 4.28318530 is
/// 2π − 2 to 7e−9, which the τ = 1−1e−9 build misses by 1.8e−4).
#[test]
fn acceptance_2_excess_tau_near_1() {
    let t0 = Instant::now();
    let kinked = build_clasp(1.0, 1.0, 10.0).unwrap();
    let ok1 = check(
        "criterion 2a",
        (kinked.excess_length - 4.28318530).abs() <= 1e-5,
        format!("kinked σ=1 excess = {:.9} vs 4.28318530", kinked.excess_length),
    );
    let generic = build_clasp(1.0, 0.5, 10.0).unwrap();
    // The exact value is 4.2630051451 (verified by 30-digit independent
    // quadrature and by both σ-limits of the construction at τ = 1); the
    // printed 4.26309458 exceeds the τ → 1 limit, which no τ < 1 clasp can
    // reach, so this faithful assert records an erratum.
    let ok2 = check(
        "criterion 2b",
        (generic.excess_length - 4.26309458).abs() <= 1e-5,
        format!(
            "generic σ=1/2 excess = {:.9} vs printed 4.26309458 (exact τ=1 value 4.263005145; see decisions ledger)",
            generic.excess_length
        ),
    );
    let gehring = build_clasp(1.0, 0.0, 10.0).unwrap();
    let ok3 = check(
        "criterion 2c",
        (gehring.excess_length - 4.262897).abs() <= 5e-6,
        format!("Gehring excess = {:.9} vs 4.262897", gehring.excess_length),
    );
    let ok4 = check(
        "criterion 2 runtime",
        t0.elapsed().as_secs_f64() < 30.0,
        format!("{:?} (< 30 s)", t0.elapsed()),
    );
    assert!(ok1, "criterion 2a failed");
    assert!(ok3, "criterion 2c failed");
    assert!(ok4, "criterion 2 runtime exceeded");
    assert!(
        ok2,
        "criterion 2b: printed value 4.26309458 is not attainable; exact τ=1 generic excess is 4.263005145 (decisions ledger)"
    );
}

/// Criterion 3: phase boundaries at τ = 0.8.
#[test]
fn acceptance_3_phase_boundaries() {
    let tau = 0.8;
    let lower = gehring_boundary(tau);
    let ok1 = check(
        "criterion 3a",
        (lower - 0.6).abs() <= 1e-15,
        format!("Gehring/generic boundary = {lower:.15} vs 0.6 exact"),
    );
    let upper = generic_upper_boundary(tau);
    let closed_form = ((4.0_f64 + 0.64).sqrt() - 2.0) / (2.0 - (4.0_f64 - 0.64).sqrt());
    let ok2 = check(
        "criterion 3b",
        (upper - closed_form).abs() <= 1e-10,
        format!("generic/transitional boundary = {upper:.12} matches closed form to 1e-10"),
    );
    // Regime classification flips exactly at the boundaries.
    let ok3 = check(
        "criterion 3c",
        classify_regime(tau, 1.0).unwrap() == Regime::FullyKinked
            && classify_regime(tau, 1.0 - 1e-9).unwrap() == Regime::Transitional
            && classify_regime(tau, upper).unwrap() == Regime::Transitional
            && classify_regime(tau, upper - 1e-9).unwrap() == Regime::Generic
            && classify_regime(tau, lower + 1e-9).unwrap() == Regime::Generic
            && classify_regime(tau, lower).unwrap() == Regime::Gehring,
        "transitional/kinked boundary at σ = 1 exact; closed sides as printed".into(),
    );
    // The figure caption prints σ = 0.927 for this boundary; the closed
    // form evaluates to 0.92272, so the caption itself is 4.3e−3 off its
    // own formula. Faithful assert; see the decisions ledger.
    let ok4 = check(
        "criterion 3d",
        (upper - 0.927).abs() <= 1e-3,
        format!(
            "boundary {upper:.5} vs caption 0.927 (differs by {:.1e}; caption inconsistent with the printed formula)",
            (upper - 0.927).abs()
        ),
    );
    assert!(ok1 && ok2 && ok3, "criterion 3 boundary formulas failed");
    assert!(
        ok4,
        "criterion 3d: the caption value 0.927 is inconsistent with the boundary formula (= 0.92272); see decisions ledger"
    );
}

/// Criterion 4: tip gaps.
#[test]
fn acceptance_4_tip_gap() {
    let a = build_clasp(0.8, 1.1, 10.0).unwrap();
    let b = build_clasp(0.8, 1.0, 10.0).unwrap();
    let ok1 = check(
        "criterion 4a",
        (a.tip_gap - 1.0).abs() <= 1e-10 && (b.tip_gap - 1.0).abs() <= 1e-10,
        format!("kinked gaps {} and {} (exact 1)", a.tip_gap, b.tip_gap),
    );
    let gehring = build_clasp(1.0, 0.0, 10.0).unwrap();
    // Exact value 1.05638620 (two independent integrators agree to 1e−11);
    // the printed ≈1.05653 carries ~1.4e−4 of numerical error. Faithful
    // assert at the stated tolerance; see the decisions ledger.
    let ok2 = check(
        "criterion 4b",
        (gehring.tip_gap - 1.05653).abs() <= 1e-4,
        format!(
            "far-τ Gehring gap = {:.8} vs printed 1.05653 (exact limit 1.05638620)",
            gehring.tip_gap
        ),
    );
    assert!(ok1, "criterion 4a failed");
    assert!(
        ok2,
        "criterion 4b: printed 1.05653 unattainable; exact far-τ gap is 1.0563862 (decisions ledger)"
    );
}

/// Criterion 5: Ts = 1 within 1e−5 for the 20-clasp grid at 4096 samples,
/// under 2 minutes total. σ < 1/2 cells use the modified Gehring checks.
#[test]
fn acceptance_5_thickness_grid() {
    let t0 = Instant::now();
    let taus = [0.2, 0.5, 0.8, 1.0];
    let sigmas = [0.3, 0.6, 0.8, 0.95, 1.1];
    let mut all_ok = true;
    for &tau in &taus {
        for &sigma in &sigmas {
            let sol = build_clasp(tau, sigma, 10.0).unwrap();
            if sigma >= 0.5 {
                let opts = ThicknessOptions { samples: 4096, ..Default::default() };
                let rep = compute_thickness(&sol.curve, sigma, &opts).unwrap();
                let ok = (rep.ts - 1.0).abs() <= 1e-5;
                all_ok &= check(
                    "criterion 5",
                    ok,
                    format!("({tau}, {sigma}) {:?}: Ts = {:.8}", sol.regime, rep.ts),
                );
            } else {
                // Modified Gehring problem: unit separation plus the
                // curvature bound κ ≤ 1/σ.
                let sep = util::min_component_separation(&sol.curve, 4096);
                let kmax = sol.curve.sup_curvature();
                let ok = sep >= 1.0 - 1e-5 && kmax <= 1.0 / sigma + 1e-9;
                all_ok &= check(
                    "criterion 5",
                    ok,
                    format!(
                        "({tau}, {sigma}) {:?}: separation = {sep:.8}, κmax = {kmax:.6} ≤ {:.4}",
                        sol.regime,
                        1.0 / sigma
                    ),
                );
            }
        }
    }
    let elapsed = t0.elapsed();
    all_ok &= check(
        "criterion 5 runtime",
        elapsed.as_secs_f64() < 120.0,
        format!("{elapsed:?} for 20 clasps (< 2 min)"),
    );
    assert!(all_ok);
}

/// Criterion 6: balance certificates with residual ≤ 1e−6.
#[test]
fn acceptance_6_balance_certificates() {
    let mut all_ok = true;
    // (a) round circle of diameter 1 at σ = 1/2.
    {
        let c = util::circle(0.5);
        let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
        let cert = solve_balance(&c, 0.5, &rep, &SolveOptions::default()).unwrap();
        all_ok &= check(
            "criterion 6a",
            cert.feasible && cert.residual <= 1e-6,
            format!("circle: feasible = {}, residual = {:.3e}", cert.feasible, cert.residual),
        );
    }
    // (b) unit-thickness double helix, k = 1.2.
    {
        let c = util::double_helix(1.2, 1.25);
        let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
        let cert = solve_balance(&c, 0.5, &rep, &SolveOptions::default()).unwrap();
        all_ok &= check(
            "criterion 6b",
            cert.residual <= 1e-6,
            format!("double helix: residual = {:.3e}", cert.residual),
        );
    }
    // (c) the four regime representatives at τ = 0.8.
    for (sigma, name) in [(1.1, "kinked"), (0.95, "transitional"), (0.8, "generic"), (0.5, "gehring")]
    {
        let sol = build_clasp(0.8, sigma, 10.0).unwrap();
        let rep = compute_thickness(&sol.curve, sigma, &ThicknessOptions::default()).unwrap();
        let cert = solve_balance(&sol.curve, sigma, &rep, &SolveOptions::default()).unwrap();
        all_ok &= check(
            "criterion 6c",
            cert.residual <= 1e-6,
            format!("{name} clasp: residual = {:.3e} (mass {:.4})", cert.residual, cert.total_strut_mass),
        );
    }
    // (d) every strut-free build, in the curvature-only normalization.
    let cases: Vec<(&str, ropecrit::strutfree::StrutFreeCurve)> = vec![
        ("segment", build_segment(2.0).unwrap()),
        ("circle", build_circle(V3::zeros()).unwrap()),
        ("wave ‖V‖=1.2", build_wave(1.2, 3).unwrap()),
        ("helix τ=0.6", build_helix(0.6, 8.0).unwrap()),
        ("supercoil c=1,k=1.25", build_supercoil(1.0, 1.25, 6.0, 1e-3).unwrap()),
    ];
    for (name, sf) in &cases {
        let rep = ropecrit::thickness::ThicknessReport {
            reach: 1.0,
            min_rho: 1.0,
            ts: 1.0,
            sigma: 1.0,
            struts: vec![],
            kinks: vec![],
        };
        let opts = SolveOptions { curvature_only: true, ..Default::default() };
        let cert = solve_balance(sf.geom(), 1.0, &rep, &opts).unwrap();
        all_ok &= check(
            "criterion 6d",
            cert.residual <= 1e-6,
            format!("{name}: residual = {:.3e}", cert.residual),
        );
    }
    assert!(all_ok);
}

/// Criterion 7: δTs consistency — finite differences under 10 random
/// analytic fields on the (0.8, 0.8) clasp, and Euler-field homogeneity.
#[test]
fn acceptance_7_variation_consistency() {
    let mut all_ok = true;
    // Euler field on the unit circle pins the strut-term factor.
    {
        let c = util::circle(1.0);
        let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
        let d = delta_thickness(&c, 0.5, &DeformationField::euler(), &rep, &Default::default())
            .unwrap();
        all_ok &= check(
            "criterion 7 (Euler)",
            (d - rep.ts).abs() <= 1e-9,
            format!("δ_Euler Ts = {d:.12} vs Ts = {:.12}", rep.ts),
        );
    }
    let sol = build_clasp(0.8, 0.8, 10.0).unwrap();
    let opts = ThicknessOptions { samples: 4096, ..Default::default() };
    let report = compute_thickness(&sol.curve, 0.8, &opts).unwrap();
    let base = deform(&sol.curve, &DeformationField::euler(), 0.0, 4096);
    let ts0 = compute_thickness(&base, 0.8, &opts).unwrap().ts;
    let t = 1e-5;
    let mut rng = util::Rng::new(0x5eed_c0de_2024_0001);
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let field = util::random_trig_field(&mut rng);
        let analytic = delta_thickness(&sol.curve, 0.8, &field, &report, &Default::default())
            .unwrap();
        let deformed = deform(&sol.curve, &field, t, 4096);
        let ts_t = compute_thickness(&deformed, 0.8, &opts).unwrap().ts;
        let fd = (ts_t - ts0) / t;
        let rel = (fd - analytic).abs() / analytic.abs().max(1e-6);
        worst = worst.max(rel);
        all_ok &= check(
            "criterion 7",
            rel <= 1e-3,
            format!("field {i}: Clarke {analytic:.8} vs FD {fd:.8} (rel {rel:.2e})"),
        );
    }
    println!("criterion 7 worst relative deviation: {worst:.3e}");
    assert!(all_ok);
}

/// Criterion 8: the ODE suite.
#[test]
fn acceptance_8_ode_suite() {
    let mut all_ok = true;
    // Equilibrium identity for τ ∈ {0.2, 0.6, 0.9} to 1e−12.
    for tau in [0.2, 0.6, 0.9] {
        let (phi_c, c) = helix_constants(tau);
        let residual = (1.0 - phi_c + c * c / phi_c.powi(3)).abs();
        all_ok &= check(
            "criterion 8 (equilibrium)",
            residual <= 1e-12,
            format!("τ={tau}: |1 − φ_c + c²/φ_c³| = {residual:.2e}"),
        );
    }
    // Energy drift ≤ 1e−9 per unit arclength at step 1e−3.
    let c = 1.0;
    let phi_c = supercoil_equilibrium(c);
    let length = 25.0;
    let traj = supercoil_integrate(c, 1.25 * phi_c, 0.0, length, 1e-3).unwrap();
    let e0 = supercoil_energy(c, traj.states[0].phi, traj.states[0].dphi);
    let drift = traj
        .states
        .iter()
        .map(|st| (supercoil_energy(c, st.phi, st.dphi) - e0).abs())
        .fold(0.0, f64::max);
    all_ok &= check(
        "criterion 8 (drift)",
        drift / e0 <= 1e-9 * length,
        format!("relative energy drift {:.2e} over {length} arclength", drift / e0),
    );
    // Reconstructed V constant to 1e−8.
    let rec = reconstruct_supercoil(&traj).unwrap();
    let v0 = rec.v_samples[0];
    let v_dev = rec
        .v_samples
        .iter()
        .map(|v| (v - v0).norm())
        .fold(0.0, f64::max);
    all_ok &= check(
        "criterion 8 (V constant)",
        v_dev <= 1e-8,
        format!("max |V − V₀| = {v_dev:.2e}"),
    );
    // Per-period displacement along V is negative and matches the
    // integral formula to 1e−6.
    let period = supercoil_period(c, 1.25 * phi_c, 0.0, 1e-3).unwrap();
    let ptraj = supercoil_integrate(c, 1.25 * phi_c, 0.0, period, 1e-3).unwrap();
    let prec = reconstruct_supercoil(&ptraj).unwrap();
    let p0 = prec.curve.nodes[0].first().unwrap().position;
    let p1 = prec.curve.nodes[0].last().unwrap().position;
    let lhs = (p1 - p0).dot(&prec.v_samples[0]);
    let mut integral = 0.0;
    for w in ptraj.states.windows(2) {
        integral += 0.5 * (w[0].phi.powi(-3) + w[1].phi.powi(-3)) * (w[1].s - w[0].s);
    }
    let rhs = ptraj.states.last().unwrap().dphi - ptraj.states[0].dphi - c * c * integral;
    all_ok &= check(
        "criterion 8 (progress)",
        lhs < 0.0 && (lhs - rhs).abs() <= 1e-6,
        format!("⟨Δp, V⟩ = {lhs:.9} vs formula {rhs:.9}"),
    );
    assert!(all_ok);
}

/// Criterion 9: pruned-sweep reach equals brute-force all-pairs r*
/// minimization on 10 random piecewise-arc curves, to 1e−10.
#[test]
fn acceptance_9_oracle_equivalence() {
    let mut rng = util::Rng::new(0x0bad_cafe_1234_5678);
    let mut all_ok = true;
    let mut produced = 0;
    let mut attempts = 0;
    while produced < 10 && attempts < 200 {
        attempts += 1;
        let Some(curve) = util::random_arc_pair(&mut rng) else { continue };
        let opts = ThicknessOptions { samples: 100, ..Default::default() };
        let Ok(rep) = compute_thickness(&curve, 0.5, &opts) else { continue };
        if !rep.reach.is_finite() || rep.reach >= 0.95 * rep.min_rho {
            // Keep only pair-limited configurations; the ρ-limited ones
            // exercise a different code path.
            continue;
        }
        let oracle = util::brute_force_reach(&curve, 100);
        let diff = (rep.reach - oracle).abs();
        all_ok &= check(
            "criterion 9",
            diff <= 1e-10,
            format!(
                "curve {produced}: pruned reach {:.12} vs brute-force r* {:.12} (diff {diff:.2e})",
                rep.reach, oracle
            ),
        );
        produced += 1;
    }
    assert_eq!(produced, 10, "could not generate 10 admissible random curves");
    assert!(all_ok);
}

/// Figure sweeps: 64 σ-steps at τ = 0.8 and τ = 1, monotone and continuous
/// across the regime boundaries (pointwise values are not pinned).
#[test]
fn acceptance_figure_sweeps() {
    let t0 = Instant::now();
    let mut all_ok = true;
    for tau in [0.8, 1.0] {
        let mut prev: Option<(f64, f64)> = None;
        let mut max_jump: f64 = 0.0;
        let steps = 64;
        let (lo, hi) = (0.25, 1.25);
        for i in 0..=steps {
            let sigma = lo + (hi - lo) * i as f64 / steps as f64;
            let sol = build_clasp(tau, sigma, 10.0).unwrap();
            if let Some((pe, pg)) = prev {
                // Excess nondecreasing in σ, tip gap nonincreasing in σ.
                all_ok &= sol.excess_length >= pe - 1e-12;
                all_ok &= sol.tip_gap <= pg + 1e-12;
                max_jump = max_jump
                    .max((sol.excess_length - pe).abs())
                    .max((sol.tip_gap - pg).abs());
            }
            prev = Some((sol.excess_length, sol.tip_gap));
        }
        all_ok &= check(
            "figure sweep",
            max_jump < 0.05,
            format!("τ={tau}: monotone, max adjacent jump {max_jump:.4} (< 0.05)"),
        );
    }
    all_ok &= check(
        "figure sweep runtime",
        t0.elapsed().as_secs_f64() < 300.0,
        format!("{:?} (< 5 min)", t0.elapsed()),
    );
    assert!(all_ok);
}

/// Ts is nonincreasing in σ at fixed curve (transitional clasp across
/// σ ∈ [0.93, 1.0]).
#[test]
fn thickness_monotone_in_sigma() {
    let sol = build_clasp(0.8, 0.95, 10.0).unwrap();
    let opts = ThicknessOptions { samples: 1024, ..Default::default() };
    let mut prev = f64::INFINITY;
    for i in 0..=7 {
        let sigma = 0.93 + 0.07 * i as f64 / 7.0;
        let rep = compute_thickness(&sol.curve, sigma, &opts).unwrap();
        assert!(rep.ts <= prev + 1e-12, "Ts must be nonincreasing in σ");
        prev = rep.ts;
    }
}

/// Balance ⇒ variational identity: for the kinked clasp certificate and
/// 20 random compatible (bump-windowed) fields,
/// |δ_ξ length − ∫⟨ξ, dΩ⟩ − ∫(2⟨ξ′,T⟩ − σ⟨ξ″,N⟩)φ ds| ≤ 1e−6.
#[test]
fn balance_variational_identity() {
    let sigma = 1.1;
    let sol = build_clasp(0.8, sigma, 10.0).unwrap();
    // The certificate must be valid in the first place.
    let cert = balance_residual(&sol.curve, sigma, &sol.measure, &sol.phi, 256);
    assert!(cert.residual <= 1e-8, "certificate residual {}", cert.residual);

    let mut rng = util::Rng::new(0xfeed_beef_0000_0042);
    for _ in 0..20 {
        // Bump support radius 2 about the clasp center keeps the field
        // (and its derivative) zero at the constraint planes.
        let field = util::bump_windowed_field(&mut rng, V3::new(0.0, 0.0, 0.5), 2.0);
        let (compatible, violations) =
            ropecrit::variation::check_compatible(&sol.curve, &field);
        assert!(compatible, "bump field must be compatible: {violations:?}");
        let dlen = ropecrit::variation::delta_length(&sol.curve, &field);
        let omega_term = ropecrit::balance::omega_pairing(&sol.curve, &sol.measure, &field);
        let kink_term = util::kink_pairing(&sol.curve, &sol.phi, sigma, &field);
        let defect = (dlen - omega_term - kink_term).abs();
        assert!(
            defect <= 1e-6,
            "variational identity defect {defect:.3e} (δలen {dlen}, Ω {omega_term}, kink {kink_term})"
        );
    }
}

/// Kink-free arcs of a feasible certificate carry Ω = −κ ds: checked on
/// the Gehring clasp (no kinks at σ = 0.5), where the solved measure must
/// reproduce the curvature load cell by cell.
#[test]
fn kink_free_arcs_follow_curvature() {
    let sol = build_clasp(0.8, 0.5, 10.0).unwrap();
    let cert = balance_residual(&sol.curve, 0.5, &sol.measure, &KinkTension::Zero, 128);
    assert!(
        cert.residual <= 1e-6,
        "Gehring certificate residual {} should witness Ω = −κ ds",
        cert.residual
    );
    // Sanity: the measure has no atoms (pure families) and total mass > 0.
    assert!(sol.measure.atoms.is_empty());
    assert!(sol.measure.total_mass() > 0.1);
    // Removing the measure leaves exactly the curvature load as residual.
    let bare = balance_residual(&sol.curve, 0.5, &StrutMeasure::default(), &KinkTension::Zero, 128);
    assert!(bare.residual > 1.0, "without μ the curvature load must remain");
}

/// Solver determinism: identical inputs give bit-identical certificates.
#[test]
fn solver_determinism() {
    let c = util::circle(0.5);
    let rep = compute_thickness(&c, 0.5, &ThicknessOptions::default()).unwrap();
    let a = solve_balance(&c, 0.5, &rep, &SolveOptions::default()).unwrap();
    let b = solve_balance(&c, 0.5, &rep, &SolveOptions::default()).unwrap();
    assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    assert_eq!(a.mu.len(), b.mu.len());
    for (x, y) in a.mu.iter().zip(&b.mu) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}
