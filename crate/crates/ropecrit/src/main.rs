//! Command-line front end: curve ingestion, thickness reports, balance
//! certificates, clasp construction, strut-free families and phase-diagram
//! sweeps. Every run that writes files also writes a manifest with the
//! parameter set and output digests so runs can be reproduced and compared
//! byte for byte.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ropecrit::balance::{self, solve_balance, SolveOptions};
use ropecrit::clasp::build_clasp;
use ropecrit::curve::json::CurveJson;
use ropecrit::curve::{Curve, V3};
use ropecrit::geom::{CurveGeom, SampledCurve, SampledNode, Sampling};
use ropecrit::strutfree::{
    build_helix, build_wave, reconstruct_supercoil, supercoil_integrate, StrutFreeCurve,
    StrutFreeGeom,
};
use ropecrit::thickness::{compute_thickness, ThicknessOptions};

#[derive(Parser)]
#[command(name = "ropecrit", version, about = "Thickness and criticality of stiff space curves")]
struct Cli {
    /// Optional JSON config supplying default values for tuning flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute reach, ρ, σ-thickness and the strut/kink sets of a curve.
    Thickness(ThicknessArgs),
    /// Construct a (τ, σ)-clasp and emit its geometry and certificate.
    Clasp(ClaspArgs),
    /// Integrate the strut-free kink-tension ODE and reconstruct the curve.
    Supercoil(SupercoilArgs),
    /// Solve for a balancing strut measure and kink tension.
    Balance(BalanceArgs),
    /// Sweep a (τ, σ) grid of clasps into a CSV.
    Phase(PhaseArgs),
    /// Build a unit-curvature helix with its constant kink tension.
    Helix(HelixArgs),
    /// Build a wave (planar chain of unit arcs) with its kink tension.
    Wave(WaveArgs),
}

#[derive(Args, Serialize)]
struct ThicknessArgs {
    /// Curve file (.json schema or geometry .csv).
    #[arg(long)]
    curve: PathBuf,
    #[arg(long)]
    sigma: f64,
    /// Samples per component for the pairwise sweep.
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    /// Refinement tolerance (relative).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write the report JSON here (otherwise stdout).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the detected struts as CSV.
    #[arg(long)]
    emit_struts: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ClaspArgs {
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    sigma: f64,
    /// Samples per component for the thickness verification.
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    /// Skip the thickness verification (ts = null in the summary).
    #[arg(long, default_value_t = false)]
    no_verify: bool,
    /// Geometry CSV (comp,s,x,y,z,Tx,Ty,Tz,kx,ky,kz).
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Struts CSV from the attached measure.
    #[arg(long)]
    emit_struts: Option<PathBuf>,
    /// Summary JSON (otherwise stdout).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Balance certificate JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SupercoilArgs {
    #[arg(long)]
    c: f64,
    #[arg(long)]
    phi0: f64,
    #[arg(long, default_value_t = 0.0)]
    dphi0: f64,
    #[arg(long)]
    length: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// CSV: s, phi, dphi, tau, x, y, z, Vx, Vy, Vz (otherwise stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BalanceArgs {
    #[arg(long)]
    curve: PathBuf,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    /// Balance grid nodes per component.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Certificate JSON (otherwise stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct PhaseArgs {
    /// Fixed τ for a σ-sweep (alternative to --tau-min/--tau-max).
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    sigma_min: f64,
    #[arg(long)]
    sigma_max: f64,
    #[arg(long)]
    steps: usize,
    /// CSV: tau, sigma, regime, excess_length, tip_gap (otherwise stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct HelixArgs {
    /// Torsion |τ| < 1 at unit curvature.
    #[arg(long)]
    torsion: f64,
    #[arg(long, default_value_t = 12.0)]
    length: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct WaveArgs {
    /// ‖V‖ > 1; the turning angle is 2π − 2 arccos(1/‖V‖).
    #[arg(long)]
    v_norm: f64,
    #[arg(long, default_value_t = 4)]
    arcs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError { code: 1, message: e.to_string() }
}

fn io_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError { code: 2, message: e.to_string() }
}

/// 12 significant digits, '.' decimal, locale-free.
fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x < 0.0 {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.11e}")
    }
}

struct Outputs {
    manifest: serde_json::Value,
    files: Vec<(PathBuf, Vec<u8>)>,
    stdout: Option<String>,
}

impl Outputs {
    fn new(subcommand: &str, params: serde_json::Value) -> Self {
        Self {
            manifest: serde_json::json!({
                "subcommand": subcommand,
                "parameters": params,
                "artifact_version": env!("CARGO_PKG_VERSION"),
            }),
            files: Vec::new(),
            stdout: None,
        }
    }

    fn add_file(&mut self, path: &Path, bytes: Vec<u8>) {
        self.files.push((path.to_path_buf(), bytes));
    }

    fn finish(mut self) -> Result<(), CliError> {
        let mut digests = serde_json::Map::new();
        for (path, bytes) in &self.files {
            let mut h = Sha256::new();
            h.update(bytes);
            let digest = h.finalize();
            let mut hexd = String::with_capacity(64);
            for b in digest {
                let _ = write!(hexd, "{b:02x}");
            }
            digests.insert(path.display().to_string(), serde_json::json!(hexd));
            std::fs::write(path, bytes).map_err(io_err)?;
        }
        if !self.files.is_empty() {
            self.manifest["outputs"] = serde_json::Value::Object(digests);
            let manifest_path = self.files[0].0.with_extension("manifest.json");
            let text = serde_json::to_string_pretty(&self.manifest).map_err(io_err)?;
            std::fs::write(manifest_path, text).map_err(io_err)?;
        }
        if let Some(s) = self.stdout.take() {
            println!("{s}");
        }
        Ok(())
    }
}

enum LoadedCurve {
    Analytic(Curve),
    Sampled(SampledCurve),
}

impl LoadedCurve {
    fn geom(&self) -> &dyn CurveGeom {
        match self {
            LoadedCurve::Analytic(c) => c,
            LoadedCurve::Sampled(c) => c,
        }
    }
}

fn load_curve(path: &Path) -> Result<LoadedCurve, CliError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    if ext.eq_ignore_ascii_case("csv") {
        Ok(LoadedCurve::Sampled(parse_geometry_csv(&text).map_err(io_err)?))
    } else {
        let cj: CurveJson = serde_json::from_str(&text).map_err(io_err)?;
        Ok(LoadedCurve::Analytic(cj.to_curve().map_err(io_err)?))
    }
}

fn parse_geometry_csv(text: &str) -> Result<SampledCurve, String> {
    let mut per_comp: Vec<Vec<SampledNode>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("comp") {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if fields.len() < 11 {
            return Err(format!("line {}: expected 11 columns", lineno + 1));
        }
        let comp = fields[0] as usize;
        while per_comp.len() <= comp {
            per_comp.push(Vec::new());
        }
        per_comp[comp].push(SampledNode::new(
            fields[1],
            V3::new(fields[2], fields[3], fields[4]),
            V3::new(fields[5], fields[6], fields[7]),
            V3::new(fields[8], fields[9], fields[10]),
        ));
    }
    if per_comp.is_empty() || per_comp.iter().any(|c| c.len() < 2) {
        return Err("geometry CSV needs at least two samples per component".into());
    }
    let closed = vec![false; per_comp.len()];
    Ok(SampledCurve::new(per_comp, closed))
}

fn geometry_csv(geom: &dyn CurveGeom, samples: usize) -> String {
    let sampling = Sampling::of(geom, samples);
    let mut out = String::from("comp,s,x,y,z,Tx,Ty,Tz,kx,ky,kz\n");
    for (ci, nodes) in sampling.components.iter().enumerate() {
        for n in nodes {
            let p = &n.point;
            let _ = writeln!(
                out,
                "{ci},{},{},{},{},{},{},{},{},{},{}",
                fmt_g(p.s),
                fmt_g(p.position.x),
                fmt_g(p.position.y),
                fmt_g(p.position.z),
                fmt_g(p.tangent.x),
                fmt_g(p.tangent.y),
                fmt_g(p.tangent.z),
                fmt_g(p.curvature.x),
                fmt_g(p.curvature.y),
                fmt_g(p.curvature.z),
            );
        }
    }
    out
}

fn struts_csv(report: &ropecrit::thickness::ThicknessReport) -> String {
    let mut out = String::from("comp_x,s_x,comp_y,s_y,len,psi_star_x,psi_star_y,family\n");
    for s in &report.struts {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.x.comp,
            fmt_g(s.x.s),
            s.y.comp,
            fmt_g(s.y.s),
            fmt_g(s.length),
            fmt_g(s.psi_star_x),
            fmt_g(s.psi_star_y),
            s.family as u8
        );
    }
    out
}

fn strutfree_csv(sf: &StrutFreeCurve) -> String {
    let geom = sf.geom();
    let mut out = String::from("s,phi,dphi,tau,x,y,z,Vx,Vy,Vz\n");
    let len = geom.component_length(0);
    let n = 2048;
    for i in 0..=n {
        let s = len * i as f64 / n as f64;
        let p = geom.eval(0, s);
        let (phi, dphi) = sf.phi.eval(0, s);
        let k = p.curvature.norm();
        let tau = if k > 0.0 {
            let nvec = p.curvature / k;
            let bvec = p.tangent.cross(&nvec);
            geom.normal_derivative(0, s).dot(&bvec)
        } else {
            0.0
        };
        let v = balance::virtual_tangent(
            geom,
            &sf.phi,
            1.0,
            ropecrit::thickness::Loc { comp: 0, s },
        );
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_g(s),
            fmt_g(phi),
            fmt_g(dphi),
            fmt_g(tau),
            fmt_g(p.position.x),
            fmt_g(p.position.y),
            fmt_g(p.position.z),
            fmt_g(v.x),
            fmt_g(v.y),
            fmt_g(v.z),
        );
    }
    out
}

/// Config values fill tuning flags the user left at defaults (flags win).
fn apply_config(cli: &mut Cli) -> Result<(), CliError> {
    let Some(path) = &cli.config else { return Ok(()) };
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    let cfg: serde_json::Value = serde_json::from_str(&text).map_err(io_err)?;
    let get_usize = |key: &str| cfg.get(key).and_then(|v| v.as_u64()).map(|v| v as usize);
    let get_f64 = |key: &str| cfg.get(key).and_then(|v| v.as_f64());
    match &mut cli.command {
        Command::Thickness(a) => {
            if let Some(v) = get_usize("samples") {
                if a.samples == 2048 {
                    a.samples = v;
                }
            }
            if let Some(v) = get_f64("tol") {
                if a.tol == 1e-10 {
                    a.tol = v;
                }
            }
        }
        Command::Clasp(a) => {
            if let Some(v) = get_usize("samples") {
                if a.samples == 2048 {
                    a.samples = v;
                }
            }
        }
        Command::Balance(a) => {
            if let Some(v) = get_usize("samples") {
                if a.samples == 2048 {
                    a.samples = v;
                }
            }
            if let Some(v) = get_usize("grid") {
                if a.grid == 512 {
                    a.grid = v;
                }
            }
        }
        Command::Supercoil(a) => {
            if let Some(v) = get_f64("step") {
                if a.step == 1e-3 {
                    a.step = v;
                }
            }
        }
        _ => {}
    }
    Ok(())
}

fn run(mut cli: Cli) -> Result<(), CliError> {
    apply_config(&mut cli)?;
    match cli.command {
        Command::Thickness(args) => cmd_thickness(args),
        Command::Clasp(args) => cmd_clasp(args),
        Command::Supercoil(args) => cmd_supercoil(args),
        Command::Balance(args) => cmd_balance(args),
        Command::Phase(args) => cmd_phase(args),
        Command::Helix(args) => cmd_helix(args),
        Command::Wave(args) => cmd_wave(args),
    }
}

fn cmd_thickness(args: ThicknessArgs) -> Result<(), CliError> {
    let loaded = load_curve(&args.curve)?;
    let opts =
        ThicknessOptions { samples: args.samples, refine_tol: args.tol, ..Default::default() };
    let report = compute_thickness(loaded.geom(), args.sigma, &opts).map_err(domain)?;
    let params = serde_json::to_value(&args).map_err(io_err)?;
    let mut outputs = Outputs::new("thickness", params);
    let json = serde_json::to_string_pretty(&report.json()).map_err(io_err)?;
    match &args.report {
        Some(path) => outputs.add_file(path, json.into_bytes()),
        None => outputs.stdout = Some(json),
    }
    if let Some(path) = &args.emit_struts {
        outputs.add_file(path, struts_csv(&report).into_bytes());
    }
    outputs.finish()
}

fn cmd_clasp(args: ClaspArgs) -> Result<(), CliError> {
    let sol = build_clasp(args.tau, args.sigma, 10.0).map_err(domain)?;
    let ts = if args.no_verify {
        None
    } else {
        let opts = ThicknessOptions { samples: args.samples, ..Default::default() };
        Some(compute_thickness(&sol.curve, args.sigma.max(0.5), &opts).map_err(domain)?.ts)
    };
    let params = serde_json::to_value(&args).map_err(io_err)?;
    let mut outputs = Outputs::new("clasp", params);
    let summary = serde_json::to_string_pretty(&sol.summary_json(ts)).map_err(io_err)?;
    match &args.report {
        Some(path) => outputs.add_file(path, summary.into_bytes()),
        None => outputs.stdout = Some(summary),
    }
    if let Some(path) = &args.emit {
        outputs.add_file(path, geometry_csv(&sol.curve, args.samples).into_bytes());
    }
    if let Some(path) = &args.emit_struts {
        let mut out = String::from("comp_x,s_x,comp_y,s_y,len,weight,family\n");
        for a in &sol.measure.atoms {
            let px = sol.curve.eval_at(a.x.comp, a.x.s).map_err(domain)?.position;
            let py = sol.curve.eval_at(a.y.comp, a.y.s).map_err(domain)?.position;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},0",
                a.x.comp,
                fmt_g(a.x.s),
                a.y.comp,
                fmt_g(a.y.s),
                fmt_g((px - py).norm()),
                fmt_g(a.weight)
            );
        }
        for fam in &sol.measure.families {
            let n = 64;
            for i in 0..=n {
                let s = fam.s0 + (fam.s1 - fam.s0) * i as f64 / n as f64;
                let q = (fam.partner)(s);
                let px = sol.curve.eval_at(fam.comp, s).map_err(domain)?.position;
                let py = sol.curve.eval_at(q.comp, q.s).map_err(domain)?.position;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},1",
                    fam.comp,
                    fmt_g(s),
                    q.comp,
                    fmt_g(q.s),
                    fmt_g((px - py).norm()),
                    fmt_g((fam.density)(s))
                );
            }
        }
        outputs.add_file(path, out.into_bytes());
    }
    if let Some(path) = &args.out {
        let cert = balance::balance_residual(&sol.curve, args.sigma, &sol.measure, &sol.phi, 512);
        let json = serde_json::to_string_pretty(&cert.json()).map_err(io_err)?;
        outputs.add_file(path, json.into_bytes());
    }
    outputs.finish()
}

fn cmd_supercoil(args: SupercoilArgs) -> Result<(), CliError> {
    let traj = supercoil_integrate(args.c, args.phi0, args.dphi0, args.length, args.step)
        .map_err(domain)?;
    let rec = reconstruct_supercoil(&traj).map_err(domain)?;
    let mut out = String::from("s,phi,dphi,tau,x,y,z,Vx,Vy,Vz\n");
    for (i, st) in traj.states.iter().enumerate() {
        let node = &rec.curve.nodes[0][i];
        let v = rec.v_samples[i];
        let tau = args.c / (st.phi * st.phi);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_g(st.s),
            fmt_g(st.phi),
            fmt_g(st.dphi),
            fmt_g(tau),
            fmt_g(node.position.x),
            fmt_g(node.position.y),
            fmt_g(node.position.z),
            fmt_g(v.x),
            fmt_g(v.y),
            fmt_g(v.z),
        );
    }
    let params = serde_json::to_value(&args).map_err(io_err)?;
    let mut outputs = Outputs::new("supercoil", params);
    match &args.out {
        Some(path) => outputs.add_file(path, out.into_bytes()),
        None => outputs.stdout = Some(out),
    }
    outputs.finish()
}

fn cmd_balance(args: BalanceArgs) -> Result<(), CliError> {
    let loaded = load_curve(&args.curve)?;
    let opts = ThicknessOptions { samples: args.samples, ..Default::default() };
    let report = compute_thickness(loaded.geom(), args.sigma, &opts).map_err(domain)?;
    if !report.ts.is_finite() {
        return Err(domain("curve has infinite thickness; nothing to balance"));
    }
    let solve_opts = SolveOptions { grid_per_component: args.grid, ..Default::default() };
    // Certificates are defined at unit thickness; rescale analytic curves
    // automatically.
    let (cert, ts_used) = if (report.ts - 1.0).abs() <= 1e-6 {
        (solve_balance(loaded.geom(), args.sigma, &report, &solve_opts).map_err(domain)?, report.ts)
    } else {
        match &loaded {
            LoadedCurve::Analytic(curve) => {
                let scaled = curve.scaled(1.0 / report.ts);
                let report2 = compute_thickness(&scaled, args.sigma, &opts).map_err(domain)?;
                (
                    solve_balance(&scaled, args.sigma, &report2, &solve_opts).map_err(domain)?,
                    report2.ts,
                )
            }
            LoadedCurve::Sampled(_) => {
                return Err(domain(format!(
                    "sampled curve has Ts = {} ≠ 1; rescale it before solving",
                    report.ts
                )))
            }
        }
    };
    let mut value = cert.json();
    value["ts"] = serde_json::json!(ts_used);
    let json = serde_json::to_string_pretty(&value).map_err(io_err)?;
    let params = serde_json::to_value(&args).map_err(io_err)?;
    let mut outputs = Outputs::new("balance", params);
    match &args.out {
        Some(path) => outputs.add_file(path, json.into_bytes()),
        None => outputs.stdout = Some(json),
    }
    let feasible = cert.feasible;
    let residual = cert.residual;
    outputs.finish()?;
    if !feasible {
        return Err(domain(format!(
            "declared infeasible at this discretization (residual {residual} above tolerance); \
             not strongly critical at this resolution"
        )));
    }
    Ok(())
}

fn cmd_phase(args: PhaseArgs) -> Result<(), CliError> {
    let taus: Vec<f64> = match (args.tau, args.tau_min, args.tau_max) {
        (Some(t), None, None) => vec![t],
        (None, Some(lo), Some(hi)) => (0..=args.steps)
            .map(|i| lo + (hi - lo) * i as f64 / args.steps as f64)
            .collect(),
        _ => return Err(io_err("phase needs either --tau or both --tau-min and --tau-max")),
    };
    let sigmas: Vec<f64> = (0..=args.steps)
        .map(|i| args.sigma_min + (args.sigma_max - args.sigma_min) * i as f64 / args.steps as f64)
        .collect();
    let grid: Vec<(usize, f64, f64)> = taus
        .iter()
        .flat_map(|&t| sigmas.iter().map(move |&s| (t, s)))
        .enumerate()
        .map(|(i, (t, s))| (i, t, s))
        .collect();
    // Parallel sweep; rows gathered by grid index, not completion order.
    let mut rows: Vec<(usize, String)> = grid
        .par_iter()
        .map(|&(i, tau, sigma)| {
            let line = match build_clasp(tau, sigma, 10.0) {
                Ok(sol) => {
                    let regime = match sol.regime {
                        ropecrit::clasp::Regime::FullyKinked => "fully_kinked",
                        ropecrit::clasp::Regime::Transitional => "transitional",
                        ropecrit::clasp::Regime::Generic => "generic",
                        ropecrit::clasp::Regime::Gehring => "gehring",
                    };
                    format!(
                        "{},{},{},{},{}",
                        fmt_g(tau),
                        fmt_g(sigma),
                        regime,
                        fmt_g(sol.excess_length),
                        fmt_g(sol.tip_gap)
                    )
                }
                Err(e) => format!("{},{},error: {e},,", fmt_g(tau), fmt_g(sigma)),
            };
            (i, line)
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    let mut out = String::from("tau,sigma,regime,excess_length,tip_gap\n");
    for (_, line) in rows {
        out.push_str(&line);
        out.push('\n');
    }
    let params = serde_json::to_value(&args).map_err(io_err)?;
    let mut outputs = Outputs::new("phase", params);
    match &args.out {
        Some(path) => outputs.add_file(path, out.into_bytes()),
        None => outputs.stdout = Some(out),
    }
    outputs.finish()
}

fn cmd_helix(args: HelixArgs) -> Result<(), CliError> {
    let sf = build_helix(args.torsion, args.length).map_err(domain)?;
    emit_strutfree("helix", serde_json::to_value(&args).map_err(io_err)?, &sf, args.out)
}

fn cmd_wave(args: WaveArgs) -> Result<(), CliError> {
    let sf = build_wave(args.v_norm, args.arcs).map_err(domain)?;
    emit_strutfree("wave", serde_json::to_value(&args).map_err(io_err)?, &sf, args.out)
}

fn emit_strutfree(
    name: &str,
    params: serde_json::Value,
    sf: &StrutFreeCurve,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let csv = strutfree_csv(sf);
    let mut outputs = Outputs::new(name, params);
    match &out {
        Some(path) => {
            outputs.add_file(path, csv.into_bytes());
            // Curve schema alongside the CSV for analytic builds.
            if let StrutFreeGeom::Analytic(curve) = &sf.geom {
                let cj = CurveJson::from_curve(curve);
                let json = serde_json::to_string_pretty(&cj).map_err(io_err)?;
                outputs.add_file(&path.with_extension("curve.json"), json.into_bytes());
            }
        }
        None => outputs.stdout = Some(csv),
    }
    outputs.finish()
}
