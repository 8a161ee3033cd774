use ropecrit::balance::{solve_balance, SolveOptions};
use ropecrit::clasp::build_clasp;
use ropecrit::thickness::{compute_thickness, ThicknessOptions};

fn main() {
    let sol = build_clasp(0.8, 0.8, 10.0).unwrap();
    let rep = compute_thickness(&sol.curve, 0.8, &ThicknessOptions::default()).unwrap();
    println!("arm: {:?}", sol.arm);
    let cert = solve_balance(&sol.curve, 0.8, &rep, &SolveOptions::default()).unwrap();
    println!("generic residual {:.3e}", cert.residual);
}
