//! A coupled normalized ground state, checked against the semitrivial levels
//! and written to CSV.
//!
//! cargo run --release --example ground_state -- [a b beta]

use std::fs::File;
use std::io::BufWriter;

use coupled_nls::cli::output::{write_profiles, write_results, ResultRow};
use coupled_nls::energy::SystemParams;
use coupled_nls::solver::{mass_saturation_check, minimize_ground, verify_strict_inequality, SolveConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let (a, b, beta) = match args[..] {
        [a, b, beta] => (a, b, beta),
        _ => (1.0, 1.0, 1.0),
    };
    let params = SystemParams {
        dim: 3,
        p: 4.0,
        q: 4.0,
        r1: 1.75,
        r2: 1.75,
        mu1: 1.0,
        mu2: 1.0,
        beta,
        a,
        b,
    };
    let cfg = SolveConfig::new(params);
    let r = minimize_ground(&cfg)?;
    println!("seed {}: C = {:.10}, residual {:.2e}, {} iterations", r.seed, r.energy, r.residual, r.iterations);
    println!("λ = ({:.6}, {:.6}), masses ({:.12}, {:.12})", r.lambda1, r.lambda2, r.masses.0, r.masses.1);
    println!("m_p = {:.6}, m_q = {:.6}, margin {:.6}", r.m_p, r.m_q, r.strict_margin);
    println!("semitrivial: {}, fiber t = {:.8}", r.semitrivial, r.fiber_t);

    let rep = verify_strict_inequality(&params, &r)?;
    println!("{}", rep.message);
    println!("{}", mass_saturation_check(&params, &r, 1e-6).note);

    let dir = std::env::temp_dir();
    let res = dir.join("ground_state.csv");
    let prof = dir.join("ground_state_profiles.csv");
    write_results(&mut BufWriter::new(File::create(&res)?), &[ResultRow::from_result(&params, &r)])?;
    write_profiles(&mut BufWriter::new(File::create(&prof)?), &r)?;
    println!("wrote {} and {}", res.display(), prof.display());
    Ok(())
}
