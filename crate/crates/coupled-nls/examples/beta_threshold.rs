//! The coupling threshold β_{p,μ,a,N,r} from the weighted eigenvalue
//! problem, with its Sobolev/test-function sandwich, the exact power law in
//! the mass, and the decay to zero in low dimensions.
//!
//! cargo run --release --example beta_threshold

use coupled_nls::beta::{
    beta_bounds, beta_estimate, beta_scaling_report, decay_in_radius, sobolev_constant, BetaProblem,
};
use coupled_nls::scalar::reference_ground_state;

fn main() -> coupled_nls::Result<()> {
    for (n, p) in [(3, 4.0), (4, 3.5)] {
        let sn = sobolev_constant(n)?;
        let u = reference_ground_state(n, p)?;
        println!("N={n} p={p}, S_N = {sn:.6}");
        for r in [1.5, 2.0, 2.5] {
            let bp = match BetaProblem::new(n, p, 1.0, 1.0, r) {
                Ok(bp) => bp,
                Err(e) => {
                    println!("  r={r}: {e}");
                    continue;
                }
            };
            let est = beta_estimate(&bp)?;
            let bounds = beta_bounds(&bp, sn, &u)
                .map(|(lo, hi)| format!("[{lo:.6}, {hi:.6}]"))
                .unwrap_or_else(|e| e.to_string());
            println!(
                "  r={r}: β* = {:.6} ± {:.1e} (truncation {:.1e}), bounds {bounds}",
                est.value, est.error, est.truncation
            );
        }
    }

    let report = beta_scaling_report(&BetaProblem::new(3, 4.0, 1.0, 1.0, 1.5)?, &[0.5, 1.0, 2.0, 4.0])?;
    println!("\nmass dependence (N=3 p=4 r=1.5), regime {:?}", report.regime);
    for (a, b) in &report.rows {
        println!("  a = {a}: β = {b:.8}");
    }
    println!("  slope {:.10}, expected {:.10}", report.fitted_slope, report.expected_slope);

    let bp = BetaProblem::new(1, 8.0, 1.0, 1.0, 2.0)?;
    println!("\nN=1 p=8 r=2: β* = {}", beta_estimate(&bp)?.value);
    for (radius, b) in decay_in_radius(&bp, &[10.0, 20.0, 40.0, 80.0], 0.01)? {
        println!("  finite domain R = {radius:>4}: {b:.6}");
    }
    Ok(())
}
