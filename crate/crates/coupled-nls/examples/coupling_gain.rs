//! How much energy a small second component gains: Δ(s) ~ s^{r₂}, and for
//! r₂ = 2 the sign of the s² coefficient switching at the threshold β*.
//!
//! cargo run --release --example coupling_gain

use coupled_nls::beta::{beta_star, BetaProblem};
use coupled_nls::energy::SystemParams;
use coupled_nls::gain::{coupling_gain_expansion, rayleigh_direction};
use coupled_nls::make_grid;

fn main() -> coupled_nls::Result<()> {
    let g = make_grid(3, 15.0, 1501)?;
    let mut params = SystemParams {
        dim: 3,
        p: 4.0,
        q: 4.0,
        r1: 2.0,
        r2: 1.5,
        mu1: 1.0,
        mu2: 1.0,
        beta: 1.0,
        a: 1.0,
        b: 1.0,
    };
    let s: Vec<f64> = (0..6).map(|k| 1e-5 * 3f64.powi(k)).collect();
    let (h, _) = rayleigh_direction(&params, &g)?;
    let e = coupling_gain_expansion(&params, &h, &s)?;
    println!("r2 = 1.5");
    for row in &e.rows {
        println!("  s = {:.1e}: Δ = {:.6e}, t = {:.10}", row.s, row.delta, row.t);
    }
    println!("  slope {:.4}, coefficient {:.6} (predicted {:.6})", e.slope, e.coefficient, e.predicted);

    params.r1 = 1.75;
    params.r2 = 2.0;
    let bstar = beta_star(&BetaProblem::new(3, 4.0, 1.0, 1.0, params.r1)?)?;
    let (h, grid_beta) = rayleigh_direction(&params, &g)?;
    println!("\nr2 = 2: β* = {bstar:.6} (as seen by this grid: {grid_beta:.6})");
    for f in [0.1, 0.5, 2.0, 10.0] {
        params.beta = f * bstar;
        let e = coupling_gain_expansion(&params, &h, &s)?;
        println!("  β = {f:>4} β*: coefficient {:+.6} (predicted {:+.6})", e.coefficient, e.predicted);
    }
    Ok(())
}
