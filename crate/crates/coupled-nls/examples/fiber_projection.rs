//! The fiber map t ⋆ (u, v) and the projection onto the Pohozaev set.
//!
//! cargo run --release --example fiber_projection

use coupled_nls::energy::{dilate_exact, project_fiber, report, Integrals, Pair, SystemParams};
use coupled_nls::{make_grid, RadialField};

fn main() -> coupled_nls::Result<()> {
    let params = SystemParams {
        dim: 3,
        p: 4.0,
        q: 4.5,
        r1: 1.75,
        r2: 1.75,
        mu1: 1.0,
        mu2: 1.0,
        beta: 1.0,
        a: 1.0,
        b: 1.0,
    };
    let g = make_grid(3, 15.0, 1501)?;
    let u = RadialField::from_fn(&g, |r| (-r * r).exp());
    let v = RadialField::from_fn(&g, |r| 0.5 / (1.0 + r * r).powi(2));
    let pair = Pair::new(u, v)?;

    let it = Integrals::of(&params, &pair);
    let t = project_fiber(&params, &pair)?;
    println!("P = {:.6}, t = {t:.10} (P > 0 means t > 1)", it.pohozaev(&params));
    println!("\n    s       Ψ(s)          Ψ'(s)");
    let mut ks = vec![0.25, 0.5, 1.0, 2.0, 4.0, t];
    ks.sort_by(f64::total_cmp);
    for k in ks {
        let (psi, d1, _) = it.psi(&params, k);
        println!("  {k:<8.4} {psi:<13.6} {d1:.6}");
    }

    let on = dilate_exact(&pair, t)?;
    let rep = report(&params, &on)?;
    println!("\non the Pohozaev set: {rep:#?}");
    Ok(())
}
