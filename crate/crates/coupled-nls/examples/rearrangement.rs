//! Schwartz symmetrization on the grid, and the rearrange-then-project step
//! that never raises the energy.
//!
//! cargo run --release --example rearrangement

use coupled_nls::energy::{dilate_exact, Integrals, Pair, SystemParams};
use coupled_nls::radial::{grad_norm_sq, lp_norm_pow, mixed_integral};
use coupled_nls::rearrange::{distribution, rearrange_and_project, schwartz_rearrange};
use coupled_nls::{make_grid, RadialField};

fn main() -> coupled_nls::Result<()> {
    let g = make_grid(3, 10.0, 1001)?;
    // a shell with a dip of the other sign inside
    let u = RadialField::from_fn(&g, |r| (-(r - 4.0).powi(2)).exp() - 0.4 * (-(r - 1.5).powi(2) * 4.0).exp());
    let v = RadialField::from_fn(&g, |r| 0.7 * (-(r - 2.5).powi(2) / 0.5).exp());
    let us = schwartz_rearrange(&u);
    let vs = schwartz_rearrange(&v);

    for p in [2.0, 4.0] {
        println!("‖u‖_{p}^{p}: {:.8} -> {:.8}", lp_norm_pow(&u, p)?, lp_norm_pow(&us, p)?);
    }
    for level in [0.1, 0.5, 0.9] {
        println!("|{{|u| > {level}}}|: {:.6} -> {:.6}", distribution(&u, level), distribution(&us, level));
    }
    println!("‖∇u‖²: {:.6} -> {:.6}", grad_norm_sq(&u), grad_norm_sq(&us));
    println!("∫|u|^1.75|v|^1.75: {:.6} -> {:.6}", mixed_integral(&u, &v, 1.75, 1.75)?, mixed_integral(&us, &vs, 1.75, 1.75)?);

    let params = SystemParams {
        dim: 3,
        p: 4.0,
        q: 4.0,
        r1: 1.75,
        r2: 1.75,
        mu1: 1.0,
        mu2: 1.0,
        beta: 1.0,
        a: 1.0,
        b: 1.0,
    };
    let pair = Pair::new(u, v)?;
    let t0 = Integrals::of(&params, &pair).fiber_t(&params)?;
    let on = dilate_exact(&pair, t0)?;
    let proj = rearrange_and_project(&params, &on)?;
    println!(
        "\nJ on the Pohozaev set {:.6}, after rearranging and projecting {:.6} (t = {:.6})",
        proj.energy_before, proj.energy_after, proj.t
    );
    Ok(())
}
