//! The scalar ground state U_p by shooting, and the quantities scaled from it.
//!
//! cargo run --release --example scalar_ground_state

use coupled_nls::make_grid;
use coupled_nls::scalar::{lambda_scalar, scalar_energy_m, scale_to_mass, scalar_energy_i, solve_up, ScalarParams};

fn main() -> coupled_nls::Result<()> {
    // N = 1 has the closed form √2 sech x for p = 4
    let g = make_grid(1, 20.0, 4001)?;
    let u = solve_up(1, 4.0, &g)?;
    let worst = g
        .nodes()
        .zip(u.field.values())
        .take_while(|(r, _)| *r <= 15.0)
        .map(|(r, x)| (x * r.cosh() / 2f64.sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    println!("N=1 p=4: U(0) = {:.12}, ‖U‖² = {:.9}, max rel. error vs √2 sech = {worst:.2e}", u.shoot_height, u.mass_sq);

    println!("\n N  p     U(0)          ‖U‖²          ‖∇U‖²         Nehari    Pohozaev");
    for (n, p) in [(1, 8.0), (2, 5.0), (3, 4.0), (4, 3.5)] {
        let g = make_grid(n, 30.0, 30001)?;
        let u = solve_up(n, p, &g)?;
        println!(
            " {n}  {p:<4}  {:<12.8}  {:<12.8}  {:<12.8}  {:.1e}   {:.1e}",
            u.shoot_height,
            u.mass_sq,
            u.grad_sq,
            u.nehari_residual(),
            u.pohozaev_residual()
        );

        // z_{p,μ,a}: rescaled to mass a, with its multiplier and energy level
        let sp = ScalarParams::new(n, p, 1.0, 2.0)?;
        let (z, lambda) = scale_to_mass(&sp, &u)?;
        let m = scalar_energy_m(&sp, u.mass_sq)?;
        let direct = scalar_energy_i(&z, p, 1.0)?;
        assert!((lambda / lambda_scalar(&sp, u.mass_sq)? - 1.0).abs() < 1e-12);
        println!("        a = 2: λ = {lambda:.8}, m = {m:.8}, I[z] = {direct:.8}");
    }
    Ok(())
}
