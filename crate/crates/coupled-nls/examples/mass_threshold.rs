//! Which semitrivial state is lower: the threshold b* and the switch in
//! min{m_p, m_q} as b crosses it.
//!
//! cargo run --release --example mass_threshold

use coupled_nls::scalar::{mass_threshold_b, reference_ground_state, scalar_energy_m, ScalarParams};

fn main() -> coupled_nls::Result<()> {
    let (n, p, q, a) = (3, 4.0, 4.5, 1.0);
    let up = reference_ground_state(n, p)?;
    let uq = reference_ground_state(n, q)?;
    let bstar = mass_threshold_b(n, p, q, 1.0, 1.0, a, up.mass_sq, uq.mass_sq)?;
    let m_p = scalar_energy_m(&ScalarParams::new(n, p, 1.0, a)?, up.mass_sq)?;
    println!("N={n} p={p} q={q} a={a}: b* = {bstar:.10}, m_p = {m_p:.6}");
    for f in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let b = f * bstar;
        let m_q = scalar_energy_m(&ScalarParams::new(n, q, 1.0, b)?, uq.mass_sq)?;
        let lower = if m_q < m_p { "v-state" } else if m_q > m_p { "u-state" } else { "tie" };
        println!("  b = {f:>4} b*: m_q = {m_q:>12.6}  lower: {lower}");
    }

    // p = q, μ₁ = μ₂: the threshold is the mass itself
    let u = reference_ground_state(n, 4.0)?;
    let b = mass_threshold_b(n, 4.0, 4.0, 1.0, 1.0, 1.7, u.mass_sq, u.mass_sq)?;
    println!("p = q, a = 1.7: b* = {b}");
    Ok(())
}
