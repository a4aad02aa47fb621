//! Energy gained by switching on a small second component.
//!
//! Starting from the semitrivial point `(z, 0)` with `z = z_{p,μ₁,a}`, the
//! pair `(z, s h)` is projected on its fiber and compared with `(z, 0)`:
//! `Δ(s) = max_t J[t⋆z, t⋆(sh)] − max_t J[t⋆z, 0]`. To leading order
//! `Δ(s) ≈ −β ∫z^{r₁}|h|^{r₂} s^{r₂}` for `r₂ < 2`, and
//! `Δ(s) ≈ (½‖∇h‖² − β∫z^{r₁}h²) s²` for `r₂ = 2`. Both levels are taken on
//! the same grid, so the discretization offset of `z` cancels.

use std::sync::Arc;

use crate::beta::rayleigh_eigen;
use crate::energy::{dilate_exact, Integrals, Pair, SystemParams};
use crate::error::{param, Error, Result};
use crate::radial::{grad_norm_sq, lp_norm_pow, mixed_integral, RadialField, RadialGrid};
use crate::scalar::{reference_ground_state, scaled_on_grid, ScalarParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRow {
    pub s: f64,
    pub delta: f64,
    /// Fiber maximizer of the perturbed pair, relative to the unperturbed one.
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct GainExpansion {
    pub rows: Vec<GainRow>,
    /// Least-squares slope of `log|Δ|` against `log s`.
    pub slope: f64,
    /// `Δ(s) / s^{r₂}` at the smallest `s`, the fitted leading coefficient.
    pub coefficient: f64,
    /// The leading coefficient predicted from the integrals of `h`.
    pub predicted: f64,
    /// Largest deviation of `log|Δ|` from the fitted line.
    pub fit_residual: f64,
}

/// `z_{p,μ₁,a}` on `grid`, moved along its fiber onto the discrete Pohozaev
/// set so that `t = 1` at `s = 0`. Returns it together with `h` carried
/// along by the same exact dilation.
fn projected_base(params: &SystemParams, h: &RadialField) -> Result<Pair> {
    let grid = h.grid();
    if grid.dim() != params.dim {
        return Err(Error::Structural("direction lives on a grid of the wrong dimension".into()));
    }
    let up = reference_ground_state(params.dim, params.p)?;
    let (z, _) = scaled_on_grid(&ScalarParams::new(params.dim, params.p, params.mu1, params.a)?, &up, grid)?;
    let pair = Pair::new(z, h.clone())?;
    let zero = Pair::new(pair.u.clone(), RadialField::zeros(grid))?;
    let t0 = Integrals::of(params, &zero).fiber_t(params)?;
    dilate_exact(&pair, t0)
}

/// `Δ(s)` for each `s` and the power-law fit of `|Δ|`.
pub fn coupling_gain_expansion(params: &SystemParams, h: &RadialField, s_values: &[f64]) -> Result<GainExpansion> {
    params.validate()?;
    let mass = lp_norm_pow(h, 2.0)?;
    if (mass - 1.0).abs() > 1e-8 {
        return param(format!("direction must have unit mass, got {mass}"));
    }
    if s_values.len() < 2 || s_values.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return param("need at least two positive values of s");
    }
    let base = projected_base(params, h)?;
    let zero = Pair::new(base.u.clone(), RadialField::zeros(base.u.grid()))?;
    let (t0, level) = Integrals::of(params, &zero).fiber_max(params)?;

    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let pair = Pair::new(base.u.clone(), base.v.scale(s))?;
        let (t, e) = Integrals::of(params, &pair).fiber_max(params)?;
        rows.push(GainRow { s, delta: e - level, t: t / t0 });
    }
    if rows.iter().any(|r| r.delta == 0.0) || rows.windows(2).any(|w| w[0].delta.signum() != w[1].delta.signum()) {
        return Err(Error::Solver(
            "gain changes sign or vanishes across s; the expansion regime is not reached".into(),
        ));
    }

    let xs: Vec<f64> = rows.iter().map(|r| r.s.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.delta.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return param("values of s must not all coincide");
    }
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx;
    let fit_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).abs())
        .fold(0.0, f64::max);

    let smallest = rows.iter().min_by(|a, b| a.s.total_cmp(&b.s)).unwrap();
    let coefficient = smallest.delta / smallest.s.powf(params.r2);
    let overlap = mixed_integral(&base.u, &base.v, params.r1, params.r2)?;
    let predicted = if params.r2 < 2.0 {
        -params.beta * overlap
    } else if params.r2 == 2.0 {
        0.5 * grad_norm_sq(&base.v) - params.beta * overlap
    } else {
        0.5 * grad_norm_sq(&base.v)
    };
    Ok(GainExpansion { rows, slope, coefficient, predicted, fit_residual })
}

/// Unit-mass minimizer of `‖∇h‖² / ∫ z^{r₁} h²` on `grid` (Dirichlet at its
/// edge) with `z = z_{p,μ₁,a}`, and `½ κ`, the threshold as this grid sees it.
pub fn rayleigh_direction(params: &SystemParams, grid: &Arc<RadialGrid>) -> Result<(RadialField, f64)> {
    params.validate()?;
    let up = reference_ground_state(params.dim, params.p)?;
    let (z, _) = scaled_on_grid(&ScalarParams::new(params.dim, params.p, params.mu1, params.a)?, &up, grid)?;
    let e = rayleigh_eigen(&z.map(|x| x.abs().powf(params.r1)))?;
    let m = lp_norm_pow(&e.vector, 2.0)?;
    Ok((e.vector.scale(1.0 / m.sqrt()), 0.5 * e.kappa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::make_grid;

    fn params(r1: f64, r2: f64, beta: f64) -> SystemParams {
        SystemParams {
            dim: 3,
            p: 4.0,
            q: 4.0,
            r1,
            r2,
            mu1: 1.0,
            mu2: 1.0,
            beta,
            a: 1.0,
            b: 1.0,
        }
    }

    fn unit_gaussian(grid: &Arc<RadialGrid>) -> RadialField {
        let h = RadialField::from_fn(grid, |r| (-r * r / 2.0).exp());
        let m = lp_norm_pow(&h, 2.0).unwrap();
        h.scale(1.0 / m.sqrt())
    }

    #[test]
    fn sublinear_coupling_gains_at_order_r2() {
        let g = make_grid(3, 15.0, 1501).unwrap();
        let s: Vec<f64> = (0..5).map(|k| 1e-5 * 3f64.powi(k)).collect();
        let e = coupling_gain_expansion(&params(2.0, 1.5, 1.0), &unit_gaussian(&g), &s).unwrap();
        assert!((e.slope - 1.5).abs() < 0.05, "slope {}", e.slope);
        assert!(e.coefficient < 0.0);
        assert!((e.coefficient / e.predicted - 1.0).abs() < 0.05);
    }

    #[test]
    fn quadratic_coupling_sign_follows_threshold() {
        let g = make_grid(3, 15.0, 1501).unwrap();
        let (h, beta_grid) = rayleigh_direction(&params(1.75, 2.0, 1.0), &g).unwrap();
        let s: Vec<f64> = (0..4).map(|k| 1e-4 * 2f64.powi(k)).collect();
        let below = coupling_gain_expansion(&params(1.75, 2.0, 0.1 * beta_grid), &h, &s).unwrap();
        let above = coupling_gain_expansion(&params(1.75, 2.0, 10.0 * beta_grid), &h, &s).unwrap();
        assert!(below.coefficient > 0.0 && above.coefficient < 0.0);
        assert!((below.slope - 2.0).abs() < 0.05 && (above.slope - 2.0).abs() < 0.05);
    }

    #[test]
    fn unit_mass_is_required() {
        let g = make_grid(3, 15.0, 301).unwrap();
        let h = unit_gaussian(&g).scale(2.0);
        assert!(coupling_gain_expansion(&params(2.0, 1.5, 1.0), &h, &[1e-3, 2e-3]).is_err());
    }
}
