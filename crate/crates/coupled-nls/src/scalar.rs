//! The scalar ground state `U_p` of `-Δu + u = u^{p-1}` and the family
//! `z_{p,μ,a}` obtained from it by scaling.
//!
//! `U_p` is computed by shooting on `u(0)`: heights that are too small turn
//! back up before decaying, heights that are too large cross zero. The
//! bracket is bisected until it cannot shrink any further. Past the point
//! where the two bracketing trajectories separate, the profile is
//! continued by the decaying solution integrated inward from far away and
//! matched in value.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{param, Error, Result};
use crate::radial::{grad_norm_sq, laplacian_into, lp_norm_pow, RadialField, RadialGrid};

/// `2*`: infinite for N ≤ 2.
pub fn sobolev_exponent(dim: usize) -> f64 {
    if dim <= 2 {
        f64::INFINITY
    } else {
        2.0 * dim as f64 / (dim as f64 - 2.0)
    }
}

/// The mass-critical exponent `2 + 4/N`.
pub fn mass_critical(dim: usize) -> f64 {
    2.0 + 4.0 / dim as f64
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=4).contains(&dim) {
        Ok(())
    } else {
        param(format!("dim must be in 1..=4, got {dim}"))
    }
}

/// `2 < p < 2*`.
pub fn check_subcritical(dim: usize, p: f64) -> Result<()> {
    check_dim(dim)?;
    if p > 2.0 && p < sobolev_exponent(dim) {
        Ok(())
    } else {
        param(format!(
            "exponent {p} outside (2, {}) for N = {dim}",
            sobolev_exponent(dim)
        ))
    }
}

/// `2 + 4/N < p < 2*`.
pub fn check_supercritical(dim: usize, p: f64) -> Result<()> {
    check_subcritical(dim, p)?;
    if p > mass_critical(dim) {
        Ok(())
    } else {
        param(format!(
            "exponent {p} is not mass-supercritical (needs > {} for N = {dim})",
            mass_critical(dim)
        ))
    }
}

fn check_noncritical(dim: usize, p: f64) -> Result<()> {
    check_subcritical(dim, p)?;
    if (p - mass_critical(dim)).abs() < 1e-12 {
        param(format!("exponent {p} is mass-critical for N = {dim}"))
    } else {
        Ok(())
    }
}

/// `(p-2)N - 4`: positive exactly in the mass-supercritical range.
pub(crate) fn e_exp(dim: usize, p: f64) -> f64 {
    (p - 2.0) * dim as f64 - 4.0
}

/// `2N - (N-2)p`: positive below `2*`.
pub(crate) fn d_exp(dim: usize, p: f64) -> f64 {
    2.0 * dim as f64 - (dim as f64 - 2.0) * p
}

/// (N, p, μ, a) of the scalar problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarParams {
    pub dim: usize,
    pub p: f64,
    pub mu: f64,
    pub mass: f64,
}

impl ScalarParams {
    pub fn new(dim: usize, p: f64, mu: f64, mass: f64) -> Result<ScalarParams> {
        check_subcritical(dim, p)?;
        if !(mu > 0.0 && mu.is_finite()) {
            return param(format!("mu must be positive, got {mu}"));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return param(format!("mass must be positive, got {mass}"));
        }
        Ok(ScalarParams { dim, p, mu, mass })
    }
}

/// `U_p` on a grid together with its quadrature norms.
#[derive(Debug, Clone)]
pub struct ScalarGroundState {
    pub p: f64,
    pub field: RadialField,
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub pnorm_pow: f64,
    pub shoot_height: f64,
    /// ‖-ΔU + U - U^{p-1}‖∞ / ‖U‖∞ with the grid Laplacian.
    pub residual: f64,
}

impl ScalarGroundState {
    pub fn dim(&self) -> usize {
        self.field.grid().dim()
    }

    /// (‖∇U‖² + ‖U‖² − ‖U‖_p^p) / ‖U‖_p^p
    pub fn nehari_residual(&self) -> f64 {
        (self.grad_sq + self.mass_sq - self.pnorm_pow) / self.pnorm_pow
    }

    /// (‖∇U‖² − (p−2)N/(2p) ‖U‖_p^p) / ‖∇U‖²
    pub fn pohozaev_residual(&self) -> f64 {
        let n = self.dim() as f64;
        (self.grad_sq - (self.p - 2.0) * n / (2.0 * self.p) * self.pnorm_pow) / self.grad_sq
    }
}

/// One-dimensional ground state `((p/2) sech²((p−2)x/2))^{1/(p−2)}`.
pub fn soliton_1d(p: f64, x: f64) -> f64 {
    let s = 1.0 / ((p - 2.0) * x / 2.0).cosh();
    (p / 2.0 * s * s).powf(1.0 / (p - 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shot {
    Over,
    Under,
}

struct Shooter {
    dim: f64,
    p: f64,
    step: f64,
}

impl Shooter {
    fn rhs(&self, r: f64, u: f64, du: f64) -> (f64, f64) {
        let nl = u.abs().powf(self.p - 2.0) * u;
        (du, u - nl - (self.dim - 1.0) / r * du)
    }

    fn rk4(&self, r: f64, u: f64, du: f64, h: f64) -> (f64, f64) {
        let (a1, b1) = self.rhs(r, u, du);
        let (a2, b2) = self.rhs(r + h / 2.0, u + h / 2.0 * a1, du + h / 2.0 * b1);
        let (a3, b3) = self.rhs(r + h / 2.0, u + h / 2.0 * a2, du + h / 2.0 * b2);
        let (a4, b4) = self.rhs(r + h, u + h * a3, du + h * b3);
        (
            u + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            du + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        )
    }

    /// State after the first sub-step, from the regular series at r = 0.
    fn start(&self, u0: f64) -> (f64, f64, f64) {
        let h = self.step;
        let c = (u0 - u0.powf(self.p - 1.0)) / (2.0 * self.dim);
        if self.dim == 1.0 {
            self.rk4_from_origin(u0, h)
        } else {
            // next series term keeps the start fourth-order accurate
            let c4 = c * (1.0 - (self.p - 1.0) * u0.powf(self.p - 2.0)) / (4.0 * (self.dim + 2.0));
            (h, u0 + c * h * h + c4 * h.powi(4), 2.0 * c * h + 4.0 * c4 * h.powi(3))
        }
    }

    fn rk4_from_origin(&self, u0: f64, h: f64) -> (f64, f64, f64) {
        // N = 1 has no singular term, plain RK4 from r = 0
        let rhs = |u: f64, du: f64| (du, u - u.abs().powf(self.p - 2.0) * u);
        let (a1, b1) = rhs(u0, 0.0);
        let (a2, b2) = rhs(u0 + h / 2.0 * a1, h / 2.0 * b1);
        let (a3, b3) = rhs(u0 + h / 2.0 * a2, h / 2.0 * b2);
        let (a4, b4) = rhs(u0 + h * a3, h * b3);
        (
            h,
            u0 + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        )
    }

    /// Classify a height; optionally record u at every `stride`-th sub-step
    /// until the event.
    fn shoot(&self, u0: f64, r_cap: f64, stride: usize, mut rec: Option<&mut Vec<f64>>) -> Shot {
        if let Some(v) = rec.as_deref_mut() {
            v.clear();
            v.push(u0);
        }
        let (mut r, mut u, mut du) = self.start(u0);
        let mut k = 1usize;
        loop {
            if u < 0.0 {
                return Shot::Over;
            }
            if du > 0.0 {
                return Shot::Under;
            }
            if k % stride == 0 {
                if let Some(v) = rec.as_deref_mut() {
                    v.push(u);
                }
            }
            if r > r_cap {
                return Shot::Under;
            }
            let (nu, ndu) = self.rk4(r, u, du, self.step);
            u = nu;
            du = ndu;
            k += 1;
            r = k as f64 * self.step;
        }
    }
}

/// Solve for `U_p` on `grid`.
pub fn solve_up(dim: usize, p: f64, grid: &Arc<RadialGrid>) -> Result<ScalarGroundState> {
    check_subcritical(dim, p)?;
    if grid.dim() != dim {
        return Err(Error::Structural(format!(
            "grid dimension {} differs from requested N = {dim}",
            grid.dim()
        )));
    }
    let h = grid.spacing();
    let stride = (h / 0.002).ceil().max(2.0) as usize;
    let shooter = Shooter {
        dim: dim as f64,
        p,
        step: h / stride as f64,
    };
    let r_cap = 200.0;

    let mut lo = 1.0;
    let mut hi = 4.0 * (p / 2.0).powf(1.0 / (p - 2.0));
    let mut tries = 0;
    while shooter.shoot(hi, r_cap, stride, None) != Shot::Over {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::Solver(format!(
                "no overshooting height found for N = {dim}, p = {p}"
            )));
        }
    }
    if shooter.shoot(lo, r_cap, stride, None) != Shot::Under {
        return Err(Error::Solver("lower shooting height does not undershoot".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shooter.shoot(mid, r_cap, stride, None) {
            Shot::Over => hi = mid,
            Shot::Under => lo = mid,
        }
    }

    let mut tr_lo = Vec::new();
    let mut tr_hi = Vec::new();
    shooter.shoot(lo, r_cap, stride, Some(&mut tr_lo));
    shooter.shoot(hi, r_cap, stride, Some(&mut tr_hi));

    // match point: last node where the bracket still agrees closely
    let n_common = tr_lo.len().min(tr_hi.len());
    let mut i_match = 0;
    for i in 1..n_common {
        let a = tr_lo[i];
        let b = tr_hi[i];
        if (a - b).abs() > 1e-10 * a.abs() || a <= 0.0 {
            break;
        }
        i_match = i;
    }
    // leave a few nodes of slack below the separation point
    let i_match = i_match.saturating_sub(2).max(1);

    let m = grid.points();
    let mut values = vec![0.0; m];
    for i in 0..m.min(i_match + 1) {
        values[i] = 0.5 * (tr_lo[i] + tr_hi[i]);
    }
    if i_match + 1 < m {
        let tail = inward_tail(&shooter, grid, i_match, values[i_match], stride)?;
        values[i_match + 1..m].copy_from_slice(&tail[1..m - i_match]);
    }

    let field = RadialField::new(grid.clone(), values)?;
    finish_state(p, field)
}

/// Values at nodes `i_match..` of the decaying solution through `target`
/// at node `i_match`.
fn inward_tail(
    shooter: &Shooter,
    grid: &RadialGrid,
    i_match: usize,
    target: f64,
    stride: usize,
) -> Result<Vec<f64>> {
    let h = grid.spacing();
    let n = shooter.dim;
    let m = grid.points();
    let span = ((30.0 / h).ceil() as usize).max(4);
    let i_end = i_match + span;
    let r_end = i_end as f64 * h;
    let slope = -(1.0 + (n - 1.0) / (2.0 * r_end));

    let run = |amp: f64, rec: bool| -> (f64, Vec<f64>) {
        let mut out = if rec { vec![0.0; span + 1] } else { Vec::new() };
        let mut u = amp;
        let mut du = slope * amp;
        if rec {
            out[span] = u;
        }
        let steps = span * stride;
        for k in 0..steps {
            let r = r_end - k as f64 * shooter.step;
            let (nu, ndu) = shooter.rk4(r, u, du, -shooter.step);
            u = nu;
            du = ndu;
            if rec && (k + 1) % stride == 0 {
                out[span - (k + 1) / stride] = u;
            }
        }
        (u, out)
    };

    // linear guess, then secant on the amplitude for the nonlinear term
    let mut a0 = target * 1e-20;
    let g1 = run(a0, false).0;
    let mut f0 = g1 - target;
    let mut a1 = a0 * target / g1;
    if !a1.is_finite() || a1 <= 0.0 {
        return Err(Error::Solver("tail matching failed".into()));
    }
    let mut f1 = run(a1, false).0 - target;
    for _ in 0..60 {
        if f1.abs() <= 1e-15 * target || f1 == f0 {
            break;
        }
        let a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
        a0 = a1;
        f0 = f1;
        a1 = if a2 > 0.0 { a2 } else { 0.5 * a1 };
        f1 = run(a1, false).0 - target;
    }
    let (_, mut vals) = run(a1, true);
    vals[0] = target;
    // beyond the inward start: asymptotic continuation
    if i_end + 1 < m {
        let u_end = vals[span];
        for i in i_end + 1..m {
            let r = i as f64 * h;
            vals.push(u_end * (-(r - r_end)).exp() * (r_end / r).powf((n - 1.0) / 2.0));
        }
    }
    vals.truncate(m - i_match);
    Ok(vals)
}

fn finish_state(p: f64, field: RadialField) -> Result<ScalarGroundState> {
    let mass_sq = lp_norm_pow(&field, 2.0)?;
    let grad_sq = grad_norm_sq(&field);
    let pnorm_pow = lp_norm_pow(&field, p)?;
    let shoot_height = field.values()[0];
    let mut lap = vec![0.0; field.values().len()];
    laplacian_into(field.values(), field.grid(), &mut lap);
    let peak = field.max_abs();
    let residual = field
        .values()
        .iter()
        .zip(&lap)
        .map(|(&u, &l)| (-l + u - u.powf(p - 1.0)).abs())
        .fold(0.0, f64::max)
        / peak;
    Ok(ScalarGroundState {
        p,
        field,
        mass_sq,
        grad_sq,
        pnorm_pow,
        shoot_height,
        residual,
    })
}

/// A shared `U_p` on a fine default grid, computed once per (N, p).
pub fn reference_ground_state(dim: usize, p: f64) -> Result<Arc<ScalarGroundState>> {
    type Cache = Mutex<HashMap<(usize, u64), Arc<ScalarGroundState>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    check_subcritical(dim, p)?;
    let key = (dim, p.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let grid = RadialGrid::new(dim, 30.0, 60001)?;
    let state = Arc::new(solve_up(dim, p, &grid)?);
    cache.lock().unwrap().entry(key).or_insert(state.clone());
    Ok(state)
}

/// `λ_{p,μ,a} = μ^{-4/e} ‖U_p‖₂^{4(p-2)/e} a^{-2(p-2)/e}`, `e = N(p-2) - 4`.
pub fn lambda_scalar(sp: &ScalarParams, up_mass_sq: f64) -> Result<f64> {
    check_noncritical(sp.dim, sp.p)?;
    let e = e_exp(sp.dim, sp.p);
    let p2 = sp.p - 2.0;
    Ok(sp.mu.powf(-4.0 / e) * up_mass_sq.powf(2.0 * p2 / e) * sp.mass.powf(-2.0 * p2 / e))
}

/// `(z_{p,μ,a}, λ_{p,μ,a})` with `z(x) = (λ/μ)^{1/(p-2)} U_p(√λ x)`.
///
/// `z` lives on the grid of `U` stretched by `1/√λ`, so its samples are
/// exact rescalings and its mass is `a` up to rounding.
pub fn scale_to_mass(sp: &ScalarParams, u: &ScalarGroundState) -> Result<(RadialField, f64)> {
    if u.dim() != sp.dim || u.p != sp.p {
        return Err(Error::Structural("ground state does not match (N, p)".into()));
    }
    let lambda = lambda_scalar(sp, u.mass_sq)?;
    let amp = (lambda / sp.mu).powf(1.0 / (sp.p - 2.0));
    let z = u.field.stretched(1.0 / lambda.sqrt())?.scale(amp);
    Ok((z, lambda))
}

/// `z_{p,μ,a}` sampled on an arbitrary grid through monotone interpolation.
pub fn scaled_on_grid(
    sp: &ScalarParams,
    u: &ScalarGroundState,
    grid: &Arc<RadialGrid>,
) -> Result<(RadialField, f64)> {
    let (z, lambda) = scale_to_mass(sp, u)?;
    Ok((z.resample(grid), lambda))
}

/// Closed form of `m_{p,μ,a} = inf I_{p,μ}` on the mass sphere:
/// `½ e/d · ‖U_p‖₂^{4(p-2)/e} · μ^{-4/e} · a^{-d/e}` with
/// `e = (p-2)N - 4`, `d = 2N - (N-2)p`.
pub fn scalar_energy_m(sp: &ScalarParams, up_mass_sq: f64) -> Result<f64> {
    check_noncritical(sp.dim, sp.p)?;
    let e = e_exp(sp.dim, sp.p);
    let d = d_exp(sp.dim, sp.p);
    Ok(0.5 * e / d
        * up_mass_sq.powf(2.0 * (sp.p - 2.0) / e)
        * sp.mu.powf(-4.0 / e)
        * sp.mass.powf(-d / e))
}

/// `I_{p,μ}[u] = ½‖∇u‖² − (μ/p)‖u‖_p^p`.
pub fn scalar_energy_i(u: &RadialField, p: f64, mu: f64) -> Result<f64> {
    Ok(0.5 * grad_norm_sq(u) - mu / p * lp_norm_pow(u, p)?)
}

/// Unique maximizing scale of `s ↦ I_{p,μ}[s⋆u]`.
pub fn scalar_fiber_t(u: &RadialField, p: f64, mu: f64) -> Result<f64> {
    let dim = u.grid().dim();
    check_noncritical(dim, p)?;
    let g = grad_norm_sq(u);
    let pn = lp_norm_pow(u, p)?;
    if g <= 0.0 || pn <= 0.0 {
        return param("scalar fiber needs a nonzero field");
    }
    let n = dim as f64;
    let theta = (p - 2.0) * n / (2.0 * p);
    Ok((g / (theta * mu * pn)).powf(2.0 / e_exp(dim, p)))
}

/// Value `I_{p,μ}[t(u)⋆u]` at the fiber optimum, in closed form:
/// `e/(4p) (2p/((p-2)N))^{(p-2)N/e} ‖∇u‖^{2(p-2)N/e} (μ‖u‖_p^p)^{-4/e}`.
pub fn scalar_fiber_value(u: &RadialField, p: f64, mu: f64) -> Result<f64> {
    let dim = u.grid().dim();
    check_noncritical(dim, p)?;
    let n = dim as f64;
    let e = e_exp(dim, p);
    let g = grad_norm_sq(u);
    let pn = lp_norm_pow(u, p)?;
    if g <= 0.0 || pn <= 0.0 {
        return param("scalar fiber needs a nonzero field");
    }
    let k = (p - 2.0) * n / e;
    Ok(e / (4.0 * p) * (2.0 * p / ((p - 2.0) * n)).powf(k) * g.powf(k) * (mu * pn).powf(-4.0 / e))
}

/// Mass threshold `b*` with `m_{q,μ2,b*} = m_{p,μ1,a}`; for `b > b*` the
/// `v`-semitrivial state has the lower energy.
pub fn mass_threshold_b(
    dim: usize,
    p: f64,
    q: f64,
    mu1: f64,
    mu2: f64,
    a: f64,
    up_mass_sq: f64,
    uq_mass_sq: f64,
) -> Result<f64> {
    check_supercritical(dim, p)?;
    check_supercritical(dim, q)?;
    if !(a > 0.0 && mu1 > 0.0 && mu2 > 0.0) {
        return param("masses and mu must be positive");
    }
    if p == q && mu1 == mu2 {
        return Ok(a);
    }
    let (ep, dp) = (e_exp(dim, p), d_exp(dim, p));
    let (eq, dq) = (e_exp(dim, q), d_exp(dim, q));
    let kp = ep / dp;
    let kq = eq / dq;
    let ratio = (kq / kp).powf(eq / dq);
    let mus = mu1.powf(4.0 * eq / (ep * dq)) * mu2.powf(-4.0 / dq);
    let norms = uq_mass_sq.powf(2.0 * (q - 2.0) / dq)
        * up_mass_sq.powf(-2.0 * (p - 2.0) * eq / (ep * dq));
    Ok(ratio * mus * norms * a.powf(dp * eq / (ep * dq)))
}

/// Gagliardo–Nirenberg quotient `‖u‖_p / (‖∇u‖₂^θ ‖u‖₂^{1-θ})`,
/// `θ = N(p-2)/(2p)`.
pub fn gn_quotient(u: &RadialField, p: f64) -> Result<f64> {
    let n = u.grid().dim() as f64;
    let theta = n * (p - 2.0) / (2.0 * p);
    let g = grad_norm_sq(u);
    let m = lp_norm_pow(u, 2.0)?;
    let pn = lp_norm_pow(u, p)?;
    if g <= 0.0 || m <= 0.0 {
        return param("GN quotient needs a nonconstant nonzero field");
    }
    Ok(pn.powf(1.0 / p) / (g.powf(theta / 2.0) * m.powf((1.0 - theta) / 2.0)))
}

/// Sharp GN constant, the quotient at the extremal `U_p`.
pub fn gn_constant(dim: usize, p: f64, u: &ScalarGroundState) -> Result<f64> {
    check_subcritical(dim, p)?;
    if u.dim() != dim || u.p != p {
        return Err(Error::Structural("ground state does not match (N, p)".into()));
    }
    let n = dim as f64;
    let theta = n * (p - 2.0) / (2.0 * p);
    Ok(u.pnorm_pow.powf(1.0 / p) / (u.grad_sq.powf(theta / 2.0) * u.mass_sq.powf((1.0 - theta) / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::make_grid;

    #[test]
    fn soliton_formula() {
        assert!((soliton_1d(4.0, 0.0) - 2f64.sqrt()).abs() < 1e-15);
        for x in [0.3, 1.0, 4.0] {
            assert!((soliton_1d(4.0, x) - 2f64.sqrt() / x.cosh()).abs() < 1e-14);
        }
        assert!((soliton_1d(7.0, 0.0) - 3.5f64.powf(0.2)).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_oracle() {
        let g = make_grid(1, 20.0, 4001).unwrap();
        let s = solve_up(1, 4.0, &g).unwrap();
        let mut worst: f64 = 0.0;
        for (i, x) in g.nodes().enumerate() {
            if x > 15.0 {
                break;
            }
            let e = soliton_1d(4.0, x);
            worst = worst.max((s.field.values()[i] - e).abs() / e);
        }
        assert!(worst < 1e-6, "max rel err {worst}");
        assert!((s.mass_sq - 4.0).abs() < 1e-4);
        assert!((s.grad_sq - 4.0 / 3.0).abs() < 1e-4);
        assert!((s.pnorm_pow - 16.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn three_dimensional_identities() {
        let g = make_grid(3, 25.0, 12501).unwrap();
        let s = solve_up(3, 4.0, &g).unwrap();
        assert!(s.nehari_residual().abs() < 1e-5, "{}", s.nehari_residual());
        assert!(s.pohozaev_residual().abs() < 1e-5, "{}", s.pohozaev_residual());
        let v = s.field.values();
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn window_checks() {
        let g = make_grid(3, 10.0, 101).unwrap();
        assert!(solve_up(3, 7.0, &g).is_err());
        assert!(ScalarParams::new(3, 2.0, 1.0, 1.0).is_err());
        let sp = ScalarParams::new(2, 4.0, 1.0, 1.0).unwrap();
        assert!(lambda_scalar(&sp, 1.0).is_err());
    }

    #[test]
    fn closed_forms_one_dimension() {
        for a in [1.0, 2.0] {
            let sp = ScalarParams::new(1, 4.0, 1.0, a).unwrap();
            let l = lambda_scalar(&sp, 4.0).unwrap();
            assert!((l / (a * a / 16.0) - 1.0).abs() < 1e-14);
            let m = scalar_energy_m(&sp, 4.0).unwrap();
            assert!((m / (-a * a * a / 96.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn threshold_balances_energies() {
        let (mp, mq) = (18.9, 21.3);
        let b = mass_threshold_b(3, 4.0, 4.5, 1.3, 0.7, 1.1, mp, mq).unwrap();
        let ep = scalar_energy_m(&ScalarParams::new(3, 4.0, 1.3, 1.1).unwrap(), mp).unwrap();
        let eq = scalar_energy_m(&ScalarParams::new(3, 4.5, 0.7, b).unwrap(), mq).unwrap();
        assert!((ep / eq - 1.0).abs() < 1e-12);
        assert_eq!(mass_threshold_b(3, 4.0, 4.0, 2.0, 2.0, 1.7, mp, mp).unwrap(), 1.7);
    }
}
