//! The coupled energy, the Pohozaev functional and the mass-preserving
//! fiber `t ⋆ (u, v) = (t^{N/2} u(t·), t^{N/2} v(t·))`.
//!
//! Along a fiber every term is a pure power of `t`, so `Ψ(t) = J[t⋆u, t⋆v]`
//! and its derivatives come from six cached integrals of the undilated pair.

use crate::error::{param, Error, Result};
use crate::radial::{
    grad_unchecked, laplacian_into, lp_unchecked, mixed_unchecked, RadialField, RadialGrid,
};
use crate::scalar::{check_supercritical, d_exp, e_exp};

/// (N, p, q, r₁, r₂, μ₁, μ₂, β, a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub r1: f64,
    pub r2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl SystemParams {
    /// Checks the supercritical window for `p`, `q`, `r₁ + r₂` and
    /// `r₁, r₂ > 1`. `β = 0` is accepted for the decoupled limit.
    pub fn validate(&self) -> Result<()> {
        check_supercritical(self.dim, self.p).map_err(|e| relabel(e, "p"))?;
        check_supercritical(self.dim, self.q).map_err(|e| relabel(e, "q"))?;
        check_supercritical(self.dim, self.r1 + self.r2).map_err(|e| relabel(e, "r1 + r2"))?;
        if !(self.r1 > 1.0 && self.r2 > 1.0) {
            return param(format!("r1 and r2 must exceed 1, got ({}, {})", self.r1, self.r2));
        }
        for (name, x) in [("mu1", self.mu1), ("mu2", self.mu2), ("a", self.a), ("b", self.b)] {
            if !(x > 0.0 && x.is_finite()) {
                return param(format!("{name} must be positive, got {x}"));
            }
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return param(format!("beta must be nonnegative, got {}", self.beta));
        }
        Ok(())
    }

    pub fn r(&self) -> f64 {
        self.r1 + self.r2
    }

    /// Fiber exponents `θ_e = (e - 2)N/2` of the three potential terms.
    pub fn thetas(&self) -> [f64; 3] {
        let n = self.dim as f64;
        [
            (self.p - 2.0) * n / 2.0,
            (self.q - 2.0) * n / 2.0,
            (self.r() - 2.0) * n / 2.0,
        ]
    }

    /// The same system with the two components swapped.
    pub fn swapped(&self) -> SystemParams {
        SystemParams {
            p: self.q,
            q: self.p,
            r1: self.r2,
            r2: self.r1,
            mu1: self.mu2,
            mu2: self.mu1,
            a: self.b,
            b: self.a,
            ..*self
        }
    }
}

fn relabel(e: Error, what: &str) -> Error {
    match e {
        Error::Parameter(m) => Error::Parameter(format!("{what}: {m}")),
        other => other,
    }
}

/// A candidate `(u, v)` on a common grid.
#[derive(Debug, Clone)]
pub struct Pair {
    pub u: RadialField,
    pub v: RadialField,
}

impl Pair {
    pub fn new(u: RadialField, v: RadialField) -> Result<Pair> {
        u.check_same_grid(&v)?;
        Ok(Pair { u, v })
    }

    pub fn dim(&self) -> usize {
        self.u.grid().dim()
    }

    pub fn swapped(&self) -> Pair {
        Pair {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }
}

/// The integrals that determine `J`, `P` and `Ψ` of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrals {
    pub grad_u: f64,
    pub grad_v: f64,
    pub mass_u: f64,
    pub mass_v: f64,
    /// ‖u‖_p^p
    pub pow_u: f64,
    /// ‖v‖_q^q
    pub pow_v: f64,
    /// ∫|u|^{r₁}|v|^{r₂}
    pub mixed: f64,
}

impl Integrals {
    pub fn of(params: &SystemParams, pair: &Pair) -> Integrals {
        Integrals::of_raw(params, pair.u.grid(), pair.u.values(), pair.v.values())
    }

    pub(crate) fn of_raw(params: &SystemParams, g: &RadialGrid, u: &[f64], v: &[f64]) -> Integrals {
        let w = g.volumes();
        Integrals {
            grad_u: grad_unchecked(u, g.faces()),
            grad_v: grad_unchecked(v, g.faces()),
            mass_u: lp_unchecked(u, w, 2.0),
            mass_v: lp_unchecked(v, w, 2.0),
            pow_u: lp_unchecked(u, w, params.p),
            pow_v: lp_unchecked(v, w, params.q),
            mixed: mixed_unchecked(u, v, w, params.r1, params.r2),
        }
    }

    pub fn grad(&self) -> f64 {
        self.grad_u + self.grad_v
    }

    /// Coefficients of the three potential terms in `J`.
    fn coefficients(&self, params: &SystemParams) -> [f64; 3] {
        [
            params.mu1 / params.p * self.pow_u,
            params.mu2 / params.q * self.pow_v,
            params.beta * self.mixed,
        ]
    }

    pub fn energy(&self, params: &SystemParams) -> f64 {
        let c = self.coefficients(params);
        0.5 * self.grad() - c[0] - c[1] - c[2]
    }

    pub fn pohozaev(&self, params: &SystemParams) -> f64 {
        let c = self.coefficients(params);
        let th = params.thetas();
        self.grad() - th[0] * c[0] - th[1] * c[1] - th[2] * c[2]
    }

    /// `(Ψ(t), Ψ'(t), Ψ''(t))`.
    pub fn psi(&self, params: &SystemParams, t: f64) -> (f64, f64, f64) {
        let c = self.coefficients(params);
        let th = params.thetas();
        let a = self.grad();
        let mut psi = 0.5 * a * t * t;
        let mut d1 = a * t;
        let mut d2 = a;
        for i in 0..3 {
            if c[i] == 0.0 {
                continue;
            }
            let tp = t.powf(th[i] - 2.0);
            psi -= c[i] * tp * t * t;
            d1 -= c[i] * th[i] * tp * t;
            d2 -= c[i] * th[i] * (th[i] - 1.0) * tp;
        }
        (psi, d1, d2)
    }

    /// Energy predicted on the Pohozaev set from the potential terms alone.
    pub fn pohozaev_energy(&self, params: &SystemParams) -> f64 {
        let c = self.coefficients(params);
        let th = params.thetas();
        (0..3).map(|i| 0.5 * (th[i] - 2.0) * c[i]).sum()
    }

    /// Root of `Ψ'` and the value of `Ψ` there.
    pub fn fiber_max(&self, params: &SystemParams) -> Result<(f64, f64)> {
        let t = self.fiber_t(params)?;
        Ok((t, self.psi(params, t).0))
    }

    pub fn fiber_t(&self, params: &SystemParams) -> Result<f64> {
        let a = self.grad();
        if !(a >= 1e-14) {
            return param("fiber projection of a (numerically) zero pair");
        }
        let c = self.coefficients(params);
        let th = params.thetas();
        let terms: Vec<(f64, f64)> = (0..3)
            .filter(|&i| c[i] > 0.0)
            .map(|i| (c[i] * th[i], th[i] - 2.0))
            .collect();
        fiber_root(a, &terms)
    }
}

/// Unique root of `A − Σ kᵢ t^{sᵢ}` on `(0, ∞)` with `A, kᵢ, sᵢ > 0`.
///
/// This is `Ψ'(t)/t` written with `kᵢ = θᵢcᵢ`, `sᵢ = θᵢ − 2`.
pub fn fiber_root(a: f64, terms: &[(f64, f64)]) -> Result<f64> {
    if terms.is_empty() || terms.iter().all(|&(k, _)| k <= 0.0) {
        return Err(Error::Solver("fiber has no potential term; Ψ' never vanishes".into()));
    }
    if terms.iter().any(|&(_, s)| s <= 0.0) {
        return param("fiber exponents must be mass-supercritical");
    }
    let g = |t: f64| a - terms.iter().map(|&(k, s)| k * t.powf(s)).sum::<f64>();
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut n = 0;
    if g(1.0) > 0.0 {
        while g(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            n += 1;
            if n > 1000 {
                return Err(Error::Solver("fiber bracket expansion failed".into()));
            }
        }
    } else {
        while g(lo) <= 0.0 {
            hi = lo;
            lo *= 0.5;
            n += 1;
            if n > 1000 {
                return Err(Error::Solver("fiber bracket expansion failed".into()));
            }
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    // Newton polish, kept inside the bracket
    for _ in 0..3 {
        let f = g(t);
        let df = -terms.iter().map(|&(k, s)| k * s * t.powf(s - 1.0)).sum::<f64>();
        let next = t - f / df;
        if next.is_finite() && next >= lo && next <= hi {
            t = next;
        }
    }
    Ok(t)
}

/// `J[u,v] = ½(‖∇u‖²+‖∇v‖²) − (μ₁/p)‖u‖_p^p − (μ₂/q)‖v‖_q^q − β∫|u|^{r₁}|v|^{r₂}`.
pub fn energy_j(params: &SystemParams, pair: &Pair) -> Result<f64> {
    pair.u.check_same_grid(&pair.v)?;
    Ok(Integrals::of(params, pair).energy(params))
}

/// `P[u,v] = Ψ'(1)`.
pub fn pohozaev_p(params: &SystemParams, pair: &Pair) -> Result<f64> {
    pair.u.check_same_grid(&pair.v)?;
    Ok(Integrals::of(params, pair).pohozaev(params))
}

/// `(Ψ(t), Ψ'(t), Ψ''(t))` from the integrals of the undilated pair.
pub fn psi_derivatives(params: &SystemParams, pair: &Pair, t: f64) -> Result<(f64, f64, f64)> {
    if !(t > 0.0) {
        return param(format!("fiber parameter must be positive, got {t}"));
    }
    pair.u.check_same_grid(&pair.v)?;
    Ok(Integrals::of(params, pair).psi(params, t))
}

/// Unique `t` with `Ψ'(t) = 0`.
pub fn project_fiber(params: &SystemParams, pair: &Pair) -> Result<f64> {
    pair.u.check_same_grid(&pair.v)?;
    Integrals::of(params, pair).fiber_t(params)
}

/// `t ⋆ u` sampled back on the same grid by monotone interpolation (zero
/// beyond `R`).
pub fn dilate_field(u: &RadialField, t: f64) -> Result<RadialField> {
    if !(t > 0.0 && t.is_finite()) {
        return param(format!("dilation factor must be positive, got {t}"));
    }
    if t == 1.0 {
        return Ok(u.clone());
    }
    let amp = t.powf(u.grid().dim() as f64 / 2.0);
    Ok(RadialField::from_fn(u.grid(), |r| amp * u.eval(t * r)))
}

pub fn dilate(pair: &Pair, t: f64) -> Result<Pair> {
    Ok(Pair {
        u: dilate_field(&pair.u, t)?,
        v: dilate_field(&pair.v, t)?,
    })
}

/// `t ⋆ u` realized exactly: same samples on the grid shrunk by `t`.
pub fn dilate_exact(pair: &Pair, t: f64) -> Result<Pair> {
    if !(t > 0.0 && t.is_finite()) {
        return param(format!("dilation factor must be positive, got {t}"));
    }
    let amp = t.powf(pair.dim() as f64 / 2.0);
    let u = pair.u.stretched(1.0 / t)?.scale(amp);
    let v = RadialField::new(u.grid().clone(), pair.v.values().iter().map(|x| amp * x).collect())?;
    Ok(Pair { u, v })
}

/// `(τ, C₀)` with `τ = max 2/((e−2)N)` over `e ∈ {p, q, r₁+r₂}`, `C₀ = ½ − τ`.
pub fn coercivity_constants(params: &SystemParams) -> Result<(f64, f64)> {
    params.validate()?;
    let tau = params.thetas().iter().map(|th| 1.0 / th).fold(0.0, f64::max);
    Ok((tau, 0.5 - tau))
}

/// Lower bound for `‖∇u‖²+‖∇v‖²` on the Pohozaev set with masses `(a, b)`,
/// from the Gagliardo–Nirenberg constants of `p`, `q` and `r₁+r₂`.
pub fn grad_lower_bound(params: &SystemParams, cnp: f64, cnq: f64, cnr: f64) -> Result<f64> {
    params.validate()?;
    let n = params.dim as f64;
    let s = params.a + params.b;
    let branch = |e: f64, coef: f64, c: f64| {
        if coef <= 0.0 {
            return f64::INFINITY;
        }
        let (ee, dd) = (e_exp(params.dim, e), d_exp(params.dim, e));
        (3.0 * (e - 2.0) * n / 2.0 * coef * c.powf(e)).powf(-4.0 / ee) * s.powf(-dd / ee)
    };
    let d1 = branch(params.p, params.mu1 / params.p, cnp);
    let d2 = branch(params.q, params.mu2 / params.q, cnq);
    let d3 = branch(params.r(), params.beta, cnr);
    Ok(d1.min(d2).min(d3))
}

/// Multipliers from testing each equation against its own component.
pub fn multipliers(params: &SystemParams, pair: &Pair) -> Result<(f64, f64)> {
    pair.u.check_same_grid(&pair.v)?;
    let it = Integrals::of(params, pair);
    if it.mass_u <= 0.0 || it.mass_v <= 0.0 {
        return param("multipliers need two components of positive mass");
    }
    Ok(multipliers_from(params, &it))
}

pub(crate) fn multipliers_from(params: &SystemParams, it: &Integrals) -> (f64, f64) {
    let l1 = (params.mu1 * it.pow_u + params.beta * params.r1 * it.mixed - it.grad_u) / it.mass_u;
    let l2 = (params.mu2 * it.pow_v + params.beta * params.r2 * it.mixed - it.grad_v) / it.mass_v;
    (l1, l2)
}

/// `|x|^{e-2} x` written so that `e - 2 < 0` stays finite at zero.
#[inline]
pub(crate) fn odd_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(e - 1.0).copysign(x)
    }
}

/// Sup-norm residual of the coupled Euler–Lagrange system, each equation
/// normalized by the peak of its nonlinear right-hand side.
pub fn pde_residual(params: &SystemParams, pair: &Pair, l1: f64, l2: f64) -> Result<f64> {
    pair.u.check_same_grid(&pair.v)?;
    let (ru, rv) = residual_parts(params, pair, l1, l2);
    Ok(ru.max(rv))
}

pub(crate) fn residual_parts(params: &SystemParams, pair: &Pair, l1: f64, l2: f64) -> (f64, f64) {
    residual_raw(params, pair.u.grid(), pair.u.values(), pair.v.values(), l1, l2)
}

pub(crate) fn residual_raw(
    params: &SystemParams,
    g: &RadialGrid,
    u: &[f64],
    v: &[f64],
    l1: f64,
    l2: f64,
) -> (f64, f64) {
    let m = u.len();
    let mut lu = vec![0.0; m];
    let mut lv = vec![0.0; m];
    laplacian_into(u, g, &mut lu);
    laplacian_into(v, g, &mut lv);
    let mut worst = [0.0f64; 2];
    let mut peak = [0.0f64; 2];
    for i in 0..m {
        let (x, y) = (u[i], v[i]);
        let cu = if y == 0.0 { 0.0 } else { params.beta * params.r1 * odd_pow(x, params.r1) * y.abs().powf(params.r2) };
        let cv = if x == 0.0 { 0.0 } else { params.beta * params.r2 * odd_pow(y, params.r2) * x.abs().powf(params.r1) };
        let nu = params.mu1 * odd_pow(x, params.p) + cu;
        let nv = params.mu2 * odd_pow(y, params.q) + cv;
        worst[0] = worst[0].max((-lu[i] + l1 * x - nu).abs());
        worst[1] = worst[1].max((-lv[i] + l2 * y - nv).abs());
        peak[0] = peak[0].max(nu.abs());
        peak[1] = peak[1].max(nv.abs());
    }
    let norm = |w: f64, p: f64| if p > 0.0 { w / p } else if w == 0.0 { 0.0 } else { f64::INFINITY };
    (norm(worst[0], peak[0]), norm(worst[1], peak[1]))
}

/// Snapshot of the functionals at a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalReport {
    pub j: f64,
    pub p: f64,
    pub psi2: f64,
    pub masses: (f64, f64),
    pub grads: (f64, f64),
}

pub fn report(params: &SystemParams, pair: &Pair) -> Result<FunctionalReport> {
    pair.u.check_same_grid(&pair.v)?;
    let it = Integrals::of(params, pair);
    let (j, p, psi2) = it.psi(params, 1.0);
    Ok(FunctionalReport {
        j,
        p,
        psi2,
        masses: (it.mass_u, it.mass_v),
        grads: (it.grad_u, it.grad_v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::make_grid;

    fn params() -> SystemParams {
        SystemParams {
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
        }
    }

    fn gaussians() -> Pair {
        let g = make_grid(3, 12.0, 1201).unwrap();
        Pair::new(
            RadialField::from_fn(&g, |r| (-r * r).exp()),
            RadialField::from_fn(&g, |r| 0.5 * (-0.5 * r * r).exp()),
        )
        .unwrap()
    }

    #[test]
    fn coercivity_example() {
        let prm = SystemParams { r1: 2.0, r2: 2.0, ..params() };
        let (tau, c0) = coercivity_constants(&prm).unwrap();
        assert!((tau - 1.0 / 3.0).abs() < 1e-15);
        assert!((c0 - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn window_is_enforced() {
        let mut p = params();
        p.r1 = 1.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.q = 3.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.p = 6.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn synthetic_fiber_root() {
        let t = fiber_root(2.0, &[(1.0, 2.0)]).unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-15);
        assert!(fiber_root(2.0, &[]).is_err());
    }

    #[test]
    fn psi_matches_functionals_and_projection() {
        let prm = params();
        let pair = gaussians();
        let (psi, d1, _) = psi_derivatives(&prm, &pair, 1.0).unwrap();
        assert_eq!(psi, energy_j(&prm, &pair).unwrap());
        assert_eq!(d1, pohozaev_p(&prm, &pair).unwrap());
        let t = project_fiber(&prm, &pair).unwrap();
        let on = dilate_exact(&pair, t).unwrap();
        let rep = report(&prm, &on).unwrap();
        assert!(rep.p.abs() < 1e-10 * rep.grads.0);
        assert!(rep.psi2 < 0.0);
        assert!((project_fiber(&prm, &on).unwrap() - 1.0).abs() < 1e-12);
        let it = Integrals::of(&prm, &on);
        assert!((it.pohozaev_energy(&prm) / rep.j - 1.0).abs() < 1e-10);
    }

    #[test]
    fn interpolated_dilation_preserves_mass() {
        let g = make_grid(3, 24.0, 24001).unwrap();
        let pair = Pair::new(
            RadialField::from_fn(&g, |r| (-r * r / 4.0).exp()),
            RadialField::from_fn(&g, |r| (-r * r / 8.0).exp()),
        )
        .unwrap();
        for t in [0.5, 2.0] {
            let d = dilate(&pair, t).unwrap();
            let m0 = lp_unchecked(pair.u.values(), pair.u.grid().volumes(), 2.0);
            let m1 = lp_unchecked(d.u.values(), d.u.grid().volumes(), 2.0);
            assert!((m1 / m0 - 1.0).abs() < 1e-6, "t={t}: {m0} {m1}");
        }
        assert!(dilate(&pair, 0.0).is_err());
    }

    #[test]
    fn zero_pair() {
        let g = make_grid(3, 5.0, 101).unwrap();
        let z = Pair::new(RadialField::zeros(&g), RadialField::zeros(&g)).unwrap();
        assert_eq!(energy_j(&params(), &z).unwrap(), 0.0);
        assert_eq!(pohozaev_p(&params(), &z).unwrap(), 0.0);
        assert_eq!(pde_residual(&params(), &z, 1.0, 1.0).unwrap(), 0.0);
        assert!(matches!(project_fiber(&params(), &z), Err(Error::Parameter(_))));
    }
}
