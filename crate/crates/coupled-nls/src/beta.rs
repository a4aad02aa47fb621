//! The coupling threshold `β_{p,μ,a,N,r} = ½ inf ‖∇h‖² / ∫ z^r h²` with
//! `z = z_{p,μ,a}`.
//!
//! The infimum is the smallest eigenvalue `κ` of `−Δh = κ w h` with a
//! Dirichlet condition at `R`, computed by inverse iteration on the finite
//! volume operator (tridiagonal, symmetric). Truncation only adds admissible
//! constraints, so the finite-domain value is an upper bound for the
//! whole-space one. Rescaling `x ↦ √λ x` turns `z` into `U_p`, which makes
//! the `a`-dependence an exact power law; `κ(U_p^r)` is computed once per
//! `(N, p, r)` on a long Dirichlet domain.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use log::debug;

use crate::error::{param, Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::radial::{grad_norm_sq, lp_norm_pow, RadialField, RadialGrid};
use crate::scalar::{
    check_supercritical, e_exp, reference_ground_state, scaled_on_grid, sobolev_exponent,
    ScalarGroundState, ScalarParams,
};

/// Radius and spacing of the Dirichlet domain used for `κ(U_p^r)`.
pub const EIGEN_RADIUS: f64 = 600.0;
pub const EIGEN_SPACING: f64 = 0.01;

/// `(N, p, μ, a, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaProblem {
    pub dim: usize,
    pub p: f64,
    pub mu: f64,
    pub mass: f64,
    pub r: f64,
}

impl BetaProblem {
    pub fn new(dim: usize, p: f64, mu: f64, mass: f64, r: f64) -> Result<BetaProblem> {
        let bp = BetaProblem { dim, p, mu, mass, r };
        bp.validate()?;
        Ok(bp)
    }

    pub fn validate(&self) -> Result<()> {
        check_supercritical(self.dim, self.p)?;
        if !(self.r > 0.0 && self.r.is_finite()) {
            return param(format!("r must be positive, got {}", self.r));
        }
        if !(self.mu > 0.0 && self.mu.is_finite() && self.mass > 0.0 && self.mass.is_finite()) {
            return param("mu and mass must be positive");
        }
        Ok(())
    }

    pub fn with_mass(&self, mass: f64) -> BetaProblem {
        BetaProblem { mass, ..*self }
    }

    fn scalar(&self) -> Result<ScalarParams> {
        ScalarParams::new(self.dim, self.p, self.mu, self.mass)
    }

    /// `½ μ^{(rN−4)/e} ‖U_p‖₂^{4(p−2−r)/e} a^{−2(p−2−r)/e}`, the factor that
    /// turns a quotient weighted by `U_p^r` into one weighted by `z^r`.
    pub fn prefactor(&self, up_mass_sq: f64) -> f64 {
        let n = self.dim as f64;
        let e = e_exp(self.dim, self.p);
        let k = self.p - 2.0 - self.r;
        0.5 * self.mu.powf((self.r * n - 4.0) / e)
            * up_mass_sq.powf(2.0 * k / e)
            * self.mass.powf(-2.0 * k / e)
    }

    /// Log-log slope of `a ↦ β`.
    pub fn mass_exponent(&self) -> f64 {
        -2.0 * (self.p - 2.0 - self.r) / e_exp(self.dim, self.p)
    }
}

/// Lowest Dirichlet eigenpair of `−Δh = κ w h`.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub kappa: f64,
    /// Normalized to `∫ w h² = 1`, positive, zero at `R`.
    pub vector: RadialField,
    pub iterations: usize,
}

/// `‖∇h‖² / ∫ w h²` on the grid.
pub fn rayleigh_quotient(h: &RadialField, weight: &RadialField) -> Result<f64> {
    h.check_same_grid(weight)?;
    let den: f64 = h
        .values()
        .iter()
        .zip(weight.values())
        .zip(h.grid().volumes())
        .map(|((x, w), v)| v * w * x * x)
        .sum();
    if !(den > 0.0) {
        return param("weighted norm of the test function vanishes");
    }
    Ok(grad_norm_sq(h) / den)
}

/// Smallest `κ` with `−Δh = κ w h`, Neumann at the origin and Dirichlet at `R`.
pub fn rayleigh_min(weight: &RadialField) -> Result<f64> {
    Ok(rayleigh_eigen(weight)?.kappa)
}

pub fn rayleigh_eigen(weight: &RadialField) -> Result<Eigenpair> {
    let grid = weight.grid();
    let w = weight.values();
    let n = w.len() - 1; // the node at R is pinned to zero
    if w.iter().any(|x| *x < 0.0) {
        return param("weight must be nonnegative");
    }
    let vol = grid.volumes();
    let mass: Vec<f64> = (0..n).map(|i| vol[i] * w[i]).collect();
    if !mass.iter().any(|m| *m > 0.0) {
        return param("weight vanishes identically");
    }
    let a = grid.faces();
    let diag: Vec<f64> = (0..n).map(|i| a[i] + if i > 0 { a[i - 1] } else { 0.0 }).collect();
    let off: Vec<f64> = (0..n - 1).map(|i| -a[i]).collect();
    let apply_k = |x: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            let left = if i > 0 { x[i - 1] } else { 0.0 };
            let right = if i + 1 < n { x[i + 1] } else { 0.0 };
            s += x[i] * (diag[i] * x[i] + if i > 0 { off[i - 1] * left } else { 0.0 }
                + if i + 1 < n { off[i] * right } else { 0.0 });
        }
        s
    };
    let wnorm = |x: &[f64]| -> f64 { x.iter().zip(&mass).map(|(x, m)| m * x * x).sum() };

    let mut x = vec![1.0; n];
    let mut kappa = f64::INFINITY;
    let mut last_change = f64::INFINITY;
    for it in 1..=5000 {
        let mut y: Vec<f64> = x.iter().zip(&mass).map(|(x, m)| x * m).collect();
        if !solve_tridiagonal(&off, &diag, &off, &mut y) {
            return Err(Error::Solver("singular Dirichlet operator".into()));
        }
        let nrm = wnorm(&y).sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::Solver("inverse iteration lost the eigenvector".into()));
        }
        y.iter_mut().for_each(|v| *v /= nrm);
        let k = apply_k(&y);
        let change = (kappa - k).abs();
        // stop at 1e-14 or once the change has hit the rounding floor
        let done = change <= 1e-14 * k || (change <= 1e-10 * k && change >= last_change);
        last_change = change;
        kappa = k;
        x = y;
        if done && it > 3 {
            if x[0] < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            x.push(0.0);
            debug!("rayleigh_min: kappa {kappa:.12e} after {it} iterations");
            return Ok(Eigenpair {
                kappa,
                vector: RadialField::from_raw(grid.clone(), x),
                iterations: it,
            });
        }
    }
    Err(Error::Solver(format!("inverse iteration stagnated at kappa {kappa:.6e}")))
}

/// `κ` on the grid and on the grid with every other node, with the two-grid
/// Richardson extrapolation `(4κ_h − κ_{2h})/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Richardson {
    pub fine: f64,
    pub coarse: f64,
    pub extrapolated: f64,
    /// `|κ_h − κ_{2h}| / 3`, the estimated error of `fine`.
    pub error: f64,
}

pub fn rayleigh_richardson(weight: &RadialField) -> Result<Richardson> {
    let fine = rayleigh_min(weight)?;
    let coarse = rayleigh_min(&weight.coarsen()?)?;
    Ok(Richardson {
        fine,
        coarse,
        extrapolated: (4.0 * fine - coarse) / 3.0,
        error: (fine - coarse).abs() / 3.0,
    })
}

/// `κ(U_p^r)` on the long Dirichlet domain, with the value on half the
/// domain as a truncation diagnostic.
#[derive(Debug, Clone, Copy)]
struct ReferenceKappa {
    grid: Richardson,
    half_radius: f64,
}

fn reference_kappa(dim: usize, p: f64, r: f64) -> Result<(ReferenceKappa, Arc<ScalarGroundState>)> {
    type Cache = Mutex<HashMap<(usize, u64, u64), ReferenceKappa>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let u = reference_ground_state(dim, p)?;
    let key = (dim, p.to_bits(), r.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(k) = cache.lock().unwrap().get(&key) {
        return Ok((*k, u));
    }
    let weight_on = |radius: f64| -> Result<RadialField> {
        let points = (radius / EIGEN_SPACING).round() as usize + 1;
        let grid = RadialGrid::new(dim, radius, points)?;
        Ok(RadialField::from_fn(&grid, |x| u.field.eval(x).max(0.0).powf(r)))
    };
    let k = ReferenceKappa {
        grid: rayleigh_richardson(&weight_on(EIGEN_RADIUS)?)?,
        half_radius: rayleigh_min(&weight_on(0.5 * EIGEN_RADIUS)?)?,
    };
    cache.lock().unwrap().insert(key, k);
    Ok((k, u))
}

/// `β*` with the pieces that produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaEstimate {
    pub value: f64,
    /// `κ(U_p^r)` on the Dirichlet domain, Richardson-extrapolated in `h`.
    pub kappa: f64,
    /// Discretization error estimate of `value` from the two-grid difference.
    pub error: f64,
    /// `β` on half the domain minus `β`; bounds the upward truncation bias
    /// when it decays like `1/R` or faster.
    pub truncation: f64,
    pub prefactor: f64,
    pub note: Option<String>,
}

/// `β_{p,μ,a,N,r}`; zero in dimensions 1 and 2.
pub fn beta_estimate(bp: &BetaProblem) -> Result<BetaEstimate> {
    bp.validate()?;
    if bp.dim <= 2 {
        return Ok(BetaEstimate {
            value: 0.0,
            kappa: 0.0,
            error: 0.0,
            truncation: 0.0,
            prefactor: f64::NAN,
            note: Some(format!(
                "beta vanishes for N = {}; see decay_in_radius for finite-domain values",
                bp.dim
            )),
        });
    }
    let (k, u) = reference_kappa(bp.dim, bp.p, bp.r)?;
    let pre = bp.prefactor(u.mass_sq);
    Ok(BetaEstimate {
        value: pre * k.grid.extrapolated,
        kappa: k.grid.extrapolated,
        error: pre * k.grid.error,
        truncation: pre * (k.half_radius - k.grid.fine),
        prefactor: pre,
        note: None,
    })
}

pub fn beta_star(bp: &BetaProblem) -> Result<f64> {
    Ok(beta_estimate(bp)?.value)
}

/// `½ κ(z^r)` with `z = z_{p,μ,a}` sampled on `grid`, Dirichlet at its edge.
pub fn beta_direct(bp: &BetaProblem, grid: &Arc<RadialGrid>) -> Result<f64> {
    bp.validate()?;
    if grid.dim() != bp.dim {
        return Err(Error::Structural("grid dimension does not match the problem".into()));
    }
    let u = reference_ground_state(bp.dim, bp.p)?;
    let (z, _) = scaled_on_grid(&bp.scalar()?, &u, grid)?;
    Ok(0.5 * rayleigh_min(&z.map(|x| x.abs().powf(bp.r)))?)
}

/// Finite-domain `½ κ(z^r)` on `[0, R]` for each radius, at the given spacing.
pub fn decay_in_radius(bp: &BetaProblem, radii: &[f64], spacing: f64) -> Result<Vec<(f64, f64)>> {
    if !(spacing > 0.0) {
        return param("spacing must be positive");
    }
    radii
        .iter()
        .map(|&r| {
            let points = (r / spacing).round() as usize + 1;
            let grid = RadialGrid::new(bp.dim, r, points)?;
            Ok((r, beta_direct(bp, &grid)?))
        })
        .collect()
}

/// Lower and upper bounds on `β*`: Hölder plus the sharp Sobolev constant
/// below, the test function `h = U_p` above.
pub fn beta_bounds(bp: &BetaProblem, sn: f64, u: &ScalarGroundState) -> Result<(f64, f64)> {
    bp.validate()?;
    if bp.dim <= 2 {
        return param("the Sobolev lower bound needs N >= 3");
    }
    if u.dim() != bp.dim || u.p != bp.p {
        return Err(Error::Structural("ground state does not match (N, p)".into()));
    }
    let crit = sobolev_exponent(bp.dim);
    let s = crit * bp.r / (crit - 2.0);
    if s < 1.0 {
        return param(format!("Hoelder exponent {s} is below 1"));
    }
    let pre = bp.prefactor(u.mass_sq);
    let norm_s = lp_norm_pow(&u.field, s)?.powf(1.0 / s);
    let lower = pre * norm_s.powf(-bp.r) * sn;
    let upper = pre * u.grad_sq / lp_norm_pow(&u.field, bp.r + 2.0)?;
    Ok((lower, upper))
}

/// Sharp constant in `‖∇h‖² ≥ S_N ‖h‖_{2*}²`, as the smallest quotient of
/// the Talenti profiles `(1 + r²/ε)^{−(N−2)/2}` over `ε`. Profiles are shifted
/// to vanish at the edge of the domain so that they stay admissible.
pub fn sobolev_constant(dim: usize) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    if !(dim == 3 || dim == 4) {
        return param(format!("Sobolev constant needs N in {{3, 4}}, got {dim}"));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&dim) {
        return Ok(*s);
    }
    let grid = RadialGrid::new(dim, 400.0, 40001)?;
    // golden section in log ε
    let f = |le: f64| talenti_quotient(&grid, le.exp());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = ((0.05f64).ln(), (20.0f64).ln());
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..40 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let s = f1.min(f2);
    cache.lock().unwrap().insert(dim, s);
    Ok(s)
}

/// `‖∇h‖² / ‖h‖_{2*}²` for the Talenti profile of width `ε` on `grid`.
pub fn talenti_quotient(grid: &Arc<RadialGrid>, eps: f64) -> Result<f64> {
    let dim = grid.dim();
    if dim < 3 {
        return param("Talenti profiles need N >= 3");
    }
    let k = (dim as f64 - 2.0) / 2.0;
    let prof = |r: f64| (1.0 + r * r / eps).powf(-k);
    let edge = prof(grid.radius());
    let h = RadialField::from_fn(grid, |r| prof(r) - edge);
    sobolev_quotient(&h)
}

/// `‖∇h‖² / ‖h‖_{2*}²`.
pub fn sobolev_quotient(h: &RadialField) -> Result<f64> {
    let crit = sobolev_exponent(h.grid().dim());
    if !crit.is_finite() {
        return param("no critical exponent for N <= 2");
    }
    let den = lp_norm_pow(h, crit)?.powf(2.0 / crit);
    if !(den > 0.0) {
        return param("zero test function");
    }
    Ok(grad_norm_sq(h) / den)
}

/// Sign of `p − 2 − r`, which decides the limits of `β` as `a → 0, ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassRegime {
    /// `p < r + 2`: `β → 0` as `a → 0` and `β → ∞` as `a → ∞`.
    Increasing,
    /// `p = r + 2`: `β` independent of `a`.
    Constant,
    /// `p > r + 2`: `β → ∞` as `a → 0` and `β → 0` as `a → ∞`.
    Decreasing,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub rows: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    pub expected_slope: f64,
    pub regime: MassRegime,
}

/// `β*(a)` over `a_values` with the least-squares log-log slope.
pub fn beta_scaling_report(bp: &BetaProblem, a_values: &[f64]) -> Result<ScalingReport> {
    if bp.dim < 3 {
        return param("scaling report needs N >= 3");
    }
    if a_values.len() < 2 {
        return param("need at least two masses");
    }
    let rows = a_values
        .iter()
        .map(|&a| Ok((a, beta_star(&bp.with_mass(a))?)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return param("masses must not all coincide");
    }
    let k = bp.p - 2.0 - bp.r;
    let regime = if k.abs() < 1e-12 {
        MassRegime::Constant
    } else if k < 0.0 {
        MassRegime::Increasing
    } else {
        MassRegime::Decreasing
    };
    Ok(ScalingReport {
        rows,
        fitted_slope: sxy / sxx,
        expected_slope: bp.mass_exponent(),
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::make_grid;

    #[test]
    fn quotient_is_homogeneous_in_the_weight() {
        let g = make_grid(3, 20.0, 2001).unwrap();
        let w = RadialField::from_fn(&g, |r| (-r * r).exp());
        let k = rayleigh_min(&w).unwrap();
        for c in [0.5, 2.0] {
            let kc = rayleigh_min(&w.scale(c)).unwrap();
            assert!((kc * c / k - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvector_certifies_its_value() {
        let g = make_grid(3, 20.0, 2001).unwrap();
        let w = RadialField::from_fn(&g, |r| 1.0 / (r * r).cosh());
        let e = rayleigh_eigen(&w).unwrap();
        let q = rayleigh_quotient(&e.vector, &w).unwrap();
        assert!(q <= e.kappa * (1.0 + 1e-8));
        assert!(e.vector.values().iter().all(|x| *x >= 0.0));
        // any other candidate does no better
        let h = RadialField::from_fn(&g, |r| (-r / 3.0).exp() - (-20.0f64 / 3.0).exp());
        assert!(rayleigh_quotient(&h, &w).unwrap() >= e.kappa);
    }

    #[test]
    fn constant_weight_on_a_ball_gives_the_dirichlet_eigenvalue() {
        // -Δh = κ h on the unit ball in R³: κ = π²
        let g = make_grid(3, 1.0, 2001).unwrap();
        let w = RadialField::from_fn(&g, |_| 1.0);
        let r = rayleigh_richardson(&w).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((r.fine / pi2 - 1.0).abs() < 1e-5);
        assert!((r.extrapolated / pi2 - 1.0).abs() < 1e-9, "{}", r.extrapolated);
    }

    #[test]
    fn zero_weight_is_rejected() {
        let g = make_grid(3, 5.0, 101).unwrap();
        assert!(matches!(rayleigh_min(&RadialField::zeros(&g)), Err(Error::Parameter(_))));
        let neg = RadialField::from_fn(&g, |r| -1.0 / (1.0 + r));
        assert!(rayleigh_min(&neg).is_err());
    }

    #[test]
    fn sobolev_constants_match_the_known_values() {
        for (dim, exact) in [
            (3, 3.0 * (std::f64::consts::PI / 2.0).powf(4.0 / 3.0)),
            (4, 2.0 * (8.0 * std::f64::consts::PI.powi(2) / 3.0).sqrt()),
        ] {
            let s = sobolev_constant(dim).unwrap();
            assert!((s / exact - 1.0).abs() < 1e-2, "N={dim}: {s} vs {exact}");
        }
        assert!(sobolev_constant(2).is_err());
    }
}
