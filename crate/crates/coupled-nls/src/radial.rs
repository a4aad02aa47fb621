//! Radial grids on [0, R] standing in for ℝᴺ, N = 1..4.
//!
//! Quadrature is finite-volume: node `i` owns the shell between the
//! midpoints `r_{i-1/2}` and `r_{i+1/2}` (clamped to [0, R]); for N = 1 this
//! is the trapezoid rule. The gradient norm uses differences across those
//! midpoints and the Laplacian is the conservative stencil built from the
//! same face areas, so `grad_norm_sq(u) == -<u, Δu>` holds exactly on the
//! grid. Shell volumes are the only weights for which that stencil stays
//! consistent next to the origin.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{param, Error, Result};

/// Surface measure of the unit sphere in ℝᴺ (N=1 counts both half-lines).
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => f64::NAN,
    }
}

/// Uniform grid `r_i = i h`, `h = R/(M-1)`, with cached cell volumes and
/// face coefficients.
#[derive(Debug)]
pub struct RadialGrid {
    dim: usize,
    radius: f64,
    points: usize,
    spacing: f64,
    volumes: Vec<f64>,
    // faces[i] = ω r_{i+1/2}^{N-1} / h, the flux coefficient between i and i+1
    faces: Vec<f64>,
}

impl RadialGrid {
    pub fn new(dim: usize, radius: f64, points: usize) -> Result<Arc<RadialGrid>> {
        if !(1..=4).contains(&dim) {
            return param(format!("dim must be in 1..=4, got {dim}"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return param(format!("radius must be positive, got {radius}"));
        }
        if points < 16 {
            return param(format!("points must be at least 16, got {points}"));
        }
        let h = radius / (points - 1) as f64;
        let omega = sphere_measure(dim);
        let n = dim as i32;
        let edge = |i: usize| {
            // outer edge of the control cell of node i
            if i + 1 >= points {
                radius
            } else {
                (i as f64 + 0.5) * h
            }
        };
        let volumes = (0..points)
            .map(|i| {
                let inner = if i == 0 { 0.0 } else { edge(i - 1) };
                omega * (edge(i).powi(n) - inner.powi(n)) / dim as f64
            })
            .collect();
        let faces = (0..points - 1)
            .map(|i| omega * edge(i).powi(n - 1) / h)
            .collect();
        Ok(Arc::new(RadialGrid {
            dim,
            radius,
            points,
            spacing: h,
            volumes,
            faces,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn points(&self) -> usize {
        self.points
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    /// Node `r_i`; the last node is exactly `R`.
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.radius
        } else {
            i as f64 * self.spacing
        }
    }
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.node(i))
    }
    /// Quadrature weight (shell volume) of each node.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }
    /// Flux coefficients between consecutive nodes.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Same number of points on `[0, factor·R]`.
    pub fn scaled(&self, factor: f64) -> Result<Arc<RadialGrid>> {
        RadialGrid::new(self.dim, self.radius * factor, self.points)
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.radius.to_bits() == other.radius.to_bits()
    }
}

/// Convenience constructor mirroring the grid parameters.
pub fn make_grid(dim: usize, radius: f64, points: usize) -> Result<Arc<RadialGrid>> {
    RadialGrid::new(dim, radius, points)
}

/// Samples of a radial function on a grid.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<RadialField> {
        if values.len() != grid.points() {
            return Err(Error::Structural(format!(
                "field has {} values on a grid of {} points",
                values.len(),
                grid.points()
            )));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return param(format!("non-finite field value at node {i}"));
        }
        Ok(RadialField { grid, values })
    }

    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> RadialField {
        let values = grid.nodes().map(f).collect();
        RadialField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> RadialField {
        RadialField {
            grid: grid.clone(),
            values: vec![0.0; grid.points()],
        }
    }

    pub(crate) fn from_raw(grid: Arc<RadialGrid>, values: Vec<f64>) -> RadialField {
        debug_assert_eq!(values.len(), grid.points());
        RadialField { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RadialField {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> RadialField {
        self.map(|x| c * x)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn check_same_grid(&self, other: &RadialField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::Structural("fields live on different grids".into()))
        }
    }

    /// The same samples reinterpreted on the grid stretched by `factor`.
    /// Combined with an amplitude factor this realizes dilations exactly.
    pub fn stretched(&self, factor: f64) -> Result<RadialField> {
        Ok(RadialField {
            grid: self.grid.scaled(factor)?,
            values: self.values.clone(),
        })
    }

    /// Monotone cubic Hermite interpolant (Fritsch–Carlson limited), even at the origin and
    /// zero beyond `R`.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        let g = &self.grid;
        if r > g.radius() {
            return 0.0;
        }
        let h = g.spacing();
        let m = g.points();
        let s = (r / h).min((m - 1) as f64);
        let i = (s.floor() as usize).min(m - 2);
        let x = s - i as f64;
        let y0 = self.values[i];
        let y1 = self.values[i + 1];
        let d0 = self.pchip_slope(i) * h;
        let d1 = self.pchip_slope(i + 1) * h;
        let x2 = x * x;
        let x3 = x2 * x;
        (2.0 * x3 - 3.0 * x2 + 1.0) * y0
            + (x3 - 2.0 * x2 + x) * d0
            + (-2.0 * x3 + 3.0 * x2) * y1
            + (x3 - x2) * d1
    }

    fn pchip_slope(&self, i: usize) -> f64 {
        let v = &self.values;
        let h = self.grid.spacing();
        let m = v.len();
        if i == 0 {
            // even extension: u'(0) = 0
            return 0.0;
        }
        let left = (v[i] - v[i - 1]) / h;
        if i == m - 1 {
            let prev = (v[i - 1] - v[i.saturating_sub(2)]) / h;
            let d = 1.5 * left - 0.5 * prev;
            return if d * left <= 0.0 {
                0.0
            } else if left * prev < 0.0 && d.abs() > 3.0 * left.abs() {
                3.0 * left
            } else {
                d
            };
        }
        let right = (v[i + 1] - v[i]) / h;
        if left * right <= 0.0 {
            0.0
        } else {
            // centred slope, capped so each cubic piece stays monotone
            let c = 0.5 * (left + right);
            let cap = 3.0 * left.abs().min(right.abs());
            c.signum() * c.abs().min(cap)
        }
    }

    /// Resample onto another grid through the monotone interpolant.
    pub fn resample(&self, target: &Arc<RadialGrid>) -> RadialField {
        RadialField::from_fn(target, |r| self.eval(r))
    }

    /// Keep every other node (requires `M - 1` even).
    pub fn coarsen(&self) -> Result<RadialField> {
        let m = self.grid.points();
        if (m - 1) % 2 != 0 || (m - 1) / 2 + 1 < 16 {
            return param("coarsening needs an odd number of points and at least 31 of them");
        }
        let grid = RadialGrid::new(self.grid.dim(), self.grid.radius(), (m - 1) / 2 + 1)?;
        let values = self.values.iter().step_by(2).copied().collect();
        Ok(RadialField { grid, values })
    }
}

/// ∫_{ℝᴺ} f dx.
pub fn integrate(f: &RadialField) -> f64 {
    f.values
        .iter()
        .zip(f.grid.volumes())
        .map(|(x, w)| x * w)
        .sum()
}

/// ‖u‖_p^p.
pub fn lp_norm_pow(u: &RadialField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return param(format!("Lebesgue exponent must be at least 1, got {p}"));
    }
    Ok(lp_unchecked(u.values(), u.grid.volumes(), p))
}

pub(crate) fn lp_unchecked(u: &[f64], w: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        u.iter().zip(w).map(|(x, w)| x * x * w).sum()
    } else {
        u.iter().zip(w).map(|(x, w)| x.abs().powf(p) * w).sum()
    }
}

/// ‖∇u‖₂².
pub fn grad_norm_sq(u: &RadialField) -> f64 {
    grad_unchecked(u.values(), u.grid.faces())
}

pub(crate) fn grad_unchecked(u: &[f64], faces: &[f64]) -> f64 {
    u.windows(2)
        .zip(faces)
        .map(|(w, a)| {
            let d = w[1] - w[0];
            a * d * d
        })
        .sum()
}

/// Conservative radial Laplacian `u'' + (N-1)/r u'`; `N u''(0)` at the
/// origin and a zero-flux closure at `R`.
pub fn apply_laplacian(u: &RadialField) -> RadialField {
    let mut out = vec![0.0; u.values.len()];
    laplacian_into(u.values(), &u.grid, &mut out);
    RadialField::from_raw(u.grid.clone(), out)
}

pub(crate) fn laplacian_into(u: &[f64], grid: &RadialGrid, out: &mut [f64]) {
    let a = grid.faces();
    let v = grid.volumes();
    let m = u.len();
    for i in 0..m {
        let mut flux = 0.0;
        if i + 1 < m {
            flux += a[i] * (u[i + 1] - u[i]);
        }
        if i > 0 {
            flux -= a[i - 1] * (u[i] - u[i - 1]);
        }
        out[i] = flux / v[i];
    }
}

/// ∫|u|^{r1}|v|^{r2}.
pub fn mixed_integral(u: &RadialField, v: &RadialField, r1: f64, r2: f64) -> Result<f64> {
    u.check_same_grid(v)?;
    if !(r1 > 0.0 && r2 > 0.0) {
        return param(format!("coupling exponents must be positive, got ({r1}, {r2})"));
    }
    Ok(mixed_unchecked(u.values(), v.values(), u.grid.volumes(), r1, r2))
}

pub(crate) fn mixed_unchecked(u: &[f64], v: &[f64], w: &[f64], r1: f64, r2: f64) -> f64 {
    u.iter()
        .zip(v)
        .zip(w)
        .map(|((x, y), w)| {
            if *x == 0.0 || *y == 0.0 {
                0.0
            } else {
                x.abs().powf(r1) * y.abs().powf(r2) * w
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn grid_basics() {
        let g = make_grid(1, 20.0, 2001).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        let g = make_grid(3, 15.0, 1501).unwrap();
        assert_eq!(g.node(1500), 15.0);
        assert!(matches!(make_grid(5, 10.0, 100), Err(Error::Parameter(_))));
        assert!(make_grid(3, 1.0, 15).is_err());
        assert!(make_grid(3, -1.0, 100).is_err());
    }

    #[test]
    fn constants_integrate_exactly() {
        let g = make_grid(1, 10.0, 101).unwrap();
        assert!((integrate(&RadialField::from_fn(&g, |_| 1.0)) - 20.0).abs() < 1e-12);
        for n in 1..=4 {
            let g = make_grid(n, 1.0, 1001).unwrap();
            let vol = sphere_measure(n) / n as f64;
            let got = integrate(&RadialField::from_fn(&g, |_| 1.0));
            assert!((got / vol - 1.0).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn polynomials_converge_second_order() {
        for n in 1..=4 {
            for k in 0..=2 {
                let exact = sphere_measure(n) / (n + k) as f64;
                let err = |m| {
                    let g = make_grid(n, 1.0, m).unwrap();
                    (integrate(&RadialField::from_fn(&g, |r| r.powi(k as i32))) - exact).abs()
                };
                let e1 = err(1001);
                let e2 = err(2001);
                assert!(e1 < 1e-5, "N={n} k={k} err={e1}");
                if e1 > 1e-12 {
                    let ratio = e1 / e2;
                    assert!(ratio > 3.5, "N={n} k={k} ratio={ratio}");
                }
            }
        }
    }

    #[test]
    fn soliton_norms() {
        let g = make_grid(1, 20.0, 4001).unwrap();
        let u = RadialField::from_fn(&g, |x| 2f64.sqrt() * sech(x));
        assert!((lp_norm_pow(&u, 2.0).unwrap() - 4.0).abs() < 1e-8);
        assert!((lp_norm_pow(&u, 4.0).unwrap() - 16.0 / 3.0).abs() < 1e-5);
        assert!((grad_norm_sq(&u) - 4.0 / 3.0).abs() < 1e-5);
        assert!((mixed_integral(&u, &u, 2.0, 2.0).unwrap() - 16.0 / 3.0).abs() < 1e-5);
        let f = RadialField::from_fn(&g, |x| 2.0 * sech(x).powi(2));
        assert!((integrate(&f) - 4.0).abs() < 1e-8);
        assert!(lp_norm_pow(&u, 0.5).is_err());
    }

    #[test]
    fn laplacian_identities() {
        let g = make_grid(1, 20.0, 4001).unwrap();
        let u = RadialField::from_fn(&g, |x| 2f64.sqrt() * sech(x));
        let lap = apply_laplacian(&u);
        let h2 = g.spacing().powi(2);
        for (i, r) in g.nodes().enumerate().take(3000) {
            let u0 = u.values()[i];
            assert!((lap.values()[i] - (u0 - u0.powi(3))).abs() < 10.0 * h2, "r={r}");
        }
        let g = make_grid(3, 10.0, 2001).unwrap();
        let u = RadialField::from_fn(&g, |r| (-r * r / 2.0).exp());
        let lap = apply_laplacian(&u);
        let h2 = g.spacing().powi(2);
        for (i, r) in g.nodes().enumerate() {
            let exact = (r * r - 3.0) * (-r * r / 2.0).exp();
            assert!((lap.values()[i] - exact).abs() < 20.0 * h2, "r={r}");
        }
        let c = RadialField::from_fn(&g, |_| 3.0);
        assert!(apply_laplacian(&c).max_abs() < 1e-9);
        assert!(grad_norm_sq(&c) < 1e-20);
    }

    #[test]
    fn summation_by_parts() {
        let g = make_grid(3, 5.0, 301).unwrap();
        let u = RadialField::from_fn(&g, |r| (1.0 + r).recip() * (r * 0.7).cos());
        let lap = apply_laplacian(&u);
        let inner: f64 = u
            .values()
            .iter()
            .zip(lap.values())
            .zip(g.volumes())
            .map(|((a, b), w)| a * b * w)
            .sum();
        assert!((grad_norm_sq(&u) + inner).abs() < 1e-12 * grad_norm_sq(&u));
    }

    #[test]
    fn dilation_is_exact_on_stretched_grids() {
        let g = make_grid(3, 12.0, 1201).unwrap();
        let u = RadialField::from_fn(&g, |r| (-r * r).exp());
        for t in [0.5, 2.0] {
            let d = u.stretched(1.0 / t).unwrap().scale(t.powf(1.5));
            let rel = |a: f64, b: f64| (a / b - 1.0).abs();
            assert!(rel(lp_norm_pow(&d, 2.0).unwrap(), lp_norm_pow(&u, 2.0).unwrap()) < 1e-12);
            assert!(rel(grad_norm_sq(&d), t * t * grad_norm_sq(&u)) < 1e-12);
            let p = 3.3;
            let e = (p - 2.0) * 3.0 / 2.0;
            assert!(rel(lp_norm_pow(&d, p).unwrap(), t.powf(e) * lp_norm_pow(&u, p).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn grid_mismatch_is_structural() {
        let a = RadialField::zeros(&make_grid(3, 10.0, 101).unwrap());
        let b = RadialField::zeros(&make_grid(3, 10.0, 201).unwrap());
        assert!(matches!(mixed_integral(&a, &b, 2.0, 2.0), Err(Error::Structural(_))));
    }

    #[test]
    fn interpolation_reproduces_nodes_and_is_monotone() {
        let g = make_grid(2, 6.0, 121).unwrap();
        let u = RadialField::from_fn(&g, |r| (-r).exp());
        for (i, r) in g.nodes().enumerate() {
            assert!((u.eval(r) - u.values()[i]).abs() < 1e-15);
        }
        let mut prev = f64::INFINITY;
        for k in 0..2000 {
            let x = u.eval(k as f64 * 0.003);
            assert!(x <= prev + 1e-15);
            prev = x;
        }
        assert_eq!(u.eval(6.5), 0.0);
    }
}
