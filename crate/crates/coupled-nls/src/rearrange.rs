//! Schwartz symmetrization on the radial grid.
//!
//! The exact discrete rearrangement is a [`DecreasingLayout`]: the values
//! `|u_i|` sorted downward, each carrying its cell volume, stacked as shells
//! from the origin outward. It has the same distribution function as `u`.
//! Sampling it at the volume midpoint of each grid cell gives the grid field
//! `u*`, which is a fixed point whenever `u` is already nonnegative and
//! nonincreasing.

use std::cmp::Ordering;

use crate::energy::{dilate_exact, Integrals, Pair, SystemParams};
use crate::error::{param, Result};
use crate::radial::RadialField;

/// Sorted values with their volumes.
#[derive(Debug, Clone)]
pub struct DecreasingLayout {
    pub values: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl DecreasingLayout {
    pub fn of(u: &RadialField) -> DecreasingLayout {
        let w = u.grid().volumes();
        let vals = u.values();
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&i, &j| match vals[j].abs().total_cmp(&vals[i].abs()) {
            Ordering::Equal => i.cmp(&j),
            o => o,
        });
        DecreasingLayout {
            values: idx.iter().map(|&i| vals[i].abs()).collect(),
            volumes: idx.iter().map(|&i| w[i]).collect(),
        }
    }

    /// Measure of `{ |u| > level }`.
    pub fn distribution(&self, level: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.volumes)
            .take_while(|(x, _)| **x > level)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Measure of `{ |u| > level }` for a grid field.
pub fn distribution(u: &RadialField, level: f64) -> f64 {
    u.values()
        .iter()
        .zip(u.grid().volumes())
        .filter(|(x, _)| x.abs() > level)
        .map(|(_, w)| w)
        .sum()
}

/// Radially nonincreasing rearrangement of `|u|` on the same grid.
pub fn schwartz_rearrange(u: &RadialField) -> RadialField {
    let layout = DecreasingLayout::of(u);
    let w = u.grid().volumes();
    let mut out = Vec::with_capacity(w.len());
    let mut shell = 0usize;
    let mut shell_end = layout.volumes[0];
    let mut before = 0.0;
    for &wi in w {
        let mid = before + 0.5 * wi;
        while mid >= shell_end && shell + 1 < layout.values.len() {
            shell += 1;
            shell_end += layout.volumes[shell];
        }
        out.push(layout.values[shell]);
        before += wi;
    }
    RadialField::from_raw(u.grid().clone(), out)
}

/// Result of symmetrizing a pair and moving it back onto the Pohozaev set.
#[derive(Debug, Clone)]
pub struct Projected {
    /// `t ⋆ (u*, v*)`, realized exactly on the grid shrunk by `t`.
    pub pair: Pair,
    pub t: f64,
    pub energy_before: f64,
    pub energy_after: f64,
}

/// Symmetrize both components and project onto the Pohozaev set.
pub fn rearrange_and_project(params: &SystemParams, pair: &Pair) -> Result<Projected> {
    if pair.u.is_zero() && pair.v.is_zero() {
        return param("cannot project the zero pair");
    }
    let before = Integrals::of(params, pair).energy(params);
    let sym = Pair::new(schwartz_rearrange(&pair.u), schwartz_rearrange(&pair.v))?;
    let it = Integrals::of(params, &sym);
    let (t, after) = it.fiber_max(params)?;
    Ok(Projected {
        pair: dilate_exact(&sym, t)?,
        t,
        energy_before: before,
        energy_after: after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{grad_norm_sq, lp_norm_pow, make_grid};

    #[test]
    fn monotone_fields_are_fixed() {
        let g = make_grid(3, 10.0, 501).unwrap();
        let u = RadialField::from_fn(&g, |r| 1.0 / (1.0 + r * r));
        let s = schwartz_rearrange(&u);
        assert_eq!(s.values(), u.values());
    }

    #[test]
    fn bump_moves_to_origin() {
        let g = make_grid(2, 10.0, 1001).unwrap();
        let u = RadialField::from_fn(&g, |r| (-(r - 5.0).powi(2)).exp() - 0.3 * (-(r - 2.0).powi(2)).exp());
        let s = schwartz_rearrange(&u);
        assert!(s.values().windows(2).all(|w| w[1] <= w[0]));
        assert!(s.values()[0] >= u.max_abs() * 0.999);
        for p in [2.0, 4.0] {
            let a = lp_norm_pow(&u, p).unwrap();
            let b = lp_norm_pow(&s, p).unwrap();
            assert!((a / b - 1.0).abs() < 1e-3, "p={p}");
        }
        assert!(grad_norm_sq(&s) < grad_norm_sq(&u));
        let twice = schwartz_rearrange(&s);
        assert_eq!(twice.values(), s.values());
    }
}
