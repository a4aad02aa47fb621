use coupled_nls::cli::output::float;
use coupled_nls::energy::{dilate_exact, Integrals, Pair, SystemParams};
use coupled_nls::radial::{grad_norm_sq, lp_norm_pow, make_grid, RadialField};
use coupled_nls::rearrange::{schwartz_rearrange, DecreasingLayout};
use proptest::prelude::*;

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, 0.0..5.0f64, 0.3..1.2f64), 1..4)
        .prop_filter("not all tiny", |b| b.iter().any(|(a, _, _)| a.abs() > 0.05))
}

fn field(dim: usize, b: &[(f64, f64, f64)]) -> RadialField {
    let g = make_grid(dim, 10.0, 401).unwrap();
    RadialField::from_fn(&g, |r| b.iter().map(|(a, c, w)| a * (-(r - c).powi(2) / (2.0 * w * w)).exp()).sum())
}

fn params(dim: usize, s: f64) -> SystemParams {
    let n = dim as f64;
    let lo = 2.0 + 4.0 / n;
    let hi = if dim <= 2 { 10.0 } else { 2.0 * n / (n - 2.0) };
    let e = lo + (hi - lo) * s;
    SystemParams {
        dim,
        p: e,
        q: e,
        r1: e / 2.0,
        r2: e / 2.0,
        mu1: 1.0,
        mu2: 1.0,
        beta: 1.0,
        a: 1.0,
        b: 1.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_lands_on_pohozaev_set(dim in 1usize..=4, s in 0.05..0.95f64, bu in bumps(), bv in bumps()) {
        let p = params(dim, s);
        let pair = Pair::new(field(dim, &bu), field(dim, &bv)).unwrap();
        let it = Integrals::of(&p, &pair);
        let t = it.fiber_t(&p).unwrap();
        let on = Integrals::of(&p, &dilate_exact(&pair, t).unwrap());
        prop_assert!(on.pohozaev(&p).abs() <= 1e-10 * on.grad());
        // J restricted to the fiber peaks at the projection
        let peak = on.energy(&p);
        for k in [0.5, 0.9, 1.1, 2.0] {
            prop_assert!(on.psi(&p, k).0 <= peak + 1e-12 * peak.abs());
        }
    }

    #[test]
    fn dilation_scales_gradient_and_keeps_mass(dim in 1usize..=4, t in 0.2..5.0f64, bu in bumps()) {
        let u = field(dim, &bu);
        let pair = Pair::new(u.clone(), u.clone()).unwrap();
        let d = dilate_exact(&pair, t).unwrap();
        let (m0, m1) = (lp_norm_pow(&u, 2.0).unwrap(), lp_norm_pow(&d.u, 2.0).unwrap());
        prop_assert!((m1 / m0 - 1.0).abs() < 1e-12);
        prop_assert!((grad_norm_sq(&d.u) / (t * t * grad_norm_sq(&u)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rearrangement_is_monotone_and_idempotent(dim in 1usize..=4, bu in bumps()) {
        let u = field(dim, &bu);
        let s = schwartz_rearrange(&u);
        prop_assert!(s.values().windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(s.values().iter().all(|x| *x >= 0.0));
        let twice = schwartz_rearrange(&s);
        prop_assert_eq!(twice.values(), s.values());
        let l = DecreasingLayout::of(&u);
        let sorted: f64 = l.values.iter().zip(&l.volumes).map(|(x, w)| w * x * x).sum();
        prop_assert!((sorted / lp_norm_pow(&u, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_floats_keep_twelve_digits(x in prop::num::f64::NORMAL) {
        let back: f64 = float(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs());
    }
}
