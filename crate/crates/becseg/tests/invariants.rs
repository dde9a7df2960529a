//! Property tests for the algebraic invariants that hold for every
//! admissible parameter choice.

use becseg::gp::reparametrize;
use becseg::interface1d::{potential, relaxed_potential};
use becseg::quad::RadialGrid;
use becseg::shape::{
    ball_radius_for_volume, weighted_perimeter, weighted_volume, StarShape, WeightParams,
};
use becseg::thomas_fermi::{self, TfParams};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #[test]
    fn relaxed_potential_is_a_lower_envelope(
        s in 0.0f64..1.4,
        t in 0.0f64..1.4,
        k in 1.01f64..300.0,
    ) {
        let w = potential(s, t, k);
        prop_assert!(relaxed_potential(s, k) <= w + 1e-12);
        prop_assert!(relaxed_potential(s, k) + relaxed_potential(t, k) <= 2.0 * w + 1e-12);
    }

    #[test]
    fn relaxed_potential_double_well(s in 1e-3f64..0.999, k in 1.01f64..300.0) {
        prop_assert!(relaxed_potential(s, k) > 0.0);
        prop_assert!(relaxed_potential(0.0, k).abs() < 1e-15);
        prop_assert!(relaxed_potential(1.0, k).abs() < 1e-15);
    }

    #[test]
    fn reparametrize_preserves_total_mass(
        alpha1 in 0.1f64..5.0,
        alpha2 in 0.1f64..5.0,
        g in 1.0f64..16.0,
        k in 1.0f64..32.0,
        area in 0.5f64..10.0,
    ) {
        let r = reparametrize(alpha1, alpha2, g, k, area).unwrap();
        prop_assert!((r.alpha1_tilde + r.alpha2_tilde - r.gamma).abs() < 1e-10 * r.gamma);
        prop_assert!((r.lambda * r.lambda - 1.0 / g.sqrt()).abs() < 1e-12);
        prop_assert!((r.k_tilde - k / g.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tf_profile_ordering_and_gap(
        alpha1 in 0.2f64..4.0,
        alpha2 in 0.2f64..4.0,
        g in 1.1f64..9.0,
        excess in 0.0f64..2.0,
    ) {
        let p = TfParams::new(alpha1, alpha2, g, g.sqrt() + excess).unwrap();
        let prof = thomas_fermi::profile(&p).unwrap();
        prop_assert!(prof.r0 > 0.0 && prof.r0 < prof.r1);
        prop_assert!(prof.r0 < prof.big_r1 && prof.big_r1 < prof.big_r2);
        prop_assert!((prof.sigma_plus - g.sqrt() * prof.sigma_minus).abs() < 1e-12 * prof.sigma_plus);
        // Monotone energy in each mass and in g.
        let bump = |a1: f64, a2: f64, gg: f64| {
            thomas_fermi::profile(&TfParams::new(a1, a2, gg, gg.sqrt() + excess).unwrap())
                .unwrap()
                .e0
        };
        prop_assert!(bump(alpha1 * 1.05, alpha2, g) > prof.e0);
        prop_assert!(bump(alpha1, alpha2 * 1.05, g) > prof.e0);
        prop_assert!(bump(alpha1, alpha2, g * 1.05) > prof.e0);
    }

    #[test]
    fn radial_grid_weights_tile_the_disk(
        r_max in 0.5f64..5.0,
        b1 in 0.05f64..0.95,
        b2 in 0.05f64..0.95,
    ) {
        let grid = RadialGrid::with_breakpoints(r_max, r_max / 500.0, &[b1 * r_max, b2 * r_max]);
        let area = grid.integrate_plane(|_| 1.0);
        prop_assert!((area - PI * r_max * r_max).abs() < 1e-9 * area);
    }

    #[test]
    fn circle_quadrature_matches_closed_forms(
        r_frac in 0.05f64..0.95,
        big_r in 1.05f64..3.0,
    ) {
        let w = WeightParams::new(big_r, 1e-6).unwrap();
        let r = r_frac * big_r;
        let ball = StarShape::circle(r);
        let f = weighted_perimeter(&ball, &w).unwrap();
        let v = weighted_volume(&ball, &w).unwrap();
        prop_assert!((f - w.ball_perimeter(r)).abs() <= 1e-9 * f.max(1e-12));
        prop_assert!((v - w.ball_volume(r)).abs() <= 1e-9 * v.max(1e-12));
        // Volume inversion round-trips.
        if v > 0.0 && v < w.alpha_bar() {
            let r_back = ball_radius_for_volume(v, &w).unwrap();
            prop_assert!((r_back - r).abs() < 1e-9 * big_r);
        }
    }
}
