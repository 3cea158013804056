//! Randomized invariants.

use proptest::prelude::*;
use ris_core::array::{steering_vector, ArrayGeometry};
use ris_core::estimation::{make_probe_schedule, retro_measure, ProbeKind, SparseAngularChannel};
use ris_core::link::{fractional_bandwidth_limit, lambert_w, GeometryScenario};
use ris_core::routing::combine_reflective;
use ris_core::C64;

proptest! {
    #[test]
    fn steering_entries_stay_unit_modulus(
        n in 1usize..6,
        a in 0.05f64..0.8,
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        phi in -std::f64::consts::PI..std::f64::consts::PI,
    ) {
        let geom = ArrayGeometry::new(n, a).unwrap();
        let v = steering_vector(&geom, theta, phi).unwrap();
        for x in v.iter() {
            prop_assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lambert_w_inverts_w_exp_w(x in -0.36f64..1e6) {
        let w = lambert_w(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn bandwidth_limit_positive_or_infinite(
        d_tx in 1.0f64..1e4,
        d_rx in 1.0f64..1e4,
        ti in -1.5f64..1.5,
        tr in -1.5f64..1.5,
        side in 0.5f64..100.0,
    ) {
        let scn = GeometryScenario { d_tx, d_rx, theta_i: ti, theta_r: tr, side_len: side };
        for &form in &[false, true] {
            let b = fractional_bandwidth_limit(&scn, form).unwrap();
            prop_assert!(b > 0.0);
            if ti == tr {
                prop_assert!(b.is_infinite());
            }
        }
    }

    #[test]
    fn reflective_combination_is_diagonal_unitary(
        routes in prop::collection::vec(
            prop::collection::vec(-std::f64::consts::PI..std::f64::consts::PI, 8),
            1..5,
        ),
    ) {
        let combined = combine_reflective(&routes).unwrap();
        prop_assert_eq!(combined.len(), 8);
        for p in combined {
            // a phase is finite and its phasor has unit modulus by definition
            prop_assert!(p.is_finite());
            prop_assert!((C64::from_polar(1.0, p).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn retro_samples_blind_to_all_entry_signs(
        seed in 0u64..2000,
        signs in prop::collection::vec(prop::bool::ANY, 4),
    ) {
        let m = 16;
        let ch = SparseAngularChannel::random(m, 4, seed).unwrap();
        let flipped_entries: Vec<(usize, C64)> = ch
            .support()
            .iter()
            .enumerate()
            .map(|(i, &idx)| {
                let c = ch.beam()[idx];
                (idx, if signs[i] { -c } else { c })
            })
            .collect();
        let flipped = SparseAngularChannel::new(m, &flipped_entries).unwrap();
        let sched = make_probe_schedule(m, m, ProbeKind::Orthogonal, 0).unwrap();
        let y1 = retro_measure(&ch, &sched, 0.0, 0).unwrap();
        let y2 = retro_measure(&flipped, &sched, 0.0, 0).unwrap();
        for (a, b) in y1.iter().zip(&y2) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }
}
