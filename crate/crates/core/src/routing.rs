//! Multi-route surface configuration.
//!
//! A switched-DFT surface serves several links at once by summing their
//! beam-port connections: when the per-route supports are disjoint the sum is
//! again a partial symmetric permutation and every route keeps its full gain.
//! A phased surface can only compromise, taking the entrywise phase of the
//! summed per-route profiles, which costs each route roughly a factor `K`.

use crate::array::{embedded_pattern, CoupledArray};
use crate::error::Error;
use crate::scattering::{exact_transfer, realize_load, LoadConfig, ScatterModel};
use crate::{Result, C64};
use std::collections::BTreeSet;

/// Beam-port connections requested by one redirective route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedirectiveRoute {
    /// Unordered beam-port pairs, `(b, b)` allowed for retro connections.
    pub connections: Vec<(usize, usize)>,
}

impl RedirectiveRoute {
    /// Two-port route.
    pub fn pair(b_in: usize, b_out: usize) -> Self {
        Self {
            connections: vec![(b_in, b_out)],
        }
    }

    /// Set of beam ports the route touches.
    pub fn support(&self) -> BTreeSet<usize> {
        self.connections
            .iter()
            .flat_map(|&(p, q)| [p, q])
            .collect()
    }
}

/// Sum disjoint redirective routes into one switched-DFT load.
///
/// The beam-domain error of the combined configuration against every route is
/// exactly zero on that route's support. Overlapping supports are rejected
/// with the list of contested ports.
pub fn combine_redirective(routes: &[RedirectiveRoute], m: usize) -> Result<LoadConfig> {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut clashes = Vec::new();
    let mut connections = Vec::new();
    for route in routes {
        for port in route.support() {
            if port >= m {
                return Err(Error::LoadConfig(format!(
                    "beam port {port} out of range for {m} ports"
                )));
            }
            if !seen.insert(port) {
                clashes.push(port);
            }
        }
        connections.extend_from_slice(&route.connections);
    }
    if !clashes.is_empty() {
        clashes.sort_unstable();
        clashes.dedup();
        return Err(Error::RouteConflict(clashes));
    }
    Ok(LoadConfig::SwitchedDft {
        connections,
        absorbed: Vec::new(),
    })
}

/// Best single phase profile serving `K` per-route profiles.
///
/// Takes the entrywise phase of the summed unit phasors; entries whose sum
/// cancels exactly get phase zero.
pub fn combine_reflective(routes: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = routes.first() else {
        return Err(Error::InvalidArgument(
            "reflective combining needs at least one route".into(),
        ));
    };
    let m = first.len();
    if routes.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidArgument(
            "route phase profiles must share the element count".into(),
        ));
    }
    Ok((0..m)
        .map(|i| {
            let sum: C64 = routes.iter().map(|r| C64::from_polar(1.0, r[i])).sum();
            if sum.norm() < 1e-12 {
                0.0
            } else {
                sum.arg()
            }
        })
        .collect())
}

/// Phase profile steering `incident` into `outgoing` at full array gain.
pub fn steering_phases(
    coupled: &CoupledArray,
    incident: (f64, f64),
    outgoing: (f64, f64),
) -> Result<Vec<f64>> {
    let s_in = embedded_pattern(coupled.geometry(), incident.0, incident.1)?;
    let s_out = embedded_pattern(coupled.geometry(), outgoing.0, outgoing.1)?;
    Ok(s_in
        .iter()
        .zip(s_out.iter())
        .map(|(a, b)| -(a.arg() + b.arg()))
        .collect())
}

/// Power coupling `|s(out)ᵀ T s(in)|²` of a load between two directions.
pub fn route_coupling(
    coupled: &CoupledArray,
    load: &LoadConfig,
    incident: (f64, f64),
    outgoing: (f64, f64),
    model: ScatterModel,
) -> Result<f64> {
    let m = coupled.elements();
    let s_l = realize_load(load, m)?;
    let transfer = match model {
        ScatterModel::Exact => exact_transfer(coupled.s_aa(), &s_l)?,
        ScatterModel::Naive => s_l,
    };
    let s_in = embedded_pattern(coupled.geometry(), incident.0, incident.1)?;
    let s_out = embedded_pattern(coupled.geometry(), outgoing.0, outgoing.1)?;
    let amp: C64 = s_out
        .iter()
        .zip((&transfer * s_in).iter())
        .map(|(a, b)| a * b)
        .sum();
    Ok(amp.norm_sqr())
}

/// Route gain of `load` on the `incident → outgoing` link, normalized by the
/// single-route maximum achieved by `reference`.
pub fn route_gain(
    coupled: &CoupledArray,
    load: &LoadConfig,
    reference: &LoadConfig,
    incident: (f64, f64),
    outgoing: (f64, f64),
    model: ScatterModel,
) -> Result<f64> {
    let got = route_coupling(coupled, load, incident, outgoing, model)?;
    let best = route_coupling(coupled, reference, incident, outgoing, model)?;
    if best == 0.0 {
        return Err(Error::InvalidArgument(
            "reference load does not couple the requested directions".into(),
        ));
    }
    Ok(got / best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{beam_direction, ArrayGeometry};
    use crate::scattering::beam_permutation;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn disjoint_swaps_combine_to_full_permutation() {
        let combined = combine_redirective(
            &[RedirectiveRoute::pair(0, 1), RedirectiveRoute::pair(2, 3)],
            4,
        )
        .unwrap();
        let LoadConfig::SwitchedDft { connections, .. } = &combined else {
            panic!("expected switched load");
        };
        let sp = beam_permutation(connections, &[], 4).unwrap();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        assert_eq!(sp, expect);
    }

    #[test]
    fn single_route_is_identity_case() {
        let r = RedirectiveRoute::pair(2, 5);
        let combined = combine_redirective(std::slice::from_ref(&r), 9).unwrap();
        let LoadConfig::SwitchedDft { connections, .. } = &combined else {
            panic!("expected switched load");
        };
        assert_eq!(connections, &r.connections);
    }

    #[test]
    fn overlapping_routes_are_rejected_with_ports() {
        let err = combine_redirective(
            &[RedirectiveRoute::pair(0, 1), RedirectiveRoute::pair(1, 2)],
            4,
        )
        .unwrap_err();
        assert!(matches!(err, Error::RouteConflict(ports) if ports == vec![1]));
    }

    #[test]
    fn combined_beam_error_is_zero_on_supports() {
        // Frobenius distance between the combined permutation and each route,
        // restricted to the route's support, in the beam domain
        let routes = [RedirectiveRoute::pair(0, 3), RedirectiveRoute::pair(4, 7)];
        let m = 9;
        let combined = combine_redirective(&routes, m).unwrap();
        let LoadConfig::SwitchedDft { connections, .. } = &combined else {
            panic!()
        };
        let sp = beam_permutation(connections, &[], m).unwrap();
        for r in &routes {
            let rp = beam_permutation(&r.connections, &[], m).unwrap();
            let support = r.support();
            let mut err = 0.0;
            for &i in &support {
                for j in 0..m {
                    err += (sp[(i, j)] - rp[(i, j)]).powi(2) + (sp[(j, i)] - rp[(j, i)]).powi(2);
                }
            }
            assert_eq!(err, 0.0);
        }
    }

    #[test]
    fn reflective_single_route_is_exact() {
        let phases = vec![0.3, -0.8, 2.9, 0.0];
        let combined = combine_reflective(std::slice::from_ref(&phases)).unwrap();
        for (c, p) in combined.iter().zip(&phases) {
            assert_relative_eq!(*c, *p, epsilon = 1e-12);
        }
    }

    #[test]
    fn reflective_pair_takes_phasor_bisector() {
        let a = 0.4;
        let b = 1.2;
        let combined = combine_reflective(&[vec![a], vec![b]]).unwrap();
        assert_relative_eq!(combined[0], (a + b) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn reflective_degenerate_sum_gets_zero_phase() {
        let combined = combine_reflective(&[vec![0.0], vec![std::f64::consts::PI]]).unwrap();
        assert_eq!(combined[0], 0.0);
        assert!(combined.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn reflective_random_combination_close_to_scaled_sum() {
        // with i.i.d. uniform route phases the unit-modulus projection stays
        // close to the 1/sqrt(K) scaled phasor sum
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let k = 4;
        let m = 16;
        let routes: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                (0..m)
                    .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect()
            })
            .collect();
        let combined = combine_reflective(&routes).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..m {
            let sum: C64 = routes.iter().map(|r| C64::from_polar(1.0, r[i])).sum();
            let diff = C64::from_polar(1.0, combined[i]) - sum / C64::new((k as f64).sqrt(), 0.0);
            num += diff.norm_sqr();
            den += sum.norm_sqr();
        }
        assert!(num.sqrt() / den.sqrt() < 0.75, "residual {}", num / den);
    }

    #[test]
    fn own_connection_has_unit_gain() {
        let geom = ArrayGeometry::new(4, 0.5).unwrap();
        let arr = CoupledArray::new(geom).unwrap();
        let (b1, b2) = (0, 4);
        let din = beam_direction(&geom, b1).unwrap();
        let dout = beam_direction(&geom, b2).unwrap();
        let load = LoadConfig::switched_pair(b1, b2);
        for model in [ScatterModel::Naive, ScatterModel::Exact] {
            let g = route_gain(&arr, &load, &load, din, dout, model).unwrap();
            assert_relative_eq!(g, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn beam_aligned_coupling_is_exactly_selective() {
        // a beam-aligned steering vector is the conjugate DFT column, so the
        // matched-array coupling through F S' F picks out single permutation
        // entries with no cross-talk
        let geom = ArrayGeometry::new(4, 0.5).unwrap();
        let arr = CoupledArray::new(geom).unwrap();
        let m = geom.elements();
        let (b1, b2, b3, b4) = (0, 4, 12, 1);
        let combined = combine_redirective(
            &[RedirectiveRoute::pair(b1, b2), RedirectiveRoute::pair(b3, b4)],
            m,
        )
        .unwrap();
        let single = LoadConfig::switched_pair(b1, b2);
        let din = beam_direction(&geom, b1).unwrap();
        let dout = beam_direction(&geom, b2).unwrap();
        let g = route_gain(&arr, &combined, &single, din, dout, ScatterModel::Naive).unwrap();
        assert_relative_eq!(g, 1.0, epsilon = 1e-12);
        // and an unconnected cross pair does not leak
        let din34 = beam_direction(&geom, b3).unwrap();
        let cross = route_coupling(&arr, &single, din34, dout, ScatterModel::Naive).unwrap();
        assert!(cross < 1e-20, "cross-talk {cross}");
    }
}
