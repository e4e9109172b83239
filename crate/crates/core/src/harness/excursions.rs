//! Weight additivity over the excursions between the polymers at two times.

use serde_json::json;

use super::{map_samples, CheckReport, Quantity, Relation};
use crate::error::Result;
use crate::excursion::excursion_decompose;
use crate::lpp::{geodesic, path_energy, profile_on_grid, LatticePath};
use crate::noise::{make_env, FieldSnapshot, Kind, Model};
use crate::rng::derive;
use crate::scaling::path_weight_with_energy;

/// Slack for the floating-point comparison in the inequality.
pub const ADDITIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityInstance {
    pub excursions: usize,
    /// `Wgt(rho) - Wgt(phi)` under the reference field.
    pub difference: f64,
    /// Sum of leg weight differences.
    pub leg_sum: f64,
    /// Sum of routed-profile differences at each excursion's start level.
    pub profile_sum: f64,
}

fn weight(snap: &FieldSnapshot, path: &LatticePath) -> Result<f64> {
    path_weight_with_energy(path, path_energy(snap, path)?)
}

/// Compare `rho`, the polymer of `snap`, with another zigzag `phi` on the same route.
pub fn additivity_instance(
    snap: &FieldSnapshot,
    rho: &LatticePath,
    phi: &LatticePath,
) -> Result<AdditivityInstance> {
    let excursions = excursion_decompose(rho, phi)?;
    let difference = weight(snap, rho)? - weight(snap, phi)?;
    let mut leg_sum = 0.0;
    let mut profile_sum = 0.0;
    for e in &excursions {
        leg_sum += weight(snap, &e.leg0)? - weight(snap, &e.leg1)?;
        let prof = profile_on_grid(snap, e.b_level)?;
        profile_sum += prof.z[rho.departure(e.b_level)] - prof.z[phi.departure(e.b_level)];
    }
    Ok(AdditivityInstance {
        excursions: excursions.len(),
        difference,
        leg_sum,
        profile_sum,
    })
}

/// The identity `Wgt(rho^0) - Wgt(rho^t) = sum_i (Wgt(rho^0 leg) - Wgt(rho^t leg))`
/// and the routed-profile lower bound, all under the time-zero field.
pub fn excursion_additivity_check(
    n: usize,
    m: usize,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let kind = Kind::from_parts(Model::BrownianMesh, Some(m), None)?;
    let stream_seed = derive(seed, "excursion-additivity", n as u64);
    let inst = map_samples(samples, |i| {
        let mut env = make_env(kind, n, stream_seed, i as u64)?;
        let snap0 = env.current().clone();
        env.advance(t)?;
        let rho0 = geodesic(&snap0)?;
        let rhot = geodesic(env.current())?;
        additivity_instance(&snap0, &rho0, &rhot)
    })?;
    let identity_err = inst
        .iter()
        .map(|r| (r.difference - r.leg_sum).abs())
        .fold(0.0, f64::max);
    let violations = inst
        .iter()
        .filter(|r| r.difference < r.profile_sum - ADDITIVITY_TOL)
        .count();
    let total_excursions: usize = inst.iter().map(|r| r.excursions).sum();
    let identity = CheckReport::new(
        format!("excursion-identity n={n} m={m} t={t}"),
        Quantity::Exact(identity_err),
        Quantity::Exact(0.0),
        Relation::AtMost,
        ADDITIVITY_TOL,
        "absolute 1e-9",
    )
    .with_details(json!({ "samples": samples, "excursions": total_excursions }));
    let inequality = CheckReport::new(
        format!("excursion-inequality n={n} m={m} t={t}"),
        Quantity::Exact(violations as f64),
        Quantity::Exact(0.0),
        Relation::AtMost,
        0.0,
        "no violating instance (1e-9 slack)",
    )
    .with_details(json!({
        "samples": samples,
        "min_margin": inst.iter().map(|r| r.difference - r.profile_sum).fold(f64::INFINITY, f64::min),
    }));
    Ok(vec![identity, inequality])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpp::Geometry;

    #[test]
    fn time_zero_has_no_excursions() {
        let r = excursion_additivity_check(8, 2, 0.0, 5, 1).unwrap();
        assert!(r.iter().all(|c| c.passed()));
        assert_eq!(r[0].lhs.value(), 0.0);
    }

    #[test]
    fn one_constructed_excursion() {
        let env = make_env(Kind::BrownianMesh { m: 2 }, 4, 3, 0).unwrap();
        let snap = env.current();
        let rho = geodesic(snap).unwrap();
        // reroute through the far corner
        let phi = LatticePath::new(
            Geometry::EastNorth { m: 2 },
            4,
            (0, 0),
            vec![8, 8, 8, 8, 8],
            f64::NAN,
        )
        .unwrap();
        let inst = additivity_instance(snap, &rho, &phi).unwrap();
        assert!((inst.difference - inst.leg_sum).abs() < 1e-12);
        assert!(inst.difference >= inst.profile_sum - 1e-12);
        assert!(inst.excursions >= 1);
    }

    #[test]
    fn short_times_satisfy_both_relations() {
        let r = excursion_additivity_check(16, 2, 0.1, 20, 4).unwrap();
        assert!(r.iter().all(|c| c.passed()), "{r:?}");
    }
}
