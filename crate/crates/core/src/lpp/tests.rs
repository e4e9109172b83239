use super::*;
use crate::noise::{make_env, FieldSnapshot, Kind};
use crate::scaling::path_weight;

fn lattice(n: usize, values: Vec<f64>) -> FieldSnapshot {
    FieldSnapshot::from_values(Kind::Gaussian, n, values).unwrap()
}

#[test]
fn unit_square_example() {
    // vertex (x, y) at y * 2 + x
    let snap = lattice(1, vec![1.0, 0.0, 1.0, 1.0]);
    let (e, path) = max_energy_upright(&snap, (0, 0), (1, 1)).unwrap();
    assert_eq!(e, 3.0);
    assert_eq!(path.departures, vec![0, 1]);
    assert_eq!(brute_force_energy(&snap, (0, 0), (1, 1)).unwrap(), 3.0);
}

#[test]
fn zero_field_takes_left_column_then_top_row() {
    let snap = lattice(4, vec![0.0; 25]);
    let (e, path) = max_energy_upright(&snap, (0, 0), (4, 4)).unwrap();
    assert_eq!(e, 0.0);
    assert_eq!(path.departures, vec![0, 0, 0, 0, 4]);
    assert_eq!(brute_force_energy(&snap, (0, 0), (4, 4)).unwrap(), 0.0);
}

#[test]
fn upright_rejects_bad_routes() {
    let snap = lattice(2, vec![0.0; 9]);
    assert!(max_energy_upright(&snap, (1, 1), (0, 2)).is_err());
    assert!(max_energy_upright(&snap, (0, 0), (3, 2)).is_err());
    let mesh = FieldSnapshot::from_values(Kind::BrownianMesh { m: 2 }, 2, vec![0.0; 12]).unwrap();
    assert!(max_energy_upright(&mesh, (0, 0), (2, 2)).is_err());
    assert!(max_energy_mesh(&snap, (0.0, 0), (2.0, 2)).is_err());
}

#[test]
fn mesh_zero_and_single_level() {
    let zero = FieldSnapshot::from_values(Kind::BrownianMesh { m: 3 }, 2, vec![0.0; 18]).unwrap();
    let (e, path) = max_energy_mesh(&zero, (0.0, 0), (2.0, 2)).unwrap();
    assert_eq!(e, 0.0);
    // north steps are taken as early as possible
    assert_eq!(path.departures, vec![0, 0, 6]);

    let env = make_env(Kind::BrownianMesh { m: 4 }, 3, 9, 0).unwrap();
    let snap = env.current();
    let (e, path) = max_energy_mesh(snap, (0.5, 1), (2.0, 1)).unwrap();
    let direct: f64 = (2..8).map(|u| snap.edge(u, 1)).sum();
    assert!((e - direct).abs() < 1e-12);
    assert_eq!(path.departures, vec![8]);
}

#[test]
fn mesh_snaps_rightward() {
    let env = make_env(Kind::BrownianMesh { m: 4 }, 3, 2, 0).unwrap();
    let snap = env.current();
    let (_, path) = max_energy_mesh(snap, (0.3, 0), (2.9, 3)).unwrap();
    assert_eq!(path.src, (2, 0));
    assert_eq!(path.dst, (12, 3));
    assert_eq!(snap_to_grid(0.25, 4).unwrap(), 1);
    assert!(snap_to_grid(-1.0, 4).is_err());
}

#[test]
fn geodesic_energy_matches_resummation() {
    for (i, kind) in [
        Kind::Gaussian,
        Kind::Bernoulli { p: 0.5 },
        Kind::Uniform,
        Kind::BrownianMesh { m: 3 },
    ]
    .into_iter()
    .enumerate()
    {
        let env = make_env(kind, 6, 40 + i as u64, 0).unwrap();
        let path = geodesic(env.current()).unwrap();
        path.validate().unwrap();
        let again = path_energy(env.current(), &path).unwrap();
        assert!((again - path.energy).abs() < 1e-12, "{kind:?}");
    }
}

#[test]
fn brute_force_guard() {
    let snap = lattice(30, vec![0.0; 31 * 31]);
    assert!(matches!(
        brute_force_energy(&snap, (0, 0), (30, 30)),
        Err(crate::error::Error::TooLarge(_))
    ));
    assert_eq!(path_count(4, 4), Some(70));
    assert_eq!(path_count(0, 7), Some(1));
}

#[test]
fn coarsening_sums_children() {
    let env = make_env(Kind::BrownianMesh { m: 8 }, 3, 1, 0).unwrap();
    let fine = env.current();
    let coarse = coarsen_mesh(fine, 2).unwrap();
    assert_eq!(coarse.kind, Kind::BrownianMesh { m: 4 });
    for level in 0..=3 {
        for u in 0..12 {
            let want = fine.edge(2 * u, level) + fine.edge(2 * u + 1, level);
            assert!((coarse.edge(u, level) - want).abs() < 1e-15);
        }
    }
    assert!(coarsen_mesh(fine, 3).is_err());
    let zero = FieldSnapshot::from_values(Kind::BrownianMesh { m: 2 }, 2, vec![0.0; 12]).unwrap();
    assert!(coarsen_mesh(&zero, 2)
        .unwrap()
        .values
        .iter()
        .all(|v| *v == 0.0));
}

#[test]
fn forward_and_backward_values_agree_with_point_to_point() {
    let env = make_env(Kind::BrownianMesh { m: 2 }, 4, 5, 0).unwrap();
    let snap = env.current();
    let fwd = mesh_forward_values(snap, (1, 0), 2).unwrap();
    let bwd = mesh_backward_values(snap, 2, (8, 4)).unwrap();
    for h in 1..=8 {
        let (e, _) = max_energy_mesh_grid(snap, (1, 0), (h, 2)).unwrap();
        assert!((fwd[h - 1] - e).abs() < 1e-12);
    }
    for h in 0..=8 {
        let (e, _) = max_energy_mesh_grid(snap, (h, 2), (8, 4)).unwrap();
        assert!((bwd[h] - e).abs() < 1e-12);
    }
}

#[test]
fn profile_peaks_at_the_polymer() {
    let env = make_env(Kind::BrownianMesh { m: 4 }, 16, 77, 0).unwrap();
    let snap = env.current();
    let rho = geodesic(snap).unwrap();
    let wgt = path_weight(&rho).unwrap();
    // the north step joining the two pieces is worth 2^{-1/2} n^{-1/3} of centring
    let step = 1.0 / (2f64.sqrt() * 16f64.cbrt());
    for level in [0, 3, 8, 15] {
        let prof = profile_on_grid(snap, level).unwrap();
        assert_eq!(prof.argmax(), rho.departure(level));
        assert!(
            (prof.max() - wgt - step).abs() < 1e-9,
            "level {level}: {} vs {wgt}",
            prof.max()
        );
    }
    assert!(profile_on_grid(snap, 16).is_err());
}

#[test]
fn routed_profile_points() {
    let env = make_env(Kind::BrownianMesh { m: 4 }, 8, 3, 0).unwrap();
    let snap = env.current();
    let prof = profile_on_grid(snap, 4).unwrap();
    let xs: Vec<f64> = prof.x.clone();
    let z = routed_profile(snap, 0.5, &xs).unwrap();
    assert_eq!(z, prof.z);
    assert!(routed_profile(snap, 0.33, &xs).is_err());
    assert!(routed_profile(snap, 0.5, &[100.0]).is_err());
    assert!(routed_profile(snap, 0.5, &[-100.0]).is_err());
}
