mod common;

use common::{decomposition_mismatches, random_pair, walk};
use dlpp::excursion::{classify_excursion, duration_by_scale, excursion_decompose, ClassifyParams};
use dlpp::lpp::{brute_force_energy, max_energy_mesh, max_energy_upright, path_energy, Geometry};
use dlpp::noise::{make_env, Kind};
use dlpp::overlap::{overlap_measure, scaled_overlap, shared_count};
use dlpp::proxy::{interpolation_levels, retain_scan};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn geometry(mesh: bool, m: usize) -> Geometry {
    if mesh {
        Geometry::EastNorth { m }
    } else {
        Geometry::Upright
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn walk_matches_vertices(seed in any::<u64>(), n in 1usize..10, mesh in any::<bool>(), m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, _) = random_pair(&mut rng, geometry(mesh, m), n, 0.5);
        prop_assert_eq!(walk(&p), p.vertices());
        prop_assert_eq!(p.vertices().len(), p.step_count() + 1);
    }

    #[test]
    fn decomposition_agrees_with_labeling(seed in any::<u64>(), n in 1usize..12, mesh in any::<bool>(), m in 1usize..4, keep in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = random_pair(&mut rng, geometry(mesh, m), n, keep);
        prop_assert_eq!(decomposition_mismatches(&p, &q), 0);
    }

    #[test]
    fn excursion_records_are_consistent(seed in any::<u64>(), n in 1usize..16, mesh in any::<bool>(), m in 1usize..4, keep in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = random_pair(&mut rng, geometry(mesh, m), n, keep);
        let ex = excursion_decompose(&p, &q).unwrap();
        let mut total = 0.0;
        for e in &ex {
            let d = e.duration();
            prop_assert!(d > 0.0);
            let s = e.scale as i32;
            prop_assert!(d > 2f64.powi(-s - 1) && d <= 2f64.powi(-s));
            prop_assert_eq!(e.leg0.src, e.leg1.src);
            prop_assert_eq!(e.leg0.dst, e.leg1.dst);
            if e.flags.is_excursion {
                let a: std::collections::BTreeSet<_> = walk(&e.leg0).into_iter().collect();
                let shared = walk(&e.leg1).into_iter().filter(|v| a.contains(v)).count();
                prop_assert_eq!(shared, 2);
            }
            total += d;
        }
        prop_assert!(total <= 1.0 + 1e-12);
        let by_scale: f64 = duration_by_scale(&ex).values().sum();
        prop_assert!((by_scale - total).abs() < 1e-12);
        // swapping the paths swaps the legs and nothing else
        let back = excursion_decompose(&q, &p).unwrap();
        prop_assert_eq!(back.len(), ex.len());
        for (a, b) in ex.iter().zip(&back) {
            prop_assert_eq!(&a.leg0.departures, &b.leg1.departures);
            prop_assert_eq!((a.leg0.src, a.leg0.dst), (b.leg1.src, b.leg1.dst));
            prop_assert_eq!(a.flags.is_excursion, b.flags.is_excursion);
        }
    }

    #[test]
    fn overlap_is_symmetric_and_bounded(seed in any::<u64>(), n in 1usize..16, mesh in any::<bool>(), m in 1usize..4, keep in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = geometry(mesh, m);
        let (p, q) = random_pair(&mut rng, g, n, keep);
        let pq = overlap_measure(&p, &q).unwrap();
        let qp = overlap_measure(&q, &p).unwrap();
        prop_assert_eq!(pq.raw, qp.raw);
        prop_assert!((pq.per_level.iter().sum::<f64>() - pq.raw).abs() < 1e-9);
        prop_assert!((pq.scaled - scaled_overlap(&p, &q).unwrap()).abs() < 1e-12);
        let own = scaled_overlap(&p, &p).unwrap();
        prop_assert!(pq.scaled <= own + 1e-12);
        match g {
            Geometry::Upright => {
                // vertex budget: never more than the path's own vertex count
                prop_assert!(shared_count(&p, &q).unwrap() <= p.step_count() + 1);
                prop_assert!((own - 1.0).abs() < 1e-12);
            }
            Geometry::EastNorth { m } => {
                prop_assert!(shared_count(&p, &q).unwrap() <= n * m);
                prop_assert!((own - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normal_excursions_are_weak(seed in any::<u64>(), n in 2usize..16, m in 1usize..4, keep in 0.0f64..1.0, alpha in 0.01f64..2.0, chi in 0.05f64..0.95, tau0 in 0.01f64..0.99) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = random_pair(&mut rng, Geometry::EastNorth { m }, n, keep);
        let params = ClassifyParams { beta1: Some(0.1), ..ClassifyParams::new(alpha, chi, tau0) };
        for e in excursion_decompose(&p, &q).unwrap() {
            let f = classify_excursion(&e, &params).unwrap();
            prop_assert!(!f.normal || f.weak);
            prop_assert_eq!(f.slender, f.is_excursion && !f.normal);
            prop_assert!(!(f.normal && f.slender));
        }
    }

    #[test]
    fn retention_keeps_half(gaps in prop::collection::vec((0usize..40, 1usize..40), 0..30), n in 16usize..512, m in 1u32..4) {
        prop_assume!((1usize << m) <= n);
        let mut lifetimes = Vec::new();
        let mut at = 0;
        for (g, d) in gaps {
            let b = at + g;
            lifetimes.push((b, b + d));
            at = b + d;
        }
        let keep = retain_scan(&lifetimes, n, m);
        let kept = keep.iter().filter(|k| **k).count();
        prop_assert!(2 * kept >= lifetimes.len());
        for i in 1..keep.len() {
            if !keep[i] {
                prop_assert!(keep[i - 1]);
            }
        }
    }

    #[test]
    fn interpolation_gaps_are_bounded(n in 64usize..1024, ell in 0u32..3, extra in 1u32..3, raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 0..12)) {
        let m = ell + extra;
        prop_assume!((1usize << m) <= n / 4);
        // scale-ell lifetimes inside [0.05, 0.95], laid out bottom to top
        let lo = (0.05 * n as f64).ceil() as usize;
        let hi = (0.95 * n as f64).floor() as usize;
        let shortest = (n >> (ell + 1)) + 1;
        let longest = n >> ell;
        prop_assume!(shortest <= longest);
        let mut lifetimes = Vec::new();
        let mut at = lo;
        for (u, v) in raw {
            let b = at + (u * (n >> m) as f64) as usize;
            let f = b + shortest + (v * (longest - shortest) as f64) as usize;
            if f > hi {
                break;
            }
            lifetimes.push((b, f));
            at = f;
        }
        let keep = retain_scan(&lifetimes, n, m);
        let endpoints: Vec<usize> = lifetimes
            .iter()
            .zip(&keep)
            .filter(|(_, k)| **k)
            .flat_map(|(l, _)| [l.0, l.1])
            .collect();
        let levels = interpolation_levels(n, m, &endpoints);
        prop_assert_eq!(levels[0], 0);
        prop_assert_eq!(*levels.last().unwrap(), n);
        prop_assert!(levels.windows(2).all(|w| w[0] < w[1]));
        for e in &endpoints {
            prop_assert!(levels.contains(e));
        }
        let step = n as f64 / (1u64 << m) as f64;
        let inner = &levels[1..levels.len() - 1];
        for w in levels.windows(2) {
            let gap = (w[1] - w[0]) as f64;
            prop_assert!(gap <= 2.0 * step + 2.0, "gap {} over {}", gap, 2.0 * step + 2.0);
        }
        for w in inner.windows(2) {
            let gap = (w[1] - w[0]) as f64;
            prop_assert!(gap >= step - 1.0, "gap {} under {}", gap, step - 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solvers_match_enumeration(seed in any::<u64>(), n in 1usize..5, m in 1usize..4, mesh in any::<bool>()) {
        let kind = if mesh { Kind::BrownianMesh { m } } else { Kind::Gaussian };
        let n = if mesh { n.min(3) } else { n };
        let env = make_env(kind, n, seed, 0).unwrap();
        let snap = env.current();
        let (e, path) = if mesh {
            max_energy_mesh(snap, (0.0, 0), (n as f64, n)).unwrap()
        } else {
            max_energy_upright(snap, (0, 0), (n, n)).unwrap()
        };
        let width = n * snap.density();
        let brute = brute_force_energy(snap, (0, 0), (width, n)).unwrap();
        prop_assert!((e - brute).abs() <= 1e-12 * (1.0 + brute.abs()));
        prop_assert!((path_energy(snap, &path).unwrap() - e).abs() <= 1e-12 * (1.0 + e.abs()));
    }
}
