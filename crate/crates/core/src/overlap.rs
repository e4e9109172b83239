//! Overlap between two paths on a common route.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpp::{Geometry, LatticePath};

/// What the raw overlap counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapConvention {
    /// Shared vertices of two upright lattice paths.
    VertexCount,
    /// Length of shared horizontal mesh edges, `m^{-1}` per edge.
    EdgeLength,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    pub convention: OverlapConvention,
    /// Shared vertex count, or shared horizontal length in lattice units.
    pub raw: f64,
    /// Lattice paths: shared vertices over vertices per path. Mesh paths:
    /// `2 n^{-1/3}` times the scaled horizontal measure, which is `raw / n`.
    pub scaled: f64,
    /// Raw overlap contributed by each level of the route.
    pub per_level: Vec<f64>,
}

fn check_pair(p1: &LatticePath, p2: &LatticePath) -> Result<()> {
    if p1.geometry != p2.geometry || p1.n != p2.n {
        return Err(Error::KindMismatch(
            "paths live on different lattices".into(),
        ));
    }
    if p1.src != p2.src || p1.dst != p2.dst {
        return Err(Error::Incompatible("paths do not share a route".into()));
    }
    Ok(())
}

#[inline]
fn interval_overlap(a0: usize, a1: usize, b0: usize, b1: usize) -> Option<usize> {
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if hi >= lo {
        Some(hi - lo)
    } else {
        None
    }
}

/// Shared vertex count (upright) or shared horizontal edge count (mesh),
/// without allocating a per-level table.
pub fn shared_count(p1: &LatticePath, p2: &LatticePath) -> Result<usize> {
    check_pair(p1, p2)?;
    let vertex = p1.geometry == Geometry::Upright;
    let mut total = 0;
    for level in p1.first_level()..=p1.last_level() {
        if let Some(len) = interval_overlap(
            p1.entry(level),
            p1.departure(level),
            p2.entry(level),
            p2.departure(level),
        ) {
            total += if vertex { len + 1 } else { len };
        }
    }
    Ok(total)
}

/// Raw overlap without the per-level table: vertex count, or edge length `count / m`.
pub fn raw_overlap(p1: &LatticePath, p2: &LatticePath) -> Result<f64> {
    let count = shared_count(p1, p2)? as f64;
    Ok(match p1.geometry {
        Geometry::Upright => count,
        Geometry::EastNorth { m } => count / m as f64,
    })
}

/// Scaled overlap without the per-level table; agrees with [`overlap_measure`].
pub fn scaled_overlap(p1: &LatticePath, p2: &LatticePath) -> Result<f64> {
    let raw = raw_overlap(p1, p2)?;
    Ok(match p1.geometry {
        Geometry::Upright => raw / (p1.step_count() + 1) as f64,
        Geometry::EastNorth { .. } => raw / p1.n as f64,
    })
}

pub fn overlap_measure(p1: &LatticePath, p2: &LatticePath) -> Result<OverlapReport> {
    check_pair(p1, p2)?;
    let (convention, unit) = match p1.geometry {
        Geometry::Upright => (OverlapConvention::VertexCount, 1.0),
        Geometry::EastNorth { m } => (OverlapConvention::EdgeLength, 1.0 / m as f64),
    };
    let per_level: Vec<f64> = (p1.first_level()..=p1.last_level())
        .map(|level| {
            let shared = interval_overlap(
                p1.entry(level),
                p1.departure(level),
                p2.entry(level),
                p2.departure(level),
            );
            match (shared, convention) {
                (None, _) => 0.0,
                (Some(len), OverlapConvention::VertexCount) => (len + 1) as f64,
                (Some(len), OverlapConvention::EdgeLength) => len as f64 * unit,
            }
        })
        .collect();
    let raw: f64 = per_level.iter().sum();
    let scaled = match convention {
        OverlapConvention::VertexCount => raw / (p1.step_count() + 1) as f64,
        OverlapConvention::EdgeLength => raw / p1.n as f64,
    };
    Ok(OverlapReport {
        convention,
        raw,
        scaled,
        per_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upright(n: usize, deps: Vec<usize>) -> LatticePath {
        LatticePath::new(Geometry::Upright, n, (0, 0), deps, 0.0).unwrap()
    }

    #[test]
    fn identical_paths_share_everything() {
        let p = upright(4, vec![1, 1, 3, 3, 4]);
        let r = overlap_measure(&p, &p).unwrap();
        assert_eq!(r.raw, 9.0);
        assert_eq!(r.scaled, 1.0);
        assert_eq!(shared_count(&p, &p).unwrap(), 9);
        assert_eq!(scaled_overlap(&p, &p).unwrap(), 1.0);
    }

    #[test]
    fn extreme_staircases_share_endpoints() {
        for n in 2..7 {
            let right_up = upright(n, vec![n; n + 1]);
            let mut d = vec![0; n + 1];
            d[n] = n;
            let up_right = upright(n, d);
            assert_eq!(overlap_measure(&right_up, &up_right).unwrap().raw, 2.0);
        }
    }

    #[test]
    fn mesh_self_overlap_is_one() {
        let p = LatticePath::new(
            Geometry::EastNorth { m: 3 },
            4,
            (0, 0),
            vec![2, 5, 5, 9, 12],
            0.0,
        )
        .unwrap();
        let r = overlap_measure(&p, &p).unwrap();
        assert!((r.raw - 4.0).abs() < 1e-12);
        assert!((r.scaled - 1.0).abs() < 1e-12);
        assert_eq!(raw_overlap(&p, &p).unwrap(), r.raw);
        assert_eq!(scaled_overlap(&p, &p).unwrap(), r.scaled);
    }

    #[test]
    fn mismatched_routes_rejected() {
        let a = upright(3, vec![0, 1, 2, 3]);
        let b = LatticePath::new(Geometry::Upright, 3, (0, 1), vec![1, 2, 3], 0.0).unwrap();
        assert!(overlap_measure(&a, &b).is_err());
        let c = LatticePath::new(
            Geometry::EastNorth { m: 1 },
            3,
            (0, 0),
            vec![0, 1, 2, 3],
            0.0,
        )
        .unwrap();
        assert!(matches!(
            overlap_measure(&a, &c),
            Err(Error::KindMismatch(_))
        ));
    }
}
