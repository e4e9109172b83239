//! Shape statistics of zigzags: fluctuation, distance, regularity, steadiness.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scaling::{horizontal_unit, Zigzag};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryStats {
    /// Distance from the departure at each level to the line through the endpoints.
    pub fluc: Vec<f64>,
    pub max_fluc: f64,
    /// Largest departure distance over shared levels, when a second path is given.
    pub max_dist: Option<f64>,
    /// Horizontal extent of the first zigzag.
    pub width: f64,
}

/// `|phi(h) - L(h)|` at each level, `L` interpolating the endpoints.
pub fn fluc_profile(z: &Zigzag) -> Vec<f64> {
    let (s0, s1) = (z.start.s, z.end.s);
    let (x0, x1) = (z.start.x, z.end.x);
    let nf = z.n as f64;
    z.departures
        .iter()
        .enumerate()
        .map(|(k, &phi)| {
            let s = (z.first_level + k) as f64 / nf;
            let line = if s1 > s0 {
                x0 + (s - s0) / (s1 - s0) * (x1 - x0)
            } else {
                x0
            };
            (phi - line).abs()
        })
        .collect()
}

pub fn max_dist(a: &Zigzag, b: &Zigzag) -> Result<f64> {
    if a.n != b.n || a.density != b.density {
        return Err(Error::KindMismatch("zigzags on different grids".into()));
    }
    let lo = a.first_level.max(b.first_level);
    let hi = a.last_level().min(b.last_level());
    Ok((lo..=hi)
        .map(|h| (a.departure(h) - b.departure(h)).abs())
        .fold(0.0, f64::max))
}

pub fn width(z: &Zigzag) -> f64 {
    let u = horizontal_unit(z.n);
    let mut lo = z.start.x;
    let mut hi = z.start.x;
    for (k, &d) in z.departures.iter().enumerate() {
        hi = hi.max(d);
        let entry = if k == 0 {
            z.start.x
        } else {
            z.departures[k - 1] - u
        };
        lo = lo.min(entry);
    }
    hi - lo
}

pub fn geometry_stats(a: &Zigzag, b: Option<&Zigzag>) -> Result<GeometryStats> {
    let fluc = fluc_profile(a);
    let max_fluc = fluc.iter().copied().fold(0.0, f64::max);
    let max_dist = b.map(|b| max_dist(a, b)).transpose()?;
    Ok(GeometryStats {
        fluc,
        max_fluc,
        max_dist,
        width: width(a),
    })
}

/// `(kappa, R)`-regularity: departures at most `6 kappa` apart in height differ
/// horizontally by at most `R kappa^{2/3} (log 1/kappa)^{1/3}`.
pub fn regularity(z: &Zigzag, kappa: f64, r: f64) -> Result<bool> {
    if !(kappa > 0.0 && kappa < (-1.0f64).exp()) {
        return Err(invalid("kappa must lie in (0, 1/e)"));
    }
    if !(r > 0.0) {
        return Err(invalid("R must be positive"));
    }
    let bound = r * kappa.powf(2.0 / 3.0) * (1.0 / kappa).ln().cbrt();
    let window = (6.0 * kappa * z.n as f64 + 1e-9).floor() as usize;
    let d = &z.departures;
    for i in 0..d.len() {
        let hi = (i + window).min(d.len() - 1);
        let (mut lo_v, mut hi_v) = (d[i], d[i]);
        for &v in &d[i..=hi] {
            lo_v = lo_v.min(v);
            hi_v = hi_v.max(v);
        }
        if hi_v - lo_v > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fraction of horizontal interval lengths `omega_i` of at least `beta1 n^{-2/3}`.
pub fn steadiness(z: &Zigzag, beta1: f64) -> Result<f64> {
    const TOL: f64 = 1e-12;
    if z.first_level != 0 || z.last_level() != z.n || z.start.x.abs() > TOL || z.end.x.abs() > TOL {
        return Err(Error::Incompatible(
            "steadiness needs the route (0,0) -> (0,1)".into(),
        ));
    }
    if !(beta1 > 0.0) {
        return Err(invalid("beta1 must be positive"));
    }
    let bound = beta1 / (z.n as f64).powf(2.0 / 3.0);
    let omega = z.interval_lengths();
    Ok(omega.iter().filter(|&&w| w >= bound).count() as f64 / omega.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpp::{Geometry, LatticePath};

    fn zig(n: usize, deps: Vec<usize>) -> Zigzag {
        Zigzag::from_path(&LatticePath::new(Geometry::Upright, n, (0, 0), deps, 0.0).unwrap())
    }

    #[test]
    fn diagonal_staircase_has_no_fluctuation() {
        let n = 6;
        let z = zig(n, (1..=n).chain([n]).collect());
        let stats = geometry_stats(&z, Some(&z)).unwrap();
        // departures sit half a lattice unit right of the diagonal
        let u = horizontal_unit(n);
        assert!(stats.fluc[..n].iter().all(|f| (f - u).abs() < 1e-12));
        assert_eq!(stats.max_dist, Some(0.0));
        let mesh = Zigzag::from_path(
            &LatticePath::new(
                Geometry::EastNorth { m: 2 },
                4,
                (0, 0),
                vec![0, 2, 4, 6, 8],
                0.0,
            )
            .unwrap(),
        );
        assert!(geometry_stats(&mesh, None).unwrap().max_fluc < 1e-12);
    }

    #[test]
    fn staircase_steadiness() {
        for n in [4, 9, 16] {
            let z = zig(n, vec![n; n + 1]);
            let omega = z.interval_lengths();
            assert!((omega[0] - 0.5 * (n as f64).cbrt()).abs() < 1e-12);
            assert!(omega[1..].iter().all(|w| w.abs() < 1e-12));
            let f = steadiness(&z, 0.5 * n as f64).unwrap();
            assert!((f - 1.0 / (n + 1) as f64).abs() < 1e-15);
            assert!((omega.iter().sum::<f64>() - 0.5 * (n as f64).cbrt()).abs() < 1e-9);
            assert!((width(&z) - 0.5 * (n as f64).cbrt()).abs() < 1e-12);
        }
        let off = Zigzag::from_path(
            &LatticePath::new(Geometry::Upright, 4, (1, 0), vec![4; 5], 0.0).unwrap(),
        );
        assert!(steadiness(&off, 0.1).is_err());
    }

    #[test]
    fn regularity_examples() {
        let mesh = |deps: Vec<usize>| {
            Zigzag::from_path(
                &LatticePath::new(Geometry::EastNorth { m: 64 }, 64, (0, 0), deps, 0.0).unwrap(),
            )
        };
        let straight: Vec<usize> = (0..=64).map(|l| 64 * l).collect();
        let z = mesh(straight.clone());
        for (kappa, r) in [(0.01, 0.1), (0.3, 1.0), (1.0 / 32.0, 8.0)] {
            assert!(regularity(&z, kappa, r).unwrap());
        }
        // a jump of about twice the bound inside one window
        let (kappa, r): (f64, f64) = (1.0 / 16.0, 0.5);
        let bound = r * kappa.powf(2.0 / 3.0) * (1.0f64 / kappa).ln().cbrt();
        let grid = horizontal_unit(64) / 64.0;
        let jump = (2.0 * bound / grid).ceil() as usize;
        let mut deps = straight;
        for d in deps.iter_mut().skip(10) {
            *d = (*d + jump).min(64 * 64);
        }
        assert!(!regularity(&mesh(deps), kappa, r).unwrap());
        assert!(regularity(&z, 0.5, 1.0).is_err());
        assert!(regularity(&z, 0.1, 0.0).is_err());
    }
}
