//! KPZ scaling map, scaled weights and zigzags.
//!
//! The map sends a lattice point `(v1, v2)` to `(2^{-1} n^{-2/3} (v1 - v2), v2 / n)`,
//! so the diagonal route `(0,0) -> (n,n)` becomes `(0,0) -> (0,1)`. Weights
//! centre energies by `2n` per unit of scaled height and shrink by
//! `2^{-1/2} n^{-1/3}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpp::LatticePath;

/// Absolute tolerance for on-grid checks of `n s`.
pub const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledPoint {
    pub x: f64,
    pub s: f64,
    pub n: usize,
}

impl ScaledPoint {
    pub fn on_grid(&self) -> bool {
        let ns = self.n as f64 * self.s;
        (ns - ns.round()).abs() <= GRID_TOL
    }
}

#[inline]
fn n23(n: usize) -> f64 {
    (n as f64).powf(2.0 / 3.0)
}

/// Scaled horizontal length of one lattice unit: `2^{-1} n^{-2/3}`.
#[inline]
pub fn horizontal_unit(n: usize) -> f64 {
    0.5 / n23(n)
}

pub fn scale_point(n: usize, v1: f64, v2: f64) -> ScaledPoint {
    ScaledPoint {
        x: horizontal_unit(n) * (v1 - v2),
        s: v2 / n as f64,
        n,
    }
}

pub fn unscale_point(n: usize, x: f64, s: f64) -> (f64, f64) {
    let nf = n as f64;
    (nf * s + 2.0 * n23(n) * x, nf * s)
}

/// Scaled image of a grid point `(h, level)` on a lattice of density `m`.
pub fn scale_grid_point(n: usize, m: usize, h: usize, level: usize) -> ScaledPoint {
    scale_point(n, h as f64 / m as f64, level as f64)
}

/// Which clause of the compatibility condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Incompatibility {
    /// `n s1` or `n s2` is not an integer.
    Grid,
    /// `s2 < s1`.
    Order,
    /// `y - x < -2^{-1} n^{1/3} (s2 - s1)`.
    Horizontal,
}

pub fn check_compatible_triple(
    n: usize,
    s1: f64,
    s2: f64,
    x: f64,
    y: f64,
) -> std::result::Result<(), Incompatibility> {
    let nf = n as f64;
    let on_grid = |s: f64| ((nf * s) - (nf * s).round()).abs() <= GRID_TOL;
    if n == 0 || !on_grid(s1) || !on_grid(s2) {
        return Err(Incompatibility::Grid);
    }
    if s2 < s1 - GRID_TOL / nf {
        return Err(Incompatibility::Order);
    }
    let s12 = s2 - s1;
    if y - x < -0.5 * nf.cbrt() * s12 - GRID_TOL {
        return Err(Incompatibility::Horizontal);
    }
    Ok(())
}

/// `2^{-1/2} n^{-1/3} (E - 2n s12 - 2 n^{2/3} (y - x))`.
pub fn weight_from_energy(n: usize, energy: f64, s1: f64, s2: f64, x: f64, y: f64) -> Result<f64> {
    check_compatible_triple(n, s1, s2, x, y)
        .map_err(|why| Error::Incompatible(format!("({n}, {s1}, {s2}, {x}, {y}): {why:?}")))?;
    let nf = n as f64;
    let s12 = s2 - s1;
    Ok((energy - 2.0 * nf * s12 - 2.0 * n23(n) * (y - x)) / (2f64.sqrt() * nf.cbrt()))
}

/// Inverse of [`weight_from_energy`] in the energy argument.
pub fn energy_from_weight(n: usize, weight: f64, s1: f64, s2: f64, x: f64, y: f64) -> f64 {
    let nf = n as f64;
    weight * 2f64.sqrt() * nf.cbrt() + 2.0 * nf * (s2 - s1) + 2.0 * n23(n) * (y - x)
}

/// Scaled weight of a path carrying its energy.
pub fn path_weight(path: &LatticePath) -> Result<f64> {
    path_weight_with_energy(path, path.energy)
}

/// Scaled weight of a path's route with an externally supplied energy.
pub fn path_weight_with_energy(path: &LatticePath, energy: f64) -> Result<f64> {
    let m = path.density();
    let a = scale_grid_point(path.n, m, path.src.0, path.src.1);
    let b = scale_grid_point(path.n, m, path.dst.0, path.dst.1);
    weight_from_energy(path.n, energy, a.s, b.s, a.x, b.x)
}

/// Scaled image of a path: departures per level plus endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Zigzag {
    pub n: usize,
    pub density: usize,
    pub start: ScaledPoint,
    pub end: ScaledPoint,
    /// Scaled departure `phi(s)` for `s = first_level / n, ..., last_level / n`.
    pub departures: Vec<f64>,
    pub first_level: usize,
    pub weight: Option<f64>,
}

impl Zigzag {
    pub fn from_path(path: &LatticePath) -> Zigzag {
        let m = path.density();
        let departures = path
            .departures
            .iter()
            .enumerate()
            .map(|(k, &h)| scale_grid_point(path.n, m, h, path.src.1 + k).x)
            .collect();
        Zigzag {
            n: path.n,
            density: m,
            start: scale_grid_point(path.n, m, path.src.0, path.src.1),
            end: scale_grid_point(path.n, m, path.dst.0, path.dst.1),
            departures,
            first_level: path.src.1,
            weight: path_weight(path).ok().filter(|w| w.is_finite()),
        }
    }

    pub fn last_level(&self) -> usize {
        self.first_level + self.departures.len() - 1
    }

    /// Departure at level index `level` (in `0..=n`).
    pub fn departure(&self, level: usize) -> f64 {
        self.departures[level - self.first_level]
    }

    /// Horizontal interval lengths `omega_i`: the first is `phi(s_0) - x_start`,
    /// later ones `phi(s_i) - phi(s_{i-1}) + 2^{-1} n^{-2/3}`.
    pub fn interval_lengths(&self) -> Vec<f64> {
        let u = horizontal_unit(self.n);
        let mut prev = None;
        self.departures
            .iter()
            .map(|&d| {
                let w = match prev {
                    None => d - self.start.x,
                    Some(p) => d - p + u,
                };
                prev = Some(d);
                w
            })
            .collect()
    }

    /// Check the image-of-monotonicity condition `phi(s + 1/n) >= phi(s) - 2^{-1} n^{-2/3}`.
    pub fn is_admissible(&self) -> bool {
        self.interval_lengths().iter().all(|w| *w >= -1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_endpoints() {
        let a = scale_point(8, 0.0, 0.0);
        assert_eq!((a.x, a.s), (0.0, 0.0));
        let b = scale_point(8, 8.0, 8.0);
        assert_eq!((b.x, b.s), (0.0, 1.0));
        let c = scale_point(8, 12.0, 8.0);
        assert!((c.x - 0.5).abs() < 1e-12 && c.s == 1.0);
    }

    #[test]
    fn weight_examples() {
        assert!(
            weight_from_energy(8, 16.0, 0.0, 1.0, 0.3, 0.3)
                .unwrap()
                .abs()
                < 1e-12
        );
        let w0 = weight_from_energy(8, 16.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let w1 = weight_from_energy(8, 16.5, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((w1 - w0 - 0.5 / (2f64.sqrt() * 2.0)).abs() < 1e-12);
        assert!(weight_from_energy(10, 1.0, 0.25, 0.7, 0.0, 0.0).is_err());
    }

    #[test]
    fn compatibility_clauses() {
        assert_eq!(check_compatible_triple(10, 0.2, 0.7, 0.0, 0.0), Ok(()));
        assert_eq!(
            check_compatible_triple(10, 0.25, 0.7, 0.0, 0.0),
            Err(Incompatibility::Grid)
        );
        assert_eq!(
            check_compatible_triple(8, 0.0, 1.0, 0.0, -1.01),
            Err(Incompatibility::Horizontal)
        );
        assert_eq!(check_compatible_triple(8, 0.0, 1.0, 0.0, -1.0), Ok(()));
        assert_eq!(
            check_compatible_triple(8, 0.5, 0.25, 0.0, 0.0),
            Err(Incompatibility::Order)
        );
    }
}
