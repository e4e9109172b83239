use crate::error::{Error, Result};
use crate::noise::FieldSnapshot;
use crate::scaling::{scale_grid_point, weight_from_energy, GRID_TOL};

use super::solve::{mesh_backward_values, mesh_forward_values, snap_to_grid};

/// Routed weight profile at one level, evaluated at every grid abscissa.
///
/// `z[h]` is the best weight of a route `(0,0) -> (0,1)` that leaves level
/// `level` at grid abscissa `h`: the weight of the best zigzag to `(x, a)` plus
/// that of the best zigzag from `(x - 2^{-1} n^{-2/3}, a + 1/n)` to `(0, 1)`.
/// The joining north step is not part of either piece, so `max z` exceeds the
/// polymer weight by exactly `2^{-1/2} n^{-1/3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedProfile {
    pub n: usize,
    pub m: usize,
    pub level: usize,
    /// Scaled abscissa of each grid point.
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl RoutedProfile {
    /// Index of the first maximiser.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (h, &v) in self.z.iter().enumerate() {
            if v > self.z[best] {
                best = h;
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.z[self.argmax()]
    }

    /// Scaled grid step.
    pub fn step(&self) -> f64 {
        if self.x.len() > 1 {
            self.x[1] - self.x[0]
        } else {
            0.0
        }
    }
}

/// Profile at level index `level` (`0 <= level < n`) over the whole grid.
pub fn profile_on_grid(snap: &FieldSnapshot, level: usize) -> Result<RoutedProfile> {
    let m = snap
        .kind
        .mesh_density()
        .ok_or_else(|| Error::KindMismatch("routed profile needs a mesh".into()))?;
    let n = snap.n;
    if level >= n {
        return Err(Error::OutOfRange(format!(
            "level {level} leaves no room above it (n = {n})"
        )));
    }
    let width = snap.width();
    let fwd = mesh_forward_values(snap, (0, 0), level)?;
    let bwd = mesh_backward_values(snap, level + 1, (width, n))?;
    let a = level as f64 / n as f64;
    let a_plus = (level + 1) as f64 / n as f64;
    let mut x = Vec::with_capacity(width + 1);
    let mut z = Vec::with_capacity(width + 1);
    for h in 0..=width {
        let here = scale_grid_point(n, m, h, level);
        let above = scale_grid_point(n, m, h, level + 1);
        let lower = weight_from_energy(n, fwd[h], 0.0, a, 0.0, here.x)?;
        let upper = weight_from_energy(n, bwd[h], a_plus, 1.0, above.x, 0.0)?;
        x.push(here.x);
        z.push(lower + upper);
    }
    Ok(RoutedProfile { n, m, level, x, z })
}

/// `Z_n(x, a)` for each requested scaled abscissa; points snap rightward to the mesh grid.
pub fn routed_profile(snap: &FieldSnapshot, a: f64, x_grid: &[f64]) -> Result<Vec<f64>> {
    let n = snap.n;
    let na = a * n as f64;
    if (na - na.round()).abs() > GRID_TOL || na.round() < 0.0 {
        return Err(Error::Incompatible(format!(
            "level {a} is not on the 1/n grid"
        )));
    }
    let level = na.round() as usize;
    let profile = profile_on_grid(snap, level)?;
    let m = profile.m;
    let width = snap.width();
    x_grid
        .iter()
        .map(|&x| {
            let unscaled = na + 2.0 * (n as f64).powf(2.0 / 3.0) * x;
            let h = snap_to_grid(unscaled, m)
                .map_err(|_| Error::OutOfRange(format!("x = {x} lies left of the route")))?;
            if h > width {
                return Err(Error::OutOfRange(format!(
                    "x = {x} lies right of the route"
                )));
            }
            Ok(profile.z[h])
        })
        .collect()
}
