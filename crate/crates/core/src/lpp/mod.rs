//! Last passage percolation solvers.
//!
//! Exact dynamic programming for vertex-weighted upright paths and
//! edge-weighted east-north mesh paths, a brute-force oracle, mesh coarsening,
//! the routed weight profile, and the auxiliary three-way-up and Poissonian
//! models.

mod path;
mod profile;
mod solve;
mod variants;

pub use path::{path_energy, CompensatedSum, Geometry, LatticePath};
pub use profile::{profile_on_grid, routed_profile, RoutedProfile};
pub use solve::{
    brute_force_energy, coarsen_mesh, max_energy_mesh, max_energy_mesh_grid, max_energy_upright,
    mesh_backward_values, mesh_forward_values, path_count, snap_to_grid, BRUTE_FORCE_LIMIT,
};
pub use variants::{
    directed_step, poisson_lpp_energy, seppalainen_rate, three_way_up_energy, PointSet2D,
};

use crate::error::Result;
use crate::noise::FieldSnapshot;

/// Geodesic over the full route `(0,0) -> (n,n)` for any field kind.
pub fn geodesic(snap: &FieldSnapshot) -> Result<LatticePath> {
    let top = (snap.width(), snap.n);
    let (_, path) = if snap.kind.is_lattice() {
        max_energy_upright(snap, (0, 0), top)?
    } else {
        max_energy_mesh_grid(snap, (0, 0), top)?
    };
    Ok(path)
}

/// Geodesic between two grid points for any field kind.
pub fn geodesic_between(
    snap: &FieldSnapshot,
    src: (usize, usize),
    dst: (usize, usize),
) -> Result<LatticePath> {
    let (_, path) = if snap.kind.is_lattice() {
        max_energy_upright(snap, src, dst)?
    } else {
        max_energy_mesh_grid(snap, src, dst)?
    };
    Ok(path)
}

#[cfg(test)]
mod tests;
