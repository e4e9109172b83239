use crate::error::{invalid, Error, Result};
use crate::noise::{FieldSnapshot, Kind};

use super::path::{path_energy, CompensatedSum, Geometry, LatticePath};

fn require_lattice(snap: &FieldSnapshot) -> Result<()> {
    if !snap.kind.is_lattice() {
        return Err(Error::KindMismatch("expected a lattice field".into()));
    }
    Ok(())
}

fn require_mesh(snap: &FieldSnapshot) -> Result<usize> {
    snap.kind
        .mesh_density()
        .ok_or_else(|| Error::KindMismatch("expected a mesh field".into()))
}

fn check_route(snap: &FieldSnapshot, src: (usize, usize), dst: (usize, usize)) -> Result<()> {
    let width = snap.width();
    for (h, l) in [src, dst] {
        if h > width || l > snap.n {
            return Err(Error::OutOfRange(format!(
                "point ({h}, {l}) outside the lattice"
            )));
        }
    }
    if dst.0 < src.0 || dst.1 < src.1 {
        return Err(Error::Incompatible(format!(
            "{dst:?} is not above and right of {src:?}"
        )));
    }
    Ok(())
}

/// Maximum vertex-weight sum over upright paths from `src` to `dst`, with the
/// uppermost geodesic.
pub fn max_energy_upright(
    snap: &FieldSnapshot,
    src: (usize, usize),
    dst: (usize, usize),
) -> Result<(f64, LatticePath)> {
    require_lattice(snap)?;
    check_route(snap, src, dst)?;
    let (sx, sy) = src;
    let (dx, dy) = dst;
    let w = dx - sx + 1;
    let h = dy - sy + 1;
    let mut v = vec![0.0f64; w * h];

    let row0 = &snap.row(sy)[sx..=dx];
    let mut acc = 0.0;
    for (c, &val) in row0.iter().enumerate() {
        acc += val;
        v[c] = acc;
    }
    for r in 1..h {
        let row = &snap.row(sy + r)[sx..=dx];
        let (prev, cur) = v.split_at_mut(r * w);
        let below = &prev[(r - 1) * w..];
        let cur = &mut cur[..w];
        cur[0] = below[0] + row[0];
        for c in 1..w {
            cur[c] = row[c] + cur[c - 1].max(below[c]);
        }
    }

    // Backtrack, preferring the left neighbour so the path stays as high as possible.
    let mut deps = vec![0usize; h];
    deps[h - 1] = dx;
    let (mut r, mut c) = (h - 1, w - 1);
    while r > 0 || c > 0 {
        if c > 0 && (r == 0 || v[r * w + c - 1] >= v[(r - 1) * w + c]) {
            c -= 1;
        } else {
            r -= 1;
            deps[r] = sx + c;
        }
    }
    let energy = v[w * h - 1];
    let path = LatticePath {
        geometry: Geometry::Upright,
        n: snap.n,
        src,
        dst,
        departures: deps,
        energy,
    };
    Ok((energy, path))
}

/// Prefix sums of level `level` between grid abscissae `lo` and `hi`:
/// `out[k] = sum of edges [lo, lo + k)`.
fn level_prefix(snap: &FieldSnapshot, level: usize, lo: usize, hi: usize, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(hi - lo + 1);
    let row = &snap.row(level)[lo..hi];
    let mut acc = CompensatedSum::default();
    out.push(0.0);
    for &x in row {
        acc.add(x);
        out.push(acc.value());
    }
}

/// Snap a real abscissa rightward to the mesh grid.
pub fn snap_to_grid(x: f64, m: usize) -> Result<usize> {
    if !x.is_finite() || x < -1e-9 {
        return Err(Error::OutOfRange(format!(
            "abscissa {x} is not a non-negative real"
        )));
    }
    Ok(((x * m as f64) - 1e-9).ceil().max(0.0) as usize)
}

/// Maximum edge-weight sum over east-north mesh paths between real endpoints
/// `(x, i)` and `(y, j)`; abscissae snap rightward to the grid.
pub fn max_energy_mesh(
    snap: &FieldSnapshot,
    src: (f64, usize),
    dst: (f64, usize),
) -> Result<(f64, LatticePath)> {
    let m = require_mesh(snap)?;
    let hs = snap_to_grid(src.0, m)?;
    let hd = snap_to_grid(dst.0, m)?;
    max_energy_mesh_grid(snap, (hs, src.1), (hd, dst.1))
}

/// As [`max_energy_mesh`] with endpoints already in grid units.
pub fn max_energy_mesh_grid(
    snap: &FieldSnapshot,
    src: (usize, usize),
    dst: (usize, usize),
) -> Result<(f64, LatticePath)> {
    let m = require_mesh(snap)?;
    check_route(snap, src, dst)?;
    let (hx, a) = src;
    let (hy, b) = dst;
    let span = hy - hx + 1;
    let mut prefix = Vec::new();
    level_prefix(snap, a, hx, hy, &mut prefix);
    let mut f = prefix.clone();
    let mut arg = vec![0u32; (b - a) * span];
    for level in a + 1..=b {
        level_prefix(snap, level, hx, hy, &mut prefix);
        let row = &mut arg[(level - a - 1) * span..(level - a) * span];
        let mut best = f64::NEG_INFINITY;
        let mut best_k = 0u32;
        for k in 0..span {
            let cand = f[k] - prefix[k];
            // strict comparison keeps the earliest north step on ties
            if cand > best {
                best = cand;
                best_k = k as u32;
            }
            row[k] = best_k;
            f[k] = best + prefix[k];
        }
    }
    let energy = f[span - 1];
    let mut deps = vec![0usize; b - a + 1];
    deps[b - a] = hy;
    let mut k = span - 1;
    for level in (a + 1..=b).rev() {
        k = arg[(level - a - 1) * span + k] as usize;
        deps[level - a - 1] = hx + k;
    }
    let path = LatticePath {
        geometry: Geometry::EastNorth { m },
        n: snap.n,
        src,
        dst,
        departures: deps,
        energy,
    };
    Ok((energy, path))
}

/// Maximum energy from the grid point `src` to `(h, last_level)` for every
/// `h` in `[src.0, width]`; entry `k` corresponds to `h = src.0 + k`.
pub fn mesh_forward_values(
    snap: &FieldSnapshot,
    src: (usize, usize),
    last_level: usize,
) -> Result<Vec<f64>> {
    require_mesh(snap)?;
    let width = snap.width();
    check_route(snap, src, (width, last_level))?;
    let (hx, a) = src;
    let mut prefix = Vec::new();
    level_prefix(snap, a, hx, width, &mut prefix);
    let mut f = prefix.clone();
    for level in a + 1..=last_level {
        level_prefix(snap, level, hx, width, &mut prefix);
        let mut best = f64::NEG_INFINITY;
        for k in 0..f.len() {
            best = best.max(f[k] - prefix[k]);
            f[k] = best + prefix[k];
        }
    }
    Ok(f)
}

/// Maximum energy from `(h, first_level)` to the grid point `dst` for every
/// `h` in `[0, dst.0]`; entry `h` corresponds to abscissa `h`.
pub fn mesh_backward_values(
    snap: &FieldSnapshot,
    first_level: usize,
    dst: (usize, usize),
) -> Result<Vec<f64>> {
    require_mesh(snap)?;
    check_route(snap, (0, first_level), dst)?;
    let (hy, b) = dst;
    let mut prefix = Vec::new();
    level_prefix(snap, b, 0, hy, &mut prefix);
    let total = prefix[hy];
    let mut g: Vec<f64> = prefix.iter().map(|p| total - p).collect();
    for level in (first_level..b).rev() {
        level_prefix(snap, level, 0, hy, &mut prefix);
        let mut best = f64::NEG_INFINITY;
        for h in (0..=hy).rev() {
            best = best.max(prefix[h] + g[h]);
            g[h] = best - prefix[h];
        }
    }
    Ok(g)
}

/// Largest number of paths [`brute_force_energy`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Number of monotone paths with the given horizontal and vertical extents.
pub fn path_count(horizontal: usize, vertical: usize) -> Option<u64> {
    let k = horizontal.min(vertical) as u128;
    let total = (horizontal + vertical) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (total - i) / (i + 1);
        if c > u64::MAX as u128 {
            return None;
        }
    }
    Some(c as u64)
}

/// Exhaustive maximum over all admissible paths between grid points.
pub fn brute_force_energy(
    snap: &FieldSnapshot,
    src: (usize, usize),
    dst: (usize, usize),
) -> Result<f64> {
    check_route(snap, src, dst)?;
    let count = path_count(dst.0 - src.0, dst.1 - src.1);
    match count {
        Some(c) if c <= BRUTE_FORCE_LIMIT => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "more than {BRUTE_FORCE_LIMIT} paths"
            )))
        }
    }
    let geometry = Geometry::of(snap);
    let levels = dst.1 - src.1 + 1;
    let mut deps = vec![0usize; levels];
    deps[levels - 1] = dst.0;
    let mut best = f64::NEG_INFINITY;
    enumerate(snap, geometry, src, dst, &mut deps, 0, src.0, &mut best)?;
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    snap: &FieldSnapshot,
    geometry: Geometry,
    src: (usize, usize),
    dst: (usize, usize),
    deps: &mut Vec<usize>,
    idx: usize,
    lo: usize,
    best: &mut f64,
) -> Result<()> {
    if idx + 1 == deps.len() {
        let path = LatticePath {
            geometry,
            n: snap.n,
            src,
            dst,
            departures: deps.clone(),
            energy: f64::NAN,
        };
        let e = path_energy(snap, &path)?;
        if e > *best {
            *best = e;
        }
        return Ok(());
    }
    for z in lo..=dst.0 {
        deps[idx] = z;
        enumerate(snap, geometry, src, dst, deps, idx + 1, z, best)?;
    }
    Ok(())
}

/// Sum adjacent groups of `factor` fine increments into one coarse increment.
pub fn coarsen_mesh(snap: &FieldSnapshot, factor: usize) -> Result<FieldSnapshot> {
    let m = require_mesh(snap)?;
    if factor == 0 || m % factor != 0 {
        return Err(invalid(format!("density {m} is not divisible by {factor}")));
    }
    let coarse = m / factor;
    let values: Vec<f64> = snap
        .values
        .chunks_exact(factor)
        .map(|c| c.iter().sum())
        .collect();
    Ok(FieldSnapshot {
        kind: Kind::BrownianMesh { m: coarse },
        n: snap.n,
        t: snap.t,
        values,
    })
}
