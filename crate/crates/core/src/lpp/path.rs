use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::noise::FieldSnapshot;

/// How a path moves between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// Vertex-weighted upright path on the integer lattice.
    Upright,
    /// Edge-weighted east-north path on the mesh with `m` grid points per unit.
    EastNorth { m: usize },
}

impl Geometry {
    pub fn density(self) -> usize {
        match self {
            Geometry::Upright => 1,
            Geometry::EastNorth { m } => m,
        }
    }

    pub fn of(snap: &FieldSnapshot) -> Geometry {
        match snap.kind.mesh_density() {
            Some(m) => Geometry::EastNorth { m },
            None => Geometry::Upright,
        }
    }
}

/// A monotone lattice path stored as departure coordinates per level.
///
/// Coordinates are grid units: `(h, level)` with `h` counting horizontal grid
/// steps (`h / m` in lattice units on the mesh). On level `l` the path covers
/// `[entry(l), departure(l)]`, where the entry is the source abscissa on the
/// first level and the previous departure afterwards; the departure on the last
/// level equals the destination abscissa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePath {
    pub geometry: Geometry,
    pub n: usize,
    pub src: (usize, usize),
    pub dst: (usize, usize),
    pub departures: Vec<usize>,
    /// Energy under the field the path was computed for; `NaN` for sub-paths
    /// cut out of a larger path until they are re-evaluated.
    pub energy: f64,
}

impl LatticePath {
    pub fn new(
        geometry: Geometry,
        n: usize,
        src: (usize, usize),
        departures: Vec<usize>,
        energy: f64,
    ) -> Result<LatticePath> {
        let last = *departures
            .last()
            .ok_or_else(|| invalid("path needs at least one level"))?;
        let dst = (last, src.1 + departures.len() - 1);
        let path = LatticePath {
            geometry,
            n,
            src,
            dst,
            departures,
            energy,
        };
        path.validate()?;
        Ok(path)
    }

    pub fn density(&self) -> usize {
        self.geometry.density()
    }

    pub fn first_level(&self) -> usize {
        self.src.1
    }

    pub fn last_level(&self) -> usize {
        self.dst.1
    }

    pub fn departure(&self, level: usize) -> usize {
        self.departures[level - self.src.1]
    }

    pub fn entry(&self, level: usize) -> usize {
        if level == self.src.1 {
            self.src.0
        } else {
            self.departures[level - self.src.1 - 1]
        }
    }

    pub fn contains_level(&self, level: usize) -> bool {
        (self.src.1..=self.dst.1).contains(&level)
    }

    /// Whether the grid point `(h, level)` lies on the path.
    pub fn contains_point(&self, h: usize, level: usize) -> bool {
        self.contains_level(level) && self.entry(level) <= h && h <= self.departure(level)
    }

    pub fn validate(&self) -> Result<()> {
        let width = self.n * self.density();
        if self.dst.1 > self.n || self.dst.0 > width {
            return Err(Error::OutOfRange("path leaves the lattice".into()));
        }
        if self.departures.len() != self.dst.1 - self.src.1 + 1 {
            return Err(invalid("one departure per level is required"));
        }
        let mut prev = self.src.0;
        for &z in &self.departures {
            if z < prev {
                return Err(invalid(
                    "departures must be non-decreasing and start at or after the source",
                ));
            }
            prev = z;
        }
        if *self.departures.last().unwrap() != self.dst.0 {
            return Err(invalid(
                "last departure must equal the destination abscissa",
            ));
        }
        Ok(())
    }

    /// Number of unit grid steps.
    pub fn step_count(&self) -> usize {
        (self.dst.0 - self.src.0) + (self.dst.1 - self.src.1)
    }

    /// Step sequence; `true` is a north step.
    pub fn steps(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.step_count());
        for level in self.src.1..=self.dst.1 {
            let run = self.departure(level) - self.entry(level);
            out.extend(std::iter::repeat(false).take(run));
            if level < self.dst.1 {
                out.push(true);
            }
        }
        out
    }

    /// Grid points visited, in order.
    pub fn vertices(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.step_count() + 1);
        for level in self.src.1..=self.dst.1 {
            for h in self.entry(level)..=self.departure(level) {
                out.push((h, level));
            }
        }
        out
    }

    /// The part of the path between two of its points, which must lie on it in
    /// this order. The result carries `NaN` energy.
    pub fn subpath(&self, from: (usize, usize), to: (usize, usize)) -> Result<LatticePath> {
        if !self.contains_point(from.0, from.1) || !self.contains_point(to.0, to.1) {
            return Err(invalid("sub-path endpoints must lie on the path"));
        }
        if to.1 < from.1 || (to.1 == from.1 && to.0 < from.0) {
            return Err(invalid("sub-path endpoints out of order"));
        }
        let mut deps: Vec<usize> = (from.1..to.1).map(|l| self.departure(l)).collect();
        deps.push(to.0);
        LatticePath::new(self.geometry, self.n, from, deps, f64::NAN)
    }

    /// Concatenate two edge-weighted paths meeting at `self.dst == other.src`.
    ///
    /// Energies add because the two pieces share no edge. Vertex-weighted paths
    /// would count the junction twice and are rejected.
    pub fn concat(&self, other: &LatticePath) -> Result<LatticePath> {
        if self.geometry == Geometry::Upright {
            return Err(Error::KindMismatch(
                "concatenation needs edge weights".into(),
            ));
        }
        if self.geometry != other.geometry || self.n != other.n || self.dst != other.src {
            return Err(invalid("paths do not meet"));
        }
        let mut deps = self.departures[..self.departures.len() - 1].to_vec();
        deps.extend_from_slice(&other.departures);
        LatticePath::new(
            self.geometry,
            self.n,
            self.src,
            deps,
            self.energy + other.energy,
        )
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Re-sum the field along a path.
pub fn path_energy(snap: &FieldSnapshot, path: &LatticePath) -> Result<f64> {
    check_geometry(snap, path)?;
    let mut acc = CompensatedSum::default();
    match path.geometry {
        Geometry::Upright => {
            for (x, y) in path.vertices() {
                acc.add(snap.vertex(x, y));
            }
        }
        Geometry::EastNorth { .. } => {
            for level in path.src.1..=path.dst.1 {
                for u in path.entry(level)..path.departure(level) {
                    acc.add(snap.edge(u, level));
                }
            }
        }
    }
    Ok(acc.value())
}

pub(crate) fn check_geometry(snap: &FieldSnapshot, path: &LatticePath) -> Result<()> {
    if Geometry::of(snap) != path.geometry || snap.n != path.n {
        return Err(Error::KindMismatch(
            "path and field disagree on geometry".into(),
        ));
    }
    Ok(())
}
