//! Auxiliary last passage models: three-way-up lattice paths, Poissonian LPP
//! and the upper-tail rate function for the latter.

use rand::Rng;
use rand_distr::Poisson;

use crate::error::{invalid, Error, Result};
use crate::rng::{self, Tag};

/// Maximum number of open vertices on a path from `(0, 0)` to `(0, K)` whose
/// steps go to `v + (-1, 1)`, `v + (0, 1)` or `v + (1, 1)`.
///
/// `open[k][c]` is the bit at height `k` and horizontal position `c - c0`,
/// where `c0 = (width - 1) / 2`; there are `K + 1` rows and the odd width must
/// cover the cone `|u| <= K`.
pub fn three_way_up_energy(open: &[Vec<bool>]) -> Result<u64> {
    if open.len() < 2 {
        return Err(invalid("need K >= 1, i.e. at least two rows"));
    }
    let k_max = open.len() - 1;
    let width = open[0].len();
    if width % 2 == 0 || open.iter().any(|r| r.len() != width) {
        return Err(invalid("rows must share one odd width"));
    }
    let c0 = (width - 1) / 2;
    if c0 < k_max {
        return Err(invalid("width does not cover the reachable cone"));
    }
    const NONE: i64 = i64::MIN / 2;
    let mut cur = vec![NONE; width];
    cur[c0] = i64::from(open[0][c0]);
    for row in &open[1..] {
        let mut next = vec![NONE; width];
        for c in 0..width {
            let lo = c.saturating_sub(1);
            let hi = (c + 1).min(width - 1);
            let best = cur[lo..=hi].iter().copied().max().unwrap();
            if best > NONE {
                next[c] = best + i64::from(row[c]);
            }
        }
        cur = next;
    }
    Ok(cur[c0] as u64)
}

/// A finite planar point cloud.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet2D {
    pub points: Vec<(f64, f64)>,
}

impl PointSet2D {
    pub fn new(points: Vec<(f64, f64)>) -> PointSet2D {
        PointSet2D { points }
    }

    /// Smallest axis-parallel box `((x_lo, y_lo), (x_hi, y_hi))` containing the points.
    pub fn bounding_box(&self) -> Option<((f64, f64), (f64, f64))> {
        let first = *self.points.first()?;
        Some(
            self.points
                .iter()
                .fold((first, first), |((a, b), (c, d)), &(x, y)| {
                    ((a.min(x), b.min(y)), (c.max(x), d.max(y)))
                }),
        )
    }

    /// Poisson cloud of the given intensity on `[x0, x1] x [y0, y1]`.
    pub fn sample_poisson(
        x: (f64, f64),
        y: (f64, f64),
        intensity: f64,
        seed: u64,
        stream_id: u64,
    ) -> Result<PointSet2D> {
        let area = (x.1 - x.0) * (y.1 - y.0);
        if !(area > 0.0) || !(intensity > 0.0) {
            return Err(invalid(
                "need a box of positive area and positive intensity",
            ));
        }
        let mut rng = rng::stream(seed, stream_id, Tag::Aux, 0);
        let count = rng.sample(Poisson::new(intensity * area).map_err(|e| invalid(e.to_string()))?)
            as usize;
        let points = (0..count)
            .map(|_| (rng.gen_range(x.0..x.1), rng.gen_range(y.0..y.1)))
            .collect();
        Ok(PointSet2D { points })
    }
}

/// Whether `q` can follow `p` on a directed path: every segment lies within
/// 45 degrees of vertical.
#[inline]
pub fn directed_step(p: (f64, f64), q: (f64, f64)) -> bool {
    q.1 >= p.1 && (q.0 - p.0).abs() <= q.1 - p.1
}

/// Maximum number of cloud points collectable on a directed path from `src`
/// to `dst`.
pub fn poisson_lpp_energy(points: &PointSet2D, src: (f64, f64), dst: (f64, f64)) -> Result<usize> {
    if !(dst.1 > src.1) {
        return Err(Error::Incompatible(
            "destination must lie strictly above the source".into(),
        ));
    }
    if !directed_step(src, dst) {
        return Err(Error::Incompatible(
            "no directed path joins the endpoints".into(),
        ));
    }
    let mut inside: Vec<(f64, f64)> = points
        .points
        .iter()
        .copied()
        .filter(|&p| directed_step(src, p) && directed_step(p, dst))
        .collect();
    inside.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let mut chain = vec![1usize; inside.len()];
    for i in 0..inside.len() {
        for j in 0..i {
            if chain[j] + 1 > chain[i] && directed_step(inside[j], inside[i]) {
                chain[i] = chain[j] + 1;
            }
        }
    }
    Ok(chain.into_iter().max().unwrap_or(0))
}

/// Upper-tail large deviation rate `I(x) = 2x arccosh(x/2) - 2 sqrt(x^2 - 4)`
/// for `x >= 2`.
pub fn seppalainen_rate(x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::OutOfRange(format!(
            "rate function needs x >= 2, got {x}"
        )));
    }
    Ok(2.0 * x * (x / 2.0).acosh() - 2.0 * (x * x - 4.0).sqrt())
}
