//! Weight stability under short dynamics, and the mesh refinement coupling.

use rand::seq::index::sample as sample_indices;
use serde::Serialize;
use serde_json::json;

use super::stats::{quantile_sorted, sorted};
use super::{map_samples, CheckReport, Estimate, Quantity, Relation};
use crate::error::{invalid, Error, Result};
use crate::lpp::{
    coarsen_mesh, geodesic, max_energy_mesh, max_energy_mesh_grid, path_energy, Geometry,
    LatticePath,
};
use crate::noise::{make_env, FieldSnapshot, Kind};
use crate::rng::{derive, stream, Tag};
use crate::scaling::{
    check_compatible_triple, path_weight_with_energy, scale_grid_point, scale_point,
    weight_from_energy,
};

fn mesh_kind(m: usize) -> Result<Kind> {
    Kind::from_parts(crate::noise::Model::BrownianMesh, Some(m), None)
}

/// `E |M^t - M^0|^2 <= 2 |y - x| t` for a fixed pair of real endpoints `(x, i)`, `(y, j)`.
pub fn check_weight_stability(
    n: usize,
    m: usize,
    src: (f64, usize),
    dst: (f64, usize),
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<(CheckReport, Estimate)> {
    let kind = mesh_kind(m)?;
    let a = scale_point(n, src.0, src.1 as f64);
    let b = scale_point(n, dst.0, dst.1 as f64);
    check_compatible_triple(n, a.s, b.s, a.x, b.x)
        .map_err(|why| Error::Incompatible(format!("endpoints {src:?} -> {dst:?}: {why:?}")))?;
    if !(t >= 0.0) {
        return Err(invalid("t must be non-negative"));
    }
    let stream_seed = derive(seed, "weight-stability", (t * 1e9).round() as u64);
    let sq = map_samples(samples, |i| {
        let mut env = make_env(kind, n, stream_seed, i as u64)?;
        let (e0, _) = max_energy_mesh(env.current(), src, dst)?;
        env.advance(t)?;
        let (et, _) = max_energy_mesh(env.current(), src, dst)?;
        Ok((et - e0).powi(2))
    })?;
    let est = Estimate::from_samples(&sq, seed);
    let bound = 2.0 * (dst.0 - src.0).abs() * t;
    let report = CheckReport::new(
        format!("weight-stability n={n} m={m} t={t}"),
        Quantity::Estimate(est),
        Quantity::Exact(bound),
        Relation::AtMost,
        3.0 * est.sem,
        "3 standard errors",
    );
    Ok((report, est))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityGrid {
    /// Per-sample sup over the endpoint grid of `s12^{-1/3} |Wgt^t - Wgt^0|`.
    pub sup_values: Vec<f64>,
    pub quantiles: Vec<(f64, f64)>,
    pub pairs: usize,
}

/// Distribution of the endpoint-uniform stability statistic over a grid of
/// `levels + 1` heights and scaled abscissae `xs`. Measurement only.
pub fn stability_grid(
    n: usize,
    m: usize,
    levels: usize,
    xs: &[f64],
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<StabilityGrid> {
    let kind = mesh_kind(m)?;
    if levels == 0 || n % levels != 0 {
        return Err(invalid("level count must divide n"));
    }
    let n23 = (n as f64).powf(2.0 / 3.0);
    let width = n * m;
    // grid points (h, level) for each height and abscissa that land inside the lattice
    let mut points = Vec::new();
    for k in 0..=levels {
        let level = k * n / levels;
        for &x in xs {
            let v1 = level as f64 + 2.0 * n23 * x;
            let h = (v1 * m as f64).round();
            if h >= 0.0 && h <= width as f64 {
                points.push((h as usize, level));
            }
        }
    }
    let mut pairs = Vec::new();
    for &p in &points {
        for &q in &points {
            if q.1 > p.1 && q.0 >= p.0 {
                pairs.push((p, q));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Degenerate("no compatible endpoint pairs".into()));
    }
    let stream_seed = derive(seed, "stability-grid", n as u64);
    let sup_values = map_samples(samples, |i| {
        let mut env = make_env(kind, n, stream_seed, i as u64)?;
        let snap0 = env.current().clone();
        env.advance(t)?;
        let snapt = env.current();
        let mut sup = 0.0f64;
        for &(p, q) in &pairs {
            let (e0, _) = max_energy_mesh_grid(&snap0, p, q)?;
            let (et, _) = max_energy_mesh_grid(snapt, p, q)?;
            let a = scale_grid_point(n, m, p.0, p.1);
            let b = scale_grid_point(n, m, q.0, q.1);
            let w0 = weight_from_energy(n, e0, a.s, b.s, a.x, b.x)?;
            let wt = weight_from_energy(n, et, a.s, b.s, a.x, b.x)?;
            sup = sup.max((wt - w0).abs() / (b.s - a.s).cbrt());
        }
        Ok(sup)
    })?;
    let s = sorted(&sup_values);
    let quantiles = [0.1, 0.5, 0.9, 0.99]
        .iter()
        .map(|&q| (q, quantile_sorted(&s, q)))
        .collect();
    Ok(StabilityGrid {
        sup_values,
        quantiles,
        pairs: pairs.len(),
    })
}

fn random_mesh_path(n: usize, m: usize, seed: u64, sample: u64, index: u64) -> Result<LatticePath> {
    let mut rng = stream(seed, sample, Tag::Aux, index);
    let steps = n * m + n;
    let mut norths = sample_indices(&mut rng, steps, n).into_vec();
    norths.sort_unstable();
    // the k-th north step at position p leaves its level at abscissa p - k
    let mut deps: Vec<usize> = norths.iter().enumerate().map(|(k, &p)| p - k).collect();
    deps.push(n * m);
    LatticePath::new(Geometry::EastNorth { m }, n, (0, 0), deps, f64::NAN)
}

/// Largest `|Wgt^t - Wgt^0|` over both polymers and `random_paths` uniformly
/// random zigzags per sample, against `4 n^{1/2}`.
pub fn check_crude_stability(
    n: usize,
    m: usize,
    t: f64,
    random_paths: usize,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let kind = mesh_kind(m)?;
    let stream_seed = derive(seed, "crude-stability", n as u64);
    let worst = map_samples(samples, |i| {
        let mut env = make_env(kind, n, stream_seed, i as u64)?;
        let snap0 = env.current().clone();
        env.advance(t)?;
        let snapt = env.current();
        let mut paths = vec![geodesic(&snap0)?, geodesic(snapt)?];
        for r in 0..random_paths {
            paths.push(random_mesh_path(n, m, stream_seed, i as u64, r as u64)?);
        }
        let mut worst = 0.0f64;
        for p in &paths {
            let w0 = path_weight_with_energy(p, path_energy(&snap0, p)?)?;
            let wt = path_weight_with_energy(p, path_energy(snapt, p)?)?;
            worst = worst.max((wt - w0).abs());
        }
        Ok(worst)
    })?;
    let sup = worst.iter().copied().fold(0.0, f64::max);
    Ok(CheckReport::new(
        format!("crude-stability n={n} m={m} t={t}"),
        Quantity::Exact(sup),
        Quantity::Exact(4.0 * (n as f64).sqrt()),
        Relation::AtMost,
        0.0,
        "observed supremum",
    ))
}

/// Resolution of the finest field: every value is a multiple of `2^-40`, so all
/// partial sums in the coupling are exact.
pub const REFINEMENT_QUANTUM: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementInstance {
    pub m_list: Vec<usize>,
    pub energies: Vec<f64>,
    /// `Osc(m)` for each density in the chain.
    pub osc: Vec<f64>,
}

impl RefinementInstance {
    pub fn monotone_violations(&self) -> usize {
        self.energies.windows(2).filter(|w| w[0] > w[1]).count()
    }

    pub fn oscillation_violations(&self, n: usize) -> usize {
        let top = *self.energies.last().unwrap();
        self.energies
            .iter()
            .zip(&self.osc)
            .filter(|(e, o)| top - **e > 2.0 * n as f64 * **o)
            .count()
    }
}

fn check_chain(m_list: &[usize]) -> Result<()> {
    if m_list.is_empty() || m_list[0] == 0 {
        return Err(invalid("refinement chain must be non-empty and positive"));
    }
    if m_list.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(invalid("refinement chain must double at every step"));
    }
    Ok(())
}

/// Largest range of fine partial sums inside one coarse cell, endpoints included.
fn oscillation(fine: &FieldSnapshot, factor: usize) -> f64 {
    let mut osc = 0.0f64;
    for level in 0..=fine.n {
        for cell in fine.row(level).chunks_exact(factor) {
            let (mut acc, mut lo, mut hi) = (0.0f64, 0.0f64, 0.0f64);
            for &v in cell {
                acc += v;
                lo = lo.min(acc);
                hi = hi.max(acc);
            }
            osc = osc.max(hi - lo);
        }
    }
    osc
}

/// Geodesic energies and oscillations along a coarsening chain of a fine field.
pub fn refinement_instance(fine: &FieldSnapshot, m_list: &[usize]) -> Result<RefinementInstance> {
    check_chain(m_list)?;
    let m_max = *m_list.last().unwrap();
    if fine.kind != (Kind::BrownianMesh { m: m_max }) {
        return Err(Error::KindMismatch(
            "fine field must be a mesh at the top density".into(),
        ));
    }
    let mut energies = Vec::with_capacity(m_list.len());
    let mut osc = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let factor = m_max / m;
        let coarse = coarsen_mesh(fine, factor)?;
        energies.push(geodesic(&coarse)?.energy);
        osc.push(oscillation(fine, factor));
    }
    Ok(RefinementInstance {
        m_list: m_list.to_vec(),
        energies,
        osc,
    })
}

/// `M[m] <= M[2m]` and `M[m_max] - M[m] <= 2 n Osc(m)` on every coupled sample.
pub fn refinement_check(
    n: usize,
    m_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<(CheckReport, Vec<RefinementInstance>)> {
    check_chain(m_list)?;
    let kind = mesh_kind(*m_list.last().unwrap())?;
    let stream_seed = derive(seed, "refinement", n as u64);
    let instances = map_samples(samples, |i| {
        let env = make_env(kind, n, stream_seed, i as u64)?;
        let mut fine = env.current().clone();
        for v in fine.values.iter_mut() {
            *v = (*v / REFINEMENT_QUANTUM).round() * REFINEMENT_QUANTUM;
        }
        refinement_instance(&fine, m_list)
    })?;
    let mono: usize = instances.iter().map(|r| r.monotone_violations()).sum();
    let osc: usize = instances.iter().map(|r| r.oscillation_violations(n)).sum();
    let report = CheckReport::new(
        format!("refinement n={n} m={m_list:?}"),
        Quantity::Exact((mono + osc) as f64),
        Quantity::Exact(0.0),
        Relation::AtMost,
        0.0,
        "exact; no violating instance",
    )
    .with_details(
        json!({ "monotone_violations": mono, "oscillation_violations": osc, "samples": samples }),
    );
    Ok((report, instances))
}
