//! Time-zero proxy of the time-`t` polymer.
//!
//! Points are marked on `rho^t` at roughly every `2^{-m}` of height, with the
//! endpoints of retained scale-`ell` excursions added in, and consecutive marks
//! are joined by time-zero point-to-point polymers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::excursion::{classify_excursion, excursion_decompose, ClassifyParams, ExcursionRecord};
use crate::geometry::max_dist;
use crate::lpp::{geodesic, geodesic_between, LatticePath};
use crate::noise::FieldSnapshot;
use crate::scaling::{path_weight, path_weight_with_energy, Zigzag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProxyParams {
    pub ell: u32,
    pub eta: f64,
    /// Only excursions living inside `[xi, 1 - xi]` are candidates.
    pub xi: f64,
    pub tau0: f64,
    pub alpha: f64,
    pub chi: f64,
}

impl Default for ProxyParams {
    fn default() -> Self {
        ProxyParams {
            ell: 1,
            eta: 0.3,
            xi: 0.05,
            tau0: 0.1,
            alpha: 0.1,
            chi: 0.5,
        }
    }
}

impl ProxyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid("eta must be positive"));
        }
        if !(self.xi > 0.0 && self.xi < 0.5) {
            return Err(invalid("xi must lie in (0, 1/2)"));
        }
        if !(self.tau0 > 0.0 && self.tau0 < 1.0) {
            return Err(invalid("tau0 must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Interpolation scale `m` with `2^{-m}` closest to `2^{-ell} tau0^eta`.
    pub fn interp_scale(&self, n: usize) -> Result<u32> {
        self.validate()?;
        let m = (self.ell as f64 + self.eta * (1.0 / self.tau0).log2()).round() as u32;
        if m < self.ell || m >= usize::BITS || (1usize << m) > n {
            return Err(Error::Infeasible(format!(
                "interpolation scale 2^-{m} is finer than the lattice at n={n}"
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProxyResult {
    pub proxy: LatticePath,
    /// Interpolation points `(horizontal index, level)`, bottom to top.
    pub interpolation_points: Vec<(usize, usize)>,
    pub candidates: usize,
    pub retained: Vec<ExcursionRecord>,
    pub discarded_count: usize,
    pub m: u32,
    pub rho0: LatticePath,
    pub rhot: LatticePath,
}

impl ProxyResult {
    pub fn interpolation_levels(&self) -> Vec<usize> {
        self.interpolation_points.iter().map(|p| p.1).collect()
    }
}

/// The retain/discard scan over lifetimes `(b_level, f_level)` sorted by start.
/// An element is discarded iff the previous one was retained and its start is
/// within `2^{-m}` of that one's end.
pub fn retain_scan(lifetimes: &[(usize, usize)], n: usize, m: u32) -> Vec<bool> {
    let mut out = Vec::with_capacity(lifetimes.len());
    let mut prev: Option<(usize, bool)> = None;
    for &(b, f) in lifetimes {
        let discard = match prev {
            Some((pf, true)) => (b.saturating_sub(pf) << m) <= n,
            _ => false,
        };
        out.push(!discard);
        prev = Some((f, !discard));
    }
    out
}

/// Levels `floor(n 2^{-m} k)` for `k = 0..=2^m`.
pub fn base_levels(n: usize, m: u32) -> Vec<usize> {
    (0..=(1usize << m)).map(|k| (n * k) >> m).collect()
}

/// Interpolation levels: base levels minus any consecutive pair strictly
/// straddling a retained endpoint, plus the endpoints themselves. Gaps wider
/// than `2^{1-m} + 2/n` left behind by adjacent removals are split at the midpoint.
pub fn interpolation_levels(n: usize, m: u32, endpoints: &[usize]) -> Vec<usize> {
    let j = base_levels(n, m);
    let mut keep = vec![true; j.len()];
    for &e in endpoints {
        if let Some(k) = j.windows(2).position(|w| w[0] < e && e < w[1]) {
            keep[k] = false;
            keep[k + 1] = false;
        }
    }
    keep[0] = true;
    *keep.last_mut().unwrap() = true;
    let mut levels: Vec<usize> = j
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(l, _)| *l)
        .collect();
    levels.extend_from_slice(endpoints);
    levels.sort_unstable();
    levels.dedup();
    // gap * 2^m > 2n + 2^{m+1}
    let too_wide = |a: usize, b: usize| ((b - a) << m) > 2 * n + (2usize << m);
    loop {
        let Some(k) = levels.windows(2).position(|w| too_wide(w[0], w[1])) else {
            break;
        };
        levels.insert(k + 1, (levels[k] + levels[k + 1]) / 2);
    }
    levels
}

pub fn build_proxy(
    snap0: &FieldSnapshot,
    snapt: &FieldSnapshot,
    params: &ProxyParams,
) -> Result<ProxyResult> {
    if snap0.kind != snapt.kind || snap0.n != snapt.n {
        return Err(Error::KindMismatch(
            "snapshots come from different environments".into(),
        ));
    }
    if snap0.kind.is_lattice() {
        return Err(Error::KindMismatch(
            "the proxy joins edge-weighted mesh polymers".into(),
        ));
    }
    if snapt.t < snap0.t {
        return Err(Error::TimeRegression {
            clock: snap0.t,
            requested: snapt.t,
        });
    }
    let n = snap0.n;
    let m = params.interp_scale(n)?;
    let rho0 = geodesic(snap0)?;
    let rhot = geodesic(snapt)?;

    let classify = ClassifyParams::new(params.alpha, params.chi, params.tau0);
    let lo = (params.xi * n as f64).ceil() as usize;
    let hi = ((1.0 - params.xi) * n as f64).floor() as usize;
    let mut candidates: Vec<ExcursionRecord> = excursion_decompose(&rho0, &rhot)?
        .into_iter()
        .filter(|e| e.scale == params.ell && e.b_level >= lo && e.f_level <= hi)
        .collect();
    candidates.sort_by_key(|e| (e.b_level, e.start.0));
    let lifetimes: Vec<(usize, usize)> =
        candidates.iter().map(|e| (e.b_level, e.f_level)).collect();
    let keep = retain_scan(&lifetimes, n, m);
    let total = candidates.len();
    let mut retained = Vec::new();
    for (mut e, k) in candidates.into_iter().zip(keep) {
        if k {
            e.flags = classify_excursion(&e, &classify)?;
            e.flags.retained = true;
            retained.push(e);
        }
    }

    let mut marks: BTreeMap<usize, usize> = BTreeMap::new();
    let endpoints: Vec<usize> = retained
        .iter()
        .flat_map(|e| [e.b_level, e.f_level])
        .collect();
    for level in interpolation_levels(n, m, &endpoints) {
        marks.insert(level, rhot.departure(level));
    }
    marks.insert(0, 0);
    marks.insert(n, snap0.width());
    for e in &retained {
        marks.insert(e.b_level, e.start.0);
        marks.insert(e.f_level, e.end.0);
    }
    let points: Vec<(usize, usize)> = marks.into_iter().map(|(l, h)| (h, l)).collect();

    let mut proxy: Option<LatticePath> = None;
    for w in points.windows(2) {
        let seg = geodesic_between(snap0, w[0], w[1])?;
        proxy = Some(match proxy {
            None => seg,
            Some(p) => p.concat(&seg)?,
        });
    }
    let proxy = proxy.ok_or_else(|| Error::Degenerate("no interpolation segments".into()))?;
    Ok(ProxyResult {
        proxy,
        interpolation_points: points,
        candidates: total,
        discarded_count: total - retained.len(),
        retained,
        m,
        rho0,
        rhot,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProxyReport {
    /// `|Wgt^0(proxy) - Wgt^t(rho^t)|`.
    pub weight_gap: f64,
    /// `|Wgt^0(rho^t) - Wgt^t(rho^t)|`, the cost of reusing `rho^t` at time zero.
    pub baseline_gap: f64,
    pub retention_fraction: f64,
    pub max_dist_to_rho_t: f64,
    pub normal_retained: usize,
}

pub fn proxy_report(
    result: &ProxyResult,
    snap0: &FieldSnapshot,
    snapt: &FieldSnapshot,
) -> Result<ProxyReport> {
    if result.rho0.n != snap0.n || snap0.n != snapt.n {
        return Err(Error::KindMismatch(
            "result does not match the snapshots".into(),
        ));
    }
    let proxy_weight = path_weight(&result.proxy)?;
    let wt = path_weight_with_energy(&result.rhot, crate::lpp::path_energy(snapt, &result.rhot)?)?;
    let w0_rhot =
        path_weight_with_energy(&result.rhot, crate::lpp::path_energy(snap0, &result.rhot)?)?;
    let retention_fraction = if result.candidates == 0 {
        1.0
    } else {
        result.retained.len() as f64 / result.candidates as f64
    };
    Ok(ProxyReport {
        weight_gap: (proxy_weight - wt).abs(),
        baseline_gap: (w0_rhot - wt).abs(),
        retention_fraction,
        max_dist_to_rho_t: max_dist(
            &Zigzag::from_path(&result.proxy),
            &Zigzag::from_path(&result.rhot),
        )?,
        normal_retained: result.retained.iter().filter(|e| e.flags.normal).count(),
    })
}
