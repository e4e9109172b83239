//! Excursions between two paths on a common route.
//!
//! The symmetric difference of the two edge sets splits into connected pieces.
//! Both paths visit anti-diagonal `k` at their `k`-th vertex, so a piece is a
//! maximal run of step indices on which the two paths use different edges. A
//! run is a genuine excursion when its two legs meet only at the run's ends.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lpp::LatticePath;
use crate::scaling::horizontal_unit;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExcursionFlags {
    /// The legs share exactly their two endpoints.
    pub is_excursion: bool,
    pub normal: bool,
    pub slender: bool,
    pub weak: bool,
    /// `None` until classified with a separation scale.
    pub thin: Option<bool>,
    /// `None` until classified with a width bound.
    pub wide: Option<bool>,
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcursionRecord {
    pub n: usize,
    pub density: usize,
    /// Lifetime `[b, f]` in scaled height.
    pub b: f64,
    pub f: f64,
    pub b_level: usize,
    pub f_level: usize,
    /// Common grid endpoints of the legs.
    pub start: (usize, usize),
    pub end: (usize, usize),
    /// Sub-path of the first argument, then of the second.
    pub leg0: LatticePath,
    pub leg1: LatticePath,
    /// Dyadic scale: `f - b` lies in `(2^{-scale-1}, 2^{-scale}]`.
    pub scale: u32,
    pub flags: ExcursionFlags,
}

impl ExcursionRecord {
    pub fn duration(&self) -> f64 {
        self.f - self.b
    }

    /// Scaled horizontal separation of the legs' departures at each level in
    /// `[b_level, f_level]`; zero at the top level where the legs meet.
    pub fn separations(&self) -> Vec<f64> {
        let unit = horizontal_unit(self.n) / self.density as f64;
        (self.b_level..=self.f_level)
            .map(|h| {
                if h == self.f_level {
                    0.0
                } else {
                    unit * self.leg0.departure(h).abs_diff(self.leg1.departure(h)) as f64
                }
            })
            .collect()
    }

    /// Scaled horizontal extent of the union of both legs.
    pub fn strip_width(&self) -> f64 {
        let m = self.density;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for leg in [&self.leg0, &self.leg1] {
            for level in leg.first_level()..=leg.last_level() {
                for h in [leg.entry(level), leg.departure(level)] {
                    let x = horizontal_unit(self.n) * (h as f64 / m as f64 - level as f64);
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
        }
        hi - lo
    }
}

/// `scale` with `k / n` in `(2^{-scale-1}, 2^{-scale}]`, computed exactly.
pub fn dyadic_scale(k: usize, n: usize) -> Option<u32> {
    if k == 0 || k > n {
        return None;
    }
    let (k, n) = (k as u128, n as u128);
    let mut ell = 0u32;
    while k << (ell + 1) <= n {
        ell += 1;
    }
    Some(ell)
}

/// Scale of a real duration in `(0, 1]`.
pub fn scale_of_duration(d: f64) -> Option<u32> {
    if !(d > 0.0 && d <= 1.0) {
        return None;
    }
    let mut ell = 0u32;
    while d * 2f64.powi(ell as i32 + 1) <= 1.0 {
        ell += 1;
    }
    Some(ell)
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

/// Excursions of `p2` from `p1`, ordered by height.
pub fn excursion_decompose(p1: &LatticePath, p2: &LatticePath) -> Result<Vec<ExcursionRecord>> {
    check_pair(p1, p2)?;
    let v1 = p1.vertices();
    let v2 = p2.vertices();
    let steps = v1.len() - 1;
    let differs = |k: usize| v1[k] != v2[k] || v1[k + 1] != v2[k + 1];
    let mut out = Vec::new();
    let mut k = 0;
    while k < steps {
        if !differs(k) {
            k += 1;
            continue;
        }
        let a = k;
        while k < steps && differs(k) {
            k += 1;
        }
        // edges a..k differ; vertices a and k are shared
        let start = v1[a];
        let end = v1[k];
        let touches = (a + 1..k).any(|i| v1[i] == v2[i]);
        let (b_level, f_level) = (start.1, end.1);
        let n = p1.n;
        let scale = dyadic_scale(f_level - b_level, n)
            .ok_or_else(|| invalid("excursion without duration"))?;
        out.push(ExcursionRecord {
            n,
            density: p1.density(),
            b: b_level as f64 / n as f64,
            f: f_level as f64 / n as f64,
            b_level,
            f_level,
            start,
            end,
            leg0: p1.subpath(start, end)?,
            leg1: p2.subpath(start, end)?,
            scale,
            flags: ExcursionFlags {
                is_excursion: !touches,
                ..Default::default()
            },
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyParams {
    pub alpha: f64,
    pub chi: f64,
    pub tau0: f64,
    pub beta1: Option<f64>,
    pub width_bound: Option<f64>,
}

impl ClassifyParams {
    pub fn new(alpha: f64, chi: f64, tau0: f64) -> ClassifyParams {
        ClassifyParams {
            alpha,
            chi,
            tau0,
            beta1: None,
            width_bound: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha must be positive"));
        }
        if !(self.chi > 0.0 && self.chi < 1.0) {
            return Err(invalid("chi must lie in (0, 1)"));
        }
        if !(self.tau0 > 0.0 && self.tau0 < 1.0) {
            return Err(invalid("tau0 must lie in (0, 1)"));
        }
        if matches!(self.beta1, Some(b) if !(b > 0.0)) {
            return Err(invalid("beta1 must be positive"));
        }
        if matches!(self.width_bound, Some(w) if !(w >= 0.0)) {
            return Err(invalid("width bound must be non-negative"));
        }
        Ok(())
    }
}

/// Flags of `e` under the given parameters; `retained` is carried over.
pub fn classify_excursion(e: &ExcursionRecord, params: &ClassifyParams) -> Result<ExcursionFlags> {
    params.validate()?;
    let sep = e.separations();
    let levels = sep.len() as f64;
    let threshold = e.duration().powf(2.0 / 3.0) * params.tau0.powf(params.alpha);
    let frac = |thr: f64| sep.iter().filter(|&&d| d >= thr).count() as f64 / levels;
    let need = 1.0 - params.chi;
    let is_excursion = e.flags.is_excursion;
    let normal = is_excursion && frac(threshold) >= need;
    let thin = params.beta1.map(|b1| {
        let bound = 0.25 * b1 / (e.n as f64).powf(2.0 / 3.0);
        sep[..sep.len() - 1].iter().all(|&d| d < bound)
    });
    Ok(ExcursionFlags {
        is_excursion,
        normal,
        slender: is_excursion && !normal,
        weak: frac(0.5 * threshold) >= need,
        thin,
        wide: params.width_bound.map(|w| e.strip_width() > w),
        retained: e.flags.retained,
    })
}

/// Total duration per dyadic scale.
pub fn duration_by_scale(excursions: &[ExcursionRecord]) -> BTreeMap<u32, f64> {
    let mut out = BTreeMap::new();
    for e in excursions {
        *out.entry(e.scale).or_insert(0.0) += e.duration();
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LongShortSplit {
    pub threshold: f64,
    pub long_count: usize,
    pub long_duration: f64,
    pub short_count: usize,
    pub short_duration: f64,
}

/// Split at duration `n^{beta - 1}`: long excursions last at least that long.
pub fn long_short_split(excursions: &[ExcursionRecord], n: usize, beta: f64) -> LongShortSplit {
    let threshold = (n as f64).powf(beta - 1.0);
    let mut out = LongShortSplit {
        threshold,
        ..Default::default()
    };
    for e in excursions {
        if e.duration() >= threshold {
            out.long_count += 1;
            out.long_duration += e.duration();
        } else {
            out.short_count += 1;
            out.short_duration += e.duration();
        }
    }
    out
}
