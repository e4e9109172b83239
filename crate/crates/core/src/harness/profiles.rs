//! Near-maximisers of the routed weight profile.

use serde::Serialize;

use super::stats::{log_log_slope, quantile_sorted, sorted};
use super::{map_samples, Estimate};
use crate::error::{invalid, Error, Result};
use crate::lpp::profile_on_grid;
use crate::noise::{make_env, Kind};
use crate::rng::derive;
use crate::scaling::GRID_TOL;

/// Slack added to profile gaps so exact ties never count as twin peaks.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwinPeaksParams {
    pub n: usize,
    pub m: usize,
    /// Scaled height of the profile, on the `1/n` grid.
    pub a: f64,
    pub sigmas: Vec<f64>,
    /// Range of `|x - M|` searched for a rival peak.
    pub window: (f64, f64),
    /// Inner radius of the deficit annulus is `beta1 / 8 n^{-2/3}`.
    pub beta1: f64,
    /// Outer radius of the deficit annulus is `n^{-2/3 + 2 beta / 3} (log n)^{1/3}`.
    pub beta: f64,
    pub samples: usize,
    pub seed: u64,
}

impl TwinPeaksParams {
    pub fn new(n: usize, m: usize, sigmas: Vec<f64>, samples: usize, seed: u64) -> TwinPeaksParams {
        TwinPeaksParams {
            n,
            m,
            a: 0.5,
            sigmas,
            window: (1.0, 2.0),
            beta1: 0.1,
            beta: 0.5,
            samples,
            seed,
        }
    }

    fn annulus(&self) -> (f64, f64) {
        let nf = self.n as f64;
        let unit = nf.powf(-2.0 / 3.0);
        (
            self.beta1 / 8.0 * unit,
            nf.powf(-2.0 / 3.0 + 2.0 * self.beta / 3.0) * nf.ln().cbrt(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwinPeaksResult {
    pub sigmas: Vec<f64>,
    /// Probability of a rival peak at each `sigma`.
    pub probabilities: Vec<Estimate>,
    /// Per-sample smallest `sigma` at which a rival appears (`inf` if none can).
    pub sigma_star: Vec<f64>,
    /// Per-sample deficit `max Z - sup_{annulus} Z`.
    pub deficits: Vec<f64>,
    pub deficit_quantiles: Vec<(f64, f64)>,
    /// Log–log slope of probability against `sigma`, when every probability is positive.
    pub slope: Option<f64>,
}

impl TwinPeaksResult {
    pub fn is_monotone(&self) -> bool {
        self.probabilities
            .windows(2)
            .all(|w| w[1].mean >= w[0].mean)
    }
}

pub fn twin_peaks_and_deficit(p: &TwinPeaksParams) -> Result<TwinPeaksResult> {
    let kind = Kind::from_parts(crate::noise::Model::BrownianMesh, Some(p.m), None)?;
    let na = p.a * p.n as f64;
    if (na - na.round()).abs() > GRID_TOL || !(p.a > 0.0 && p.a < 1.0) {
        return Err(Error::Incompatible(format!(
            "height {} is not an interior point of the 1/n grid",
            p.a
        )));
    }
    let level = na.round() as usize;
    let (w_lo, w_hi) = p.window;
    if !(w_lo >= 0.0 && w_hi > w_lo) {
        return Err(invalid("window must satisfy 0 <= low < high"));
    }
    if p.sigmas.iter().any(|s| !(*s >= 0.0)) || p.sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("sigma values must be non-negative and increasing"));
    }
    let step = 0.5 * (p.n as f64).powf(-2.0 / 3.0) / p.m as f64;
    if step > (w_hi - w_lo) / 50.0 {
        return Err(Error::Incompatible(format!(
            "profile grid step {step} is too coarse for window {:?}",
            p.window
        )));
    }
    let (r_in, r_out) = p.annulus();
    let stream_seed = derive(p.seed, "twin-peaks", p.n as u64);
    let per = map_samples(p.samples, |i| {
        let env = make_env(kind, p.n, stream_seed, i as u64)?;
        let prof = profile_on_grid(env.current(), level)?;
        let arg = prof.argmax();
        let (zmax, xm) = (prof.z[arg], prof.x[arg]);
        let mut sigma_star = f64::INFINITY;
        let mut annulus_sup = f64::NEG_INFINITY;
        for (&x, &z) in prof.x.iter().zip(&prof.z) {
            let d = (x - xm).abs();
            if d >= w_lo && d <= w_hi {
                sigma_star = sigma_star.min((zmax - z + TIE_TOL) / d.sqrt());
            }
            if d >= r_in && d <= r_out {
                annulus_sup = annulus_sup.max(z);
            }
        }
        Ok((sigma_star, zmax - annulus_sup))
    })?;
    let sigma_star: Vec<f64> = per.iter().map(|q| q.0).collect();
    let deficits: Vec<f64> = per.iter().map(|q| q.1).filter(|d| d.is_finite()).collect();
    let probabilities: Vec<Estimate> = p
        .sigmas
        .iter()
        .map(|&s| {
            let hits: Vec<f64> = sigma_star
                .iter()
                .map(|&st| if s >= st { 1.0 } else { 0.0 })
                .collect();
            Estimate::from_samples(&hits, p.seed)
        })
        .collect();
    let means: Vec<f64> = probabilities.iter().map(|e| e.mean).collect();
    let slope = if means.iter().all(|v| *v > 0.0) && p.sigmas.len() >= 2 {
        log_log_slope(&p.sigmas, &means).ok()
    } else {
        None
    };
    let s = sorted(&deficits);
    let deficit_quantiles = [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&q| (q, quantile_sorted(&s, q)))
        .collect();
    Ok(TwinPeaksResult {
        sigmas: p.sigmas.clone(),
        probabilities,
        sigma_star,
        deficits,
        deficit_quantiles,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_never_fires_and_probability_grows() {
        let mut p = TwinPeaksParams::new(32, 8, vec![0.0, 0.2, 0.5, 1.0, 3.0], 60, 5);
        p.window = (0.05, 0.4);
        let r = twin_peaks_and_deficit(&p).unwrap();
        assert_eq!(r.probabilities[0].mean, 0.0);
        assert!(r.is_monotone());
        assert!(r.deficits.iter().all(|d| *d >= 0.0));
        assert!(r.slope.is_none());
    }

    #[test]
    fn coarse_grid_and_bad_heights_rejected() {
        let mut p = TwinPeaksParams::new(16, 1, vec![0.1], 5, 1);
        p.window = (0.1, 0.2);
        assert!(matches!(
            twin_peaks_and_deficit(&p),
            Err(Error::Incompatible(_))
        ));
        let mut p = TwinPeaksParams::new(16, 8, vec![0.1], 5, 1);
        p.a = 0.3;
        assert!(twin_peaks_and_deficit(&p).is_err());
        p.a = 0.5;
        p.sigmas = vec![0.5, 0.1];
        assert!(twin_peaks_and_deficit(&p).is_err());
    }
}
