//! Scaling exponents of transversal fluctuation and weight spread.

use serde::Serialize;

use super::map_samples;
use super::stats::{bootstrap, log_log_slope, quantile_sorted, sorted, Welford};
use crate::error::{invalid, Result};
use crate::lpp::geodesic;
use crate::noise::{make_env, Kind};
use crate::rng::derive;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    /// 2.5% and 97.5% bootstrap quantiles.
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeSummary {
    pub n: usize,
    pub mean_max_fluc: f64,
    pub sem_max_fluc: f64,
    pub sd_energy: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub transversal: FitResult,
    pub weight: FitResult,
    pub fitted_n: Vec<usize>,
    pub sizes: Vec<SizeSummary>,
}

/// Values of `n` used in the fit: the largest four.
pub const FIT_SIZES: usize = 4;

/// Largest horizontal distance, in lattice units, between the geodesic's
/// departures and the diagonal.
fn max_transversal(departures: &[usize], density: usize) -> f64 {
    departures
        .iter()
        .enumerate()
        .map(|(level, &h)| (h as f64 / density as f64 - level as f64).abs())
        .fold(0.0, f64::max)
}

fn slope_of(ns: &[f64], groups: &[Vec<f64>], stat: impl Fn(&[f64]) -> f64) -> f64 {
    let ys: Vec<f64> = groups.iter().map(|g| stat(g)).collect();
    log_log_slope(ns, &ys).unwrap_or(f64::NAN)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<Welford>().mean()
}

fn sd(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<Welford>().sd()
}

fn fit(
    ns: &[f64],
    groups: &[Vec<f64>],
    stat: fn(&[f64]) -> f64,
    resamples: usize,
    seed: u64,
) -> FitResult {
    let slope = slope_of(ns, groups, stat);
    let boot = bootstrap(groups, resamples, seed, |g| slope_of(ns, g, stat));
    let s = sorted(&boot);
    FitResult {
        slope,
        ci_low: quantile_sorted(&s, 0.025),
        ci_high: quantile_sorted(&s, 0.975),
    }
}

/// Log–log fits of mean maximal transversal fluctuation and of `sd(M)` against `n`.
pub fn exponent_fit(
    kind: Kind,
    n_list: &[usize],
    samples: usize,
    resamples: usize,
    seed: u64,
) -> Result<ExponentFit> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < FIT_SIZES || ns[0] == 0 || (*ns.last().unwrap() as f64) < 10.0 * ns[0] as f64 {
        return Err(invalid(
            "exponent fit needs four or more sizes spanning a decade",
        ));
    }
    if samples < 2 {
        return Err(invalid("exponent fit needs at least two samples per size"));
    }
    let mut sizes = Vec::new();
    let mut flucs = Vec::new();
    let mut energies = Vec::new();
    for &n in &ns {
        let stream_seed = derive(seed, "exponents", n as u64);
        let per = map_samples(samples, |i| {
            let env = make_env(kind, n, stream_seed, i as u64)?;
            let rho = geodesic(env.current())?;
            Ok((max_transversal(&rho.departures, kind.density()), rho.energy))
        })?;
        let f: Vec<f64> = per.iter().map(|p| p.0).collect();
        let e: Vec<f64> = per.iter().map(|p| p.1).collect();
        let w: Welford = f.iter().copied().collect();
        sizes.push(SizeSummary {
            n,
            mean_max_fluc: w.mean(),
            sem_max_fluc: w.sem(),
            sd_energy: sd(&e),
            samples,
        });
        flucs.push(f);
        energies.push(e);
    }
    let skip = ns.len() - FIT_SIZES;
    let fitted_n = ns[skip..].to_vec();
    let x: Vec<f64> = fitted_n.iter().map(|&n| n as f64).collect();
    let boot_seed = derive(seed, "exponent-bootstrap", 0);
    Ok(ExponentFit {
        transversal: fit(&x, &flucs[skip..], mean, resamples, boot_seed),
        weight: fit(
            &x,
            &energies[skip..],
            sd,
            resamples,
            derive(boot_seed, "weight", 1),
        ),
        fitted_n,
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transversal_distance_of_staircases() {
        assert_eq!(max_transversal(&[0, 1, 2, 3], 1), 0.0);
        assert_eq!(max_transversal(&[3, 3, 3, 3], 1), 3.0);
        assert_eq!(max_transversal(&[0, 4, 8], 4), 0.0);
    }

    #[test]
    fn synthetic_groups_recover_slope() {
        let ns = [128.0, 256.0, 512.0, 1024.0];
        let groups: Vec<Vec<f64>> = ns
            .iter()
            .map(|n: &f64| vec![n.powf(2.0 / 3.0); 5])
            .collect();
        let r = fit(&ns, &groups, mean, 20, 1);
        assert!((r.slope - 2.0 / 3.0).abs() < 1e-6);
        assert!((r.ci_low - 2.0 / 3.0).abs() < 1e-6 && (r.ci_high - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn size_range_is_enforced() {
        let k = Kind::Bernoulli { p: 0.5 };
        assert!(exponent_fit(k, &[8, 16, 32], 10, 10, 1).is_err());
        assert!(exponent_fit(k, &[8, 9, 10, 11], 10, 10, 1).is_err());
        let r = exponent_fit(k, &[4, 8, 16, 32, 64], 40, 20, 1).unwrap();
        assert_eq!(r.fitted_n, vec![8, 16, 32, 64]);
        assert!(r.transversal.slope > 0.0 && r.weight.slope > 0.0);
    }
}
