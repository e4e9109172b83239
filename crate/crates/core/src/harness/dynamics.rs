//! Checks driven by the time evolution of one environment per sample.

use serde::Serialize;
use serde_json::json;

use super::stats::{variance_with_se, Welford};
use super::{map_samples, time_from_tau, CheckReport, Estimate, Quantity, Relation, Verdict};
use crate::error::{invalid, Result};
use crate::lpp::geodesic;
use crate::noise::{make_env, Kind};
use crate::overlap::{raw_overlap, scaled_overlap};
use crate::rng::derive;

fn check_increasing(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid(format!("{what} grid is empty")));
    }
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid(format!(
            "{what} grid must be finite and non-negative"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}

/// Weights `w_k` with `sum_k w_k g(t_k) = int e^{-t} g(t) dt` over the grid's
/// span, exact when `g` is piecewise linear between grid points.
pub fn exp_product_weights(grid: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; grid.len()];
    for k in 0..grid.len().saturating_sub(1) {
        let (a, h) = (grid[k], grid[k + 1] - grid[k]);
        let ea = (-a).exp();
        let i0 = -ea * (-h).exp_m1();
        // int_a^b (t - a) e^{-t} dt
        let i1 = ea * (-(-h).exp_m1() - h * (-h).exp());
        w[k] += i0 - i1 / h;
        w[k + 1] += i1 / h;
    }
    w
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceParams {
    pub kind: Kind,
    pub n: usize,
    pub t_grid: Vec<f64>,
    pub t_max: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Quadratic grid `t_k = t_max (k / (points - 1))^2`, dense near zero where the
/// mean overlap changes fastest.
pub fn quadratic_grid(t_max: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![0.0];
    }
    (0..points)
        .map(|k| t_max * (k as f64 / (points - 1) as f64).powi(2))
        .collect()
}

/// Sample variance of `M` against `int_0^inf e^{-t} E O(t) dt`.
pub fn check_dynamical_variance(p: &VarianceParams) -> Result<CheckReport> {
    check_increasing(&p.t_grid, "time")?;
    if p.t_grid[0] != 0.0 {
        return Err(invalid("time grid must start at 0"));
    }
    let t_last = *p.t_grid.last().unwrap();
    if !(p.t_max >= t_last) {
        return Err(invalid("time grid exceeds t_max"));
    }
    if p.samples < 2 {
        return Err(invalid("variance check needs at least two samples"));
    }
    let seed = derive(p.seed, "variance-check", p.n as u64);
    let per_sample = map_samples(p.samples, |i| {
        let mut env = make_env(p.kind, p.n, seed, i as u64)?;
        let rho0 = geodesic(env.current())?;
        let mut overlaps = Vec::with_capacity(p.t_grid.len());
        for &t in &p.t_grid {
            env.advance(t)?;
            let rho = geodesic(env.current())?;
            overlaps.push(raw_overlap(&rho0, &rho)?);
        }
        Ok((rho0.energy, overlaps))
    })?;

    let energies: Vec<f64> = per_sample.iter().map(|s| s.0).collect();
    let (var, var_se) = variance_with_se(&energies);
    let max_overlap = match p.kind {
        Kind::BrownianMesh { .. } => p.n as f64,
        _ => (2 * p.n + 1) as f64,
    };
    let tail = max_overlap * (-t_last).exp();
    let name = format!("dynamical-variance {} n={}", p.kind.name(), p.n);
    let lhs = Quantity::Estimate(Estimate {
        mean: var,
        sem: var_se,
        n_samples: p.samples,
        seed_root: p.seed,
    });

    if p.t_grid.len() < 2 {
        let rhs = Quantity::Exact(f64::NAN);
        let report = CheckReport::new(
            name,
            lhs,
            rhs,
            Relation::Equal,
            f64::NAN,
            "degenerate quadrature",
        )
        .with_details(json!({ "reason": "a single grid point carries no quadrature" }));
        return Ok(report);
    }

    let w = exp_product_weights(&p.t_grid);
    let quad: Vec<f64> = per_sample
        .iter()
        .map(|(_, o)| o.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let rhs = Estimate::from_samples(&quad, p.seed);

    // coarse rule on every other point (always keeping the last) for a Richardson estimate
    let mut coarse_idx: Vec<usize> = (0..p.t_grid.len()).step_by(2).collect();
    if *coarse_idx.last().unwrap() != p.t_grid.len() - 1 {
        coarse_idx.push(p.t_grid.len() - 1);
    }
    let coarse_grid: Vec<f64> = coarse_idx.iter().map(|&k| p.t_grid[k]).collect();
    let wc = exp_product_weights(&coarse_grid);
    let per_point: Vec<Welford> = (0..p.t_grid.len())
        .map(|k| per_sample.iter().map(|(_, o)| o[k]).collect())
        .collect();
    let mean_overlap: Vec<f64> = per_point.iter().map(|w| w.mean()).collect();
    let fine_q: f64 = mean_overlap.iter().zip(&w).map(|(a, b)| a * b).sum();
    let coarse_q: f64 = coarse_idx
        .iter()
        .zip(&wc)
        .map(|(&k, b)| mean_overlap[k] * b)
        .sum();
    let quadrature_error = (fine_q - coarse_q).abs() / 3.0;

    let combined = (var_se * var_se + rhs.sem * rhs.sem).sqrt();
    let allowance = 3.0 * combined + tail;
    let relative_gap = (var - rhs.mean).abs() / var;
    let report = CheckReport::new(
        name,
        lhs,
        Quantity::Estimate(rhs),
        Relation::Equal,
        allowance,
        "3 combined standard errors plus the tail bound",
    )
    .with_details(json!({
        "relative_gap": relative_gap,
        "tail_bound": tail,
        "quadrature_error": quadrature_error,
        "t_grid": p.t_grid,
        "mean_overlap": mean_overlap,
        "overlap_sem": per_point.iter().map(|w| w.sem()).collect::<Vec<_>>(),
    }));
    Ok(report)
}

/// Mean scaled overlap `E O(t) / O_max` at each grid time, coupled through one
/// environment per sample.
pub fn mean_overlap_curve(
    kind: Kind,
    n: usize,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    check_increasing(t_grid, "time")?;
    let stream_seed = derive(seed, "overlap-curve", n as u64);
    let per_sample = map_samples(samples, |i| {
        let mut env = make_env(kind, n, stream_seed, i as u64)?;
        let rho0 = geodesic(env.current())?;
        let mut out = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            env.advance(t)?;
            let rho = geodesic(env.current())?;
            out.push(scaled_overlap(&rho0, &rho)?);
        }
        Ok(out)
    })?;
    Ok((0..t_grid.len())
        .map(|k| {
            let xs: Vec<f64> = per_sample.iter().map(|o| o[k]).collect();
            Estimate::from_samples(&xs, seed)
        })
        .collect())
}

/// No consecutive increase of the mean overlap beyond three pooled standard errors.
pub fn check_mean_overlap_monotone(
    kind: Kind,
    n: usize,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<(CheckReport, Vec<Estimate>)> {
    let curve = mean_overlap_curve(kind, n, t_grid, samples, seed)?;
    let mut worst = f64::NEG_INFINITY;
    for w in curve.windows(2) {
        let rise = w[1].mean - w[0].mean;
        let pooled = (w[0].sem.powi(2) + w[1].sem.powi(2)).sqrt();
        let z = if pooled > 0.0 {
            rise / pooled
        } else if rise > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(z);
    }
    if curve.len() < 2 {
        worst = 0.0;
    }
    let report = CheckReport::new(
        format!("overlap-monotone {} n={n}", kind.name()),
        Quantity::Exact(worst),
        Quantity::Exact(3.0),
        Relation::AtMost,
        0.0,
        "largest consecutive rise in pooled standard errors",
    )
    .with_details(
        json!({ "t_grid": t_grid, "mean": curve.iter().map(|e| e.mean).collect::<Vec<_>>() }),
    );
    Ok((report, curve))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub tau: f64,
    pub t: f64,
    pub estimate: Estimate,
}

/// Mean scaled overlap against `tau = t n^{1/3}` for each system size.
pub fn transition_sweep(
    kind: Kind,
    n_list: &[usize],
    tau_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    check_increasing(tau_grid, "tau")?;
    if tau_grid[0] <= 0.0 {
        return Err(invalid("tau values must be positive"));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        let ts: Vec<f64> = tau_grid.iter().map(|&tau| time_from_tau(tau, n)).collect();
        let curve = mean_overlap_curve(kind, n, &ts, samples, derive(seed, "sweep", n as u64))?;
        for ((&tau, &t), estimate) in tau_grid.iter().zip(&ts).zip(curve) {
            rows.push(SweepRow {
                n,
                tau,
                t,
                estimate: Estimate {
                    seed_root: seed,
                    ..estimate
                },
            });
        }
    }
    Ok(rows)
}

/// Whether a report carries a usable verdict.
pub fn is_conclusive(r: &CheckReport) -> bool {
    r.verdict != Verdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_weights_are_exact_for_linear_functions() {
        let grid = quadratic_grid(20.0, 40);
        let w = exp_product_weights(&grid);
        let t = 20.0f64;
        let ones: f64 = w.iter().sum();
        assert!((ones - (1.0 - (-t).exp())).abs() < 1e-12);
        let lin: f64 = w.iter().zip(&grid).map(|(a, b)| a * b).sum();
        assert!((lin - (1.0 - (-t).exp() * (1.0 + t))).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        let p = VarianceParams {
            kind: Kind::Gaussian,
            n: 2,
            t_grid: vec![0.0, 1.0, 1.0],
            t_max: 2.0,
            samples: 10,
            seed: 1,
        };
        assert!(check_dynamical_variance(&p).is_err());
        let p = VarianceParams {
            t_grid: vec![0.5, 1.0],
            ..p
        };
        assert!(check_dynamical_variance(&p).is_err());
        let p = VarianceParams {
            t_grid: vec![0.0, 3.0],
            ..p
        };
        assert!(check_dynamical_variance(&p).is_err());
    }

    #[test]
    fn single_point_grid_is_inconclusive() {
        let p = VarianceParams {
            kind: Kind::Gaussian,
            n: 2,
            t_grid: vec![0.0],
            t_max: 20.0,
            samples: 50,
            seed: 3,
        };
        let r = check_dynamical_variance(&p).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(!is_conclusive(&r));
    }

    #[test]
    fn small_variance_check_passes() {
        let p = VarianceParams {
            kind: Kind::Gaussian,
            n: 1,
            t_grid: quadratic_grid(20.0, 40),
            t_max: 20.0,
            samples: 4000,
            seed: 11,
        };
        let r = check_dynamical_variance(&p).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn overlap_at_zero_is_maximal() {
        let curve = mean_overlap_curve(Kind::Bernoulli { p: 0.5 }, 6, &[0.0, 0.5], 200, 4).unwrap();
        assert_eq!(curve[0].mean, 1.0);
        assert_eq!(curve[0].sem, 0.0);
        assert!(curve[1].mean < 1.0);
    }
}
