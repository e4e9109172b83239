//! One executor per subcommand, each producing rows, checks and an optional plot.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::config::{Command, RunConfig, StabilityMode};
use super::grid::parse_lattice;
use super::plot::{Plot, Series};
use crate::error::{invalid, Result};
use crate::excursion::{classify_excursion, excursion_decompose, ClassifyParams};
use crate::harness::stats::Welford;
use crate::harness::{
    check_crude_stability, check_dynamical_variance, check_mean_overlap_monotone,
    check_weight_stability, excursion_additivity_check, exponent_fit, map_samples,
    refinement_check, stability_grid, transition_sweep, twin_peaks_and_deficit, CheckReport,
    Estimate, Quantity, Relation, Row, TwinPeaksParams, VarianceParams,
};
use crate::lpp::geodesic;
use crate::noise::{make_env, Kind};
use crate::overlap::scaled_overlap;
use crate::proxy::{build_proxy, proxy_report};
use crate::rng::derive;
use crate::spectral::{
    energy_table, fourier_walsh, influence_sum, spectral_sample_law, stability_bound_check,
    two_time_covariance, two_time_covariance_direct,
};

pub const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Default)]
pub struct Output {
    pub rows: Vec<Row>,
    pub checks: Vec<CheckReport>,
    pub summary: Value,
    pub plot: Option<Plot>,
}

struct RowMaker {
    model: String,
    m: usize,
    seed: u64,
}

impl RowMaker {
    fn new(kind: Kind, seed: u64) -> RowMaker {
        RowMaker {
            model: kind.name().into(),
            m: kind.mesh_density().unwrap_or(0),
            seed,
        }
    }

    fn est(&self, n: usize, param: impl Into<String>, t: f64, e: &Estimate) -> Row {
        self.row(n, param, t, e.mean, e.sem, e.n_samples)
    }

    fn row(
        &self,
        n: usize,
        param: impl Into<String>,
        t: f64,
        estimate: f64,
        sem: f64,
        samples: usize,
    ) -> Row {
        Row {
            model: self.model.clone(),
            n,
            m: self.m,
            param: param.into(),
            t,
            tau: t * (n as f64).cbrt(),
            estimate,
            sem,
            samples,
            seed: self.seed,
        }
    }
}

fn exact_check(name: String, gap: f64) -> CheckReport {
    CheckReport::new(
        name,
        Quantity::Exact(gap),
        Quantity::Exact(0.0),
        Relation::AtMost,
        EXACT_TOL,
        "absolute 1e-9",
    )
}

fn measurement(name: String, value: f64, details: Value) -> CheckReport {
    CheckReport::new(
        name,
        Quantity::Exact(value),
        Quantity::Exact(f64::NAN),
        Relation::Measurement,
        0.0,
        "reported only",
    )
    .with_details(details)
}

pub fn execute(cfg: &RunConfig) -> Result<Output> {
    match cfg.command() {
        Command::Simulate => simulate(cfg),
        Command::Spectral => spectral(cfg),
        Command::VarianceCheck => variance(cfg),
        Command::OverlapMonotone => monotone(cfg),
        Command::StabilityCheck => stability(cfg),
        Command::TransitionSweep => sweep(cfg),
        Command::Exponents => exponents(cfg),
        Command::TwinPeaks => twin_peaks(cfg),
        Command::RefineCheck => refine(cfg),
        Command::ProxyDemo => proxy_demo(cfg),
        Command::ExcursionCheck => excursions(cfg),
    }
}

fn simulate(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let ts = cfg.times();
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("time grid must be strictly increasing"));
    }
    let rm = RowMaker::new(kind, cfg.seed_value());
    let mut out = Output::default();
    let mut series = Vec::new();
    for &n in cfg.ns() {
        let seed = derive(cfg.seed_value(), "simulate", n as u64);
        let per = map_samples(cfg.sample_count(), |i| {
            let mut env = make_env(kind, n, seed, i as u64)?;
            let rho0 = geodesic(env.current())?;
            let mut v = Vec::with_capacity(ts.len());
            for &t in ts {
                env.advance(t)?;
                let rho = geodesic(env.current())?;
                v.push((rho.energy, scaled_overlap(&rho0, &rho)?));
            }
            Ok(v)
        })?;
        let mut pts = Vec::new();
        for (k, &t) in ts.iter().enumerate() {
            let e: Vec<f64> = per.iter().map(|s| s[k].0).collect();
            let o: Vec<f64> = per.iter().map(|s| s[k].1).collect();
            let (e, o) = (
                Estimate::from_samples(&e, cfg.seed_value()),
                Estimate::from_samples(&o, cfg.seed_value()),
            );
            out.rows.push(rm.est(n, "energy", t, &e));
            out.rows.push(rm.est(n, "scaled_overlap", t, &o));
            pts.push((t, o.mean));
        }
        series.push(Series {
            label: format!("n={n}"),
            points: pts,
        });
    }
    out.plot = Some(Plot {
        title: format!("{} overlap with time zero", kind.name()),
        x_label: "t".into(),
        y_label: "mean scaled overlap".into(),
        log_x: false,
        log_y: false,
        series,
    });
    Ok(out)
}

fn spectral(cfg: &RunConfig) -> Result<Output> {
    let n = parse_lattice(&cfg.lattice)?;
    let f = energy_table(n)?;
    let table = fourier_walsh(&f)?;
    let configs = f.len();
    let rm = RowMaker::new(Kind::Bernoulli { p: 0.5 }, cfg.seed_value());
    let mut out = Output::default();

    let mean_sq = f.iter().map(|x| x * x).sum::<f64>() / configs as f64;
    out.checks.push(exact_check(
        format!("parseval {}", cfg.lattice),
        (table.second_moment() - mean_sq).abs(),
    ));
    let recon = table
        .reconstruct()
        .iter()
        .zip(&f)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.checks.push(exact_check(
        format!("reconstruction {}", cfg.lattice),
        recon,
    ));
    let inf = influence_sum(&f)?;
    let law = spectral_sample_law(&table)?;
    out.checks.push(
        exact_check(
            format!("influence-identity {}", cfg.lattice),
            (inf.mean_spectral_size - law.mean_size()).abs(),
        )
        .with_details(json!({ "influence_sum": inf.sum, "mean_spectral_size": law.mean_size() })),
    );
    out.rows
        .push(rm.row(n, "variance", 0.0, table.variance, 0.0, configs));
    out.rows
        .push(rm.row(n, "mean_spectral_size", 0.0, law.mean_size(), 0.0, configs));
    for &t in cfg.times() {
        let cov = two_time_covariance(&table, t)?;
        let direct = two_time_covariance_direct(&f, t)?;
        out.checks.push(
            exact_check(
                format!("covariance {} t={t}", cfg.lattice),
                (cov - direct).abs(),
            )
            .with_details(json!({ "spectral": cov, "direct": direct })),
        );
        let sb = stability_bound_check(&f, t)?;
        out.checks.push(exact_check(
            format!("two-time-difference {} t={t}", cfg.lattice),
            (sb.lhs - sb.rhs).abs(),
        ));
        out.rows.push(rm.row(n, "covariance", t, cov, 0.0, configs));
        out.rows
            .push(rm.row(n, "covariance_direct", t, direct, 0.0, configs));
    }
    let dist = law.size_distribution();
    for (k, p) in dist.iter().enumerate() {
        out.rows
            .push(rm.row(n, format!("spectral_size={k}"), 0.0, *p, 0.0, configs));
    }
    out.summary = json!({ "cells": table.cells, "influences": inf.per_cell });
    out.plot = Some(Plot {
        title: format!("spectral sample size law, {} lattice", cfg.lattice),
        x_label: "|S|".into(),
        y_label: "probability".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            label: "Q(|S| = k)".into(),
            points: dist
                .iter()
                .enumerate()
                .map(|(k, p)| (k as f64, *p))
                .collect(),
        }],
    });
    Ok(out)
}

fn variance(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    if matches!(kind, Kind::Bernoulli { .. } | Kind::Uniform) {
        return Err(invalid(
            "the variance formula needs gaussian or brownian-mesh noise",
        ));
    }
    let n = cfg.first_n();
    let p = VarianceParams {
        kind,
        n,
        t_grid: cfg.times().to_vec(),
        t_max: cfg.t_max,
        samples: cfg.sample_count(),
        seed: cfg.seed_value(),
    };
    let report = check_dynamical_variance(&p)?;
    let rm = RowMaker::new(kind, cfg.seed_value());
    let mut out = Output::default();
    if let Quantity::Estimate(e) = report.lhs {
        out.rows.push(rm.est(n, "variance", 0.0, &e));
    }
    if let Quantity::Estimate(e) = report.rhs {
        out.rows.push(rm.est(n, "overlap_integral", 0.0, &e));
    }
    let means = report
        .details
        .get("mean_overlap")
        .and_then(Value::as_array)
        .cloned()
        .unwrap_or_default();
    let sems = report
        .details
        .get("overlap_sem")
        .and_then(Value::as_array)
        .cloned()
        .unwrap_or_default();
    let mut pts = Vec::new();
    for ((&t, m), s) in p.t_grid.iter().zip(&means).zip(&sems) {
        let (m, s) = (
            m.as_f64().unwrap_or(f64::NAN),
            s.as_f64().unwrap_or(f64::NAN),
        );
        out.rows.push(rm.row(n, "overlap", t, m, s, p.samples));
        pts.push((t, m));
    }
    out.plot = Some(Plot {
        title: format!("{} n={n}: mean overlap", kind.name()),
        x_label: "t".into(),
        y_label: "mean overlap".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            label: "E O(t)".into(),
            points: pts,
        }],
    });
    out.checks.push(report);
    Ok(out)
}

fn monotone(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let rm = RowMaker::new(kind, cfg.seed_value());
    let mut out = Output::default();
    let mut series = Vec::new();
    for &n in cfg.ns() {
        let (report, curve) = check_mean_overlap_monotone(
            kind,
            n,
            cfg.times(),
            cfg.sample_count(),
            cfg.seed_value(),
        )?;
        for (&t, e) in cfg.times().iter().zip(&curve) {
            out.rows.push(rm.est(n, "scaled_overlap", t, e));
        }
        series.push(Series {
            label: format!("n={n}"),
            points: cfg
                .times()
                .iter()
                .zip(&curve)
                .map(|(t, e)| (*t, e.mean))
                .collect(),
        });
        out.checks.push(report);
    }
    out.plot = Some(Plot {
        title: format!("{} mean scaled overlap", kind.name()),
        x_label: "t".into(),
        y_label: "mean scaled overlap".into(),
        log_x: false,
        log_y: false,
        series,
    });
    Ok(out)
}

fn stability(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let m = kind
        .mesh_density()
        .ok_or_else(|| invalid("stability checks need a mesh"))?;
    let n = cfg.first_n();
    let seed = cfg.seed_value();
    let samples = cfg.sample_count();
    let rm = RowMaker::new(kind, seed);
    let mut out = Output::default();
    let s = &cfg.stability;
    match s.mode {
        StabilityMode::Fixed => {
            let dst = s.dst.unwrap_or((n as f64, n));
            let mut pts = Vec::new();
            let mut bound = Vec::new();
            for &t in cfg.times() {
                let (report, est) = check_weight_stability(n, m, s.src, dst, t, samples, seed)?;
                out.rows.push(rm.est(n, "mean_sq_energy_change", t, &est));
                pts.push((t, est.mean));
                bound.push((t, report.rhs.value()));
                out.checks.push(report);
            }
            out.plot = Some(Plot {
                title: format!("mesh n={n} m={m}: energy change"),
                x_label: "t".into(),
                y_label: "E|M^t - M^0|^2".into(),
                log_x: false,
                log_y: false,
                series: vec![
                    Series {
                        label: "estimate".into(),
                        points: pts,
                    },
                    Series {
                        label: "bound".into(),
                        points: bound,
                    },
                ],
            });
        }
        StabilityMode::Grid => {
            for &t in cfg.times() {
                let g = stability_grid(n, m, s.levels, &s.xs, t, samples, seed)?;
                let e = Estimate::from_samples(&g.sup_values, seed);
                out.rows.push(rm.est(n, "grid_sup_mean", t, &e));
                for (q, v) in &g.quantiles {
                    out.rows
                        .push(rm.row(n, format!("grid_sup_q{q}"), t, *v, 0.0, samples));
                }
                out.checks.push(measurement(
                    format!("stability-grid n={n} m={m} t={t}"),
                    e.mean,
                    json!({ "pairs": g.pairs, "quantiles": g.quantiles }),
                ));
            }
        }
        StabilityMode::Crude => {
            for &t in cfg.times() {
                let report = check_crude_stability(n, m, t, s.random_paths, samples, seed)?;
                out.rows.push(rm.row(
                    n,
                    "crude_sup_weight_change",
                    t,
                    report.lhs.value(),
                    0.0,
                    samples,
                ));
                out.checks.push(report);
            }
        }
    }
    Ok(out)
}

fn sweep(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let taus = cfg.tau.clone().unwrap_or_default();
    let rows = transition_sweep(kind, cfg.ns(), &taus, cfg.sample_count(), cfg.seed_value())?;
    let rm = RowMaker::new(kind, cfg.seed_value());
    let mut out = Output::default();
    let mut by_n: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        let mut row = rm.est(r.n, "scaled_overlap", r.t, &r.estimate);
        row.tau = r.tau;
        out.rows.push(row);
        by_n.entry(r.n).or_default().push((r.tau, r.estimate.mean));
    }
    for (n, pts) in &by_n {
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        out.checks.push(measurement(
            format!("overlap-ratio n={n} tau={}/{}", first.0, last.0),
            first.1 / last.1,
            json!({ "low_tau": first, "high_tau": last }),
        ));
    }
    out.plot = Some(Plot {
        title: format!("{} overlap against tau = t n^(1/3)", kind.name()),
        x_label: "tau".into(),
        y_label: "mean scaled overlap".into(),
        log_x: true,
        log_y: false,
        series: by_n
            .into_iter()
            .map(|(n, points)| Series {
                label: format!("n={n}"),
                points,
            })
            .collect(),
    });
    Ok(out)
}

fn exponents(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let fit = exponent_fit(
        kind,
        cfg.ns(),
        cfg.sample_count(),
        cfg.resamples,
        cfg.seed_value(),
    )?;
    let rm = RowMaker::new(kind, cfg.seed_value());
    let mut out = Output::default();
    for s in &fit.sizes {
        out.rows.push(rm.row(
            s.n,
            "mean_max_transversal",
            0.0,
            s.mean_max_fluc,
            s.sem_max_fluc,
            s.samples,
        ));
        out.rows
            .push(rm.row(s.n, "sd_energy", 0.0, s.sd_energy, 0.0, s.samples));
    }
    out.checks.push(measurement(
        "transversal-exponent".into(),
        fit.transversal.slope,
        json!(fit.transversal),
    ));
    out.checks.push(measurement(
        "weight-exponent".into(),
        fit.weight.slope,
        json!(fit.weight),
    ));
    out.summary = json!({ "fitted_n": fit.fitted_n });
    out.plot = Some(Plot {
        title: format!("{} scaling", kind.name()),
        x_label: "n".into(),
        y_label: "statistic".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series {
                label: "max transversal".into(),
                points: fit
                    .sizes
                    .iter()
                    .map(|s| (s.n as f64, s.mean_max_fluc))
                    .collect(),
            },
            Series {
                label: "sd energy".into(),
                points: fit
                    .sizes
                    .iter()
                    .map(|s| (s.n as f64, s.sd_energy))
                    .collect(),
            },
        ],
    });
    Ok(out)
}

fn twin_peaks(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let m = kind
        .mesh_density()
        .ok_or_else(|| invalid("twin peaks need a mesh"))?;
    let n = cfg.first_n();
    let tp = &cfg.twin_peaks;
    let p = TwinPeaksParams {
        n,
        m,
        a: tp.a,
        sigmas: tp.sigmas.clone(),
        window: tp.window,
        beta1: tp.beta1,
        beta: tp.beta,
        samples: cfg.sample_count(),
        seed: cfg.seed_value(),
    };
    let r = twin_peaks_and_deficit(&p)?;
    let rm = RowMaker::new(kind, cfg.seed_value());
    let mut out = Output::default();
    for (s, e) in r.sigmas.iter().zip(&r.probabilities) {
        out.rows
            .push(rm.est(n, format!("twin_peaks sigma={s}"), 0.0, e));
    }
    for (q, v) in &r.deficit_quantiles {
        out.rows
            .push(rm.row(n, format!("deficit_q{q}"), 0.0, *v, 0.0, r.deficits.len()));
    }
    let decreases = r
        .probabilities
        .windows(2)
        .filter(|w| w[1].mean < w[0].mean)
        .count();
    out.checks.push(CheckReport::new(
        format!("twin-peaks-monotone n={n} m={m}"),
        Quantity::Exact(decreases as f64),
        Quantity::Exact(0.0),
        Relation::AtMost,
        0.0,
        "no decrease in sigma",
    ));
    out.checks.push(measurement(
        format!("twin-peaks-slope n={n} m={m}"),
        r.slope.unwrap_or(f64::NAN),
        json!({ "window": tp.window, "probabilities": r.probabilities.iter().map(|e| e.mean).collect::<Vec<_>>() }),
    ));
    out.plot = Some(Plot {
        title: format!("twin peaks, n={n} m={m} a={}", tp.a),
        x_label: "sigma".into(),
        y_label: "probability".into(),
        log_x: true,
        log_y: true,
        series: vec![Series {
            label: format!("window {:?}", tp.window),
            points: r
                .sigmas
                .iter()
                .zip(&r.probabilities)
                .map(|(s, e)| (*s, e.mean))
                .collect(),
        }],
    });
    Ok(out)
}

fn refine(cfg: &RunConfig) -> Result<Output> {
    let n = cfg.first_n();
    let (report, inst) = refinement_check(n, &cfg.m_list, cfg.sample_count(), cfg.seed_value())?;
    let mut out = Output::default();
    for (k, &m) in cfg.m_list.iter().enumerate() {
        let rm = RowMaker::new(Kind::BrownianMesh { m }, cfg.seed_value());
        let e: Vec<f64> = inst.iter().map(|i| i.energies[k]).collect();
        let o: Vec<f64> = inst.iter().map(|i| i.osc[k]).collect();
        out.rows.push(rm.est(
            n,
            "energy",
            0.0,
            &Estimate::from_samples(&e, cfg.seed_value()),
        ));
        out.rows.push(rm.est(
            n,
            "oscillation",
            0.0,
            &Estimate::from_samples(&o, cfg.seed_value()),
        ));
    }
    out.checks.push(report);
    Ok(out)
}

fn proxy_demo(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let n = cfg.first_n();
    let params = cfg.proxy;
    params.interp_scale(n)?;
    let rm = RowMaker::new(kind, cfg.seed_value());
    let mut out = Output::default();
    for &t in cfg.times() {
        let seed = derive(cfg.seed_value(), "proxy-demo", n as u64);
        let per = map_samples(cfg.sample_count(), |i| {
            let mut env = make_env(kind, n, seed, i as u64)?;
            let s0 = env.current().clone();
            env.advance(t)?;
            let r = build_proxy(&s0, env.current(), &params)?;
            let rep = proxy_report(&r, &s0, env.current())?;
            Ok((rep, r.candidates, r.retained.len()))
        })?;
        let col = |f: &dyn Fn(&(crate::proxy::ProxyReport, usize, usize)) -> f64| -> Estimate {
            let xs: Vec<f64> = per.iter().map(f).collect();
            Estimate::from_samples(&xs, cfg.seed_value())
        };
        let wins = col(&|p| {
            if p.0.weight_gap < p.0.baseline_gap {
                1.0
            } else {
                0.0
            }
        });
        out.rows
            .push(rm.est(n, "weight_gap", t, &col(&|p| p.0.weight_gap)));
        out.rows
            .push(rm.est(n, "baseline_gap", t, &col(&|p| p.0.baseline_gap)));
        out.rows.push(rm.est(
            n,
            "retention_fraction",
            t,
            &col(&|p| p.0.retention_fraction),
        ));
        out.rows
            .push(rm.est(n, "max_dist_to_rho_t", t, &col(&|p| p.0.max_dist_to_rho_t)));
        out.rows
            .push(rm.est(n, "candidates", t, &col(&|p| p.1 as f64)));
        out.rows.push(rm.est(n, "proxy_wins", t, &wins));
        let min_ret = per
            .iter()
            .map(|p| p.0.retention_fraction)
            .fold(f64::INFINITY, f64::min);
        out.checks.push(CheckReport::new(
            format!("proxy-retention n={n} t={t}"),
            Quantity::Exact(min_ret),
            Quantity::Exact(0.5),
            Relation::AtLeast,
            0.0,
            "every instance retains half the candidates",
        ));
        out.checks.push(measurement(
            format!("proxy-win-fraction n={n} t={t}"),
            wins.mean,
            json!({ "candidates": per.iter().map(|p| p.1).sum::<usize>(), "retained": per.iter().map(|p| p.2).sum::<usize>() }),
        ));
    }
    out.summary = json!({ "interpolation_scale": params.interp_scale(n)? });
    Ok(out)
}

fn excursions(cfg: &RunConfig) -> Result<Output> {
    let kind = cfg.kind()?;
    let m = kind
        .mesh_density()
        .ok_or_else(|| invalid("excursion checks need a mesh"))?;
    let n = cfg.first_n();
    let seed = cfg.seed_value();
    let ec = &cfg.excursion;
    let classify = ClassifyParams {
        beta1: Some(ec.beta1),
        ..ClassifyParams::new(ec.alpha, ec.chi, ec.tau0)
    };
    classify.validate()?;
    let rm = RowMaker::new(kind, seed);
    let mut out = Output::default();
    for &t in cfg.times() {
        out.checks.extend(excursion_additivity_check(
            n,
            m,
            t,
            cfg.sample_count(),
            seed,
        )?);
        let stream = derive(seed, "excursion-classes", n as u64);
        let per = map_samples(cfg.sample_count(), |i| {
            let mut env = make_env(kind, n, stream, i as u64)?;
            let rho0 = geodesic(env.current())?;
            env.advance(t)?;
            let rhot = geodesic(env.current())?;
            let mut by_scale: BTreeMap<u32, f64> = BTreeMap::new();
            let (mut count, mut normal, mut slender, mut weak) = (0usize, 0usize, 0usize, 0usize);
            for e in excursion_decompose(&rho0, &rhot)? {
                let flags = classify_excursion(&e, &classify)?;
                *by_scale.entry(e.scale).or_default() += e.duration();
                count += 1;
                normal += flags.normal as usize;
                slender += flags.slender as usize;
                weak += flags.weak as usize;
            }
            Ok((by_scale, [count, normal, slender, weak]))
        })?;
        let max_scale = per.iter().flat_map(|p| p.0.keys().copied()).max();
        for (k, name) in ["excursions", "normal", "slender", "weak"]
            .iter()
            .enumerate()
        {
            let xs: Vec<f64> = per.iter().map(|p| p.1[k] as f64).collect();
            out.rows.push(rm.est(
                n,
                format!("{name}_per_sample"),
                t,
                &Estimate::from_samples(&xs, seed),
            ));
        }
        if let Some(top) = max_scale {
            for scale in 0..=top {
                let xs: Vec<f64> = per
                    .iter()
                    .map(|p| p.0.get(&scale).copied().unwrap_or(0.0))
                    .collect();
                out.rows.push(rm.est(
                    n,
                    format!("duration scale={scale}"),
                    t,
                    &Estimate::from_samples(&xs, seed),
                ));
            }
        }
        let w: Welford = per.iter().map(|p| p.1[0] as f64).collect();
        out.summary = json!({ "mean_excursions": w.mean() });
    }
    Ok(out)
}
