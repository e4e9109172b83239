//! Command-line flags and their merge over a JSON config file.

use std::path::PathBuf;

use clap::Parser;

use super::config::{Command, RunConfig, StabilityMode};
use super::grid::{parse_grid, parse_lattice, parse_pair, parse_usize_list};
use crate::error::{invalid, Result};
use crate::noise::Model;

#[derive(Debug, Parser)]
#[command(name = "dlpp", version = super::VERSION, about = "Dynamical last passage percolation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for results.csv, report.json and plot.svg.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Root seed (default: $DLPP_SEED, else 1).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// bernoulli, uniform, gaussian or brownian-mesh.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Sizes, comma separated.
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Mesh density.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Bernoulli parameter.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Times: `a,b,c` or `lo:hi:linK` / `lo:hi:logK`.
    #[arg(long, global = true)]
    pub t: Option<String>,
    /// Scaled times, same syntax as --t.
    #[arg(long, global = true)]
    pub tau: Option<String>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Spectral lattice, e.g. 3x3.
    #[arg(long, global = true)]
    pub lattice: Option<String>,
    /// Dyadic chain of mesh densities, e.g. 2,4,8,16.
    #[arg(long, global = true)]
    pub m_list: Option<String>,
    /// Bootstrap resamples.
    #[arg(long, global = true)]
    pub resamples: Option<usize>,

    #[arg(long, global = true, value_enum)]
    pub mode: Option<StabilityMode>,
    /// Route start `x,level`.
    #[arg(long, global = true)]
    pub src: Option<String>,
    /// Route end `x,level`.
    #[arg(long, global = true)]
    pub dst: Option<String>,
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Scaled abscissae for the stability grid.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xs: Option<String>,
    #[arg(long, global = true)]
    pub random_paths: Option<usize>,

    /// Profile height.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    #[arg(long, global = true)]
    pub sigma: Option<String>,
    /// Twin-peaks window `lo,hi`.
    #[arg(long, global = true)]
    pub window: Option<String>,
    #[arg(long, global = true)]
    pub beta1: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,

    #[arg(long, global = true)]
    pub ell: Option<u32>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub xi: Option<f64>,
    #[arg(long, global = true)]
    pub tau0: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub chi: Option<f64>,
}

fn level_pair(spec: &str) -> Result<(f64, usize)> {
    let (x, l) = parse_pair(spec)?;
    if l < 0.0 || l.fract() != 0.0 {
        return Err(invalid(format!(
            "level in `{spec}` must be a non-negative integer"
        )));
    }
    Ok((x, l as usize))
}

impl Cli {
    /// Config file (if any) with every given flag laid over it.
    pub fn into_config(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        c.command = Some(self.command);
        if let Some(v) = self.out {
            c.out = v;
        }
        if let Some(v) = self.seed {
            c.seed = Some(v);
        }
        if let Some(v) = self.threads {
            c.threads = Some(v);
        }
        if let Some(v) = self.samples {
            c.samples = Some(v);
        }
        if let Some(v) = &self.model {
            c.model = Some(Model::parse(v)?);
        }
        if let Some(v) = &self.n {
            c.n = Some(parse_usize_list(v)?);
        }
        if let Some(v) = self.m {
            c.m = Some(v);
        }
        if let Some(v) = self.p {
            c.p = Some(v);
        }
        if let Some(v) = &self.t {
            c.t = Some(parse_grid(v)?);
        }
        if let Some(v) = &self.tau {
            c.tau = Some(parse_grid(v)?);
        }
        if let Some(v) = self.t_max {
            c.t_max = v;
        }
        if let Some(v) = self.grid_points {
            c.grid_points = v;
        }
        if let Some(v) = self.lattice {
            parse_lattice(&v)?;
            c.lattice = v;
        }
        if let Some(v) = &self.m_list {
            c.m_list = parse_usize_list(v)?;
        }
        if let Some(v) = self.resamples {
            c.resamples = v;
        }
        let s = &mut c.stability;
        if let Some(v) = self.mode {
            s.mode = v;
        }
        if let Some(v) = &self.src {
            s.src = level_pair(v)?;
        }
        if let Some(v) = &self.dst {
            s.dst = Some(level_pair(v)?);
        }
        if let Some(v) = self.levels {
            s.levels = v;
        }
        if let Some(v) = &self.xs {
            s.xs = parse_grid(v)?;
        }
        if let Some(v) = self.random_paths {
            s.random_paths = v;
        }
        let tp = &mut c.twin_peaks;
        if let Some(v) = self.a {
            tp.a = v;
        }
        if let Some(v) = &self.sigma {
            tp.sigmas = parse_grid(v)?;
        }
        if let Some(v) = &self.window {
            tp.window = parse_pair(v)?;
        }
        if let Some(v) = self.beta1 {
            tp.beta1 = v;
            c.excursion.beta1 = v;
        }
        if let Some(v) = self.beta {
            tp.beta = v;
        }
        let px = &mut c.proxy;
        if let Some(v) = self.ell {
            px.ell = v;
        }
        if let Some(v) = self.eta {
            px.eta = v;
        }
        if let Some(v) = self.xi {
            px.xi = v;
        }
        if let Some(v) = self.tau0 {
            px.tau0 = v;
            c.excursion.tau0 = v;
        }
        if let Some(v) = self.alpha {
            px.alpha = v;
            c.excursion.alpha = v;
        }
        if let Some(v) = self.chi {
            px.chi = v;
            c.excursion.chi = v;
        }
        Ok(c)
    }
}
