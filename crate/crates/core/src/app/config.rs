//! Run configuration: JSON file format, defaults, and per-command resolution.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::harness::quadratic_grid;
use crate::noise::{Kind, Model};
use crate::proxy::ProxyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Mean geodesic energy and overlap with time zero over a time grid.
    Simulate,
    /// Exact Fourier–Walsh identities for the energy on a small lattice.
    Spectral,
    /// Variance of the energy against the integrated mean overlap.
    VarianceCheck,
    /// Mean overlap is non-increasing in time.
    OverlapMonotone,
    /// Energy and weight changes under the dynamics (fixed, grid or crude mode).
    StabilityCheck,
    /// Scaled overlap against tau = t n^{1/3} for several sizes.
    TransitionSweep,
    /// Log–log fits of transversal fluctuation and energy spread.
    Exponents,
    /// Near-maximisers of the routed weight profile.
    TwinPeaks,
    /// Coupled mesh refinement: monotonicity and oscillation bound.
    RefineCheck,
    /// Time-zero proxy of the time-t polymer.
    ProxyDemo,
    /// Weight additivity over excursions and their classification.
    ExcursionCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Spectral => "spectral",
            Command::VarianceCheck => "variance-check",
            Command::OverlapMonotone => "overlap-monotone",
            Command::StabilityCheck => "stability-check",
            Command::TransitionSweep => "transition-sweep",
            Command::Exponents => "exponents",
            Command::TwinPeaks => "twin-peaks",
            Command::RefineCheck => "refine-check",
            Command::ProxyDemo => "proxy-demo",
            Command::ExcursionCheck => "excursion-check",
        }
    }

    fn mesh_only(self) -> bool {
        matches!(
            self,
            Command::StabilityCheck
                | Command::TwinPeaks
                | Command::RefineCheck
                | Command::ProxyDemo
                | Command::ExcursionCheck
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityMode {
    /// `E|M^t - M^0|^2` on one route against `2|y - x| t`.
    Fixed,
    /// Sup over an endpoint grid of the scaled weight change (measurement only).
    Grid,
    /// Largest weight change over polymers and random zigzags against `4 n^{1/2}`.
    Crude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub mode: StabilityMode,
    /// Route start `(x, level)`; `x` is a real abscissa.
    pub src: (f64, usize),
    /// Route end; defaults to `(n, n)`.
    pub dst: Option<(f64, usize)>,
    /// Grid mode: number of height steps (must divide `n`).
    pub levels: usize,
    /// Grid mode: scaled abscissae.
    pub xs: Vec<f64>,
    /// Crude mode: random zigzags per sample.
    pub random_paths: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            mode: StabilityMode::Fixed,
            src: (0.0, 0),
            dst: None,
            levels: 2,
            xs: vec![-0.25, 0.0, 0.25],
            random_paths: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwinPeaksConfig {
    pub a: f64,
    pub sigmas: Vec<f64>,
    pub window: (f64, f64),
    pub beta1: f64,
    pub beta: f64,
}

impl Default for TwinPeaksConfig {
    fn default() -> Self {
        TwinPeaksConfig {
            a: 0.5,
            sigmas: vec![0.05, 0.1, 0.2, 0.4, 0.8],
            window: (1.0, 2.0),
            beta1: 0.1,
            beta: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcursionConfig {
    pub alpha: f64,
    pub chi: f64,
    pub tau0: f64,
    pub beta1: f64,
}

impl Default for ExcursionConfig {
    fn default() -> Self {
        ExcursionConfig {
            alpha: 0.1,
            chi: 0.5,
            tau0: 0.1,
            beta1: 0.1,
        }
    }
}

/// Everything a run needs. Unset optional fields take command-specific
/// defaults in [`RunConfig::resolve`]; the resolved form is what reports echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub model: Option<Model>,
    pub n: Option<Vec<usize>>,
    /// Mesh density, for `brownian-mesh` only.
    pub m: Option<usize>,
    /// Bernoulli parameter, 1/2 when unset.
    pub p: Option<f64>,
    pub t: Option<Vec<f64>>,
    pub tau: Option<Vec<f64>>,
    /// Variance check: upper end of the default quadratic time grid.
    pub t_max: f64,
    /// Variance check: points in the default time grid.
    pub grid_points: usize,
    pub samples: Option<usize>,
    /// Flag, then config file, then `DLPP_SEED`, then 1.
    pub seed: Option<u64>,
    pub out: PathBuf,
    /// Worker threads; all cores when unset.
    pub threads: Option<usize>,
    /// Spectral suite lattice, `WxW` cells.
    pub lattice: String,
    pub m_list: Vec<usize>,
    pub resamples: usize,
    pub stability: StabilityConfig,
    pub twin_peaks: TwinPeaksConfig,
    pub proxy: ProxyParams,
    pub excursion: ExcursionConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            model: None,
            n: None,
            m: None,
            p: None,
            t: None,
            tau: None,
            t_max: 20.0,
            grid_points: 40,
            samples: None,
            seed: None,
            out: PathBuf::from("dlpp-out"),
            threads: None,
            lattice: "3x3".into(),
            m_list: vec![2, 4, 8, 16],
            resamples: 1000,
            stability: StabilityConfig::default(),
            twin_peaks: TwinPeaksConfig::default(),
            proxy: ProxyParams::default(),
            excursion: ExcursionConfig::default(),
        }
    }
}

pub const DEFAULT_SEED: u64 = 1;

fn default_tau_grid() -> Vec<f64> {
    (0..16)
        .map(|k| 0.05 * 200f64.powf(k as f64 / 15.0))
        .map(|x| if x > 9.999 { 10.0 } else { x })
        .collect()
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    /// Fill every unset field with the default for the command.
    pub fn resolve(mut self, env_seed: Option<u64>) -> Result<RunConfig> {
        let cmd = self.command.ok_or_else(|| invalid("no command given"))?;
        let mesh = cmd.mesh_only();
        if mesh {
            match self.model {
                None => self.model = Some(Model::BrownianMesh),
                Some(Model::BrownianMesh) => {}
                Some(other) => {
                    return Err(invalid(format!(
                        "{} runs on brownian-mesh only, not {}",
                        cmd.name(),
                        other.name()
                    )))
                }
            }
        }
        let (model, n, m, samples): (Model, &[usize], Option<usize>, usize) = match cmd {
            Command::Simulate => (Model::Bernoulli, &[64], None, 1000),
            Command::Spectral => (Model::Bernoulli, &[2], None, 0),
            Command::VarianceCheck => (Model::Gaussian, &[4], None, 10_000),
            Command::OverlapMonotone => (Model::Bernoulli, &[50], None, 10_000),
            Command::StabilityCheck => (Model::BrownianMesh, &[8], Some(8), 10_000),
            Command::TransitionSweep => (Model::Bernoulli, &[200, 500, 1000], None, 3000),
            Command::Exponents => (Model::Bernoulli, &[128, 256, 512, 1024, 2048], None, 2000),
            Command::TwinPeaks => (Model::BrownianMesh, &[128], Some(8), 4000),
            Command::RefineCheck => (Model::BrownianMesh, &[4], None, 100),
            Command::ProxyDemo => (Model::BrownianMesh, &[128], Some(4), 200),
            Command::ExcursionCheck => (Model::BrownianMesh, &[64], Some(4), 100),
        };
        let model = *self.model.get_or_insert(model);
        self.n.get_or_insert_with(|| n.to_vec());
        if model == Model::BrownianMesh && cmd != Command::RefineCheck && self.m.is_none() {
            self.m = Some(m.unwrap_or(4));
        }
        if cmd == Command::RefineCheck {
            self.m = None;
        }
        self.samples.get_or_insert(samples);
        self.seed = Some(self.seed.or(env_seed).unwrap_or(DEFAULT_SEED));
        if self.t.is_none() {
            let n0 = self
                .n
                .as_ref()
                .and_then(|v| v.first().copied())
                .unwrap_or(1) as f64;
            self.t = Some(match cmd {
                Command::VarianceCheck => quadratic_grid(self.t_max, self.grid_points),
                Command::Spectral => vec![0.2, 1.0],
                Command::StabilityCheck => vec![0.05, 0.1, 0.2],
                Command::ProxyDemo => vec![0.98 * self.proxy.tau0 / n0.cbrt()],
                Command::ExcursionCheck => vec![0.2 / n0.cbrt()],
                _ => vec![0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0],
            });
        }
        if cmd == Command::TransitionSweep && self.tau.is_none() {
            self.tau = Some(default_tau_grid());
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let ns = self.n.as_deref().unwrap_or_default();
        if ns.is_empty() || ns.iter().any(|&n| n == 0) {
            return Err(invalid("n must be a non-empty list of positive sizes"));
        }
        if let Some(t) = &self.t {
            if t.is_empty() || t.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(invalid("t values must be finite and non-negative"));
            }
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        Ok(())
    }

    pub fn command(&self) -> Command {
        self.command.expect("resolved config has a command")
    }

    pub fn kind(&self) -> Result<Kind> {
        Kind::from_parts(self.model.unwrap_or(Model::Bernoulli), self.m, self.p)
    }

    pub fn ns(&self) -> &[usize] {
        self.n.as_deref().unwrap_or_default()
    }

    pub fn first_n(&self) -> usize {
        self.ns()[0]
    }

    pub fn times(&self) -> &[f64] {
        self.t.as_deref().unwrap_or_default()
    }

    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or(0)
    }

    pub fn seed_value(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_depend_on_command() {
        let c = RunConfig {
            command: Some(Command::TwinPeaks),
            ..Default::default()
        }
        .resolve(None)
        .unwrap();
        assert_eq!(c.model, Some(Model::BrownianMesh));
        assert_eq!((c.first_n(), c.m), (128, Some(8)));
        assert_eq!(c.seed, Some(DEFAULT_SEED));
        let c = RunConfig {
            command: Some(Command::Simulate),
            ..Default::default()
        }
        .resolve(Some(9))
        .unwrap();
        assert_eq!(c.kind().unwrap(), Kind::Bernoulli { p: 0.5 });
        assert_eq!(c.seed, Some(9));
        let c = RunConfig {
            command: Some(Command::TransitionSweep),
            ..Default::default()
        }
        .resolve(None)
        .unwrap();
        let tau = c.tau.unwrap();
        assert_eq!((tau.len(), tau[0], tau[15]), (16, 0.05, 10.0));
    }

    #[test]
    fn explicit_values_win_over_env_and_defaults() {
        let c = RunConfig {
            command: Some(Command::Simulate),
            seed: Some(3),
            ..Default::default()
        };
        assert_eq!(c.resolve(Some(9)).unwrap().seed, Some(3));
    }

    #[test]
    fn mesh_commands_reject_lattice_models() {
        let c = RunConfig {
            command: Some(Command::ProxyDemo),
            model: Some(Model::Gaussian),
            ..Default::default()
        };
        assert!(c.resolve(None).is_err());
        assert!(RunConfig::default().resolve(None).is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let c = RunConfig {
            command: Some(Command::Exponents),
            ..Default::default()
        }
        .resolve(None)
        .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
        assert!(RunConfig::from_json(r#"{"samples": 5, "bogus": 1}"#).is_err());
        let partial = RunConfig::from_json(r#"{"samples": 5, "twin_peaks": {"a": 0.25}}"#).unwrap();
        assert_eq!(partial.samples, Some(5));
        assert_eq!(partial.twin_peaks.a, 0.25);
        assert_eq!(partial.twin_peaks.sigmas.len(), 5);
    }
}
