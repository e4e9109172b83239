//! Dynamical noise environments.
//!
//! Four environments are supported: Bernoulli and uniform vertex weights with
//! Poisson-clock refresh, Gaussian vertex weights with Ornstein–Uhlenbeck
//! dynamics, and the Brownian mesh field of horizontal edge increments, also
//! under OU dynamics. Time evolution uses the exact Markov transition between
//! consecutive query times.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{self, Tag};

/// Model family names as used in configuration files and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Bernoulli,
    Uniform,
    Gaussian,
    BrownianMesh,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Bernoulli => "bernoulli",
            Model::Uniform => "uniform",
            Model::Gaussian => "gaussian",
            Model::BrownianMesh => "brownian-mesh",
        }
    }

    pub fn parse(s: &str) -> Result<Model> {
        match s {
            "bernoulli" => Ok(Model::Bernoulli),
            "uniform" => Ok(Model::Uniform),
            "gaussian" => Ok(Model::Gaussian),
            "brownian-mesh" | "mesh" => Ok(Model::BrownianMesh),
            other => Err(invalid(format!("unknown model `{other}`"))),
        }
    }
}

/// A fully parameterised noise kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Kind {
    Bernoulli { p: f64 },
    Uniform,
    Gaussian,
    BrownianMesh { m: usize },
}

impl Kind {
    /// Build a kind from a model name plus optional parameters.
    ///
    /// `p` defaults to 1/2 for Bernoulli; `m` is required for the mesh and
    /// rejected for lattice kinds, `p` is rejected for everything but Bernoulli.
    pub fn from_parts(model: Model, m: Option<usize>, p: Option<f64>) -> Result<Kind> {
        let kind = match model {
            Model::BrownianMesh => {
                if p.is_some() {
                    return Err(Error::KindMismatch("p given for brownian-mesh".into()));
                }
                let m = m.ok_or_else(|| invalid("brownian-mesh needs a mesh density m"))?;
                Kind::BrownianMesh { m }
            }
            lattice => {
                if m.is_some() {
                    return Err(Error::KindMismatch(format!(
                        "m given for lattice kind {}",
                        lattice.name()
                    )));
                }
                match lattice {
                    Model::Bernoulli => Kind::Bernoulli {
                        p: p.unwrap_or(0.5),
                    },
                    _ if p.is_some() => {
                        return Err(Error::KindMismatch(format!(
                            "p given for {}",
                            lattice.name()
                        )))
                    }
                    Model::Uniform => Kind::Uniform,
                    _ => Kind::Gaussian,
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }

    pub fn model(&self) -> Model {
        match self {
            Kind::Bernoulli { .. } => Model::Bernoulli,
            Kind::Uniform => Model::Uniform,
            Kind::Gaussian => Model::Gaussian,
            Kind::BrownianMesh { .. } => Model::BrownianMesh,
        }
    }

    pub fn name(&self) -> &'static str {
        self.model().name()
    }

    pub fn is_lattice(&self) -> bool {
        !matches!(self, Kind::BrownianMesh { .. })
    }

    /// Horizontal grid points per unit length: `m` for the mesh, 1 otherwise.
    pub fn density(&self) -> usize {
        match self {
            Kind::BrownianMesh { m } => *m,
            _ => 1,
        }
    }

    pub fn mesh_density(&self) -> Option<usize> {
        match self {
            Kind::BrownianMesh { m } => Some(*m),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            // p = 1 is the degenerate all-open field and is accepted.
            Kind::Bernoulli { p } if !(p > 0.0 && p <= 1.0) => {
                Err(invalid(format!("bernoulli p must lie in (0,1], got {p}")))
            }
            Kind::BrownianMesh { m } if m == 0 => Err(invalid("mesh density m must be at least 1")),
            _ => Ok(()),
        }
    }

    /// Stationary standard deviation of one field value under OU dynamics.
    fn ou_sigma(&self) -> f64 {
        match self {
            Kind::BrownianMesh { m } => 1.0 / (*m as f64).sqrt(),
            _ => 1.0,
        }
    }
}

/// An immutable field at one dynamic time.
///
/// Lattice kinds store `(n+1)^2` vertex values, row-major by level:
/// vertex `(x, y)` lives at `y * (n + 1) + x`. The mesh stores `n + 1` levels of
/// `n * m` horizontal edge increments: edge `[u/m, (u+1)/m]` at level `i`
/// lives at `i * n * m + u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub kind: Kind,
    pub n: usize,
    pub t: f64,
    pub values: Vec<f64>,
}

impl FieldSnapshot {
    /// Build a snapshot from explicit values, checking the shape.
    pub fn from_values(kind: Kind, n: usize, values: Vec<f64>) -> Result<FieldSnapshot> {
        kind.validate()?;
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let want = field_len(kind, n);
        if values.len() != want {
            return Err(invalid(format!(
                "expected {want} field values, got {}",
                values.len()
            )));
        }
        Ok(FieldSnapshot {
            kind,
            n,
            t: 0.0,
            values,
        })
    }

    pub fn density(&self) -> usize {
        self.kind.density()
    }

    /// Number of grid steps per level: `n` on the lattice, `n * m` on the mesh.
    pub fn width(&self) -> usize {
        self.n * self.density()
    }

    /// Row length of the value table.
    pub fn row_len(&self) -> usize {
        if self.kind.is_lattice() {
            self.n + 1
        } else {
            self.n * self.density()
        }
    }

    #[inline]
    pub fn vertex(&self, x: usize, y: usize) -> f64 {
        self.values[y * (self.n + 1) + x]
    }

    #[inline]
    pub fn edge(&self, u: usize, level: usize) -> f64 {
        self.values[level * self.width() + u]
    }

    pub fn row(&self, level: usize) -> &[f64] {
        let w = self.row_len();
        &self.values[level * w..(level + 1) * w]
    }
}

fn field_len(kind: Kind, n: usize) -> usize {
    if kind.is_lattice() {
        (n + 1) * (n + 1)
    } else {
        (n + 1) * n * kind.density()
    }
}

/// A forward-evolving noise environment.
#[derive(Debug, Clone)]
pub struct DynEnv {
    seed: u64,
    stream_id: u64,
    transitions: u64,
    state: FieldSnapshot,
}

/// Create an environment at clock zero with a field drawn from the static law.
pub fn make_env(kind: Kind, n: usize, seed: u64, stream_id: u64) -> Result<DynEnv> {
    kind.validate()?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut rng = rng::stream(seed, stream_id, Tag::Init, 0);
    let len = field_len(kind, n);
    let values: Vec<f64> = match kind {
        Kind::Bernoulli { p } => (0..len).map(|_| bernoulli(&mut rng, p)).collect(),
        Kind::Uniform => (0..len).map(|_| rng.gen::<f64>()).collect(),
        Kind::Gaussian | Kind::BrownianMesh { .. } => {
            let sigma = kind.ou_sigma();
            (0..len)
                .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                .collect()
        }
    };
    Ok(DynEnv {
        seed,
        stream_id,
        transitions: 0,
        state: FieldSnapshot {
            kind,
            n,
            t: 0.0,
            values,
        },
    })
}

#[inline]
fn bernoulli<R: Rng>(rng: &mut R, p: f64) -> f64 {
    if rng.gen::<f64>() < p {
        1.0
    } else {
        0.0
    }
}

impl DynEnv {
    pub fn kind(&self) -> Kind {
        self.state.kind
    }

    pub fn n(&self) -> usize {
        self.state.n
    }

    pub fn clock(&self) -> f64 {
        self.state.t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// The field at the current clock, without copying.
    pub fn current(&self) -> &FieldSnapshot {
        &self.state
    }

    /// Advance the clock to `t`, applying one exact transition over `t - clock`.
    pub fn advance(&mut self, t: f64) -> Result<()> {
        if !t.is_finite() || t < self.state.t {
            return Err(Error::TimeRegression {
                clock: self.state.t,
                requested: t,
            });
        }
        let dt = t - self.state.t;
        if dt == 0.0 {
            return Ok(());
        }
        self.transitions += 1;
        let mut rng = rng::stream(self.seed, self.stream_id, Tag::Transition, self.transitions);
        let kind = self.state.kind;
        let values = &mut self.state.values;
        match kind {
            Kind::Bernoulli { p } => refresh_cells(values, dt, &mut rng, |r| bernoulli(r, p)),
            Kind::Uniform => refresh_cells(values, dt, &mut rng, |r| r.gen::<f64>()),
            Kind::Gaussian | Kind::BrownianMesh { .. } => {
                let keep = (-dt).exp();
                let fresh = kind.ou_sigma() * (-(-2.0 * dt).exp_m1()).sqrt();
                for v in values.iter_mut() {
                    let xi: f64 = rng.sample(StandardNormal);
                    *v = keep * *v + fresh * xi;
                }
            }
        }
        self.state.t = t;
        Ok(())
    }

    /// Advance to `t` and return a copy of the field there.
    pub fn snapshot(&mut self, t: f64) -> Result<FieldSnapshot> {
        self.advance(t)?;
        Ok(self.state.clone())
    }
}

/// Redraw each cell independently with probability `1 - e^{-dt}`.
///
/// The gap between consecutive redrawn cells is geometric with success
/// probability `1 - e^{-dt}`, sampled as `floor(E / dt)` for `E ~ Exp(1)`.
fn refresh_cells<R: Rng>(
    values: &mut [f64],
    dt: f64,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> f64,
) {
    let len = values.len();
    let mut pos = 0usize;
    loop {
        let e: f64 = rng.sample(Exp1);
        let skip = (e / dt).floor();
        if skip >= (len - pos) as f64 {
            break;
        }
        pos += skip as usize;
        values[pos] = draw(rng);
        pos += 1;
        if pos >= len {
            break;
        }
    }
}

/// Omitted coarse-scale variance allowed by [`sample_dyadic_ou`].
pub const DYADIC_COARSE_TOL: f64 = 1e-6;
/// Largest |x| accepted by [`sample_dyadic_ou`].
pub const DYADIC_MAX_X: f64 = 1048576.0;

/// Number of coarse scales `j_outer` so that scales `j < -j_outer` contribute
/// less than [`DYADIC_COARSE_TOL`] variance at `|x| <= x_max`.
///
/// At scale `j` only the interval with endpoint 0 can contain `x` when
/// `2^{-j} > |x|`, and it contributes `2^j x^2`; the tail sum is `2^{-J} x^2`.
pub fn dyadic_outer_scales(x_max: f64) -> i32 {
    if x_max == 0.0 {
        return 0;
    }
    let need = (x_max * x_max / DYADIC_COARSE_TOL).log2();
    (need.floor() as i32 + 1).max(0)
}

/// Value of the tent function of the dyadic interval `[k 2^{-j}, (k+1) 2^{-j}]`.
///
/// It is the integral of the Haar function equal to `2^{j/2}` on the left half
/// and `-2^{j/2}` on the right half; its peak is `2^{-j/2-1}`.
pub fn tent(j: i32, k: i64, x: f64) -> f64 {
    let len = (-j as f64).exp2();
    let left = k as f64 * len;
    let right = left + len;
    if x <= left || x >= right {
        return 0.0;
    }
    let h = (j as f64 / 2.0).exp2();
    h * (x - left).min(right - x)
}

/// Sample the OU dynamics on two-sided Brownian motion at the given points.
///
/// Returns `out[ti][xi] = W(xs[xi], ts[ti])`. Each dyadic coefficient is an
/// independent stationary OU process keyed by its interval, so the value at a
/// point does not depend on which other points are requested.
pub fn sample_dyadic_ou(xs: &[f64], ts: &[f64], j_max: i32, seed: u64) -> Result<Vec<Vec<f64>>> {
    if j_max < 0 {
        return Err(invalid("j_max must be non-negative"));
    }
    if let Some(x) = xs.iter().find(|x| !x.is_finite() || x.abs() > DYADIC_MAX_X) {
        return Err(Error::OutOfRange(format!(
            "x = {x} outside [-{DYADIC_MAX_X}, {DYADIC_MAX_X}]"
        )));
    }
    if ts.iter().any(|t| !t.is_finite() || *t < 0.0) || ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid(
            "times must be finite, non-negative and non-decreasing",
        ));
    }
    let x_max = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let j_outer = dyadic_outer_scales(x_max);

    // Intervals containing some requested point in their interior.
    let mut support: BTreeMap<(i32, i64), Vec<(usize, f64)>> = BTreeMap::new();
    for j in -j_outer..=j_max {
        let scale = (j as f64).exp2();
        for (xi, &x) in xs.iter().enumerate() {
            let k = (x * scale).floor() as i64;
            let f = tent(j, k, x);
            if f != 0.0 {
                support.entry((j, k)).or_default().push((xi, f));
            }
        }
    }

    let mut out = vec![vec![0.0; xs.len()]; ts.len()];
    for (&(j, k), weights) in &support {
        let mut rng = rng::stream(seed, j as i64 as u64, Tag::Dyadic, k as u64);
        let mut zeta: f64 = rng.sample(StandardNormal);
        let mut clock = ts.first().copied().unwrap_or(0.0);
        for (ti, &t) in ts.iter().enumerate() {
            let dt = t - clock;
            if dt > 0.0 {
                let xi: f64 = rng.sample(StandardNormal);
                zeta = (-dt).exp() * zeta + (-(-2.0 * dt).exp_m1()).sqrt() * xi;
                clock = t;
            }
            for &(xi_idx, f) in weights {
                out[ti][xi_idx] += zeta * f;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parameter_checks() {
        assert!(Kind::from_parts(Model::Bernoulli, None, Some(0.0)).is_err());
        assert!(Kind::from_parts(Model::Bernoulli, None, Some(1.5)).is_err());
        assert!(matches!(
            Kind::from_parts(Model::Gaussian, Some(4), None),
            Err(Error::KindMismatch(_))
        ));
        assert!(matches!(
            Kind::from_parts(Model::BrownianMesh, Some(4), Some(0.5)),
            Err(Error::KindMismatch(_))
        ));
        assert!(Kind::from_parts(Model::BrownianMesh, Some(0), None).is_err());
        assert!(Kind::from_parts(Model::BrownianMesh, None, None).is_err());
        assert_eq!(
            Kind::from_parts(Model::Bernoulli, None, None).unwrap(),
            Kind::Bernoulli { p: 0.5 }
        );
        assert!(make_env(Kind::Gaussian, 0, 1, 0).is_err());
    }

    #[test]
    fn degenerate_bernoulli_is_all_open() {
        let env = make_env(Kind::Bernoulli { p: 1.0 }, 1, 99, 0).unwrap();
        assert_eq!(env.current().values, vec![1.0; 4]);
    }

    #[test]
    fn same_seed_same_snapshots() {
        let mut a = make_env(Kind::Gaussian, 3, 5, 2).unwrap();
        let mut b = make_env(Kind::Gaussian, 3, 5, 2).unwrap();
        assert_eq!(a.current(), b.current());
        for t in [0.1, 0.1, 0.7, 3.0] {
            assert_eq!(a.snapshot(t).unwrap(), b.snapshot(t).unwrap());
        }
    }

    #[test]
    fn zero_step_leaves_field() {
        let mut env = make_env(Kind::Uniform, 4, 1, 0).unwrap();
        let before = env.snapshot(0.3).unwrap();
        let again = env.snapshot(env.clock()).unwrap();
        assert_eq!(before, again);
    }

    #[test]
    fn time_regression_rejected() {
        let mut env = make_env(Kind::Gaussian, 2, 1, 0).unwrap();
        env.advance(1.0).unwrap();
        assert!(matches!(
            env.advance(0.5),
            Err(Error::TimeRegression { .. })
        ));
    }

    #[test]
    fn value_ranges() {
        let mut env = make_env(Kind::Bernoulli { p: 0.3 }, 10, 3, 0).unwrap();
        env.advance(0.4).unwrap();
        assert!(env.current().values.iter().all(|v| *v == 0.0 || *v == 1.0));
        let mut env = make_env(Kind::Uniform, 10, 3, 0).unwrap();
        env.advance(2.0).unwrap();
        assert!(env.current().values.iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn mesh_shape() {
        let env = make_env(Kind::BrownianMesh { m: 4 }, 2, 3, 0).unwrap();
        let snap = env.current();
        assert_eq!(snap.values.len(), 8 * 3);
        assert_eq!(snap.width(), 8);
        assert_eq!(snap.row(2).len(), 8);
    }

    #[test]
    fn tent_peak_and_support() {
        // scale 0 interval [0,1]: peak 1/2 at 1/2
        assert!((tent(0, 0, 0.5) - 0.5).abs() < 1e-15);
        assert_eq!(tent(0, 0, 0.0), 0.0);
        assert_eq!(tent(0, 0, 1.0), 0.0);
        // scale 2 interval [0.25, 0.5]: peak 2^{-2}
        assert!((tent(2, 1, 0.375) - 0.25).abs() < 1e-15);
        // negative side
        assert!((tent(0, -1, -0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dyadic_vanishes_at_origin() {
        let w = sample_dyadic_ou(&[0.0, 0.5], &[0.0, 0.4, 2.0], 8, 11).unwrap();
        for row in &w {
            assert_eq!(row[0], 0.0);
        }
    }

    #[test]
    fn dyadic_errors() {
        assert!(sample_dyadic_ou(&[1.0], &[0.0], -1, 0).is_err());
        assert!(sample_dyadic_ou(&[1e9], &[0.0], 4, 0).is_err());
        assert!(sample_dyadic_ou(&[1.0], &[1.0, 0.5], 4, 0).is_err());
    }

    #[test]
    fn dyadic_point_independent_of_batch() {
        let a = sample_dyadic_ou(&[0.75], &[0.0, 0.3], 6, 21).unwrap();
        let b = sample_dyadic_ou(&[-1.5, 0.75, 3.0], &[0.0, 0.3], 6, 21).unwrap();
        // coarse truncation depends on the largest |x|, so compare within tolerance
        assert!((a[0][0] - b[0][1]).abs() < 1e-2);
        assert!((a[1][0] - b[1][1]).abs() < 1e-2);
    }

    #[test]
    fn outer_scales_bound() {
        for x in [0.5, 1.0, 2.0, 37.0] {
            let j = dyadic_outer_scales(x);
            assert!(x * x * (-j as f64).exp2() < DYADIC_COARSE_TOL);
        }
    }
}
