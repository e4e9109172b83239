//! Exact Fourier–Walsh analysis of functions of a few fair bits.
//!
//! A configuration is a bitmask `omega`; bit `v` is the value at cell `v`. For
//! the geodesic energy on the `(n+1) x (n+1)` lattice the cell of vertex
//! `(x, y)` is `y (n + 1) + x`. Subsets `S` are bitmasks too, with characters
//! `chi_S(omega) = prod_{v in S} (2 omega(v) - 1)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lpp::max_energy_upright;
use crate::noise::{FieldSnapshot, Kind};

pub const MAX_CELLS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralTable {
    pub cells: usize,
    /// `alpha[S]` for every subset mask `S`.
    pub alpha: Vec<f64>,
    pub variance: f64,
}

impl SpectralTable {
    pub fn mean(&self) -> f64 {
        self.alpha[0]
    }

    /// `sum_S alpha(S)^2`, which equals `E f^2`.
    pub fn second_moment(&self) -> f64 {
        self.alpha.iter().map(|a| a * a).sum()
    }

    /// `f(omega) = sum_S alpha(S) chi_S(omega)`, by the inverse butterfly.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut f = self.alpha.clone();
        for bit in 0..self.cells {
            let step = 1usize << bit;
            for block in (0..f.len()).step_by(2 * step) {
                for i in block..block + step {
                    let (a, b) = (f[i], f[i + step]);
                    f[i] = a - b;
                    f[i + step] = a + b;
                }
            }
        }
        f
    }
}

fn cells_of(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "table length {len} is not a power of two"
        )));
    }
    let cells = len.trailing_zeros() as usize;
    if cells > MAX_CELLS {
        return Err(Error::TooLarge(format!(
            "{cells} cells exceed the cap of {MAX_CELLS}"
        )));
    }
    Ok(cells)
}

/// Walsh coefficients by the fast butterfly, `O(N 2^N)`.
pub fn fourier_walsh(f: &[f64]) -> Result<SpectralTable> {
    let cells = cells_of(f.len())?;
    let mut a = f.to_vec();
    for bit in 0..cells {
        let step = 1usize << bit;
        for block in (0..a.len()).step_by(2 * step) {
            for i in block..block + step {
                let (lo, hi) = (a[i], a[i + step]);
                a[i] = lo + hi;
                a[i + step] = hi - lo;
            }
        }
    }
    let scale = 1.0 / f.len() as f64;
    a.iter_mut().for_each(|x| *x *= scale);
    let variance = a[1..].iter().map(|x| x * x).sum();
    Ok(SpectralTable {
        cells,
        alpha: a,
        variance,
    })
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be non-negative, got {t}"
        )));
    }
    Ok(())
}

/// `sum_{S != {}} alpha(S)^2 e^{-t |S|}`.
pub fn two_time_covariance(table: &SpectralTable, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(table
        .alpha
        .iter()
        .enumerate()
        .skip(1)
        .map(|(s, a)| a * a * (-t * s.count_ones() as f64).exp())
        .sum())
}

/// `(T_t f)(omega) = E[f(omega^t) | omega^0 = omega]`, each bit kept with
/// probability `e^{-t}` and otherwise redrawn fairly.
pub fn noise_operator(f: &[f64], t: f64) -> Result<Vec<f64>> {
    check_time(t)?;
    let cells = cells_of(f.len())?;
    let stay = (-t).exp() + 0.5 * (-(-t).exp_m1());
    let flip = 1.0 - stay;
    let mut g = f.to_vec();
    for bit in 0..cells {
        let step = 1usize << bit;
        for block in (0..g.len()).step_by(2 * step) {
            for i in block..block + step {
                let (lo, hi) = (g[i], g[i + step]);
                g[i] = stay * lo + flip * hi;
                g[i + step] = stay * hi + flip * lo;
            }
        }
    }
    Ok(g)
}

/// Covariance of `f(omega^0)` and `f(omega^t)` by enumerating the two-time law.
pub fn two_time_covariance_direct(f: &[f64], t: f64) -> Result<f64> {
    let g = noise_operator(f, t)?;
    let len = f.len() as f64;
    let mean = f.iter().sum::<f64>() / len;
    let cross = f.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / len;
    Ok(cross - mean * mean)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSampleLaw {
    /// `q[S]` for every mask; `q[0] = 0`.
    pub q: Vec<f64>,
}

impl SpectralSampleLaw {
    pub fn total(&self) -> f64 {
        self.q.iter().sum()
    }

    /// `E_Q |S|`.
    pub fn mean_size(&self) -> f64 {
        self.q
            .iter()
            .enumerate()
            .map(|(s, p)| p * s.count_ones() as f64)
            .sum()
    }

    /// `E_Q e^{-t |S|}`.
    pub fn laplace(&self, t: f64) -> f64 {
        self.q
            .iter()
            .enumerate()
            .map(|(s, p)| p * (-t * s.count_ones() as f64).exp())
            .sum()
    }

    /// Probability of each spectral size `0..=cells`.
    pub fn size_distribution(&self) -> Vec<f64> {
        let cells = self.q.len().trailing_zeros() as usize;
        let mut out = vec![0.0; cells + 1];
        for (s, p) in self.q.iter().enumerate() {
            out[s.count_ones() as usize] += p;
        }
        out
    }
}

pub fn spectral_sample_law(table: &SpectralTable) -> Result<SpectralSampleLaw> {
    if !(table.variance > 0.0) {
        return Err(Error::Degenerate(
            "zero variance has no spectral sample".into(),
        ));
    }
    let mut q: Vec<f64> = table.alpha.iter().map(|a| a * a / table.variance).collect();
    q[0] = 0.0;
    Ok(SpectralSampleLaw { q })
}

/// `E (f - f[v])^2` for every cell `v`, `f[v]` flipping bit `v`.
pub fn influences(f: &[f64]) -> Result<Vec<f64>> {
    let cells = cells_of(f.len())?;
    let len = f.len() as f64;
    Ok((0..cells)
        .map(|v| {
            let bit = 1usize << v;
            f.iter()
                .enumerate()
                .map(|(w, &x)| (x - f[w ^ bit]).powi(2))
                .sum::<f64>()
                / len
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceSum {
    pub per_cell: Vec<f64>,
    pub sum: f64,
    /// `(4 Var)^{-1} sum_v E (f - f[v])^2`.
    pub mean_spectral_size: f64,
}

pub fn influence_sum(f: &[f64]) -> Result<InfluenceSum> {
    let per_cell = influences(f)?;
    let sum: f64 = per_cell.iter().sum();
    let len = f.len() as f64;
    let mean = f.iter().sum::<f64>() / len;
    let var = f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / len;
    if !(var > 0.0) {
        return Err(Error::Degenerate(
            "constant function: mean spectral size undefined".into(),
        ));
    }
    Ok(InfluenceSum {
        per_cell,
        sum,
        mean_spectral_size: sum / (4.0 * var),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityBound {
    /// `E (f^0 - f^t)^2` by enumeration.
    pub lhs: f64,
    /// `2 Var (1 - E_Q e^{-t |S|})` from the spectrum.
    pub rhs: f64,
}

pub fn stability_bound_check(f: &[f64], t: f64) -> Result<StabilityBound> {
    let table = fourier_walsh(f)?;
    let law = spectral_sample_law(&table)?;
    let g = noise_operator(f, t)?;
    let len = f.len() as f64;
    let second = f.iter().map(|x| x * x).sum::<f64>() / len;
    let cross = f.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / len;
    Ok(StabilityBound {
        lhs: 2.0 * (second - cross),
        rhs: 2.0 * table.variance * (1.0 - law.laplace(t)),
    })
}

/// Geodesic energy `M_n(omega)` of every 0/1 configuration on the
/// `(n+1) x (n+1)` lattice.
pub fn energy_table(n: usize) -> Result<Vec<f64>> {
    let cells = (n + 1) * (n + 1);
    if cells > MAX_CELLS {
        return Err(Error::TooLarge(format!(
            "lattice with {cells} cells exceeds the cap of {MAX_CELLS}"
        )));
    }
    let kind = Kind::Bernoulli { p: 0.5 };
    let mut snap = FieldSnapshot::from_values(kind, n, vec![0.0; cells])?;
    (0..1usize << cells)
        .map(|omega| {
            for (v, x) in snap.values.iter_mut().enumerate() {
                *x = ((omega >> v) & 1) as f64;
            }
            Ok(max_energy_upright(&snap, (0, 0), (n, n))?.0)
        })
        .collect()
}

/// Total influence of the cells at each distance `|x - y|` from the diagonal.
pub fn influence_by_diagonal_distance(n: usize, per_cell: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (v, inf) in per_cell.iter().enumerate() {
        let (x, y) = (v % (n + 1), v / (n + 1));
        out[x.abs_diff(y)] += inf;
    }
    out
}
