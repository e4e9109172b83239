//! Sample statistics, least squares and bootstrap resampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, Tag};

/// Running mean and centred second moment (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn sem(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Welford {
        let mut w = Welford::default();
        for x in iter {
            w.push(x);
        }
        w
    }
}

/// Sample variance together with an estimate of its standard error,
/// `sqrt((m4 - s^4) / N)` from central moments.
pub fn variance_with_se(xs: &[f64]) -> (f64, f64) {
    let w: Welford = xs.iter().copied().collect();
    let n = xs.len() as f64;
    let mean = w.mean();
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (w.variance(), ((m4 - m2 * m2).max(0.0) / n).sqrt())
}

/// Ordinary least squares fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(
            "least squares needs two or more paired points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate(
            "least squares needs distinct abscissae".into(),
        ));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate(
            "log-log fit needs positive values".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&lx, &ly)?.slope)
}

/// Linear-interpolation quantile of sorted data, `q` in `[0, 1]`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Resample each group with replacement `resamples` times and apply `stat` to
/// the resampled groups. Resample `b` draws from its own keyed stream.
pub fn bootstrap<F>(groups: &[Vec<f64>], resamples: usize, seed: u64, stat: F) -> Vec<f64>
where
    F: Fn(&[Vec<f64>]) -> f64,
{
    let mut out = Vec::with_capacity(resamples);
    let mut scratch: Vec<Vec<f64>> = groups.iter().map(|g| vec![0.0; g.len()]).collect();
    for b in 0..resamples {
        let mut rng = rng::stream(seed, 0, Tag::Bootstrap, b as u64);
        for (g, s) in groups.iter().zip(scratch.iter_mut()) {
            for slot in s.iter_mut() {
                *slot = g[rng.gen_range(0..g.len())];
            }
        }
        out.push(stat(&scratch));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..100)
            .map(|i| ((i * 37) % 17) as f64 * 0.3 - 1.0)
            .collect();
        let w: Welford = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 100.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 99.0;
        assert!((w.mean() - mean).abs() < 1e-12);
        assert!((w.variance() - var).abs() < 1e-12);
        let mut a: Welford = xs[..40].iter().copied().collect();
        let b: Welford = xs[40..].iter().copied().collect();
        a.merge(&b);
        assert!((a.mean() - mean).abs() < 1e-12);
        assert!((a.variance() - var).abs() < 1e-12);
        assert_eq!(a.count(), 100);
    }

    #[test]
    fn exact_power_law_slope() {
        let x = [128.0, 256.0, 512.0, 1024.0, 2048.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(2.0 / 3.0)).collect();
        assert!((log_log_slope(&x, &y).unwrap() - 2.0 / 3.0).abs() < 1e-6);
        assert!(log_log_slope(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile_sorted(&s, 0.5), 1.5);
        assert_eq!(quantile_sorted(&s, 1.0), 3.0);
    }

    #[test]
    fn bootstrap_is_reproducible() {
        let g = vec![vec![1.0, 2.0, 3.0, 4.0]];
        let mean = |gs: &[Vec<f64>]| gs[0].iter().sum::<f64>() / 4.0;
        let a = bootstrap(&g, 50, 9, mean);
        assert_eq!(a, bootstrap(&g, 50, 9, mean));
        assert!(a.iter().all(|m| (1.0..=4.0).contains(m)));
    }
}
