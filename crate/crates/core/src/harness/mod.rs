//! Monte Carlo harness: estimates, verdicts, and the battery of checks.
//!
//! Samples are independent tasks keyed by sample index. They may run on any
//! number of threads; results are collected in index order and reduced
//! sequentially, so every report is bit-for-bit reproducible from its seed.

mod dynamics;
mod excursions;
mod fits;
mod profiles;
mod stability;
pub mod stats;

pub use dynamics::{
    check_dynamical_variance, check_mean_overlap_monotone, exp_product_weights, is_conclusive,
    mean_overlap_curve, quadratic_grid, transition_sweep, SweepRow, VarianceParams,
};
pub use excursions::{
    additivity_instance, excursion_additivity_check, AdditivityInstance, ADDITIVITY_TOL,
};
pub use fits::{exponent_fit, ExponentFit, FitResult, SizeSummary, FIT_SIZES};
pub use profiles::{twin_peaks_and_deficit, TwinPeaksParams, TwinPeaksResult, TIE_TOL};
pub use stability::{
    check_crude_stability, check_weight_stability, refinement_check, refinement_instance,
    stability_grid, RefinementInstance, StabilityGrid, REFINEMENT_QUANTUM,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use stats::Welford;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub sem: f64,
    pub n_samples: usize,
    pub seed_root: u64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64], seed_root: u64) -> Estimate {
        let w: Welford = xs.iter().copied().collect();
        Estimate {
            mean: w.mean(),
            sem: w.sem(),
            n_samples: xs.len(),
            seed_root,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Exact(f64),
    Estimate(Estimate),
}

impl Quantity {
    pub fn value(&self) -> f64 {
        match self {
            Quantity::Exact(v) => *v,
            Quantity::Estimate(e) => e.mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// How `lhs` is compared with `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `|lhs - rhs| <= allowance`.
    Equal,
    /// `lhs <= rhs + allowance`.
    AtMost,
    /// `lhs >= rhs - allowance`.
    AtLeast,
    /// Reported only.
    Measurement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub relation: Relation,
    pub allowance: f64,
    /// Human-readable tolerance policy.
    pub tolerance: String,
    pub verdict: Verdict,
    pub details: serde_json::Value,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        lhs: Quantity,
        rhs: Quantity,
        relation: Relation,
        allowance: f64,
        tolerance: impl Into<String>,
    ) -> CheckReport {
        let mut r = CheckReport {
            name: name.into(),
            lhs,
            rhs,
            relation,
            allowance,
            tolerance: tolerance.into(),
            verdict: Verdict::Inconclusive,
            details: serde_json::Value::Null,
        };
        r.verdict = r.derive_verdict();
        r
    }

    /// The verdict implied by the comparison fields.
    pub fn derive_verdict(&self) -> Verdict {
        let (l, r, a) = (self.lhs.value(), self.rhs.value(), self.allowance);
        if l.is_nan() || r.is_nan() || a.is_nan() {
            return Verdict::Inconclusive;
        }
        let ok = match self.relation {
            Relation::Equal => (l - r).abs() <= a,
            Relation::AtMost => l <= r + a,
            Relation::AtLeast => l >= r - a,
            Relation::Measurement => return Verdict::Inconclusive,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> CheckReport {
        self.details = details;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// One output row: `model,n,m,param,t,tau,estimate,sem,samples,seed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub model: String,
    pub n: usize,
    pub m: usize,
    pub param: String,
    pub t: f64,
    pub tau: f64,
    pub estimate: f64,
    pub sem: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Evaluate `f` on every sample index, possibly in parallel, returning results
/// in index order. The first error (by index) wins.
pub fn map_samples<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let all: Vec<Result<T>> = (0..count).into_par_iter().map(f).collect();
    all.into_iter().collect()
}

/// `t = tau n^{-1/3}`.
pub fn time_from_tau(tau: f64, n: usize) -> f64 {
    tau / (n as f64).cbrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_follow_fields() {
        let r = CheckReport::new(
            "x",
            Quantity::Exact(1.0),
            Quantity::Exact(1.05),
            Relation::Equal,
            0.1,
            "abs",
        );
        assert_eq!(r.verdict, Verdict::Pass);
        let r = CheckReport::new(
            "x",
            Quantity::Exact(2.0),
            Quantity::Exact(1.0),
            Relation::AtMost,
            0.5,
            "",
        );
        assert_eq!(r.verdict, Verdict::Fail);
        let r = CheckReport::new(
            "x",
            Quantity::Exact(0.0),
            Quantity::Exact(1.0),
            Relation::AtLeast,
            1.0,
            "",
        );
        assert_eq!(r.verdict, Verdict::Pass);
        let r = CheckReport::new(
            "x",
            Quantity::Exact(f64::NAN),
            Quantity::Exact(1.0),
            Relation::Equal,
            1.0,
            "",
        );
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = CheckReport::new(
            "x",
            Quantity::Exact(0.0),
            Quantity::Exact(0.0),
            Relation::Measurement,
            0.0,
            "",
        );
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn samples_come_back_in_order() {
        let v = map_samples(1000, |i| Ok(i * 2)).unwrap();
        assert!(v.iter().enumerate().all(|(i, x)| *x == 2 * i));
        let e = map_samples(10, |i| {
            if i >= 3 {
                Err(crate::Error::Degenerate(format!("{i}")))
            } else {
                Ok(i)
            }
        });
        assert_eq!(e, Err(crate::Error::Degenerate("3".into())));
    }
}
