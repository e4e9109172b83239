//! Dynamical last passage percolation laboratory.
//!
//! Noise environments evolving under exact Markov dynamics, exact geodesic
//! solvers, the KPZ scaling map, overlap and excursion analysis, exact
//! Fourier–Walsh identities on small lattices, the time-zero proxy of a
//! dynamic polymer, and a Monte Carlo harness tying them together.

pub mod error;
pub mod excursion;
pub mod geometry;
pub mod harness;
pub mod lpp;
pub mod noise;
pub mod overlap;
pub mod proxy;
pub mod rng;
pub mod scaling;
pub mod spectral;

pub mod app;

pub use error::{Error, Result};
