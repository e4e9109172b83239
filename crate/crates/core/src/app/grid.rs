//! Parsing of numeric lists and grids given on the command line.

use crate::error::{invalid, Result};

/// Parse `a,b,c`, a single value, or `lo:hi:linK` / `lo:hi:logK` (K points, both ends included).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if let Some((range, kind)) = spec.rsplit_once(':') {
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| invalid(format!("bad grid `{spec}`")))?;
        let lo = parse_f64(lo)?;
        let hi = parse_f64(hi)?;
        let (log, count) = if let Some(k) = kind.strip_prefix("log") {
            (true, k)
        } else if let Some(k) = kind.strip_prefix("lin") {
            (false, k)
        } else {
            return Err(invalid(format!("grid `{spec}` must end in linK or logK")));
        };
        let k: usize = count
            .parse()
            .map_err(|_| invalid(format!("bad point count in `{spec}`")))?;
        if k < 2 || !(hi > lo) {
            return Err(invalid(format!(
                "grid `{spec}` needs two or more points and lo < hi"
            )));
        }
        if log && !(lo > 0.0) {
            return Err(invalid(format!(
                "log grid `{spec}` needs a positive lower end"
            )));
        }
        let pts = (0..k)
            .map(|i| {
                let u = i as f64 / (k - 1) as f64;
                if i == k - 1 {
                    hi
                } else if log {
                    lo * (hi / lo).powf(u)
                } else {
                    lo + (hi - lo) * u
                }
            })
            .collect();
        return Ok(pts);
    }
    spec.split(',').map(parse_f64).collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    let v: f64 = s
        .parse()
        .map_err(|_| invalid(format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(format!("`{s}` is not finite")));
    }
    Ok(v)
}

pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| invalid(format!("`{s}` is not a non-negative integer")))
        })
        .collect()
}

/// `x,y` as a pair of reals.
pub fn parse_pair(spec: &str) -> Result<(f64, f64)> {
    match parse_grid(spec)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(invalid(format!(
            "`{spec}` must be two comma-separated numbers"
        ))),
    }
}

/// `WxH` lattice spec for the spectral suite; returns `n` with `(n+1) x (n+1)` cells.
pub fn parse_lattice(spec: &str) -> Result<usize> {
    let (w, h) = spec
        .split_once('x')
        .ok_or_else(|| invalid(format!("lattice `{spec}` must look like 3x3")))?;
    let w: usize = w
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad lattice width in `{spec}`")))?;
    let h: usize = h
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad lattice height in `{spec}`")))?;
    if w != h || w < 2 {
        return Err(invalid(format!(
            "lattice `{spec}` must be square with side at least 2"
        )));
    }
    Ok(w - 1)
}
