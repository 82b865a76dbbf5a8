//! Power-law order of a density at a support endpoint.

use serde::Serialize;

use crate::{Error, Result};

/// Least-squares fit of `ln p = slope·ln Δ + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in `ln p`.
    pub max_residual: f64,
    pub points: usize,
}

/// Default fit window `Δ ∈ [1e-4, 1e-2]`.
pub const EDGE_WINDOW: (f64, f64) = (1e-4, 1e-2);

/// Fits the edge exponent from `points` log-spaced distances in
/// `[lo, hi]`. `density(Δ)` is the density at distance `Δ` inside the
/// support and must be positive there.
pub fn fit_edge_exponent(
    lo: f64,
    hi: f64,
    points: usize,
    density: impl Fn(f64) -> Result<f64>,
) -> Result<EdgeFit> {
    if !(lo > 0.0 && hi > lo && points >= 3) {
        return Err(Error::domain(
            "fit_edge_exponent",
            format!("window [{lo}, {hi}] with {points} points"),
        ));
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    let mut xy = Vec::with_capacity(points);
    for k in 0..points {
        let d = lo * (k as f64 * step).exp();
        let p = density(d)?;
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Convergence {
                op: "fit_edge_exponent",
                detail: format!("density {p} at distance {d}"),
            });
        }
        xy.push((d.ln(), p.ln()));
    }
    let n = points as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xy
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(EdgeFit {
        slope,
        intercept,
        max_residual,
        points,
    })
}
