//! Workloads shared by the benchmarks.

use freemult::circle::{CircleDensityProfile, CircleEngine};
use freemult::halfline::{HalfLineDensityProfile, HalfLineEngine};
use freemult::selftest::{halfline_mixture, reference_mixture};
use freemult::series::convolution_moments;
use freemult::{CircleMeasure, HalfLineMeasure, Measure, Result, SolverConfig};

/// Full density profile of `μ ⊠ λ_t`.
pub fn circle_profile(m: &CircleMeasure, t: f64, n: usize) -> Result<CircleDensityProfile> {
    CircleEngine::new(m, t, SolverConfig::default())?.density_profile(n)
}

/// Full density profile of `ν ⊠ σ_t`.
pub fn halfline_profile(m: &HalfLineMeasure, t: f64, n: usize) -> Result<HalfLineDensityProfile> {
    HalfLineEngine::new(m, t, SolverConfig::default())?.density_profile(n)
}

/// Inputs: `(label, measure)`.
pub fn circle_inputs() -> Vec<(&'static str, CircleMeasure)> {
    vec![
        ("dirac", CircleMeasure::dirac(0.0)),
        ("mixture", reference_mixture()),
    ]
}

pub fn halfline_inputs() -> Vec<(&'static str, HalfLineMeasure)> {
    vec![
        ("dirac", HalfLineMeasure::dirac(1.0)),
        ("mixture", halfline_mixture()),
    ]
}

pub fn series_moments(order: usize) -> Result<usize> {
    let m = Measure::Circle(reference_mixture());
    Ok(convolution_moments(&m, 1.0, order)?.len())
}
