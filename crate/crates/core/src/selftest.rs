//! Release gate: numbered checks of the engines against closed forms, the
//! series oracle and structural identities.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::CircleEngine;
use crate::closed_forms::{lambda_density_at, lambda_support, sigma_support};
use crate::edge::{fit_edge_exponent, EDGE_WINDOW};
use crate::halfline::HalfLineEngine;
use crate::measure::wrap_angle;
use crate::roots::bisect;
use crate::series::{convolution_moments, convolve_moments, Flow};
use crate::{AcPart, Atom, CircleMeasure, Error, HalfLineMeasure, Measure, Result, SolverConfig};

const TWO_PI: f64 = 2.0 * PI;

/// Outcome of one criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Failed under tolerances looser than the defaults.
    Degraded,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub status: Status,
    /// Worst observed deviation, in the units of `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub tol_root: f64,
    pub tol_quad: f64,
    pub results: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status == Status::Pass)
    }
}

/// What a check observed.
struct Check {
    pass: bool,
    measured: f64,
    tolerance: f64,
    detail: String,
}

impl Check {
    fn within(measured: f64, tolerance: f64, detail: String) -> Self {
        Check {
            pass: measured <= tolerance,
            measured,
            tolerance,
            detail,
        }
    }

    fn and(mut self, ok: bool, why: &str) -> Self {
        if !ok {
            self.pass = false;
            self.detail = format!("{}; {why}", self.detail);
        }
        self
    }
}

pub const CRITERIA: [&str; 13] = [
    "haar fixed point",
    "lambda_t closed form agreement",
    "lambda_1 support endpoints",
    "lambda_1 maximum density",
    "normalization",
    "moment oracle and semigroup",
    "component monotonicity",
    "sigma_1 support",
    "sigma_1 density at x = 1",
    "sigma_t symmetry",
    "edge exponents",
    "rotation and dilation equivariance",
    "profile performance",
];

/// `0.7 δ_1 + 0.3 δ_i`.
pub fn two_atom_mixture() -> CircleMeasure {
    CircleMeasure::from_atoms(&[(0.0, 0.7), (0.5 * PI, 0.3)]).expect("valid atoms")
}

/// `½ δ_1 + ½ δ_{-1}`.
pub fn antipodal_pair() -> CircleMeasure {
    CircleMeasure::from_atoms(&[(0.0, 0.5), (PI, 0.5)]).expect("valid atoms")
}

/// Five atoms of mass 0.1 plus a smooth density of mass 0.5 on a 64-node
/// periodic grid.
pub fn reference_mixture() -> CircleMeasure {
    let n = 64;
    let grid: Vec<f64> = (0..n).map(|k| -PI + TWO_PI * k as f64 / n as f64).collect();
    let raw: Vec<f64> = grid
        .iter()
        .map(|&x| (1.0 + (x - 2.0).cos()).powi(2))
        .collect();
    let s: f64 = raw.iter().sum::<f64>() * TWO_PI / n as f64;
    let values = raw.iter().map(|v| 0.5 * v / s).collect();
    let atoms = [0.0, 0.5, -1.0, -2.5, 2.9]
        .iter()
        .map(|&x| Atom::new(x, 0.1))
        .collect();
    CircleMeasure::new(atoms, Some(AcPart { grid, values })).expect("valid mixture")
}

/// `½ δ_1 + ¼ δ_2` plus uniform mass ¼ on `[0.5, 3]`.
pub fn halfline_mixture() -> HalfLineMeasure {
    HalfLineMeasure::new(
        vec![Atom::new(1.0, 0.5), Atom::new(2.0, 0.25)],
        Some(AcPart {
            grid: vec![0.5, 3.0],
            values: vec![0.1, 0.1],
        }),
    )
    .expect("valid mixture")
}

fn looser_than_default(cfg: &SolverConfig) -> bool {
    let d = SolverConfig::default();
    cfg.tol_root > d.tol_root || cfg.tol_quad > d.tol_quad
}

/// Runs every criterion.
pub fn run_selftest(cfg: &SolverConfig) -> SelftestReport {
    SelftestReport {
        tol_root: cfg.tol_root,
        tol_quad: cfg.tol_quad,
        results: (1..=CRITERIA.len())
            .map(|id| run_criterion(id, cfg))
            .collect(),
    }
}

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, cfg: &SolverConfig) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => haar_fixed_point(cfg),
        2 => lambda_agreement(cfg),
        3 => lambda_support_endpoints(cfg),
        4 => lambda_maximum(cfg),
        5 => normalization(cfg),
        6 => moment_oracle(cfg),
        7 => component_monotonicity(cfg),
        8 => sigma_support_check(cfg),
        9 => sigma_at_one(cfg),
        10 => sigma_symmetry(cfg),
        11 => edge_exponents(cfg),
        12 => equivariance(cfg),
        13 => performance(cfg),
        _ => Err(Error::domain("run_criterion", format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let name = CRITERIA
        .get(id.wrapping_sub(1))
        .copied()
        .unwrap_or("unknown");
    let (pass, measured, tolerance, detail) = match outcome {
        Ok(c) => (c.pass, c.measured, c.tolerance, c.detail),
        Err(e) => (false, f64::NAN, f64::NAN, format!("error: {e}")),
    };
    let status = if pass {
        Status::Pass
    } else if looser_than_default(cfg) {
        Status::Degraded
    } else {
        Status::Fail
    };
    CriterionResult {
        id,
        name,
        status,
        measured,
        tolerance,
        detail,
        seconds,
    }
}

fn haar_fixed_point(cfg: &SolverConfig) -> Result<Check> {
    let start = Instant::now();
    let haar = CircleMeasure::haar();
    let mut worst: f64 = 0.0;
    for &t in &[0.5, 1.0, 4.0] {
        let e = CircleEngine::new(&haar, t, *cfg)?;
        let p = e.density_profile(512)?;
        for s in &p.samples {
            worst = worst.max((s.density - 1.0 / TWO_PI).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Check::within(
        worst,
        1e-6,
        format!("max |p - 1/2π| = {worst:.3e} in {secs:.2} s"),
    )
    .and(secs < 2.0, "slower than 2 s"))
}

/// `n` evenly spaced interior points of `[lo, hi]`.
fn interior(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64)
}

fn lambda_agreement(cfg: &SolverConfig) -> Result<Check> {
    let dirac = CircleMeasure::dirac(0.0);
    let mut worst: f64 = 0.0;
    let mut at = (0.0, 0.0);
    for &t in &[1.0, 2.0, 3.9, 4.5] {
        let e = CircleEngine::new(&dirac, t, *cfg)?;
        let end = lambda_support(t)?.endpoint.unwrap_or(PI);
        for phi in interior(-end, end, 200) {
            let d = (e.density_at(phi)? - lambda_density_at(t, phi)?.density).abs();
            if d > worst {
                worst = d;
                at = (t, phi);
            }
        }
    }
    Ok(Check::within(
        worst,
        1e-8,
        format!("max |Δp| = {worst:.3e} (t = {}, φ = {:.4})", at.0, at.1),
    ))
}

fn lambda_support_endpoints(cfg: &SolverConfig) -> Result<Check> {
    let dirac = CircleMeasure::dirac(0.0);
    let end = PI / 3.0 + 0.75f64.sqrt();
    let arcs = CircleEngine::new(&dirac, 1.0, *cfg)?.support_components(512)?;
    let full = CircleEngine::new(&dirac, 4.5, *cfg)?.support_components(512)?;
    let err = match arcs.arcs.as_slice() {
        [a] if !a.is_full() => (a.lo + end).abs().max((a.hi - end).abs()),
        _ => f64::INFINITY,
    };
    Ok(Check::within(
        err,
        1e-6,
        format!("{} arc(s) at t = 1, endpoint error {err:.3e}", arcs.count()),
    )
    .and(full.is_full(), "t = 4.5 support is not the full circle"))
}

/// `a_t`, the root of `ln a + (t/2)(1 + a)/(1 - a) = 0`.
fn floor_radius(t: f64) -> f64 {
    let (a, b) = bisect(1e-300f64.ln(), -1e-16, 1e-15, 2000, |s: f64| {
        let a = s.exp();
        s + 0.5 * t * (1.0 + a) / (1.0 - a) < 0.0
    });
    (0.5 * (a + b)).exp()
}

fn lambda_maximum(cfg: &SolverConfig) -> Result<Check> {
    let dirac = CircleMeasure::dirac(0.0);
    let e = CircleEngine::new(&dirac, 1.0, *cfg)?;
    let p = e.density_profile(512)?;
    let want = -floor_radius(1.0).ln() / PI;
    let top = p
        .max()
        .ok_or_else(|| Error::domain("lambda_maximum", "empty profile"))?;
    let err = (top.density - want).abs();
    let mut by_dist: Vec<(f64, f64)> = p
        .samples
        .iter()
        .map(|s| (wrap_angle(s.phi).abs(), s.density))
        .collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = by_dist.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    Ok(Check::within(
        err,
        1e-4,
        format!(
            "max p = {:.8} at φ = {:.2e}, expected {want:.8}",
            top.density, top.phi
        ),
    )
    .and(top.phi.abs() < 1e-9, "maximum not at φ = 0")
    .and(monotone, "profile not non-increasing in |φ|"))
}

fn normalization(cfg: &SolverConfig) -> Result<Check> {
    let cases = [
        ("dirac", CircleMeasure::dirac(0.0)),
        ("haar", CircleMeasure::haar()),
        ("two-atom", two_atom_mixture()),
        ("mixture", reference_mixture()),
    ];
    let mut worst: f64 = 0.0;
    let mut which = "";
    for (name, m) in &cases {
        for &t in &[0.5, 2.0] {
            let p = CircleEngine::new(m, t, *cfg)?.density_profile(512)?;
            let d = (p.mass() - 1.0).abs();
            if d > worst {
                worst = d;
                which = name;
            }
        }
    }
    Ok(Check::within(
        worst,
        1e-6,
        format!("max |mass - 1| = {worst:.3e} ({which})"),
    ))
}

fn moment_oracle(cfg: &SolverConfig) -> Result<Check> {
    let m = two_atom_mixture();
    let p = CircleEngine::new(&m, 1.0, *cfg)?.density_profile(512)?;
    let series = convolution_moments(&Measure::Circle(m.clone()), 1.0, 8)?;
    let quad_err = series
        .iter()
        .enumerate()
        .map(|(k, s)| (p.moment(k as i32 + 1) - s).norm())
        .fold(0.0, f64::max);
    let order = crate::series::DEFAULT_ORDER;
    let base: Vec<Complex64> = (1..=order as u32).map(|n| m.moment(n)).collect();
    let half = convolve_moments(&base, 0.5, order, Flow::Circle)?;
    let twice = convolve_moments(&half, 0.5, order, Flow::Circle)?;
    let once = convolve_moments(&base, 1.0, order, Flow::Circle)?;
    let semi = twice
        .iter()
        .zip(&once)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(Check::within(
        quad_err,
        1e-6,
        format!("moment error {quad_err:.3e} (n ≤ 8), semigroup error {semi:.3e}"),
    )
    .and(semi <= 1e-10, "semigroup mismatch above 1e-10"))
}

/// Number of arcs of `{θ : 1 - t/(2 sin²θ) < 0}`; at `t = 2` it is the
/// circle minus `±π/2`.
fn antipodal_u_count(t: f64) -> usize {
    if t > 2.0 {
        1
    } else {
        2
    }
}

fn component_monotonicity(cfg: &SolverConfig) -> Result<Check> {
    let m = antipodal_pair();
    let ladder = [0.5, 1.0, 1.5, 2.0, 2.5, 4.0];
    let mut counts = Vec::new();
    let mut oracle_ok = true;
    for &t in &ladder {
        let e = CircleEngine::new(&m, t, *cfg)?;
        let u = e.u_set(512)?;
        oracle_ok &= u.count() == antipodal_u_count(t);
        counts.push(e.support_components(512)?.count());
    }
    let at = |t: f64| counts[ladder.iter().position(|&s| s == t).expect("on ladder")];
    let monotone = counts.windows(2).all(|w| w[1] <= w[0]);
    let ok = at(1.0) == 2 && at(2.5) == 1 && monotone && oracle_ok;
    Ok(Check {
        pass: ok,
        measured: if ok { 0.0 } else { 1.0 },
        tolerance: 0.0,
        detail: format!(
            "component counts {counts:?} along {ladder:?}; U-set oracle match: {oracle_ok}"
        ),
    })
}

fn sigma_support_check(cfg: &SolverConfig) -> Result<Check> {
    let dirac = HalfLineMeasure::dirac(1.0);
    let set = HalfLineEngine::new(&dirac, 1.0, *cfg)?.support_components(512)?;
    let s = sigma_support(1.0)?;
    let (lo, hi) = match set.intervals.as_slice() {
        [i] => (i.lo, i.hi),
        _ => (f64::NAN, f64::NAN),
    };
    let err = (lo - s.x3).abs().max((hi - s.x4).abs());
    let product = (lo * hi - 1.0).abs();
    Ok(Check::within(
        err,
        1e-5,
        format!(
            "[{lo:.8}, {hi:.8}] vs [{:.8}, {:.8}], |x3·x4 - 1| = {product:.3e}",
            s.x3, s.x4
        ),
    )
    .and(product <= 1e-10, "x3·x4 differs from 1 by more than 1e-10"))
}

/// Root of `cot(θ/2) = 2θ` on `(0, π)`.
fn u_at_one() -> f64 {
    let (a, b) = bisect(1e-9, PI - 1e-9, 1e-16, 400, |th: f64| {
        1.0 / (0.5 * th).tan() > 2.0 * th
    });
    0.5 * (a + b)
}

fn sigma_at_one(cfg: &SolverConfig) -> Result<Check> {
    let dirac = HalfLineMeasure::dirac(1.0);
    let e = HalfLineEngine::new(&dirac, 1.0, *cfg)?;
    let want = u_at_one() / PI;
    let err = (e.density_at(1.0)? - want).abs();
    let s = sigma_support(1.0)?;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let x = s.x3 * (s.x4 / s.x3).powf((k as f64 + 0.5) / 100.0);
        let p = e.locate(x)?;
        let l = (Complex64::new(1.0, 0.0) - Complex64::from_polar(p.r, p.u)).inv();
        let lhs = l / (l - 1.0) * ((l - 0.5) * 1.0).exp();
        worst = worst.max((lhs - x).norm());
    }
    Ok(Check::within(
        err,
        1e-4,
        format!("q(1) error {err:.3e} (expected {want:.8}), max residual {worst:.3e}"),
    )
    .and(worst <= 1e-8, "implicit equation residual above 1e-8"))
}

fn sigma_symmetry(cfg: &SolverConfig) -> Result<Check> {
    let dirac = HalfLineMeasure::dirac(1.0);
    let mut worst: f64 = 0.0;
    let mut decreasing = true;
    for &t in &[0.5, 1.0, 3.0] {
        let e = HalfLineEngine::new(&dirac, t, *cfg)?;
        let x4 = sigma_support(t)?.x4;
        let mut prev = f64::INFINITY;
        for k in 0..256 {
            let x = x4.powf(k as f64 / 256.0);
            let q = e.density_at(x)?;
            let q_inv = e.density_at(1.0 / x)?;
            worst = worst.max((x * q - q_inv / x).abs());
            decreasing &= q < prev;
            prev = q;
        }
    }
    Ok(Check::within(
        worst,
        1e-6,
        format!("max |x q(x) - q(1/x)/x| = {worst:.3e}"),
    )
    .and(decreasing, "q not strictly decreasing on [1, x4)"))
}

fn edge_exponents(cfg: &SolverConfig) -> Result<Check> {
    let (lo, hi) = EDGE_WINDOW;
    let dirac = CircleMeasure::dirac(0.0);
    let mut fits = Vec::new();
    for &t in &[1.0, 2.0, 3.0] {
        let e = CircleEngine::new(&dirac, t, *cfg)?;
        let end = lambda_support(t)?.endpoint.unwrap_or(PI);
        let right = fit_edge_exponent(lo, hi, 16, |d| e.density_at(end - d))?;
        let left = fit_edge_exponent(lo, hi, 16, |d| e.density_at(-end + d))?;
        fits.push((format!("λ_{t} right"), right.slope, 0.5));
        fits.push((format!("λ_{t} left"), left.slope, 0.5));
    }
    let e = CircleEngine::new(&dirac, 4.0, *cfg)?;
    let closing = fit_edge_exponent(lo, hi, 16, |d| e.density_at(PI - d))?;
    fits.push(("λ_4 at π".into(), closing.slope, 1.0 / 3.0));
    let s = sigma_support(1.0)?;
    let sd = HalfLineMeasure::dirac(1.0);
    let he = HalfLineEngine::new(&sd, 1.0, *cfg)?;
    let low = fit_edge_exponent(lo, hi, 16, |d| he.density_at(s.x3 + d))?;
    let high = fit_edge_exponent(lo, hi, 16, |d| he.density_at(s.x4 - d))?;
    fits.push(("σ_1 at x3".into(), low.slope, 0.5));
    fits.push(("σ_1 at x4".into(), high.slope, 0.5));
    let worst = fits.iter().map(|f| (f.1 - f.2).abs()).fold(0.0, f64::max);
    let detail = fits
        .iter()
        .map(|f| format!("{} {:.4}", f.0, f.1))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Check::within(worst, 0.05, detail))
}

fn equivariance(cfg: &SolverConfig) -> Result<Check> {
    let alpha = 1.1;
    let base = two_atom_mixture();
    let turned = base.rotate(alpha);
    let (e0, e1) = (
        CircleEngine::new(&base, 1.0, *cfg)?,
        CircleEngine::new(&turned, 1.0, *cfg)?,
    );
    let mut rot: f64 = 0.0;
    for phi in interior(-PI, PI, 128) {
        rot = rot.max((e1.density_at(phi)? - e0.density_at(phi - alpha)?).abs());
    }
    let c = 3.0;
    let nu = halfline_mixture();
    let scaled = nu.dilate(c)?;
    let (h0, h1) = (
        HalfLineEngine::new(&nu, 1.0, *cfg)?,
        HalfLineEngine::new(&scaled, 1.0, *cfg)?,
    );
    let set = h0.support_components(512)?;
    let mut dil: f64 = 0.0;
    for i in &set.intervals {
        for x in interior(i.lo, i.hi, 64) {
            dil = dil.max((h1.density_at(c * x)? - h0.density_at(x)? / c).abs());
        }
    }
    Ok(Check::within(
        rot.max(dil),
        1e-8,
        format!("rotation error {rot:.3e}, dilation error {dil:.3e}"),
    ))
}

fn timed_profile(m: &CircleMeasure, cfg: &SolverConfig, threads: usize) -> Result<f64> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain("performance", e.to_string()))?;
    pool.install(|| {
        let start = Instant::now();
        let e = CircleEngine::new(m, 1.0, *cfg)?;
        e.density_profile(512)?;
        Ok(start.elapsed().as_secs_f64())
    })
}

fn performance(cfg: &SolverConfig) -> Result<Check> {
    let m = reference_mixture();
    let cfg = SolverConfig {
        tol_root: 1e-12,
        tol_quad: 1e-9,
        ..*cfg
    };
    let single = timed_profile(&m, &cfg, 1)?;
    let eight = timed_profile(&m, &cfg, 8)?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    Ok(Check::within(
        single,
        5.0,
        format!("1 thread {single:.2} s, 8 threads {eight:.2} s ({cores} cores available)"),
    )
    .and(eight < 2.0, "8-thread run slower than 2 s"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_radius_matches() {
        assert!((floor_radius(1.0) - 0.352_175_060_660_117).abs() < 1e-13);
    }

    #[test]
    fn u_at_one_matches() {
        assert!((u_at_one() - 0.960_188_873_914_783).abs() < 1e-13);
    }

    #[test]
    fn reference_mixture_is_normalized() {
        let m = reference_mixture();
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
        assert!(m.validate().is_admissible());
        assert!((halfline_mixture().total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_criterion_fails() {
        let r = run_criterion(99, &SolverConfig::default());
        assert_eq!(r.status, Status::Fail);
    }
}
