//! `ν ⊠ σ_t` on the positive half-line.
//!
//! For each radius `r` the boundary angle `u_t(r)` of the subordination
//! domain is the root in `θ` of
//!
//! ```text
//! f_t(r, θ) = 1 - t·(sin θ/θ)·∫ rξ / |1 - rξ e^{iθ}|² dν(ξ)
//! ```
//!
//! (or 0 when the edge value `f_t(r)` is nonnegative). The boundary map
//! `Λ(r) = r·exp((t/2)∫ (r²ξ² - 1)/|1 - rξ e^{iu}|² dν)` is an increasing
//! homeomorphism of `(0, ∞)` and the convolution has density
//! `Λ(r)·u_t(r)/(πt)` at `x = 1/Λ(r)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::measure::HalfLineMeasure;
use crate::roots::{bisect, golden_min};
use crate::sweep::adaptive_sweep;
use crate::{Error, Result, SolverConfig};

/// Edge integrals above this are treated as divergent.
pub const EDGE_CAP: f64 = 1e12;

const THETA_MIN: f64 = 1e-12;
const THETA_MAX: f64 = PI - 1e-12;

/// Per-unit-`τ` error target of the profile sweep, in units of `tol_quad`.
const PROFILE_TOL: f64 = 100.0;

/// Closed interval `[lo, hi]` in `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Disjoint closed intervals in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSet {
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }
}

/// One profile sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfLineSample {
    /// Source radius.
    pub r: f64,
    /// Boundary angle `u_t(r)`.
    pub u: f64,
    /// Output point `1/Λ(r)`.
    pub x: f64,
    /// Density of `ν_t` at `x`.
    pub density: f64,
    /// Quadrature weight in `x`; `Σ weight·f(x)·density ≈ ∫ f dν_t`.
    pub weight: f64,
}

/// Density of `ν ⊠ σ_t` sampled along the boundary, sorted by `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfLineDensityProfile {
    pub t: f64,
    pub samples: Vec<HalfLineSample>,
}

impl HalfLineDensityProfile {
    pub fn mass(&self) -> f64 {
        self.samples.iter().map(|s| s.weight * s.density).sum()
    }

    /// `∫ xⁿ q(x) dx`.
    pub fn moment(&self, n: i32) -> f64 {
        self.samples
            .iter()
            .map(|s| s.weight * s.density * s.x.powi(n))
            .sum()
    }

    pub fn max(&self) -> Option<&HalfLineSample> {
        self.samples
            .iter()
            .max_by(|a, b| a.density.total_cmp(&b.density))
    }
}

/// Solver for a fixed measure and time.
#[derive(Debug, Clone)]
pub struct HalfLineEngine<'a> {
    measure: &'a HalfLineMeasure,
    t: f64,
    cfg: SolverConfig,
    /// Smallest and largest positive support point.
    range: (f64, f64),
}

impl<'a> HalfLineEngine<'a> {
    pub fn new(measure: &'a HalfLineMeasure, t: f64, cfg: SolverConfig) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(
                "half-line engine",
                format!("t = {t} must be positive"),
            ));
        }
        if !(cfg.tol_root > 0.0 && cfg.tol_quad > 0.0) {
            return Err(Error::domain(
                "half-line engine",
                "tolerances must be positive",
            ));
        }
        let range = measure
            .support_range()
            .ok_or_else(|| Error::InvalidMeasure("concentrated at zero".into()))?;
        Ok(HalfLineEngine {
            measure,
            t,
            cfg,
            range,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `f_t(r, θ)` for `r > 0`, `0 < θ < π`.
    pub fn f_value(&self, r: f64, theta: f64) -> Result<f64> {
        let k = self.measure.arg_kernel(r, theta, self.cfg.tol_quad)?;
        Ok(1.0 - self.t * theta.sin() / theta * k)
    }

    fn edge_integral(&self, r: f64) -> f64 {
        let g = self.measure.edge_kernel(r, self.cfg.tol_quad);
        if g > EDGE_CAP {
            f64::INFINITY
        } else {
            g
        }
    }

    /// `f_t(r) = lim_{θ→0} f_t(r, θ)`; `-∞` when `1/r` meets the support.
    pub fn f_edge(&self, r: f64) -> f64 {
        1.0 - self.t * self.edge_integral(r)
    }

    /// `u_t(r)`.
    pub fn boundary_angle(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(
                "boundary_angle",
                format!("r = {r} must be positive"),
            ));
        }
        if self.f_edge(r) >= 0.0 {
            return Ok(0.0);
        }
        let mut failure = None;
        let (a, b) = bisect(
            THETA_MIN,
            THETA_MAX,
            self.cfg.tol_root,
            self.cfg.max_iter,
            |th| match self.f_value(r, th) {
                Ok(f) => f < 0.0,
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            },
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(0.5 * (a + b)),
        }
    }

    /// `ln Λ(r)` given `u = u_t(r)`.
    pub fn log_lambda(&self, r: f64, u: f64) -> Result<f64> {
        let m = self.measure.mod_kernel(r, u, self.cfg.tol_quad)?;
        Ok(r.ln() + 0.5 * self.t * m)
    }

    /// `Λ_{t,ν}(r)`.
    pub fn lambda_value(&self, r: f64) -> Result<f64> {
        let u = self.boundary_angle(r)?;
        Ok(self.log_lambda(r, u)?.exp())
    }

    /// `d ln Λ / d ln r` at `(r, u)`.
    ///
    /// Along the boundary `log H(r e^{iu}) = ln Λ`, so with `G = (log H)'`
    /// and `A = 1/(G e^{iu})` one gets `Λ'/Λ = 1/Re A`.
    pub fn log_lambda_slope(&self, r: f64, u: f64) -> f64 {
        let z = Complex64::from_polar(r, u);
        let g = z.inv() - self.measure.resolvent_derivative(z, self.cfg.tol_quad) * self.t;
        let a = (g * Complex64::from_polar(1.0, u)).inv();
        r / a.re
    }

    /// Default sweep range `[0.02/ξ_max, 50/ξ_min]`, widened until the
    /// edge value is nonnegative at both ends.
    fn sweep_range(&self) -> (f64, f64) {
        let (lo_x, hi_x) = self.range;
        let mut lo = 0.02 / hi_x;
        let mut hi = 50.0 / lo_x;
        for _ in 0..60 {
            if self.f_edge(lo) >= 0.0 {
                break;
            }
            lo *= 0.25;
        }
        for _ in 0..60 {
            if self.f_edge(hi) >= 0.0 {
                break;
            }
            hi *= 4.0;
        }
        (lo, hi)
    }

    fn log_grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.sweep_range();
        let (a, b) = (lo.ln(), hi.ln());
        (0..n)
            .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
            .collect()
    }

    /// `V_{t,ν} = {r: f_t(r) < 0}` from `n` log-spaced radii, seeded with
    /// the reciprocals of the support points of `ν`.
    ///
    /// Away from the reciprocal support `r ↦ ∫ rξ/(1 - rξ)² dν` is convex,
    /// so a stretch between neighbouring seeds holds at most one gap of `V`.
    pub fn v_set(&self, n: usize) -> Result<IntervalSet> {
        if n < 64 {
            return Err(Error::domain("v_set", format!("grid of {n} < 64 points")));
        }
        let m = self.measure;
        let mut pts: Vec<(f64, bool)> = m
            .support_points()
            .iter()
            .map(|&x| ((1.0 / x).ln(), true))
            .collect();
        pts.extend(self.log_grid(n).into_iter().map(|r| (r.ln(), false)));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 |= a.1;
                true
            } else {
                false
            }
        });

        let g: Vec<f64> = pts
            .par_iter()
            .map(|p| self.edge_integral(p.0.exp()))
            .collect();
        let in_v = |v: f64| self.t * v > 1.0;
        let tol = self.cfg.tol_root;
        // endpoints are refined in r to the root tolerance
        let boundary = |a: f64, b: f64| {
            let va = in_v(self.edge_integral(a.exp()));
            let (x, y) = bisect(a.exp(), b.exp(), tol, self.cfg.max_iter, |r| {
                in_v(self.edge_integral(r)) == va
            });
            0.5 * (x + y)
        };

        // transitions (r, entering V)
        let mut marks: Vec<(f64, bool)> = Vec::new();
        for i in 0..pts.len() - 1 {
            let (a, b) = (in_v(g[i]), in_v(g[i + 1]));
            if a != b {
                marks.push((boundary(pts[i].0, pts[i + 1].0), b));
            }
        }

        let seeds: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].1).collect();
        for w in seeds.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if !(lo..=hi).all(|k| in_v(g[k])) {
                continue;
            }
            let mid = (0.5 * (pts[lo].0 + pts[hi].0)).exp();
            if m.ac_support_contains(1.0 / mid) {
                continue;
            }
            let k = (lo + 1..hi)
                .min_by(|&a, &b| g[a].total_cmp(&g[b]))
                .unwrap_or(lo);
            let (a, b) = if k == lo {
                (pts[lo].0, pts[hi].0)
            } else {
                (pts[k - 1].0, pts[k + 1].0)
            };
            let (sm, gm) = golden_min(a, b, 1e-14f64.max(1e-13 * (b - a)), |s| {
                self.edge_integral(s.exp())
            });
            if !in_v(gm) {
                marks.push((boundary(a, sm), false));
                marks.push((boundary(sm, b), true));
            }
        }

        marks.sort_by(|a, b| a.0.total_cmp(&b.0));
        // the sweep starts and ends outside V, so marks alternate in, out, ...
        let intervals = marks
            .chunks(2)
            .filter(|c| c.len() == 2)
            .map(|c| Interval {
                lo: c[0].0,
                hi: c[1].0,
            })
            .collect();
        Ok(IntervalSet { intervals })
    }

    fn sample(&self, r: f64, jacobian: Option<f64>) -> Result<HalfLineSample> {
        let u = self.boundary_angle(r)?;
        let ll = self.log_lambda(r, u)?;
        let x = (-ll).exp();
        // weight per unit sweep parameter: |dx/d ln r|·d ln r/dτ
        let weight = match jacobian {
            Some(j) if u > 0.0 && j > 0.0 => x * self.log_lambda_slope(r, u) * j,
            _ => 0.0,
        };
        Ok(HalfLineSample {
            r,
            u,
            x,
            density: u / (PI * self.t * x),
            weight,
        })
    }

    /// Points `r e^{i u_t(r)}` of the upper boundary of `Γ` on `n` log-spaced
    /// radii covering the sweep range.
    pub fn boundary_curve(&self, n: usize) -> Result<Vec<Complex64>> {
        if n < 2 {
            return Err(Error::domain(
                "boundary_curve",
                format!("grid of {n} < 2 points"),
            ));
        }
        self.log_grid(n)
            .par_iter()
            .map(|&r| Ok(Complex64::from_polar(r, self.boundary_angle(r)?)))
            .collect()
    }

    /// Density of `ν ⊠ σ_t` along the boundary.
    ///
    /// Each component `[a, b]` of `V` is swept by
    /// `ln r = ln a + (ln b - ln a)(1 - cos πτ)/2` with adaptive Simpson
    /// cells in `τ`; the weights carry the exact Jacobian `|dx/dτ|`. Radii
    /// of the log-spaced `n`-grid outside `V` are added with zero density.
    pub fn density_profile(&self, n: usize) -> Result<HalfLineDensityProfile> {
        let v = self.v_set(n)?;
        let (lo, hi) = self.sweep_range();
        let span = (hi / lo).ln();
        let comps: Vec<(f64, f64)> = v.intervals.iter().map(|i| (i.lo.ln(), i.hi.ln())).collect();
        let leaves: Vec<usize> = comps
            .iter()
            .map(|(a, b)| ((n as f64 * (b - a) / (4.0 * span)).ceil() as usize).max(8))
            .collect();
        let nodes = adaptive_sweep(
            &leaves,
            PROFILE_TOL * self.cfg.tol_quad,
            32 * n + 64 * leaves.len(),
            |p, tau| {
                let (a, b) = comps[p];
                let s = a + 0.5 * (b - a) * (1.0 - (PI * tau).cos());
                let jac = 0.5 * PI * (b - a) * (PI * tau).sin();
                let smp = self.sample(s.exp(), Some(jac))?;
                Ok((smp, smp.weight * smp.density))
            },
        )?;
        let mut samples: Vec<HalfLineSample> = nodes
            .into_iter()
            .map(|node| {
                let mut s = node.sample;
                s.weight *= node.weight;
                s
            })
            .collect();
        let outside: Vec<f64> = self
            .log_grid(n)
            .into_iter()
            .filter(|&r| !v.contains(r))
            .collect();
        let extra: Vec<HalfLineSample> = outside
            .par_iter()
            .map(|&r| self.sample(r, None))
            .collect::<Result<_>>()?;
        samples.extend(extra);
        samples.sort_by(|a, b| a.x.total_cmp(&b.x));
        Ok(HalfLineDensityProfile { t: self.t, samples })
    }

    /// Support of `ν_t`: the images `[1/Λ(b), 1/Λ(a)]` of the components of `V`.
    pub fn support_components(&self, n: usize) -> Result<IntervalSet> {
        let v = self.v_set(n)?;
        let mut intervals = v
            .intervals
            .iter()
            .map(|i| {
                Ok(Interval {
                    lo: 1.0 / self.lambda_value(i.hi)?,
                    hi: 1.0 / self.lambda_value(i.lo)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Ok(IntervalSet { intervals })
    }

    /// Density at a single point, by inverting the boundary map.
    pub fn density_at(&self, x: f64) -> Result<f64> {
        Ok(self.locate(x)?.density)
    }

    /// The boundary sample whose image is `x > 0`.
    pub fn locate(&self, x: f64) -> Result<HalfLineSample> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain("locate", format!("x = {x} must be positive")));
        }
        let target = -x.ln();
        let log_lambda = |s: f64| -> Result<f64> {
            let r = s.exp();
            self.log_lambda(r, self.boundary_angle(r)?)
        };
        // bracket ln r so that ln Λ straddles the target
        let (lo, hi) = self.sweep_range();
        let (mut a, mut b) = (lo.ln(), hi.ln());
        for _ in 0..200 {
            if log_lambda(a)? < target {
                break;
            }
            a -= 4.0;
        }
        for _ in 0..200 {
            if log_lambda(b)? > target {
                break;
            }
            b += 4.0;
        }
        let mut failure = None;
        let (s0, s1) = bisect(
            a,
            b,
            self.cfg.tol_root,
            self.cfg.max_iter,
            |s| match log_lambda(s) {
                Ok(l) => l < target,
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            },
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let mut smp = self.sample((0.5 * (s0 + s1)).exp(), None)?;
        // report the requested point; the density follows the located radius
        smp.density = smp.u / (PI * self.t * x);
        smp.x = x;
        Ok(smp)
    }
}
