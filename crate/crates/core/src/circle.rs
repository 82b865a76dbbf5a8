//! `μ ⊠ λ_t` on the unit circle.
//!
//! For each angle `θ` the boundary radius `v_t(θ)` of the subordination
//! domain is the root in `r` of
//!
//! ```text
//! h_t(r, θ) = 1 - (t/2)·(1 - r²)/(-ln r)·∫ dμ(e^{ix}) / |1 - r e^{i(θ+x)}|²
//! ```
//!
//! (or 1 when the edge value `h_t(θ)` is nonnegative). The boundary map
//! `Ψ(e^{iθ}) = exp(i(θ + t·∫ v sin(θ+x)/|1 - v e^{i(θ+x)}|² dμ))` is a
//! homeomorphism of the circle, and the convolution has density
//! `-ln v_t(θ)/(πt)` at the conjugate point `e^{-i arg Ψ}`.
//!
//! All output angles `φ` follow that convention: a profile sample `(φ, p)`
//! means `dμ_t(e^{iφ}) = p dφ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::measure::{wrap_angle, CircleMeasure};
use crate::roots::{bisect, golden_min};
use crate::sweep::adaptive_sweep;
use crate::{Error, Result, SolverConfig};

const TWO_PI: f64 = 2.0 * PI;

/// Edge integrals above this are treated as divergent.
pub const EDGE_CAP: f64 = 1e12;

/// Support arcs closer than this are reported as one component.
pub const SUPPORT_JOIN: f64 = 1e-9;

/// Per-unit-`τ` error target of the profile sweep, in units of `tol_quad`
/// (kernel quadrature noise sets the floor).
const PROFILE_TOL: f64 = 100.0;

/// A closed arc `{e^{iθ}: lo ≤ θ ≤ hi}` with `lo ∈ [-π, π)` and
/// `lo < hi ≤ lo + 2π`; `hi` may exceed `π` for arcs crossing the cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub lo: f64,
    pub hi: f64,
}

impl Arc {
    pub const FULL: Arc = Arc { lo: -PI, hi: PI };

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_full(&self) -> bool {
        self.len() >= TWO_PI
    }

    pub fn contains(&self, theta: f64) -> bool {
        let d = (theta - self.lo).rem_euclid(TWO_PI);
        d <= self.len() || self.is_full()
    }
}

/// Disjoint closed arcs, ordered by `lo`. The whole circle is the single
/// arc `[-π, π]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcSet {
    pub arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn full() -> Self {
        ArcSet {
            arcs: vec![Arc::FULL],
        }
    }

    pub fn count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].is_full()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.contains(theta))
    }

    fn from_unrolled(mut arcs: Vec<Arc>) -> Self {
        for a in &mut arcs {
            let lo = wrap_angle(a.lo);
            a.hi += lo - a.lo;
            a.lo = lo;
        }
        arcs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        ArcSet { arcs }
    }

    /// Joins arcs separated by at most `gap`, including across `±π`.
    fn joined(self, gap: f64) -> Self {
        let mut out: Vec<Arc> = Vec::with_capacity(self.arcs.len());
        for a in self.arcs {
            match out.last_mut() {
                Some(last) if a.lo - last.hi <= gap => last.hi = last.hi.max(a.hi),
                _ => out.push(a),
            }
        }
        if out.len() > 1 {
            let first = out[0];
            let last = out.last_mut().expect("nonempty");
            if first.lo + TWO_PI - last.hi <= gap {
                last.hi = last.hi.max(first.hi + TWO_PI);
                out.remove(0);
            }
        }
        if out.iter().any(|a| a.hi - a.lo >= TWO_PI - gap) {
            return ArcSet::full();
        }
        ArcSet { arcs: out }
    }
}

/// One profile sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleSample {
    /// Source angle on the boundary of the subordination domain.
    pub theta: f64,
    /// Boundary radius `v_t(θ)`.
    pub v: f64,
    /// Output angle in `[-π, π)`.
    pub phi: f64,
    /// Density of `μ_t` at `e^{iφ}` with respect to `dφ`.
    pub density: f64,
    /// Quadrature weight in `φ`; `Σ weight·f(φ)·density ≈ ∫ f dμ_t`.
    pub weight: f64,
}

/// Density of `μ ⊠ λ_t` sampled along the boundary, sorted by `φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleDensityProfile {
    pub t: f64,
    pub samples: Vec<CircleSample>,
}

impl CircleDensityProfile {
    /// `∫ p dφ` by the carried quadrature weights.
    pub fn mass(&self) -> f64 {
        self.samples.iter().map(|s| s.weight * s.density).sum()
    }

    /// `∫ e^{inφ} p(φ) dφ`.
    pub fn moment(&self, n: i32) -> Complex64 {
        self.samples
            .iter()
            .map(|s| Complex64::from_polar(s.weight * s.density, n as f64 * s.phi))
            .sum()
    }

    /// Sample of largest density.
    pub fn max(&self) -> Option<&CircleSample> {
        self.samples
            .iter()
            .max_by(|a, b| a.density.total_cmp(&b.density))
    }
}

/// `a_t ∈ (0, 1)`: the root of `ln r + (t/2)(1 + r)/(1 - r) = 0`. Every
/// boundary radius is at least `a_t`, so the density never exceeds
/// `-ln a_t/(πt)`.
pub fn haar_floor(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(
            "haar_floor",
            format!("t = {t} must be positive"),
        ));
    }
    // in s = ln r < 0 the left side is increasing
    let g = |s: f64| s + 0.5 * t * (1.0 + s.exp()) / (-s.exp_m1());
    let (lo, hi) = bisect(-0.5 * t - 50.0, -1e-16, 1e-15, 400, |s| g(s) < 0.0);
    Ok((0.5 * (lo + hi)).exp())
}

/// Solver for a fixed measure and time.
#[derive(Debug, Clone)]
pub struct CircleEngine<'a> {
    measure: &'a CircleMeasure,
    t: f64,
    cfg: SolverConfig,
    /// Log of the lower end of the radius bracket.
    ln_r_min: f64,
}

impl<'a> CircleEngine<'a> {
    pub fn new(measure: &'a CircleMeasure, t: f64, cfg: SolverConfig) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(
                "circle engine",
                format!("t = {t} must be positive"),
            ));
        }
        if !(cfg.tol_root > 0.0 && cfg.tol_quad > 0.0) {
            return Err(Error::domain(
                "circle engine",
                "tolerances must be positive",
            ));
        }
        // the root never drops below a_t; keep the bracket below it for large t
        let floor = haar_floor(t)?;
        Ok(CircleEngine {
            measure,
            t,
            cfg,
            ln_r_min: (1e-12f64).min(0.5 * floor).ln(),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn measure(&self) -> &CircleMeasure {
        self.measure
    }

    /// `h_t(r, θ)` for `0 < r < 1`.
    pub fn h_value(&self, r: f64, theta: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain("h_value", format!("r = {r} not in (0, 1)")));
        }
        let p = self
            .measure
            .poisson_kernel_integral(r, theta, self.cfg.tol_quad)?;
        Ok(1.0 - 0.5 * self.t * (1.0 - r * r) / (-r.ln()) * p)
    }

    /// `∫ dμ/(2 - 2cos(θ + x))`, capped to `+∞`.
    fn edge_integral(&self, theta: f64) -> f64 {
        let f = self.measure.edge_kernel_integral(theta, self.cfg.tol_quad);
        if f > EDGE_CAP {
            f64::INFINITY
        } else {
            f
        }
    }

    /// `h_t(θ) = lim_{r→1} h_t(r, θ)`; `-∞` when the pole meets the support.
    pub fn h_edge(&self, theta: f64) -> f64 {
        1.0 - self.t * self.edge_integral(theta)
    }

    /// `v_t(θ)`.
    pub fn boundary_radius(&self, theta: f64) -> Result<f64> {
        if self.h_edge(theta) >= 0.0 {
            return Ok(1.0);
        }
        self.radius_root(theta)
    }

    fn radius_root(&self, theta: f64) -> Result<f64> {
        // bisection in ln r: |Δr| ≤ |Δ ln r| on (0, 1)
        let hi = (-1e-14f64).ln_1p();
        let mut failure = None;
        let (a, b) = bisect(
            self.ln_r_min,
            hi,
            self.cfg.tol_root,
            self.cfg.max_iter,
            |s| match self.h_value(s.exp(), theta) {
                Ok(h) => h > 0.0,
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            },
        );
        match failure {
            Some(e) => Err(e),
            None => Ok((0.5 * (a + b)).exp()),
        }
    }

    /// Lifted boundary angle `θ + t·C(v, θ)`; continuous, increasing, and
    /// gains exactly `2π` over a turn.
    pub fn psi_lift(&self, theta: f64, v: f64) -> Result<f64> {
        let c = self
            .measure
            .conjugate_kernel_integral(v, theta, self.cfg.tol_quad)?;
        Ok(theta + self.t * c)
    }

    /// `arg Ψ(e^{iθ})` in `[-π, π)`.
    pub fn psi_angle(&self, theta: f64) -> Result<f64> {
        let v = self.boundary_radius(theta)?;
        Ok(wrap_angle(self.psi_lift(theta, v)?))
    }

    /// `d/dθ` of the lifted angle, valid where `v < 1`.
    ///
    /// Along the boundary `log Φ(v e^{iθ}) = iΨ`, so with `G = (log Φ)'`
    /// and `A = 1/(G e^{iθ})` one gets `Ψ' = v / Re A`.
    pub fn psi_derivative(&self, theta: f64, v: f64) -> f64 {
        let z = Complex64::from_polar(v, theta);
        let g = z.inv() + self.measure.herglotz_derivative(z, self.cfg.tol_quad) * (0.5 * self.t);
        let a = (g * Complex64::from_polar(1.0, theta)).inv();
        v / a.re
    }

    /// `-ln v/(πt)`.
    pub fn density_from_radius(&self, v: f64) -> f64 {
        if v >= 1.0 {
            0.0
        } else {
            -v.ln() / (PI * self.t)
        }
    }

    /// `U_{t,μ} = {θ: h_t(θ) < 0}` from a uniform grid of `n` angles,
    /// seeded with the conjugates of the support points of `μ`.
    ///
    /// On any arc free of conjugate support points `θ ↦ ∫ dμ/(2 - 2cos(θ+x))`
    /// is convex, so such an arc meets the complement of `U` in at most one
    /// interval; a hidden one sits around the minimum of the sampled values.
    pub fn u_set(&self, n: usize) -> Result<ArcSet> {
        if n < 64 {
            return Err(Error::domain("u_set", format!("grid of {n} < 64 points")));
        }
        let m = self.measure;
        if m.ac_covers_circle() {
            return Ok(ArcSet::full());
        }
        let mut seeds: Vec<f64> = m.support_points().iter().map(|&x| wrap_angle(-x)).collect();
        if seeds.is_empty() {
            return Err(Error::InvalidMeasure("measure has no support".into()));
        }
        seeds.sort_by(f64::total_cmp);
        seeds.dedup();
        // unroll the circle starting at the first seed
        let s0 = seeds[0];
        let mut pts: Vec<(f64, bool)> = seeds.iter().map(|&s| (s, true)).collect();
        pts.extend((0..n).map(|k| {
            let th = -PI + TWO_PI * k as f64 / n as f64;
            (if th < s0 { th + TWO_PI } else { th }, false)
        }));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 |= a.1;
                true
            } else {
                false
            }
        });
        pts.push((s0 + TWO_PI, true));

        let f: Vec<f64> = pts.par_iter().map(|p| self.edge_integral(p.0)).collect();
        let in_u = |v: f64| self.t * v > 1.0;

        let tol = self.cfg.tol_root;
        let boundary = |a: f64, b: f64| {
            let ua = in_u(self.edge_integral(a));
            let (x, y) = bisect(a, b, tol, self.cfg.max_iter, |th| {
                in_u(self.edge_integral(th)) == ua
            });
            0.5 * (x + y)
        };

        // transitions (angle, entering U)
        let mut marks: Vec<(f64, bool)> = Vec::new();
        for i in 0..pts.len() - 1 {
            let (a, b) = (in_u(f[i]), in_u(f[i + 1]));
            if a != b {
                marks.push((boundary(pts[i].0, pts[i + 1].0), b));
            }
        }

        // stretches between consecutive seeds that sit wholly in U
        let mut start = 0;
        for i in 1..pts.len() {
            if !pts[i].1 {
                continue;
            }
            let (lo, hi) = (start, i);
            start = i;
            if !(lo..=hi).all(|k| in_u(f[k])) {
                continue;
            }
            let mid = 0.5 * (pts[lo].0 + pts[hi].0);
            if m.ac_support_contains(-mid) {
                continue;
            }
            let k = (lo + 1..hi)
                .min_by(|&a, &b| f[a].total_cmp(&f[b]))
                .unwrap_or(lo);
            let (a, b) = if k == lo {
                (pts[lo].0, pts[hi].0)
            } else {
                (pts[k - 1].0, pts[k + 1].0)
            };
            let (xm, fm) = golden_min(a, b, tol.max(1e-14 * (b - a)), |th| self.edge_integral(th));
            if !in_u(fm) {
                marks.push((boundary(a, xm), false));
                marks.push((boundary(xm, b), true));
            }
        }

        if marks.is_empty() {
            return Ok(ArcSet::full());
        }
        marks.sort_by(|a, b| a.0.total_cmp(&b.0));
        // the unrolled sweep starts inside U, so marks alternate out, in, ...
        let mut arcs = Vec::with_capacity(marks.len() / 2);
        for j in (1..marks.len()).step_by(2) {
            let lo = marks[j].0;
            let hi = if j + 1 < marks.len() {
                marks[j + 1].0
            } else {
                marks[0].0 + TWO_PI
            };
            arcs.push(Arc { lo, hi });
        }
        Ok(ArcSet::from_unrolled(arcs))
    }

    /// Points `v_t(θ) e^{iθ}` on a closed uniform sweep of `n + 1` angles
    /// from `-π` to `π` (first and last coincide).
    pub fn boundary_curve(&self, n: usize) -> Result<Vec<Complex64>> {
        (0..=n)
            .into_par_iter()
            .map(|k| {
                let th = -PI + TWO_PI * k as f64 / n as f64;
                Ok(Complex64::from_polar(self.boundary_radius(th)?, th))
            })
            .collect()
    }

    fn sample(&self, theta: f64, jacobian: Option<f64>) -> Result<CircleSample> {
        let v = self.boundary_radius(theta)?;
        let psi = self.psi_lift(theta, v)?;
        // weight per unit sweep parameter: Ψ'(θ)·dθ/dτ
        let weight = match jacobian {
            Some(j) if v < 1.0 && j > 0.0 => self.psi_derivative(theta, v) * j,
            _ => 0.0,
        };
        Ok(CircleSample {
            theta: wrap_angle(theta),
            v,
            phi: wrap_angle(-psi),
            density: self.density_from_radius(v),
            weight,
        })
    }

    /// Density of `μ ⊠ λ_t` along the boundary.
    ///
    /// Each arc `[α, β]` of `U` is swept by `θ = α + (β-α)(1 - cos πτ)/2`,
    /// which clusters nodes at the square-root edges (the whole circle is
    /// swept linearly). Composite Simpson cells in `τ` are halved where the
    /// integrand `p·Ψ'(θ)·θ'(τ)` is under-resolved, so the carried weights
    /// integrate against `μ_t`. Angles of the uniform `n`-grid outside `U`
    /// are added with zero density and weight.
    pub fn density_profile(&self, n: usize) -> Result<CircleDensityProfile> {
        if n < 128 {
            return Err(Error::domain(
                "density_profile",
                format!("grid of {n} < 128 points"),
            ));
        }
        let u = self.u_set(n)?;
        let full = u.is_full();
        let leaves: Vec<usize> = u
            .arcs
            .iter()
            .map(|a| ((n as f64 * a.len() / (4.0 * TWO_PI)).ceil() as usize).max(8))
            .collect();
        let map = |piece: usize, tau: f64| -> (f64, f64) {
            let arc = &u.arcs[piece];
            if full {
                (-PI + TWO_PI * tau, TWO_PI)
            } else {
                let len = arc.len();
                (
                    arc.lo + 0.5 * len * (1.0 - (PI * tau).cos()),
                    0.5 * PI * len * (PI * tau).sin(),
                )
            }
        };
        let nodes = adaptive_sweep(
            &leaves,
            PROFILE_TOL * self.cfg.tol_quad,
            32 * n + 64 * leaves.len(),
            |p, tau| {
                let (th, jac) = map(p, tau);
                let s = self.sample(th, Some(jac))?;
                Ok((s, s.weight * s.density))
            },
        )?;
        let mut samples: Vec<CircleSample> = Vec::with_capacity(nodes.len() + n);
        let mut wrap_weight = 0.0;
        for node in nodes {
            let mut s = node.sample;
            s.weight *= node.weight;
            if full && node.tau == 1.0 {
                // same point as τ = 0
                wrap_weight = s.weight;
                continue;
            }
            samples.push(s);
        }
        if full {
            if let Some(first) = samples.iter_mut().find(|s| s.theta == -PI) {
                first.weight += wrap_weight;
            }
        }
        let outside: Vec<f64> = (0..n)
            .map(|k| -PI + TWO_PI * k as f64 / n as f64)
            .filter(|&th| !u.contains(th))
            .collect();
        let extra: Vec<CircleSample> = outside
            .par_iter()
            .map(|&th| self.sample(th, None))
            .collect::<Result<_>>()?;
        samples.extend(extra);
        samples.sort_by(|a, b| a.phi.total_cmp(&b.phi));
        Ok(CircleDensityProfile { t: self.t, samples })
    }

    /// Support of `μ_t`: the conjugated `Ψ`-images of the arcs of `U`.
    pub fn support_components(&self, n: usize) -> Result<ArcSet> {
        let u = self.u_set(n)?;
        if u.is_full() {
            return Ok(u);
        }
        let arcs = u
            .arcs
            .iter()
            .map(|arc| {
                let a = self.psi_lift(arc.lo, self.boundary_radius(arc.lo)?)?;
                let b = self.psi_lift(arc.hi, self.boundary_radius(arc.hi)?)?;
                Ok(Arc { lo: -b, hi: -a })
            })
            .collect::<Result<Vec<_>>>()?;
        // images of U-arcs that touch at a tangency form one component
        Ok(ArcSet::from_unrolled(arcs).joined(SUPPORT_JOIN))
    }

    /// Density at a single output angle, by inverting the boundary map.
    pub fn density_at(&self, phi: f64) -> Result<f64> {
        Ok(self.locate(phi)?.density)
    }

    /// The boundary sample whose image is `e^{iφ}`.
    pub fn locate(&self, phi: f64) -> Result<CircleSample> {
        let lift = |th: f64| -> Result<f64> { self.psi_lift(th, self.boundary_radius(th)?) };
        let base = lift(-PI)?;
        // target lifted angle inside [base, base + 2π)
        let target = base + (-phi - base).rem_euclid(TWO_PI);
        let mut failure = None;
        let (a, b) = bisect(
            -PI,
            PI,
            self.cfg.tol_root,
            self.cfg.max_iter,
            |th| match lift(th) {
                Ok(p) => p < target,
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            },
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let mut s = self.sample(0.5 * (a + b), None)?;
        s.phi = wrap_angle(phi);
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const A1: f64 = 0.352_175_060_660_117;

    fn engine(m: &CircleMeasure, t: f64) -> CircleEngine<'_> {
        CircleEngine::new(m, t, SolverConfig::default()).unwrap()
    }

    #[test]
    fn floor_values() {
        assert_abs_diff_eq!(haar_floor(1.0).unwrap(), A1, epsilon = 1e-13);
        assert!(haar_floor(0.01).unwrap() > 0.9);
        assert!(haar_floor(0.0).is_err());
        let a = haar_floor(50.0).unwrap();
        assert!(a > 0.0 && a < 1e-10);
    }

    #[test]
    fn h_value_haar_closed_form() {
        let m = CircleMeasure::haar();
        let e = engine(&m, 1.7);
        for &r in &[0.05, 0.4, 0.93] {
            let h = e.h_value(r, 0.4).unwrap();
            assert_abs_diff_eq!(h, 1.0 - 0.85 / (-r.ln()), epsilon = 1e-9);
        }
        assert!(e.h_value(1.0, 0.0).is_err());
        assert!(e.h_value(1e-300, 0.0).unwrap() > 0.99);
    }

    #[test]
    fn dirac_root_at_zero() {
        let m = CircleMeasure::dirac(0.0);
        let e = engine(&m, 1.0);
        assert!(e.h_value(0.3522, 0.0).unwrap().abs() < 5e-4);
        assert_abs_diff_eq!(e.boundary_radius(0.0).unwrap(), A1, epsilon = 1e-11);
        assert_eq!(e.boundary_radius(PI).unwrap(), 1.0);
        assert_abs_diff_eq!(e.h_edge(PI), 0.75);
        assert_eq!(e.h_edge(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn two_point_edge() {
        let m = CircleMeasure::from_atoms(&[(0.0, 0.5), (PI, 0.5)]).unwrap();
        let e = engine(&m, 1.3);
        for &th in &[0.3, 1.0, 2.0, -2.7] {
            let s2 = f64::sin(th).powi(2);
            assert_abs_diff_eq!(e.h_edge(th), 1.0 - 1.3 / (2.0 * s2), epsilon = 1e-12);
        }
    }

    #[test]
    fn haar_radius_is_constant() {
        let m = CircleMeasure::haar();
        let e = engine(&m, 2.0);
        for &th in &[-3.0, -0.2, 1.4] {
            assert_abs_diff_eq!(
                e.boundary_radius(th).unwrap(),
                (-1.0f64).exp(),
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn dirac_u_set_and_psi() {
        let m = CircleMeasure::dirac(0.0);
        let e = engine(&m, 1.0);
        let u = e.u_set(128).unwrap();
        assert_eq!(u.count(), 1);
        assert_abs_diff_eq!(u.arcs[0].lo, -PI / 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(u.arcs[0].hi, PI / 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(e.psi_angle(0.0).unwrap(), 0.0, epsilon = 1e-15);
        let edge = PI / 3.0 + 3f64.sqrt() / 2.0;
        assert_abs_diff_eq!(e.psi_angle(PI / 3.0).unwrap(), edge, epsilon = 1e-6);
        assert!(engine(&m, 4.5).u_set(128).unwrap().is_full());
    }

    #[test]
    fn two_point_u_set() {
        let m = CircleMeasure::from_atoms(&[(0.0, 0.5), (PI, 0.5)]).unwrap();
        let u = engine(&m, 1.0).u_set(64).unwrap();
        assert_eq!(u.count(), 2);
        // sin²θ < 1/2 around 0 and π
        assert!(u.contains(0.0) && u.contains(PI) && !u.contains(PI / 2.0));
        for a in &u.arcs {
            assert_abs_diff_eq!(a.len(), PI / 2.0, epsilon = 1e-9);
        }
        assert_eq!(engine(&m, 2.5).u_set(64).unwrap().count(), 1);
    }

    #[test]
    fn hidden_gap_is_found() {
        // atoms 0.2 apart, a tiny gap opens between them for small t
        let m = CircleMeasure::from_atoms(&[(0.0, 0.5), (0.2, 0.5)]).unwrap();
        let e = engine(&m, 0.0098);
        let u = e.u_set(64).unwrap();
        assert_eq!(u.count(), 2);
    }

    #[test]
    fn psi_derivative_by_differences() {
        let m = CircleMeasure::from_atoms(&[(0.0, 0.7), (PI / 2.0, 0.3)]).unwrap();
        let e = engine(&m, 0.8);
        let lift = |th: f64| e.psi_lift(th, e.boundary_radius(th).unwrap()).unwrap();
        for &th in &[0.05, -0.3, -1.6] {
            let v = e.boundary_radius(th).unwrap();
            assert!(v < 1.0);
            let h = 1e-5;
            let fd = (lift(th + h) - lift(th - h)) / (2.0 * h);
            assert_abs_diff_eq!(e.psi_derivative(th, v), fd, epsilon = 1e-5);
        }
    }

    #[test]
    fn dirac_profile() {
        let m = CircleMeasure::dirac(0.0);
        let e = engine(&m, 1.0);
        let p = e.density_profile(512).unwrap();
        assert_abs_diff_eq!(p.mass(), 1.0, epsilon = 1e-6);
        let top = p.max().unwrap();
        assert_abs_diff_eq!(top.phi, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(top.density, -A1.ln() / PI, epsilon = 1e-10);
        let s = e.support_components(256).unwrap();
        assert_eq!(s.count(), 1);
        assert_abs_diff_eq!(s.arcs[0].hi, 1.913_222_954_981_036, epsilon = 1e-6);
        assert_abs_diff_eq!(s.arcs[0].lo, -1.913_222_954_981_036, epsilon = 1e-6);
    }

    #[test]
    fn locate_inverts_profile() {
        let m = CircleMeasure::from_atoms(&[(0.0, 0.7), (PI / 2.0, 0.3)]).unwrap();
        let e = engine(&m, 0.5);
        let p = e.density_profile(128).unwrap();
        for s in p.samples.iter().step_by(17) {
            assert_abs_diff_eq!(e.density_at(s.phi).unwrap(), s.density, epsilon = 1e-8);
        }
    }

    #[test]
    fn boundary_curve_closes() {
        let m = CircleMeasure::dirac(0.0);
        let c = engine(&m, 1.0).boundary_curve(64).unwrap();
        assert!((c[0] - c[64]).norm() < 1e-12);
        assert_abs_diff_eq!(c[32].re, A1, epsilon = 1e-11);
    }
}
