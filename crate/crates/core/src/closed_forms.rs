//! Closed and implicit forms for `λ_t = δ_1 ⊠ λ_t` and `σ_t = δ_1 ⊠ σ_t`.
//!
//! These solve one-dimensional monotone equations only and are used as
//! independent references for the general engines.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::haar_floor;
use crate::measure::wrap_angle;
use crate::roots::bisect;
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

fn check_t(op: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("t = {t} must be positive")))
    }
}

/// `|1 - v e^{iθ}|²` without cancellation.
#[inline]
fn dist2(v: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    (1.0 - v) * (1.0 - v) + 4.0 * v * s * s
}

/// Support of `λ_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSupport {
    pub t: f64,
    pub full_circle: bool,
    /// `arccos(1 - t/2) + √((4-t)t)/2` for `t < 4`; the support is
    /// `[-endpoint, endpoint]`.
    pub endpoint: Option<f64>,
}

pub fn lambda_support(t: f64) -> Result<LambdaSupport> {
    check_t("lambda_support", t)?;
    let full = t >= 4.0;
    Ok(LambdaSupport {
        t,
        full_circle: full,
        endpoint: (!full).then(|| (1.0 - 0.5 * t).acos() + 0.5 * ((4.0 - t) * t).sqrt()),
    })
}

/// `θ₀(t) = arccos(1 - t/2)`, the half-width of `U_t` (`π` once `t ≥ 4`).
pub fn lambda_u_halfwidth(t: f64) -> f64 {
    if t >= 4.0 {
        PI
    } else {
        (1.0 - 0.5 * t).acos()
    }
}

/// `v_t(θ)` for `δ_1`: the root of
/// `(1 - v²)/(-2 ln v) · 1/|1 - v e^{iθ}|² = 1/t`, or 1 outside `U_t`.
pub fn lambda_v(t: f64, theta: f64) -> Result<f64> {
    check_t("lambda_v", t)?;
    let th = wrap_angle(theta);
    let g = |s: f64| {
        let v = s.exp();
        (1.0 - v * v) / (-2.0 * s) / dist2(v, th)
    };
    // 1/|1 - e^{iθ}|² ≤ 1/t exactly off U_t
    if dist2(1.0, th) * (1.0 / t) >= 1.0 {
        return Ok(1.0);
    }
    let lo = (1e-12f64).min(0.5 * haar_floor(t)?).ln();
    let hi = (-1e-14f64).ln_1p();
    let (a, b) = bisect(lo, hi, 1e-15, 400, |s| g(s) < 1.0 / t);
    Ok((0.5 * (a + b)).exp())
}

/// Lifted boundary angle `θ + t v sin θ/|1 - v e^{iθ}|²`.
pub fn lambda_psi(t: f64, theta: f64, v: f64) -> f64 {
    theta + t * v * theta.sin() / dist2(v, theta)
}

/// A point of the `λ_t` density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaPoint {
    pub theta: f64,
    pub v: f64,
    /// Output angle in `[-π, π)`.
    pub phi: f64,
    /// `-ln v/(πt)`.
    pub density: f64,
    /// `(1/2π)·Re((1 + v e^{iθ})/(1 - v e^{iθ}))`.
    pub density_herglotz: f64,
}

/// Density of `λ_t` at the image of the boundary point over `θ`. The two
/// density expressions are checked against each other to `1e-10`.
pub fn lambda_density(t: f64, theta: f64) -> Result<LambdaPoint> {
    let v = lambda_v(t, theta)?;
    let density = if v >= 1.0 { 0.0 } else { -v.ln() / (PI * t) };
    let density_herglotz = if v >= 1.0 {
        0.0
    } else {
        (1.0 - v * v) / (TWO_PI * dist2(v, theta))
    };
    if (density - density_herglotz).abs() > 1e-10 {
        return Err(Error::Convergence {
            op: "lambda_density",
            detail: format!(
                "density forms disagree at θ = {theta}: {density} vs {density_herglotz}"
            ),
        });
    }
    Ok(LambdaPoint {
        theta,
        v,
        phi: wrap_angle(-lambda_psi(t, theta, v)),
        density,
        density_herglotz,
    })
}

/// Density of `λ_t` at output angle `φ`, by inverting the boundary map.
pub fn lambda_density_at(t: f64, phi: f64) -> Result<LambdaPoint> {
    check_t("lambda_density_at", t)?;
    let lift = |th: f64| -> Result<f64> { Ok(lambda_psi(t, th, lambda_v(t, th)?)) };
    let base = lift(-PI)?;
    let target = base + (-phi - base).rem_euclid(TWO_PI);
    let mut failure = None;
    let (a, b) = bisect(-PI, PI, 1e-15, 400, |th| match lift(th) {
        Ok(p) => p < target,
        Err(e) => {
            failure.get_or_insert(e);
            false
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let mut p = lambda_density(t, 0.5 * (a + b))?;
    p.phi = wrap_angle(phi);
    Ok(p)
}

/// Residual of `((k - 1)/(k + 1))·e^{tk/2} = e^{-iφ}` at the boundary point
/// over `θ`, with `k = (1 + v e^{iθ})/(1 - v e^{iθ})`; also returns
/// `Re k/(2π)`, which must equal the density.
pub fn lambda_k_residual(t: f64, theta: f64) -> Result<(f64, f64)> {
    let p = lambda_density(t, theta)?;
    let w = Complex64::from_polar(p.v, theta);
    let one = Complex64::new(1.0, 0.0);
    let k = (one + w) / (one - w);
    let lhs = (k - one) / (k + one) * (k * (0.5 * t)).exp();
    let omega = Complex64::from_polar(1.0, -p.phi);
    Ok(((lhs - omega).norm(), k.re / TWO_PI))
}

/// Support data of `σ_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaSupport {
    pub t: f64,
    /// `V_t = (x1, x2)`.
    pub x1: f64,
    pub x2: f64,
    /// `supp σ_t = [x3, x4]`.
    pub x3: f64,
    pub x4: f64,
}

pub fn sigma_support(t: f64) -> Result<SigmaSupport> {
    check_t("sigma_support", t)?;
    let root = (t * (t + 4.0)).sqrt();
    let x1 = (2.0 + t - root) / 2.0;
    let x3 = x1 * (-0.5 * root).exp();
    Ok(SigmaSupport {
        t,
        x1,
        x2: 1.0 / x1,
        x3,
        x4: 1.0 / x3,
    })
}

/// `u_t(r)` for `δ_1`: the root of `(sin θ/θ)·r·t = |1 - r e^{iθ}|²`, or 0
/// off `(x1, x2)`.
pub fn sigma_u(t: f64, r: f64) -> Result<f64> {
    let s = sigma_support(t)?;
    if !(r > s.x1 && r < s.x2) {
        return Ok(0.0);
    }
    let f = |th: f64| th.sin() / th * r * t - dist2(r, th);
    let (a, b) = bisect(1e-12, PI - 1e-12, 1e-15, 400, |th| f(th) > 0.0);
    Ok(0.5 * (a + b))
}

/// `ln Λ_t(r) = ln r + (t/2)(r² - 1)/|1 - r e^{iu}|²`.
pub fn sigma_log_lambda(t: f64, r: f64) -> Result<f64> {
    let u = sigma_u(t, r)?;
    Ok(r.ln() + 0.5 * t * (r * r - 1.0) / dist2(r, u))
}

/// A point of the `σ_t` density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaPoint {
    pub x: f64,
    pub r: f64,
    pub u: f64,
    /// `l(t, x) = 1/(1 - r e^{iu})`.
    pub l: Complex64,
    /// `Im l/(πx)`.
    pub density: f64,
}

/// Density of `σ_t` at `x > 0`: solves `Λ_t(r) = 1/x` on `(x1, x2)`.
pub fn sigma_density(t: f64, x: f64) -> Result<SigmaPoint> {
    let s = sigma_support(t)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(
            "sigma_density",
            format!("x = {x} must be positive"),
        ));
    }
    if x <= s.x3 || x >= s.x4 {
        let r = if x <= s.x3 { s.x2 } else { s.x1 };
        return Ok(SigmaPoint {
            x,
            r,
            u: 0.0,
            l: Complex64::new(1.0 / (1.0 - r), 0.0),
            density: 0.0,
        });
    }
    let target = -x.ln();
    let mut failure = None;
    let (a, b) = bisect(
        s.x1.ln(),
        s.x2.ln(),
        1e-15,
        400,
        |q| match sigma_log_lambda(t, q.exp()) {
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
    let r = (0.5 * (a + b)).exp();
    let u = sigma_u(t, r)?;
    let l = (Complex64::new(1.0, 0.0) - Complex64::from_polar(r, u)).inv();
    Ok(SigmaPoint {
        x,
        r,
        u,
        l,
        density: l.im / (PI * x),
    })
}

/// `|(l/(l - 1))·e^{t(l - 1/2)} - x|`.
pub fn sigma_residual(t: f64, p: &SigmaPoint) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let lhs = p.l / (p.l - one) * ((p.l - 0.5) * t).exp();
    (lhs - p.x).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const A1: f64 = 0.352_175_060_660_117;

    #[test]
    fn lambda_support_values() {
        assert!(lambda_support(4.5).unwrap().full_circle);
        let s = lambda_support(1.0).unwrap();
        assert_abs_diff_eq!(
            s.endpoint.unwrap(),
            PI / 3.0 + 3f64.sqrt() / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            lambda_support(4.0 - 1e-12).unwrap().endpoint.unwrap(),
            PI,
            epsilon = 1e-5
        );
        assert!(lambda_support(0.0).is_err());
    }

    #[test]
    fn lambda_v_values() {
        assert_abs_diff_eq!(lambda_v(1.0, 0.0).unwrap(), A1, epsilon = 1e-14);
        assert_eq!(lambda_v(1.0, PI / 2.0).unwrap(), 1.0);
        for &th in &[0.1, 0.5, 1.0] {
            assert_eq!(lambda_v(1.0, th).unwrap(), lambda_v(1.0, -th).unwrap());
        }
        assert!(lambda_v(4.5, PI).unwrap() < 1.0);
    }

    #[test]
    fn lambda_density_values() {
        let p = lambda_density(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(p.phi, 0.0);
        assert_abs_diff_eq!(p.density, -A1.ln() / PI, epsilon = 1e-14);
        let edge = lambda_density(1.0, PI / 3.0).unwrap();
        assert!(edge.density < 1e-5);
        assert_eq!(lambda_density(1.0, PI / 3.0 + 1e-9).unwrap().density, 0.0);
        assert_abs_diff_eq!(edge.phi, -(PI / 3.0 + 3f64.sqrt() / 2.0), epsilon = 1e-9);
        let q = lambda_density_at(2.0, 0.7).unwrap();
        assert_abs_diff_eq!(q.phi, 0.7);
        assert_abs_diff_eq!(
            lambda_density(2.0, q.theta).unwrap().phi,
            0.7,
            epsilon = 1e-12
        );
    }

    #[test]
    fn lambda_k_solution() {
        for &(t, th) in &[(1.0, 0.3), (2.0, -1.0), (4.5, 2.9)] {
            let (res, p) = lambda_k_residual(t, th).unwrap();
            assert!(res < 1e-10);
            assert_abs_diff_eq!(p, lambda_density(t, th).unwrap().density, epsilon = 1e-10);
        }
    }

    #[test]
    fn sigma_support_values() {
        let s = sigma_support(1.0).unwrap();
        assert_abs_diff_eq!(s.x1, (3.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.x2, 2.618_033_988_749_895, epsilon = 1e-14);
        assert_abs_diff_eq!(s.x3, 0.124_873_052_357_835, epsilon = 1e-14);
        assert_abs_diff_eq!(s.x4, 8.008_132_908_727_238, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x3 * s.x4, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sigma_density_values() {
        let p = sigma_density(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.r, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(p.u, 0.960_188_873_914_783, epsilon = 1e-12);
        assert_abs_diff_eq!(p.density, 0.305_637_611_170_757, epsilon = 1e-12);
        assert!(sigma_residual(1.0, &p) < 1e-12);
        let s = sigma_support(1.0).unwrap();
        assert_eq!(sigma_density(1.0, s.x4).unwrap().density, 0.0);
        for &x in &[0.3, 0.7, 2.0, 5.0] {
            let a = sigma_density(1.0, x).unwrap().density * x;
            let b = sigma_density(1.0, 1.0 / x).unwrap().density / x;
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }
}
