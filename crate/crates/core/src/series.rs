//! Moment oracle built on truncated power series.
//!
//! `Σ_μ(z) = η_μ⁻¹(z)/z` is multiplicative under `⊠`, so the moments of
//! `μ ⊠ λ_t` (or `ν ⊠ σ_t`) follow from series arithmetic alone:
//! invert `η_μ`, multiply by `Σ_{λ_t}`, invert back and read off
//! `ψ = η/(1 - η)`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::measure::Measure;
use crate::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 16;

/// Smallest admissible `|c₁|` for inversion.
pub const MIN_FIRST_COEFF: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncated power series `c₀ + c₁z + … + c_N z^N`. Products and
/// compositions are exact through order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    c: Vec<Complex64>,
}

impl PowerSeries {
    /// Coefficients are truncated or zero-padded to `order + 1` terms.
    pub fn new(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, ZERO);
        Self { c: coeffs }
    }

    pub fn from_real(coeffs: &[f64], order: usize) -> Self {
        Self::new(
            coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            order,
        )
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The series `z`.
    pub fn identity(order: usize) -> Self {
        Self::new(vec![ZERO, ONE], order)
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.c.get(k).copied().unwrap_or(ZERO)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            c: self.c.iter().map(|&x| x * s).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn sup_norm(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Multiplicative inverse; needs `c₀ ≠ 0`.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.c[0];
        if c0.norm() == 0.0 {
            return Err(Error::domain("recip", "zero constant term"));
        }
        let n = self.order();
        let mut out = vec![ZERO; n + 1];
        out[0] = c0.inv();
        for k in 1..=n {
            let s: Complex64 = (1..=k).map(|j| self.c[j] * out[k - j]).sum();
            out[k] = -s / c0;
        }
        Ok(Self { c: out })
    }

    /// `exp` by the recurrence `n gₙ = Σ k fₖ g_{n-k}`.
    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut g = vec![ZERO; n + 1];
        g[0] = self.c[0].exp();
        for m in 1..=n {
            let s: Complex64 = (1..=m).map(|k| self.c[k] * g[m - k] * k as f64).sum();
            g[m] = s / m as f64;
        }
        Self { c: g }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let c = (1..=n).map(|k| self.c[k] * k as f64).collect();
        Self::new(c, n)
    }

    /// `self ∘ inner` (Horner); `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.c[0].norm() != 0.0 {
            return Err(Error::domain(
                "compose",
                "inner series has nonzero constant term",
            ));
        }
        let n = self.order().min(inner.order());
        let inner = Self::new(inner.c.clone(), n);
        let mut acc = Self::zero(n);
        for &a in self.c[..=n].iter().rev() {
            acc = &acc * &inner;
            acc.c[0] += a;
        }
        Ok(acc)
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, o: &PowerSeries) -> PowerSeries {
        let n = self.order().min(o.order());
        PowerSeries::new((0..=n).map(|k| self.c[k] + o.c[k]).collect(), n)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, o: &PowerSeries) -> PowerSeries {
        let n = self.order().min(o.order());
        PowerSeries::new((0..=n).map(|k| self.c[k] - o.c[k]).collect(), n)
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, o: &PowerSeries) -> PowerSeries {
        let n = self.order().min(o.order());
        let c = (0..=n)
            .map(|k| (0..=k).map(|j| self.c[j] * o.c[k - j]).sum())
            .collect();
        PowerSeries { c }
    }
}

/// Compositional inverse `g` with `s(g(z)) = z` through order `N`, by
/// Newton's method `g ← g - (s∘g - z)/(s'∘g)`.
pub fn compositional_inverse(s: &PowerSeries, order: usize) -> Result<PowerSeries> {
    let s = PowerSeries::new(s.c.clone(), order);
    if s.c[0].norm() != 0.0 {
        return Err(Error::domain(
            "compositional_inverse",
            "nonzero constant term",
        ));
    }
    let c1 = s.coeff(1);
    if c1.norm() <= MIN_FIRST_COEFF {
        return Err(Error::ZeroFirstMoment { modulus: c1.norm() });
    }
    let ds = s.derivative();
    let id = PowerSeries::identity(order);
    let mut g = id.scale(c1.inv());
    // each step doubles the attained order; two more steps polish rounding
    let steps = (usize::BITS - order.leading_zeros()) as usize + 2;
    for _ in 0..steps {
        let r = &s.compose(&g)? - &id;
        if r.sup_norm() == 0.0 {
            break;
        }
        let step = &r * &ds.compose(&g)?.recip()?;
        g = &g - &step;
    }
    let res = (&s.compose(&g)? - &id).sup_norm();
    let scale = 1.0 + g.sup_norm() * s.sup_norm();
    if res > 1e-10 * scale {
        return Err(Error::Convergence {
            op: "compositional_inverse",
            detail: format!("residual {res:.3e} at order {order}"),
        });
    }
    Ok(g)
}

/// `η(z) = ψ(z)/(1 + ψ(z))` from the moments `m₁, m₂, …` (`ψ = Σ mₙ zⁿ`).
pub fn eta_from_moments(moments: &[Complex64], order: usize) -> Result<PowerSeries> {
    let mut c = vec![ZERO];
    c.extend_from_slice(moments);
    let psi = PowerSeries::new(c, order);
    let mut one_plus = psi.clone();
    one_plus.c[0] += ONE;
    Ok(&psi * &one_plus.recip()?)
}

/// Moments `m₁, …, m_N` of a measure, complex on both spaces.
pub fn measure_moments(m: &Measure, order: usize) -> Vec<Complex64> {
    (1..=order as u32)
        .map(|n| match m {
            Measure::Circle(c) => c.moment(n),
            Measure::HalfLine(h) => Complex64::new(h.moment(n), 0.0),
        })
        .collect()
}

pub fn eta_series(m: &Measure, order: usize) -> Result<PowerSeries> {
    if order < 1 {
        return Err(Error::domain("eta_series", "order must be at least 1"));
    }
    eta_from_moments(&measure_moments(m, order), order)
}

fn exp_of_cayley(sign: f64, t: f64, order: usize) -> PowerSeries {
    // (t/2)(1 + z)/(1 - z) = t/2 + t Σ_{k≥1} zᵏ
    let mut c = vec![Complex64::new(sign * t, 0.0); order + 1];
    c[0] = Complex64::new(sign * 0.5 * t, 0.0);
    PowerSeries::new(c, order).exp()
}

/// `Σ_{λ_t}(z) = exp((t/2)(1 + z)/(1 - z))`.
pub fn sigma_lambda_series(t: f64, order: usize) -> PowerSeries {
    exp_of_cayley(1.0, t, order)
}

/// `Σ_{σ_t}(z) = exp((t/2)(1 + z)/(z - 1))`.
pub fn sigma_sigma_series(t: f64, order: usize) -> PowerSeries {
    exp_of_cayley(-1.0, t, order)
}

/// Which free multiplicative Brownian motion to convolve with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    Circle,
    Halfline,
}

/// Moments of the convolution, starting from the moments of the input.
pub fn convolve_moments(
    moments: &[Complex64],
    t: f64,
    order: usize,
    flow: Flow,
) -> Result<Vec<Complex64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(
            "convolution_moments",
            format!("t = {t} must be non-negative"),
        ));
    }
    let eta = eta_from_moments(moments, order)?;
    let eta_inv = compositional_inverse(&eta, order)?;
    let sigma = match flow {
        Flow::Circle => sigma_lambda_series(t, order),
        Flow::Halfline => sigma_sigma_series(t, order),
    };
    let eta_t = compositional_inverse(&(&eta_inv * &sigma), order)?;
    let mut one_minus = eta_t.scale(-ONE);
    one_minus.c[0] += ONE;
    let psi = &eta_t * &one_minus.recip()?;
    Ok(psi.c[1..].to_vec())
}

/// Moments `m₁, …, m_N` of `m ⊠ λ_t` (circle) or `m ⊠ σ_t` (half-line).
pub fn convolution_moments(m: &Measure, t: f64, order: usize) -> Result<Vec<Complex64>> {
    let flow = match m {
        Measure::Circle(_) => Flow::Circle,
        Measure::HalfLine(_) => Flow::Halfline,
    };
    convolve_moments(&measure_moments(m, order), t, order, flow)
}
