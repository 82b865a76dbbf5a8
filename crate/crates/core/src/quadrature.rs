//! Adaptive Gauss–Kronrod integration over panel lists, plus fixed
//! Gauss–Legendre rules.
//!
//! The kernels integrated in this crate have sharp but known peaks, so the
//! driver takes an initial list of breakpoints (typically graded toward the
//! peak) and then bisects the panel with the largest error estimate until the
//! global error budget is met.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Values that can be accumulated by the integrator.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One application of the 15-point Kronrod rule on `[a, b]`.
/// Returns the Kronrod estimate and `|K15 - G7|`.
pub fn gk15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let (k, e, _) = gk15_abs(f, a, b);
    (k, e)
}

/// [`gk15`] that also returns the Kronrod estimate of `∫|f|`.
fn gk15_abs<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (fl, fr) = (f(center - dx), f(center + dx));
        let pair = fl + fr;
        kronrod = kronrod + pair * WGK[j];
        resabs += (fl.norm() + fr.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm(), resabs * half.abs())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

struct Panel<T> {
    tag: usize,
    a: f64,
    b: f64,
    value: T,
    error: f64,
    resabs: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tolerances for [`integrate`]. The relative part is measured against
/// `∫|f|`, so signed integrands that cancel still terminate.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl QuadTol {
    pub fn relative(rel: f64) -> Self {
        QuadTol {
            abs: 1e-300,
            rel,
            max_panels: 4000,
        }
    }
}

/// Integrate `f` over `[breaks[0], breaks[last]]`, starting from the panels
/// delimited by `breaks` (which must be sorted).
pub fn integrate<T: QuadValue>(f: impl Fn(f64) -> T, breaks: &[f64], tol: QuadTol) -> Quad<T> {
    let panels: Vec<(usize, f64, f64)> = breaks.windows(2).map(|w| (0, w[0], w[1])).collect();
    integrate_tagged(|_, x| f(x), &panels, tol)
}

/// Integrate over a set of disjoint panels `(tag, a, b)`. The tag of the
/// initial panel is handed back to `f` for every node inside it, which lets
/// piecewise integrands skip locating the piece.
pub fn integrate_tagged<T: QuadValue>(
    f: impl Fn(usize, f64) -> T,
    panels: &[(usize, f64, f64)],
    tol: QuadTol,
) -> Quad<T> {
    let mut heap = BinaryHeap::with_capacity(panels.len() * 2);
    let mut err = 0.0;
    let mut abs_total = 0.0;
    for &(tag, a, b) in panels {
        if b <= a {
            continue;
        }
        let g = |x: f64| f(tag, x);
        let (value, error, resabs) = gk15_abs(&g, a, b);
        err += error;
        abs_total += resabs;
        heap.push(Panel {
            tag,
            a,
            b,
            value,
            error,
            resabs,
        });
    }

    let mut count = heap.len();
    let mut converged = true;
    while err > tol.abs.max(tol.rel * abs_total) {
        if count >= tol.max_panels {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel at floating-point resolution; nothing left to split
            heap.push(worst);
            converged = false;
            break;
        }
        let tag = worst.tag;
        let g = |x: f64| f(tag, x);
        let (lv, le, la) = gk15_abs(&g, worst.a, mid);
        let (rv, re, ra) = gk15_abs(&g, mid, worst.b);
        err += le + re - worst.error;
        abs_total += la + ra - worst.resabs;
        heap.push(Panel {
            tag,
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
            resabs: la,
        });
        heap.push(Panel {
            tag,
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
            resabs: ra,
        });
        count += 1;
    }

    // re-sum to shed the drift of the incremental updates
    let mut value = T::zero();
    let mut error = 0.0;
    for p in heap.iter() {
        value = value + p.value;
        error += p.error;
    }
    Quad {
        value,
        error,
        converged,
    }
}

/// Breakpoints on `[a, b]` graded geometrically (ratio 4) toward `peak`,
/// starting at distance `scale`. Always includes `a` and `b`; includes
/// `peak` when it lies strictly inside.
pub fn graded_breaks(a: f64, b: f64, peak: f64, scale: f64, out: &mut Vec<f64>) {
    out.push(a);
    if peak > a && peak < b && scale > 0.0 {
        let mut left = Vec::new();
        let mut d = scale;
        while peak - d > a {
            left.push(peak - d);
            d *= 4.0;
        }
        out.extend(left.into_iter().rev());
        out.push(peak);
        let mut d = scale;
        while peak + d < b {
            out.push(peak + d);
            d *= 4.0;
        }
    } else if scale > 0.0 {
        // peak outside: grade from the nearer end
        let (near, sign) = if peak <= a { (a, 1.0) } else { (b, -1.0) };
        let gap = (peak - near).abs();
        let mut pts = Vec::new();
        let mut d = scale.max(gap);
        loop {
            let x = near + sign * (d - gap);
            if x <= a || x >= b {
                break;
            }
            if (x - near).abs() > 0.0 {
                pts.push(x);
            }
            d *= 4.0;
        }
        if sign < 0.0 {
            pts.reverse();
        }
        out.extend(pts);
    }
    out.push(b);
}

/// Gauss–Legendre rule with `n` nodes on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Shared 16-point Gauss–Legendre rule.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_degree_22() {
        let f = |x: f64| x.powi(22) + 3.0 * x.powi(5);
        let (v, _) = gk15(&f, -1.0, 2.0);
        let exact = (2f64.powi(23) + 1.0) / 23.0 + 3.0 * (64.0 - 1.0) / 6.0;
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn embedded_gauss_is_exact_for_degree_13() {
        // K - G vanishes when both rules are exact
        let f = |x: f64| x.powi(13) - x.powi(12);
        let (_, e) = gk15(&f, 0.0, 1.0);
        assert!(e < 1e-14);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let eps = 1e-9;
        let f = |x: f64| eps / (eps * eps + x * x);
        let mut br = Vec::new();
        graded_breaks(-1.0, 1.0, 0.0, eps, &mut br);
        let q = integrate(f, &br, QuadTol::relative(1e-12));
        let exact = 2.0 * (1.0 / eps).atan();
        assert!(q.converged);
        assert!((q.value - exact).abs() < 1e-10, "{} vs {}", q.value, exact);
    }

    #[test]
    fn graded_breaks_sorted_and_bounded() {
        let mut br = Vec::new();
        graded_breaks(0.0, 1.0, 1.3, 1e-3, &mut br);
        assert_eq!(br.first(), Some(&0.0));
        assert_eq!(br.last(), Some(&1.0));
        assert!(br.windows(2).all(|w| w[0] < w[1]));
        br.clear();
        graded_breaks(0.0, 1.0, 0.25, 1e-6, &mut br);
        assert!(br.windows(2).all(|w| w[0] < w[1]));
        assert!(br.contains(&0.25));
    }

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((i - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn complex_integrand() {
        let f = |x: f64| Complex64::new(x.cos(), x.sin());
        let q = integrate(f, &[0.0, std::f64::consts::PI], QuadTol::relative(1e-13));
        assert!((q.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }
}
