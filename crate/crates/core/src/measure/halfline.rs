use num_complex::Complex64;

use super::{atom_issues, check_ac_shape, check_atoms_finite, density_issues, AcPart, Atom};
use super::{Issue, ValidationReport, MASS_TOL};
use crate::quadrature::{gl16, graded_breaks, integrate_tagged, QuadTol, QuadValue};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    da: f64,
    db: f64,
}

impl Segment {
    #[inline]
    fn density(&self, x: f64) -> f64 {
        self.da + (self.db - self.da) * (x - self.a) / (self.b - self.a)
    }

    fn positive(&self) -> bool {
        self.da > 0.0 || self.db > 0.0
    }
}

/// Probability measure on `[0, ∞)`: atoms plus a piecewise-linear density
/// that vanishes outside its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineMeasure {
    atoms: Vec<Atom>,
    ac: Option<AcPart>,
    segments: Vec<Segment>,
}

impl HalfLineMeasure {
    /// Builds a measure; the density grid must be strictly increasing and
    /// nonnegative. Admissibility is checked by [`HalfLineMeasure::validate`].
    pub fn new(atoms: Vec<Atom>, ac: Option<AcPart>) -> Result<Self> {
        check_atoms_finite(&atoms)?;
        if let Some(ac) = &ac {
            check_ac_shape(ac, 2)?;
            if ac.grid[0] < 0.0 {
                return Err(Error::Parse("half-line ac grid must be nonnegative".into()));
            }
        }
        let segments = ac
            .as_ref()
            .map(|ac| {
                (0..ac.grid.len() - 1)
                    .map(|k| Segment {
                        a: ac.grid[k],
                        b: ac.grid[k + 1],
                        da: ac.values[k],
                        db: ac.values[k + 1],
                    })
                    .collect()
            })
            .unwrap_or_default();
        Ok(HalfLineMeasure {
            atoms,
            ac,
            segments,
        })
    }

    /// Purely atomic measure from `(point, weight)` pairs.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(atoms.iter().map(|&(l, w)| Atom::new(l, w)).collect(), None)
    }

    pub fn dirac(point: f64) -> Self {
        Self::new(vec![Atom::new(point, 1.0)], None).expect("finite point")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn ac(&self) -> Option<&AcPart> {
        self.ac.as_ref()
    }

    pub fn ac_mass(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| 0.5 * (s.da + s.db) * (s.b - s.a))
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>() + self.ac_mass()
    }

    pub fn validate(&self) -> ValidationReport {
        let mass = self.total_mass();
        let mut issues = Vec::new();
        if (mass - 1.0).abs() > MASS_TOL {
            issues.push(Issue::NonNormalized { mass });
        }
        density_issues(self.ac.as_ref(), &mut issues);
        for (index, a) in self.atoms.iter().enumerate() {
            if a.loc < 0.0 {
                issues.push(Issue::NegativeLocation { index, loc: a.loc });
            }
        }
        atom_issues(
            &self.atoms,
            |a, b| (a - b).abs() <= 1e-12 * a.abs().max(1.0),
            &mut issues,
        );
        if mass > 0.0 && self.support_range().is_none() {
            issues.push(Issue::ConcentratedAtZero);
        }
        ValidationReport {
            mass_defect: 1.0 - mass,
            issues,
        }
    }

    /// Push-forward under `ξ ↦ cξ`, `c > 0`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(
                "dilate",
                format!("factor {c} must be positive"),
            ));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(c * a.loc, a.weight))
            .collect();
        let ac = self.ac.as_ref().map(|ac| AcPart {
            grid: ac.grid.iter().map(|g| c * g).collect(),
            values: ac.values.iter().map(|v| v / c).collect(),
        });
        Self::new(atoms, ac)
    }

    /// Convex combination `w·a + (1-w)·b`, merged on the union grid.
    pub fn mix(w: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::domain("mix", format!("weight {w} not in [0, 1]")));
        }
        let mut atoms: Vec<Atom> = Vec::new();
        for (scale, m) in [(w, a), (1.0 - w, b)] {
            for at in &m.atoms {
                match atoms.iter_mut().find(|x| x.loc == at.loc) {
                    Some(x) => x.weight += scale * at.weight,
                    None => atoms.push(Atom::new(at.loc, scale * at.weight)),
                }
            }
        }
        atoms.retain(|a| a.weight > 0.0);
        let ac = match (&a.ac, &b.ac) {
            (None, None) => None,
            _ => {
                // exact when each density vanishes at both ends of its grid
                let mut grid: Vec<f64> = Vec::new();
                for ac in a.ac.iter().chain(b.ac.iter()) {
                    grid.extend(&ac.grid);
                }
                grid.sort_by(f64::total_cmp);
                grid.dedup();
                let values = grid
                    .iter()
                    .map(|&x| w * a.density_at(x) + (1.0 - w) * b.density_at(x))
                    .collect();
                Some(AcPart { grid, values })
            }
        };
        Self::new(atoms, ac)
    }

    /// Value of the density at `x` (zero outside the grid).
    pub fn density_at(&self, x: f64) -> f64 {
        let Some(ac) = &self.ac else { return 0.0 };
        let n = ac.grid.len();
        if x < ac.grid[0] || x > ac.grid[n - 1] {
            return 0.0;
        }
        let k = ac.grid.partition_point(|&g| g <= x).clamp(1, n - 1) - 1;
        self.segments[k].density(x)
    }

    /// Whether `x` lies in the closed support of the continuous part.
    pub fn ac_support_contains(&self, x: f64) -> bool {
        self.segments
            .iter()
            .any(|s| s.positive() && x >= s.a && x <= s.b)
    }

    /// Smallest and largest positive point of the support, `None` when the
    /// measure lives on `{0}` only.
    pub fn support_range(&self) -> Option<(f64, f64)> {
        let pts = self.support_points();
        let lo = pts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = pts.iter().copied().fold(0.0, f64::max);
        (hi > 0.0).then(|| (lo.max(f64::MIN_POSITIVE), hi))
    }

    /// Positive support points: atoms and the ends of positive density runs.
    pub fn support_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .atoms
            .iter()
            .filter(|a| a.loc > 0.0 && a.weight > 0.0)
            .map(|a| a.loc)
            .collect();
        let n = self.segments.len();
        for (k, s) in self.segments.iter().enumerate() {
            if !s.positive() {
                continue;
            }
            if k == 0 || !self.segments[k - 1].positive() {
                pts.push(s.a);
            }
            if k + 1 == n || !self.segments[k + 1].positive() {
                pts.push(s.b);
            }
        }
        pts.retain(|&p| p > 0.0);
        pts
    }

    fn ac_integral<T: QuadValue>(
        &self,
        peak: f64,
        scale: f64,
        tol: f64,
        kernel: impl Fn(f64) -> T,
    ) -> T {
        if self.segments.is_empty() {
            return T::zero();
        }
        let mut panels = Vec::with_capacity(self.segments.len() * 4);
        let mut br = Vec::new();
        for (k, s) in self.segments.iter().enumerate() {
            if !s.positive() {
                continue;
            }
            br.clear();
            graded_breaks(s.a, s.b, peak, scale, &mut br);
            panels.extend(br.windows(2).map(|w| (k, w[0], w[1])));
        }
        let segs = &self.segments;
        integrate_tagged(
            |k, x| kernel(x) * segs[k].density(x),
            &panels,
            QuadTol::relative(tol),
        )
        .value
    }

    /// `∫ rξ / (1 + r²ξ² - 2rξ cos θ) dν(ξ)` for `r > 0`, `0 < θ < π`.
    pub fn arg_kernel(&self, r: f64, theta: f64, tol: f64) -> Result<f64> {
        const OP: &str = "halfline_arg_kernel";
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(OP, format!("r = {r} must be positive")));
        }
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::domain(OP, format!("θ = {theta} not in (0, π)")));
        }
        let s2 = 4.0 * (0.5 * theta).sin().powi(2);
        let kernel = |x: f64| {
            let y = r * x;
            y / ((1.0 - y) * (1.0 - y) + y * s2)
        };
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * kernel(a.loc)).sum();
        Ok(atoms + self.ac_integral(1.0 / r, theta / r, tol, kernel))
    }

    /// `∫ rξ / (1 - rξ)² dν(ξ)`; `+∞` when `1/r` meets the support.
    pub fn edge_kernel(&self, r: f64, tol: f64) -> f64 {
        let kernel = |x: f64| {
            let y = r * x;
            y / ((1.0 - y) * (1.0 - y))
        };
        let mut total = 0.0;
        for a in &self.atoms {
            let k = kernel(a.loc);
            if !k.is_finite() {
                return f64::INFINITY;
            }
            total += a.weight * k;
        }
        if self.ac_support_contains(1.0 / r) {
            return f64::INFINITY;
        }
        total + self.ac_integral(1.0 / r, f64::MIN_POSITIVE, tol, kernel)
    }

    /// `∫ (r²ξ² - 1) / (1 + r²ξ² - 2rξ cos θ) dν(ξ)` for `0 ≤ θ < π`.
    pub fn mod_kernel(&self, r: f64, theta: f64, tol: f64) -> Result<f64> {
        const OP: &str = "halfline_mod_kernel";
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(OP, format!("r = {r} must be positive")));
        }
        if !(0.0..std::f64::consts::PI).contains(&theta) {
            return Err(Error::domain(OP, format!("θ = {theta} not in [0, π)")));
        }
        let s2 = 4.0 * (0.5 * theta).sin().powi(2);
        let denom = |x: f64| {
            let y = r * x;
            (1.0 - y) * (1.0 - y) + y * s2
        };
        let mut atoms = 0.0;
        for a in &self.atoms {
            let y = r * a.loc;
            let d = denom(a.loc);
            if d < 1e-14 {
                return Err(Error::singular(
                    OP,
                    format!("atom at {} with r = {r}, θ = {theta}", a.loc),
                ));
            }
            atoms += a.weight * (y * y - 1.0) / d;
        }
        if theta == 0.0 && self.ac_support_contains(1.0 / r) {
            return Err(Error::singular(
                OP,
                format!("1/r = {} lies in the continuous support at θ = 0", 1.0 / r),
            ));
        }
        let ac = self.ac_integral(1.0 / r, theta.max(1e-16) / r, tol, |x: f64| {
            let y = r * x;
            (y * y - 1.0) / denom(x)
        });
        Ok(atoms + ac)
    }

    /// `∫ ξ / (1 - ξz)² dν(ξ)` for `z` off the reciprocal support.
    pub fn resolvent_derivative(&self, z: Complex64, tol: f64) -> Complex64 {
        let kernel = |x: f64| {
            let d = Complex64::new(1.0, 0.0) - z * x;
            Complex64::new(x, 0.0) / (d * d)
        };
        let atoms = self.atoms.iter().fold(Complex64::new(0.0, 0.0), |acc, a| {
            acc + kernel(a.loc) * a.weight
        });
        let r = z.norm();
        atoms + self.ac_integral(1.0 / r, z.arg().abs().max(1e-16) / r, tol, kernel)
    }

    /// `∫ ξⁿ dν(ξ)`.
    pub fn moment(&self, n: u32) -> f64 {
        let n = n as i32;
        let mut m: f64 = self.atoms.iter().map(|a| a.weight * a.loc.powi(n)).sum();
        let (nodes, weights) = gl16();
        for s in &self.segments {
            if !s.positive() {
                continue;
            }
            // GL16 is exact for the degree n + 1 integrand when n ≤ 30
            let pieces = (n as usize / 30) + 1;
            let h = (s.b - s.a) / pieces as f64;
            for p in 0..pieces {
                let lo = s.a + p as f64 * h;
                for (x, w) in nodes.iter().zip(weights) {
                    let y = lo + 0.5 * h * (x + 1.0);
                    m += 0.5 * h * w * s.density(y) * y.powi(n);
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-11;

    fn uniform(a: f64, b: f64) -> HalfLineMeasure {
        let h = 1.0 / (b - a);
        HalfLineMeasure::new(
            vec![],
            Some(AcPart {
                grid: vec![a, b],
                values: vec![h, h],
            }),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        assert!(HalfLineMeasure::dirac(1.0).validate().is_admissible());
        assert!(HalfLineMeasure::dirac(0.0)
            .validate()
            .has("concentrated at zero"));
        let m = HalfLineMeasure::from_atoms(&[(2.0, 0.5), (2.0, 0.4)]).unwrap();
        let r = m.validate();
        assert!(r.has("duplicate atom"));
        assert!(r.has("non-normalized"));
        assert!(HalfLineMeasure::dirac(-1.0)
            .validate()
            .has("negative location"));
        assert!(uniform(1.0, 3.0).validate().is_admissible());
    }

    #[test]
    fn arg_kernel_values() {
        let d = HalfLineMeasure::dirac(1.0);
        assert_abs_diff_eq!(
            d.arg_kernel(1.0, PI / 2.0, TOL).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let d2 = HalfLineMeasure::dirac(2.0);
        assert_abs_diff_eq!(
            d2.arg_kernel(0.25, PI / 2.0, TOL).unwrap(),
            0.4,
            epsilon = 1e-15
        );
        assert!(d.arg_kernel(1.0, 0.0, TOL).is_err());
        assert!(d.arg_kernel(1.0, PI, TOL).is_err());
        assert!(d.arg_kernel(-1.0, 1.0, TOL).is_err());
    }

    #[test]
    fn edge_kernel_values() {
        let d = HalfLineMeasure::dirac(1.0);
        assert_eq!(d.edge_kernel(1.0, TOL), f64::INFINITY);
        assert_abs_diff_eq!(d.edge_kernel(0.5, TOL), 2.0, epsilon = 1e-15);
        let x1 = (3.0 - 5f64.sqrt()) / 2.0;
        assert_abs_diff_eq!(d.edge_kernel(x1, TOL), 1.0, epsilon = 1e-14);
        assert_eq!(uniform(1.0, 2.0).edge_kernel(0.7, TOL), f64::INFINITY);
    }

    #[test]
    fn edge_kernel_uniform_closed_form() {
        // ∫_1^2 rξ/(1-rξ)² dξ with y = rξ: (1/r)[ln|1-y| + 1/(1-y)] from r to 2r
        let m = uniform(1.0, 2.0);
        let r = 0.2;
        let f = |y: f64| ((1.0 - y).abs().ln() + 1.0 / (1.0 - y)) / r;
        let exact = f(2.0 * r) - f(r);
        assert_abs_diff_eq!(m.edge_kernel(r, 1e-12), exact, epsilon = 1e-11);
    }

    #[test]
    fn mod_kernel_values() {
        let d = HalfLineMeasure::dirac(1.0);
        assert_abs_diff_eq!(d.mod_kernel(1.0, 0.7, TOL).unwrap(), 0.0);
        assert_abs_diff_eq!(d.mod_kernel(2.0, 0.0, TOL).unwrap(), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            d.mod_kernel(0.5, PI / 2.0, TOL).unwrap(),
            -0.6,
            epsilon = 1e-15
        );
        assert!(matches!(
            d.mod_kernel(1.0, 0.0, TOL),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn moments_and_dilation() {
        let m = uniform(1.0, 3.0);
        assert_abs_diff_eq!(m.moment(1), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.moment(2), 13.0 / 3.0, epsilon = 1e-13);
        let d = m.dilate(3.0).unwrap();
        assert_abs_diff_eq!(d.total_mass(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.moment(3), 27.0 * m.moment(3), epsilon = 1e-10);
        assert!(m.dilate(0.0).is_err());
    }

    #[test]
    fn support_bookkeeping() {
        let m = HalfLineMeasure::new(
            vec![Atom::new(0.0, 0.2), Atom::new(5.0, 0.3)],
            Some(AcPart {
                grid: vec![1.0, 2.0, 3.0, 4.0],
                values: vec![0.0, 0.5, 0.0, 0.0],
            }),
        )
        .unwrap();
        let mut pts = m.support_points();
        pts.sort_by(f64::total_cmp);
        assert_eq!(pts, vec![1.0, 3.0, 5.0]);
        assert_eq!(m.support_range(), Some((1.0, 5.0)));
        assert!(m.ac_support_contains(3.0));
        assert!(!m.ac_support_contains(3.5));
        assert_abs_diff_eq!(m.density_at(1.5), 0.25);
        assert_eq!(m.density_at(10.0), 0.0);
    }

    #[test]
    fn resolvent_derivative_by_differences() {
        let m = HalfLineMeasure::new(
            vec![Atom::new(0.5, 0.4)],
            Some(AcPart {
                grid: vec![1.0, 2.0],
                values: vec![0.6, 0.6],
            }),
        )
        .unwrap();
        let z = Complex64::from_polar(0.8, 0.6);
        let resolvent = |z: Complex64| {
            let atoms = 0.4 / (Complex64::new(1.0, 0.0) - z * 0.5);
            // ∫_1^2 0.6/(1 - ξz) dξ = -0.6/z · ln((1-2z)/(1-z))
            atoms
                - 0.6 / z
                    * ((Complex64::new(1.0, 0.0) - z * 2.0) / (Complex64::new(1.0, 0.0) - z)).ln()
        };
        let e = 1e-6;
        let fd = (resolvent(z + e) - resolvent(z - e)) / (2.0 * e);
        assert!((fd - m.resolvent_derivative(z, 1e-12)).norm() < 1e-7);
    }
}
