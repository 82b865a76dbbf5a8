use std::f64::consts::PI;

use num_complex::Complex64;

use super::{atom_issues, check_ac_shape, check_atoms_finite, density_issues, AcPart, Atom};
use super::{Issue, ValidationReport, MASS_TOL};
use crate::quadrature::{gl16, graded_breaks, integrate_tagged, QuadTol, QuadValue};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Reduce an angle into `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x - TWO_PI * ((x + PI) / TWO_PI).floor();
    if y >= PI {
        y - TWO_PI
    } else {
        y
    }
}

/// One linear piece of the periodic density: `[a, b]` with end values.
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

    /// Image of `y` (mod 2π) nearest to the middle of the segment.
    fn nearest_image(&self, y: f64) -> f64 {
        let mid = 0.5 * (self.a + self.b);
        y + TWO_PI * ((mid - y) / TWO_PI).round()
    }

    /// Whether `y` (mod 2π) lies in the closed segment.
    fn contains(&self, y: f64) -> bool {
        let z = self.nearest_image(y);
        z >= self.a && z <= self.b
    }
}

/// Probability measure on the unit circle, parametrised by the angle
/// `x ∈ [-π, π)` of `e^{ix}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    atoms: Vec<Atom>,
    ac: Option<AcPart>,
    segments: Vec<Segment>,
}

impl CircleMeasure {
    /// Builds a measure from atoms and an optional periodic piecewise-linear
    /// density. Angles are reduced into `[-π, π)`; the density grid is
    /// rotated so that it is increasing after reduction. Only structural
    /// problems are rejected here; see [`CircleMeasure::validate`].
    pub fn new(atoms: Vec<Atom>, ac: Option<AcPart>) -> Result<Self> {
        check_atoms_finite(&atoms)?;
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|a| Atom::new(wrap_angle(a.loc), a.weight))
            .collect();
        let ac = match ac {
            None => None,
            Some(ac) => {
                if ac.grid.len() != ac.values.len() {
                    check_ac_shape(&ac, 1)?;
                }
                let mut pairs: Vec<(f64, f64)> = ac
                    .grid
                    .iter()
                    .zip(&ac.values)
                    .map(|(&g, &v)| (wrap_angle(g), v))
                    .collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let ac = AcPart {
                    grid: pairs.iter().map(|p| p.0).collect(),
                    values: pairs.iter().map(|p| p.1).collect(),
                };
                check_ac_shape(&ac, 1)?;
                Some(ac)
            }
        };
        let segments = ac.as_ref().map(build_segments).unwrap_or_default();
        Ok(CircleMeasure {
            atoms,
            ac,
            segments,
        })
    }

    /// Purely atomic measure from `(angle, weight)` pairs.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(atoms.iter().map(|&(l, w)| Atom::new(l, w)).collect(), None)
    }

    /// Point mass at `e^{i angle}`.
    pub fn dirac(angle: f64) -> Self {
        Self::new(vec![Atom::new(angle, 1.0)], None).expect("finite angle")
    }

    /// Normalised arc length (Haar measure).
    pub fn haar() -> Self {
        let grid = vec![-PI, -0.5 * PI, 0.0, 0.5 * PI];
        let values = vec![1.0 / TWO_PI; 4];
        Self::new(Vec::new(), Some(AcPart { grid, values })).expect("valid grid")
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
        atom_issues(
            &self.atoms,
            |a, b| wrap_angle(a - b).abs() < 1e-12,
            &mut issues,
        );
        ValidationReport {
            mass_defect: 1.0 - mass,
            issues,
        }
    }

    /// Push-forward under `e^{ix} ↦ e^{i(x + alpha)}`.
    pub fn rotate(&self, alpha: f64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.loc + alpha, a.weight))
            .collect();
        let ac = self.ac.as_ref().map(|ac| AcPart {
            grid: ac.grid.iter().map(|g| g + alpha).collect(),
            values: ac.values.clone(),
        });
        Self::new(atoms, ac).expect("rotation preserves structure")
    }

    /// Convex combination `w·a + (1-w)·b`. The densities are merged on the
    /// union of both grids, which keeps the result exactly piecewise linear.
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
                let mut grid: Vec<f64> =
                    a.ac.iter()
                        .chain(b.ac.iter())
                        .flat_map(|ac| ac.grid.iter().copied())
                        .collect();
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

    fn segment_index(&self, x: f64) -> Option<usize> {
        let ac = self.ac.as_ref()?;
        let y = wrap_angle(x);
        let n = ac.grid.len();
        // index of the last node <= y, wrapping below the first node
        let k = ac.grid.partition_point(|&g| g <= y);
        Some(if k == 0 { n - 1 } else { k - 1 })
    }

    /// Value of the continuous density at angle `x`.
    pub fn density_at(&self, x: f64) -> f64 {
        match self.segment_index(x) {
            None => 0.0,
            Some(k) => {
                let s = &self.segments[k];
                s.density(s.nearest_image(wrap_angle(x)))
            }
        }
    }

    /// Whether `x` lies in the closed support of the continuous part.
    pub fn ac_support_contains(&self, x: f64) -> bool {
        self.segments.iter().any(|s| s.positive() && s.contains(x))
    }

    /// True when the continuous part is positive on a dense subset of the circle.
    pub fn ac_covers_circle(&self) -> bool {
        !self.segments.is_empty() && self.segments.iter().all(Segment::positive)
    }

    /// Angles that lie in the support: every atom and both ends of every
    /// positive stretch of the continuous density.
    pub fn support_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.atoms.iter().map(|a| a.loc).collect();
        let n = self.segments.len();
        for (k, s) in self.segments.iter().enumerate() {
            if !s.positive() {
                continue;
            }
            let prev = &self.segments[(k + n - 1) % n];
            let next = &self.segments[(k + 1) % n];
            if !prev.positive() {
                pts.push(wrap_angle(s.a));
            }
            if !next.positive() {
                pts.push(wrap_angle(s.b));
            }
        }
        pts
    }

    /// Integrate `kernel(x)·d(x)` over the continuous part, with panels
    /// graded toward the kernel peak at angle `peak` (mod 2π).
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
            graded_breaks(s.a, s.b, s.nearest_image(peak), scale, &mut br);
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

    /// `∫ dμ(e^{ix}) / (1 + r² - 2r cos(θ + x))` for `0 < r < 1`.
    pub fn poisson_kernel_integral(&self, r: f64, theta: f64, tol: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::domain(
                "poisson_kernel_integral",
                format!("r = {r} not in (0, 1)"),
            ));
        }
        let q = (1.0 - r) * (1.0 - r);
        let kernel = |x: f64| {
            let s = (0.5 * (theta + x)).sin();
            1.0 / (q + 4.0 * r * s * s)
        };
        let atoms: f64 = self.atoms.iter().map(|a| a.weight * kernel(a.loc)).sum();
        Ok(atoms + self.ac_integral(-theta, (1.0 - r).max(1e-16), tol, kernel))
    }

    /// `∫ r sin(θ + x) / (1 + r² - 2r cos(θ + x)) dμ(e^{ix})` for `0 < r ≤ 1`.
    pub fn conjugate_kernel_integral(&self, r: f64, theta: f64, tol: f64) -> Result<f64> {
        const OP: &str = "conjugate_kernel_integral";
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::domain(OP, format!("r = {r} not in (0, 1]")));
        }
        let q = (1.0 - r) * (1.0 - r);
        let denom = |x: f64| {
            let s = (0.5 * (theta + x)).sin();
            q + 4.0 * r * s * s
        };
        let mut atoms = 0.0;
        for a in &self.atoms {
            let d = denom(a.loc);
            if d < 1e-14 {
                return Err(Error::singular(
                    OP,
                    format!("atom at {} with r = {r}, θ = {theta}", a.loc),
                ));
            }
            atoms += a.weight * r * (theta + a.loc).sin() / d;
        }
        if r == 1.0 && self.ac_support_contains(-theta) {
            return Err(Error::singular(
                OP,
                format!("θ = {theta} faces the continuous support at r = 1"),
            ));
        }
        let ac = self.ac_integral(-theta, (1.0 - r).max(1e-16), tol, |x: f64| {
            r * (theta + x).sin() / denom(x)
        });
        Ok(atoms + ac)
    }

    /// `∫ dμ(e^{ix}) / (2 - 2cos(θ + x))`; `+∞` when the pole meets the support.
    pub fn edge_kernel_integral(&self, theta: f64, tol: f64) -> f64 {
        let kernel = |x: f64| {
            let s = (0.5 * (theta + x)).sin();
            1.0 / (4.0 * s * s)
        };
        let mut total = 0.0;
        for a in &self.atoms {
            let k = kernel(a.loc);
            if !k.is_finite() {
                return f64::INFINITY;
            }
            total += a.weight * k;
        }
        if self.ac_support_contains(-theta) {
            return f64::INFINITY;
        }
        total + self.ac_integral(-theta, f64::MIN_POSITIVE, tol, kernel)
    }

    /// `∫ (1 + ξz)/(1 - ξz) dμ(ξ)` for `|z| ≤ 1` away from the support.
    pub fn herglotz(&self, z: Complex64, tol: f64) -> Complex64 {
        let (r, theta) = (z.norm(), z.arg());
        let q = (1.0 - r) * (1.0 - r);
        let kernel = |x: f64| {
            let s = (0.5 * (theta + x)).sin();
            let d = q + 4.0 * r * s * s;
            Complex64::new((1.0 - r * r) / d, 2.0 * r * (theta + x).sin() / d)
        };
        let atoms = self.atoms.iter().fold(Complex64::new(0.0, 0.0), |acc, a| {
            acc + kernel(a.loc) * a.weight
        });
        atoms + self.ac_integral(-theta, (1.0 - r).max(1e-16), tol, kernel)
    }

    /// `∫ 2ξ/(1 - ξz)² dμ(ξ)`, the `z`-derivative of [`CircleMeasure::herglotz`].
    pub fn herglotz_derivative(&self, z: Complex64, tol: f64) -> Complex64 {
        let (r, theta) = (z.norm(), z.arg());
        let kernel = |x: f64| {
            let xi = Complex64::from_polar(1.0, x);
            let d = Complex64::new(1.0, 0.0) - xi * z;
            xi * 2.0 / (d * d)
        };
        let atoms = self.atoms.iter().fold(Complex64::new(0.0, 0.0), |acc, a| {
            acc + kernel(a.loc) * a.weight
        });
        atoms + self.ac_integral(-theta, (1.0 - r).max(1e-16), tol, kernel)
    }

    /// `m_n = ∫ ξⁿ dμ(ξ)`.
    pub fn moment(&self, n: u32) -> Complex64 {
        let nf = n as f64;
        let mut m = self.atoms.iter().fold(Complex64::new(0.0, 0.0), |acc, a| {
            acc + Complex64::from_polar(a.weight, nf * a.loc)
        });
        let (nodes, weights) = gl16();
        for s in &self.segments {
            if !s.positive() {
                continue;
            }
            let len = s.b - s.a;
            let pieces = (nf * len).ceil().max(1.0) as usize;
            let h = len / pieces as f64;
            for p in 0..pieces {
                let lo = s.a + p as f64 * h;
                for (x, w) in nodes.iter().zip(weights) {
                    let y = lo + 0.5 * h * (x + 1.0);
                    m += Complex64::from_polar(0.5 * h * w * s.density(y), nf * y);
                }
            }
        }
        m
    }
}

fn build_segments(ac: &AcPart) -> Vec<Segment> {
    let n = ac.grid.len();
    (0..n)
        .map(|k| {
            let a = ac.grid[k];
            let b = if k + 1 < n {
                ac.grid[k + 1]
            } else {
                ac.grid[0] + TWO_PI
            };
            Segment {
                a,
                b,
                da: ac.values[k],
                db: ac.values[(k + 1) % n],
            }
        })
        .collect()
}
