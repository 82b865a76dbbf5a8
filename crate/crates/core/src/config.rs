/// Numerical knobs shared by the engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Absolute bracket width at which root bisections stop.
    pub tol_root: f64,
    /// Relative target for kernel quadratures.
    pub tol_quad: f64,
    /// Cap on bisection halvings.
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_root: 1e-12,
            tol_quad: 1e-9,
            max_iter: 200,
        }
    }
}

impl SolverConfig {
    pub fn with_tol_root(mut self, tol: f64) -> Self {
        self.tol_root = tol;
        self
    }

    pub fn with_tol_quad(mut self, tol: f64) -> Self {
        self.tol_quad = tol;
        self
    }
}
