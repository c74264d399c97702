//! Solve reporting shared by the multigrid and Krylov drivers.

/// Outcome of an iterative solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method_tag: String,
    /// Number of iterations (multigrid cycles, or operator matvecs after the
    /// initial residual for Krylov methods).
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_relres: f64,
    pub wall_time: f64,
    pub converged: bool,
}

impl SolveReport {
    pub fn new(method_tag: impl Into<String>) -> Self {
        Self {
            method_tag: method_tag.into(),
            iterations: 0,
            residual_history: Vec::new(),
            final_relres: f64::NAN,
            wall_time: 0.0,
            converged: false,
        }
    }
}
