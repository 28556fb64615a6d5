use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point outside the coordinate domain: {0}")]
    Domain(String),

    /// ν² + B ± iC sits on the negative real axis, so λ is imaginary.
    #[error("PT symmetry broken at nu = {nu}: nu^2 + B = {shift} lies on the branch cut with C = 0")]
    BrokenPhase { nu: u32, shift: f64 },

    #[error("real-time kernel at a caustic: |sin(omega t)| = {sin_abs:e}")]
    Caustic { sin_abs: f64 },

    #[error("integration grid invalid: {0}")]
    InvalidGrid(String),

    #[error("trapezoid refinement did not converge: last relative change {last_change:e}")]
    GridTooCoarse { last_change: f64 },

    /// The pseudo-time integrand does not decay; `nearest_pole` is the closest
    /// predicted pole frequency.
    #[error("pseudo-time integral diverges (nearest predicted pole at omega = {nearest_pole})")]
    DivergentIntegral { nearest_pole: f64 },

    #[error("coincident endpoints: the diagonal resolvent is UV divergent")]
    CoincidentEndpoints,

    #[error("Newton iteration did not converge after {iterations} steps (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },

    #[error("radial grid too short: {0}")]
    GridError(String),

    #[error("spectral term within {gap:e} of a pole at n_total = {n_total}")]
    PoleProximity { n_total: usize, gap: f64 },
}
