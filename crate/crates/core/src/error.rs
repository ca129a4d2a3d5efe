use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The adaptive integrator ran out of subdivisions before meeting its
    /// tolerance. The partial value and its error estimate are kept.
    #[error("quadrature did not converge: value {value:e} with error estimate {error_estimate:e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// The integrand is not integrable at the lower endpoint.
    #[error("integrand diverges at the lower endpoint (tail estimate {tail:e} vs result {value:e})")]
    Divergent { value: f64, tail: f64 },

    #[error("temperature {temperature} K is not below the critical temperature {critical} K")]
    AboveCritical { temperature: f64, critical: f64 },

    #[error("no energies satisfy alpha_T > {threshold}")]
    EmptyRegion { threshold: f64 },

    #[error("momenta ({0}) sit on a kinematic boundary")]
    DegenerateMomenta(String),

    #[error("Monte Carlo relative standard error {rel_error:.3} exceeds {limit}")]
    McNoise { rel_error: f64, limit: f64 },
}

impl Error {
    /// True for the failures that the CLI maps to the quadrature exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Divergent { .. } | Error::McNoise { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
