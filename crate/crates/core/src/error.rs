use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the supported domain")]
    Domain { what: &'static str, value: f64 },

    #[error("lattice mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dispersion bracket vanishes for harmonic n = {n}")]
    DegenerateMode { n: usize },

    #[error("conjugate gradient breakdown at iteration {iteration}: curvature {curvature:e}")]
    SolverBreakdown { iteration: usize, curvature: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("gap equation has no sign change on [{lo:e}, {hi:e}] (g = {g_lo:e}, {g_hi:e})")]
    NoSolution {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("band matrix singular at row {row} (pivot {pivot:e})")]
    SingularBand { row: usize, pivot: f64 },

    #[error("wave is not periodic on the lattice: {0}")]
    Incommensurate(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl num_traits::ToPrimitive) -> Self {
        Error::Domain {
            what,
            value: value.to_f64().unwrap_or(f64::NAN),
        }
    }
}
