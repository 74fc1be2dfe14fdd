use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("degenerate curve: radial function non-positive at t = {t}")]
    DegenerateCurve { t: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation point coincides with a source (distance {dist:.3e})")]
    Singularity { dist: f64 },

    #[error("linear system is singular (resonance configuration)")]
    SingularSystem,

    #[error("nonlinear solver failed to converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver failed for incidence column {column}: {source}")]
    Incidence {
        column: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_column(self, column: usize) -> Error {
        Error::Incidence {
            column,
            source: Box::new(self),
        }
    }
}
