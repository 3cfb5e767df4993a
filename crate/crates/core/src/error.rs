use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material `{name}`: {reason}")]
    InvalidMaterial { name: String, reason: String },

    #[error("applied strain {applied} exceeds eps_max {max}")]
    Overstrain { applied: f64, max: f64 },

    #[error("invalid programming protocol: {0}")]
    Protocol(String),

    #[error("temperature {t} °C is below the fixing temperature {t_fix} °C")]
    Domain { t: f64, t_fix: f64 },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("parse error at `{path}`: {msg}")]
    Parse { path: String, msg: String },

    #[error("solver did not converge at T = {t} °C after {iters} iterations (q = {q})")]
    Convergence { t: f64, q: f64, iters: usize },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("degenerate groups: both have zero spread and equal means")]
    DegenerateGroup,

    #[error("group `{0}` needs at least two samples")]
    SmallGroup(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("no restart reduced the residual sum of squares")]
    NoProgress,

    #[error("no grid point satisfies the hard constraints: {0}")]
    Infeasible(String),

    #[error("sweep cell a = {a} mm, b = {b} mm: {source}")]
    Cell {
        a: f64,
        b: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// True for failures of the numerical continuation itself, as opposed to
    /// bad input.
    pub fn is_solver(&self) -> bool {
        match self {
            Error::Convergence { .. } | Error::NoProgress | Error::Infeasible(_) => true,
            Error::Cell { source, .. } => source.is_solver(),
            _ => false,
        }
    }
}
