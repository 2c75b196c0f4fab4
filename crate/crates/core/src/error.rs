use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented domain (non-positive waist,
    /// non-unitary beam splitter, efficiency outside (0, 1], ...).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    /// A numerical evaluation produced a non-finite value.
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    /// The non-overlapping plateau of a scan curve is zero.
    #[error("visibility undefined: plateau value is zero")]
    UndefinedVisibility,

    /// The LO mode vanishes at the reference aperture.
    #[error("degenerate anchor: |U_LO(ref)| = {0:e} is below 1e-12")]
    DegenerateAnchor(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Scenario or measurement file problem, with the 1-based line number when known.
    #[error("{}", match .line { Some(l) => format!("line {l}: {}", .message), None => .message.clone() })]
    Config { line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }

    /// Process exit status used by the command line: 2 for configuration
    /// and input problems, 3 for numerical-domain failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalDomain(_) | Error::UndefinedVisibility | Error::DegenerateAnchor(_) => 3,
            Error::InvalidParameter { .. }
            | Error::InvalidInput(_)
            | Error::Config { .. }
            | Error::Io(_) => 2,
        }
    }
}
