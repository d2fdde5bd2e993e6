use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("symplectic test needs even size, got {0}")]
    OddSize(usize),

    #[error("index selection out of range: {0}")]
    OutOfRange(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("constraint violated, residual = {residual}")]
    ConstraintViolation { residual: String },

    #[error("non-generic input at {site}")]
    NonGeneric { site: String },

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("matrix is not in the Bruhat cell of the requested representative")]
    WrongCell,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("weyl element is not in B(M)")]
    NotInBesselSupport,

    #[error("weyl elements are not comparable in the Bruhat order")]
    Incomparable,

    #[error("unknown suite '{0}'")]
    UnknownSuite(String),

    #[error("cannot parse rational '{0}'")]
    ParseRational(String),

    #[error("i/o error at {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn non_generic(site: impl Into<String>) -> Self {
        Error::NonGeneric { site: site.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
