use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error(
        "full enumeration needs (2k)^l = 2^{log2_words:.2} words, above the cap of {cap}; \
         use sampled mode instead"
    )]
    Capacity { log2_words: f64, cap: u64 },

    #[error("letter {letter} out of range for {k} generators")]
    LetterOutOfRange { letter: i32, k: usize },

    #[error("net is empty")]
    EmptyNet,

    #[error("unsupported sphere dimension {found} (supported: {supported})")]
    UnsupportedDimension { found: usize, supported: &'static str },

    #[error("quadrature resolution {given} too low, need at least {required} latitude nodes")]
    Resolution { given: usize, required: usize },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
