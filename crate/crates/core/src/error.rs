use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix of rank {rank} with {rows} rows has no right inverse")]
    NoRightInverse { rows: usize, rank: usize },

    #[error("unsupported rate: {info} information bits need at least as many parity bits, got {parity}")]
    UnsupportedRate { info: usize, parity: usize },

    #[error("path explosion at section {section} from root {root:#x}: {live} live paths exceed cap {cap}")]
    PathExplosion {
        root: u64,
        section: usize,
        live: usize,
        cap: usize,
    },

    #[error("erased section {section} has no recovered information bits")]
    UnresolvedErasure { section: usize },

    #[error("refusing to enumerate 2^{bits} payloads (limit 2^{limit})")]
    EnumerationRefused { bits: usize, limit: usize },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
