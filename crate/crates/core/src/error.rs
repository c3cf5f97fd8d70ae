use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown space label `{0}`")]
    UnknownLabel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: {context}")]
    SingularMatrix { context: String },

    #[error("model has no Stratonovich form: I + S is singular")]
    NoStratonovichForm,

    #[error("ill-posed network: {context} is not invertible")]
    IllPosedNetwork { context: String },

    #[error("port count mismatch: {left} vs {right}")]
    PortCountMismatch { left: usize, right: usize },

    #[error("duplicate port label `{0}`")]
    DuplicatePortLabel(String),

    #[error("unknown port `{0}`")]
    UnknownPort(String),

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("Omega_fb is singular at s = {re} + {im}i")]
    SingularAtPoint { re: f64, im: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

impl Error {
    /// Re-tag a singular inversion as a well-posedness failure of the network.
    pub(crate) fn into_ill_posed(self) -> Error {
        match self {
            Error::SingularMatrix { context } => Error::IllPosedNetwork { context },
            other => other,
        }
    }
}
