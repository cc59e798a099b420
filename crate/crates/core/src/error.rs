use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed piecewise function: {0}")]
    Malformed(String),

    #[error("function is improper (identically +inf or taking -inf)")]
    Improper,

    #[error("infimum is -inf on {0}")]
    UnboundedBelow(String),

    #[error("all grid nodes are +inf")]
    AllInfinite,

    #[error("grid axes are incompatible: {0}")]
    GridMismatch(String),

    #[error("bad axis: {0}")]
    BadAxis(String),

    #[error("operator graph is not maximal monotone: {0}")]
    NotMaximal(String),

    #[error("point ({0}, {1}) is not on the operator graph")]
    NotOnGraph(f64, f64),

    #[error("exact conjugation not available for this representation")]
    NeedsGrid,

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
