use thiserror::Error;

use crate::problem::Hypothesis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("hypothesis {hypothesis} violated: {detail}")]
    Hypothesis { hypothesis: Hypothesis, detail: String },

    #[error("field has no positive part; the fibering map never turns negative")]
    NoProjection,

    #[error("could not bracket the Nehari root: {0}")]
    Bracket(String),

    #[error("operation undefined for the zero field")]
    ZeroField,

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("inadmissible start: {0}")]
    InadmissibleStart(String),
}
