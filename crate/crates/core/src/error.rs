use crate::algebra::SolveError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("node {receiver} in round {round}: {source}")]
    Solve { round: String, receiver: usize, source: SolveError },
    #[error("node {receiver} in round {round} recovered a wrong value for {iv}")]
    Mismatch { round: String, receiver: usize, iv: String },
    #[error("round {round}: no decodable draw after {attempts} attempts")]
    RetriesExhausted { round: String, attempts: usize },
}
