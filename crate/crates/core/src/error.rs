use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("state space of {n_state} variables exceeds the enumeration cap of {cap}")]
    Capacity { n_state: usize, cap: usize },

    #[error("point {0} is not an equilibrium of the map")]
    NotEquilibrium(String),

    #[error("input {input} is not measured by any agent")]
    NoRoot { input: usize },

    /// `agent` is the first agent (0-based) that cannot gather enough
    /// secured sources for the requested redundancy.
    #[error("input {input} is not {redundancy}-reachable: agent {agent} cannot be secured")]
    Infeasible {
        input: usize,
        redundancy: usize,
        agent: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed matrix text: {0}")]
    MatrixFormat(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
