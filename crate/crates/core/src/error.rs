use thiserror::Error;

/// Errors raised by the crystal, rigged-configuration and scattering layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch: {left} vs {right}")]
    Alphabet { left: usize, right: usize },

    #[error("letter {letter} is outside the alphabet 1..={n}")]
    LetterOutOfRange { letter: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid rigged configuration: {0}")]
    Invalid(String),

    #[error("length mismatch: {0}")]
    Length(String),

    #[error("normal-ordering contract violated: {0}")]
    NotNormalOrdered(String),

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("box-ball padding exhausted after {0} cells")]
    Padding(usize),

    #[error("state is not well separated: {0}")]
    NotSeparated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
