use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimsMismatch { left: Vec<u64>, right: Vec<u64> },

    #[error("not in Weyl-Heisenberg group")]
    NotInWeylHeisenberg,

    #[error("not in normalizer: conjugate of generator {generator} is not a Weyl-Heisenberg element")]
    NotInNormalizer { generator: usize },

    #[error("determinant violation: det = {det} mod {modulus}")]
    DeterminantViolation { det: u64, modulus: u64 },

    #[error("unreachable: {0} not generated by the lifted generators")]
    Unreachable(String),

    #[error("guard exceeded: {what} ({size} > {limit})")]
    GuardExceeded { what: &'static str, size: u128, limit: u128 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("tableau lost the symplectic property after gate {gate}")]
    SymplecticViolation { gate: usize },
}
