use alloc::string::String;
use core::fmt;

use crate::label::StanceLabel;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    UnknownStance(String),
    InvalidSelector(String),
    InvalidField(String),
    EmptyFeatureSpace,
    InvalidVector { index: usize, dimension: usize },
    DimensionMismatch { expected: usize, found: usize },
    DegenerateTrainingSet,
    InvalidLabel(i8),
    MissingClass { class: StanceLabel, topic: String },
    UnknownClass(StanceLabel),
    LengthMismatch { left: usize, right: usize },
    InvalidConfig(String),
    InvalidFolds { n: usize, k: usize },
    DegenerateDifferences,
    EmptySample,
    EmptyRanking,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownStance(s) => write!(f, "unknown stance '{s}'"),
            Error::InvalidSelector(s) => write!(f, "invalid feature selector '{s}'"),
            Error::InvalidField(s) => write!(f, "invalid profile field '{s}'"),
            Error::EmptyFeatureSpace => f.write_str("empty feature space"),
            Error::InvalidVector { index, dimension } => {
                write!(f, "index {index} out of range for dimension {dimension} or not strictly increasing")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::DegenerateTrainingSet => f.write_str("degenerate training set"),
            Error::InvalidLabel(y) => write!(f, "binary label must be -1 or +1, got {y}"),
            Error::MissingClass { class, topic } => {
                write!(f, "class {class} has no training examples for topic '{topic}'")
            }
            Error::UnknownClass(c) => write!(f, "class {c} is not part of the model"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidFolds { n, k } => write!(f, "cannot split {n} instances into {k} folds"),
            Error::DegenerateDifferences => f.write_str("degenerate difference vector"),
            Error::EmptySample => f.write_str("empty sample"),
            Error::EmptyRanking => f.write_str("empty ranking"),
        }
    }
}

impl core::error::Error for Error {}
