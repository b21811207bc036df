use thiserror::Error;

use crate::store::PartitionId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("program is not stratifiable: negative cycle through {}", .cycle.join(" -> "))]
    NotStratifiable { cycle: Vec<String> },
    #[error("partition {0} is sealed")]
    SealedPartition(PartitionId),
    #[error("unknown partition {0}")]
    UnknownPartition(PartitionId),
    #[error("partition {0} cannot read unknown partition {1}")]
    BadRead(PartitionId, PartitionId),
    #[error("partition {0} cannot read unsealed partition {1}")]
    UnsealedRead(PartitionId, PartitionId),
    #[error("partition {0} is still read by partition {1}")]
    InUse(PartitionId, PartitionId),
    #[error("function term depth exceeds bound {bound} while building {term}")]
    DepthExceeded { bound: usize, term: String },
    #[error("unsafe rule `{rule}`: {reason}")]
    UnsafeRule { rule: String, reason: String },
    #[error("fact `{0}` is not ground")]
    NonGroundFact(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}
