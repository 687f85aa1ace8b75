//! Generalized-automorphism ensemble decoding (GAED) and its graph-merged
//! variant (iGAED) for binary linear block codes.
//!
//! The crate provides:
//!
//! * dense GF(2) linear algebra ([`gf2`]),
//! * linear-code and Tanner-graph modelling with alist / dense-matrix file
//!   ingestion ([`code`]),
//! * generalized automorphisms `T` with verification and power generation
//!   ([`automorphism`]),
//! * the extended-Tanner-graph merge and degree-2 prune that turn the GAED
//!   preprocessing into graph structure ([`graph`]),
//! * sum-product / normalized min-sum flooding BP ([`decoder`]),
//! * GAED / iGAED path execution with ML-in-the-list selection ([`ensemble`]),
//! * a BI-AWGN channel with reproducible per-frame randomness ([`channel`]),
//! * a Monte-Carlo FER/BER sweep harness and brute-force ML oracle ([`sim`]).

pub mod automorphism;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod ensemble;
pub mod gf2;
pub mod graph;
pub mod sim;

use thiserror::Error as ThisError;

/// Errors surfaced by parsing, loading, and budgeted brute-force operations.
///
/// Dimension mismatches between in-memory values are programmer errors and
/// panic instead.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("brute-force enumeration needs 1 <= k <= {cap}, got k = {k}")]
    EnumerationTooLarge { k: usize, cap: usize },

    #[error("matrix is not invertible")]
    Singular,

    #[error("{0}")]
    InvalidCode(String),

    #[error("transformation matrix failed automorphism verification: {0}")]
    NotAnAutomorphism(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
