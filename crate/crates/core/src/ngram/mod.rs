//! Backoff ngram language models with interpolated modified Kneser-Ney
//! smoothing.
//!
//! The pipeline is [`count_ngrams`] → [`estimate_discounts`] → [`train`],
//! producing an immutable [`BackoffModel`] that can be queried, used to score
//! sentences, and written to or read from ARPA text.

mod arpa;
mod counts;
mod discount;
mod model;

use std::fmt;

use thiserror::Error;

pub use arpa::{read_arpa, read_arpa_file, write_arpa, write_arpa_file};
pub use counts::{count_ngrams, count_ngrams_parallel, ContextStats, CountTable, SmoothingStats};
pub use discount::{estimate_discounts, CountsOfCounts, Discounts, OrderDiscounts};
pub use model::{perplexity, train, BackoffModel, Entry, SentenceScore};

use crate::corpus::TokenId;

pub const MAX_ORDER: usize = 5;

/// Model order, between 1 and [`MAX_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NgramOrder(usize);

impl NgramOrder {
    pub fn new(n: usize) -> Result<Self, LmError> {
        if (1..=MAX_ORDER).contains(&n) {
            Ok(NgramOrder(n))
        } else {
            Err(LmError::InvalidOrder(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for NgramOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<usize> for NgramOrder {
    type Error = LmError;

    fn try_from(n: usize) -> Result<Self, LmError> {
        NgramOrder::new(n)
    }
}

/// Fixed-width ngram key. Slots past the ngram's length hold [`Key::PAD`];
/// each order lives in its own map, so the length is implied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key([TokenId; MAX_ORDER]);

impl Key {
    const PAD: TokenId = TokenId::MAX;

    pub fn new(ids: &[TokenId]) -> Self {
        debug_assert!(ids.len() <= MAX_ORDER);
        let mut k = [Self::PAD; MAX_ORDER];
        k[..ids.len()].copy_from_slice(ids);
        Key(k)
    }

    pub fn ids(&self, len: usize) -> &[TokenId] {
        &self.0[..len]
    }
}

#[derive(Debug, Error)]
pub enum LmError {
    #[error("ngram order {0} is outside 1..={MAX_ORDER}")]
    InvalidOrder(usize),
    #[error("corpus has no ngrams at the top order")]
    EmptyCorpus,
    #[error("token id {0} is not in the vocabulary")]
    UnknownId(TokenId),
    #[error("<s> cannot be predicted")]
    StartSymbolTarget,
    #[error("nothing to score")]
    EmptyInput,
    #[error("ARPA line {line}: {reason}")]
    ArpaParse { line: usize, reason: String },
    #[error("ARPA {order}-grams: header declares {declared}, section has {found}")]
    ArpaCountMismatch {
        order: usize,
        declared: usize,
        found: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = LmError> = std::result::Result<T, E>;
