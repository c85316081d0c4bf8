//! Ngram language models that rank tweets by how funny they are.
//!
//! Two models are trained with modified Kneser-Ney smoothing: one on a corpus
//! of funny tweets and one on news text. A tweet is funnier the more probable
//! it is under the tweet model, or the less probable under the news model.
//! Those scores drive pairwise comparison and a top-1 / next-9 / rest
//! semi-ranking of the tweets answering each hashtag prompt.
//!
//! ```
//! use humorlm::corpus::{build_vocabulary, tokenize};
//! use humorlm::ngram::{count_ngrams, estimate_discounts, train, NgramOrder};
//!
//! let lines = ["the cat sat", "the cat ran"];
//! let sentences: Vec<Vec<String>> = lines.iter().map(|l| tokenize(l)).collect();
//! let vocab = build_vocabulary(&sentences, 1);
//! let ids: Vec<_> = sentences.iter().map(|s| vocab.encode(s)).collect();
//! let order = NgramOrder::new(2)?;
//! let counts = count_ngrams(&ids, &vocab, order);
//! let discounts = estimate_discounts(counts.smoothing_stats().counts_of_counts());
//! let model = train(&counts, &discounts, &vocab, order)?;
//!
//! let score = model.sentence_logprob(&tokenize("the cat sat"));
//! assert_eq!(score.token_count, 4);
//! assert!(score.log10_prob < 0.0);
//! # Ok::<(), humorlm::ngram::LmError>(())
//! ```
//!
//! The `examples/` directory has one runnable program per capability.

pub mod cli;
pub mod corpus;
pub mod ngram;
pub mod rank;
