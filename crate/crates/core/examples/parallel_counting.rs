//! Counts a corpus with 1..=8 worker threads and checks that the tables
//! agree.
//!
//!     cargo run --release --example parallel_counting -- [corpus.txt]

use std::time::Instant;

use humorlm::corpus::{build_vocabulary, read_plaintext_file};
use humorlm::ngram::{count_ngrams_parallel, NgramOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/news.txt").to_string());
    let sentences = read_plaintext_file(path.as_ref())?;
    let vocab = build_vocabulary(&sentences, 1);
    let encoded: Vec<_> = sentences.iter().map(|s| vocab.encode(s)).collect();
    let order = NgramOrder::new(3)?;

    let reference = count_ngrams_parallel(&encoded, &vocab, order, 1);
    for threads in [1, 2, 4, 8] {
        let start = Instant::now();
        let counts = count_ngrams_parallel(&encoded, &vocab, order, threads);
        let elapsed = start.elapsed();
        let same = (1..=3).all(|k| counts.sorted_entries(k) == reference.sorted_entries(k));
        let types: Vec<usize> = (1..=3).map(|k| counts.types(k)).collect();
        println!("{threads} thread(s): {types:?} types in {elapsed:.2?}, identical: {same}");
        assert!(same);
    }
    let coc = reference.smoothing_stats();
    for (k, c) in coc.counts_of_counts().iter().enumerate() {
        println!("order {}: n1={} n2={} n3={} n4={}", k + 1, c.n1, c.n2, c.n3, c.n4);
    }
    Ok(())
}
