use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::discount::CountsOfCounts;
use super::{Key, NgramOrder};
use crate::corpus::{TokenId, Vocabulary};

/// Raw ngram counts for orders 1..=N over padded sentences.
///
/// Each sentence is padded with N−1 `<s>` on the left and one `</s>` on the
/// right. A k-gram is counted at every position whose last token is a real
/// token or `</s>`; grams ending in `<s>` are never prediction targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    order: NgramOrder,
    bos: TokenId,
    counts: Vec<FxHashMap<Key, u64>>,
}

impl CountTable {
    pub fn new(order: NgramOrder, bos: TokenId) -> Self {
        CountTable {
            order,
            bos,
            counts: vec![FxHashMap::default(); order.get()],
        }
    }

    pub fn order(&self) -> NgramOrder {
        self.order
    }

    pub fn bos(&self) -> TokenId {
        self.bos
    }

    /// Adds one sentence (already mapped to ids, without padding).
    pub fn add_sentence(&mut self, sentence: &[TokenId], eos: TokenId) {
        let n = self.order.get();
        let mut padded = Vec::with_capacity(sentence.len() + n);
        padded.resize(n - 1, self.bos);
        padded.extend_from_slice(sentence);
        padded.push(eos);
        for i in (n - 1)..padded.len() {
            if padded[i] == self.bos {
                continue;
            }
            for k in 1..=n {
                let gram = &padded[i + 1 - k..=i];
                *self.counts[k - 1].entry(Key::new(gram)).or_default() += 1;
            }
        }
    }

    /// Pointwise sum.
    pub fn merge(&mut self, other: &CountTable) {
        assert_eq!(self.order, other.order, "merging count tables of different orders");
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (k, c) in theirs {
                *mine.entry(*k).or_default() += c;
            }
        }
    }

    /// Raw count of an ngram of length 1..=N; 0 when absent.
    pub fn count(&self, gram: &[TokenId]) -> u64 {
        match gram.len() {
            0 => 0,
            k if k <= self.counts.len() => self.counts[k - 1].get(&Key::new(gram)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Number of distinct ngram types stored at `len`.
    pub fn types(&self, len: usize) -> usize {
        self.counts[len - 1].len()
    }

    /// Entries at `len`, sorted by key.
    pub fn sorted_entries(&self, len: usize) -> Vec<(Vec<TokenId>, u64)> {
        let mut v: Vec<_> = self.counts[len - 1]
            .iter()
            .map(|(k, &c)| (k.ids(len).to_vec(), c))
            .collect();
        v.sort_unstable();
        v
    }

    /// Number of distinct left extensions `v·gram` seen at the next order up.
    pub fn continuation_count(&self, gram: &[TokenId]) -> u64 {
        let k = gram.len();
        if k == 0 || k >= self.counts.len() {
            return 0;
        }
        self.counts[k].keys().filter(|key| &key.ids(k + 1)[1..] == gram).count() as u64
    }

    /// Derives the Kneser-Ney statistics the estimator needs.
    pub fn smoothing_stats(&self) -> SmoothingStats {
        SmoothingStats::from_counts(self)
    }
}

/// Counts a corpus on the current thread.
pub fn count_ngrams(sentences: &[Vec<TokenId>], vocab: &Vocabulary, order: NgramOrder) -> CountTable {
    let mut table = CountTable::new(order, vocab.bos());
    for s in sentences {
        table.add_sentence(s, vocab.eos());
    }
    table
}

/// Counts a corpus on a pool of `threads` workers by sharding sentences and
/// merging the shard tables. The result equals [`count_ngrams`] exactly.
pub fn count_ngrams_parallel(
    sentences: &[Vec<TokenId>],
    vocab: &Vocabulary,
    order: NgramOrder,
    threads: usize,
) -> CountTable {
    let threads = threads.max(1);
    if threads == 1 {
        return count_ngrams(sentences, vocab, order);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build counting thread pool");
    let chunk = sentences.len().div_ceil(threads * 4).max(1);
    pool.install(|| {
        sentences
            .par_chunks(chunk)
            .map(|shard| count_ngrams(shard, vocab, order))
            .reduce(
                || CountTable::new(order, vocab.bos()),
                |mut a, b| {
                    if a.types(1) < b.types(1) {
                        let mut b = b;
                        b.merge(&a);
                        return b;
                    }
                    a.merge(&b);
                    a
                },
            )
    })
}

/// Type counts for one context: total adjusted mass and how many distinct
/// continuations have adjusted count 1, 2 and ≥3.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContextStats {
    pub total: u64,
    pub n1: u64,
    pub n2: u64,
    pub n3plus: u64,
}

impl ContextStats {
    fn add(&mut self, count: u64) {
        self.total += count;
        match count {
            1 => self.n1 += 1,
            2 => self.n2 += 1,
            _ => self.n3plus += 1,
        }
    }
}

/// Adjusted counts and the per-order, per-context summaries derived from a
/// [`CountTable`].
///
/// The top order keeps raw counts. Lower orders use continuation counts
/// N1+(·g), except grams starting with `<s>`, which have no real left context
/// and keep their raw counts.
#[derive(Debug, Clone)]
pub struct SmoothingStats {
    pub(crate) adjusted: Vec<FxHashMap<Key, u64>>,
    pub(crate) contexts: Vec<FxHashMap<Key, ContextStats>>,
    counts_of_counts: Vec<CountsOfCounts>,
}

impl SmoothingStats {
    fn from_counts(table: &CountTable) -> Self {
        let n = table.order.get();
        let bos = table.bos;
        let mut adjusted: Vec<FxHashMap<Key, u64>> = Vec::with_capacity(n);
        for k in 1..=n {
            if k == n {
                adjusted.push(table.counts[k - 1].clone());
                continue;
            }
            let mut adj: FxHashMap<Key, u64> = FxHashMap::default();
            adj.reserve(table.counts[k - 1].len());
            for key in table.counts[k].keys() {
                let suffix = &key.ids(k + 1)[1..];
                if suffix[0] != bos {
                    *adj.entry(Key::new(suffix)).or_default() += 1;
                }
            }
            for (key, &c) in &table.counts[k - 1] {
                if key.ids(k)[0] == bos {
                    adj.insert(*key, c);
                }
            }
            adjusted.push(adj);
        }

        let mut contexts = Vec::with_capacity(n);
        let mut counts_of_counts = Vec::with_capacity(n);
        for (i, adj) in adjusted.iter().enumerate() {
            let k = i + 1;
            let mut ctx: FxHashMap<Key, ContextStats> = FxHashMap::default();
            let mut coc = CountsOfCounts::default();
            for (key, &c) in adj {
                ctx.entry(Key::new(&key.ids(k)[..k - 1])).or_default().add(c);
                coc.add(c);
            }
            contexts.push(ctx);
            counts_of_counts.push(coc);
        }
        SmoothingStats {
            adjusted,
            contexts,
            counts_of_counts,
        }
    }

    pub fn order(&self) -> usize {
        self.adjusted.len()
    }

    /// Adjusted count of a gram of length 1..=N.
    pub fn adjusted_count(&self, gram: &[TokenId]) -> u64 {
        self.adjusted
            .get(gram.len().wrapping_sub(1))
            .and_then(|m| m.get(&Key::new(gram)))
            .copied()
            .unwrap_or(0)
    }

    /// Statistics of `context` as a predictor at order `context.len() + 1`.
    pub fn context(&self, context: &[TokenId]) -> Option<ContextStats> {
        self.contexts.get(context.len())?.get(&Key::new(context)).copied()
    }

    /// Counts-of-counts of adjusted counts, one entry per order starting at 1.
    pub fn counts_of_counts(&self) -> &[CountsOfCounts] {
        &self.counts_of_counts
    }
}
