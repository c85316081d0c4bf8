use rustc_hash::FxHashMap;

use super::counts::{ContextStats, CountTable};
use super::discount::{Discounts, OrderDiscounts};
use super::{Key, LmError, NgramOrder, Result};
use crate::corpus::{TokenId, Vocabulary};

/// log10 probability written for context-only entries (`<s>`, `<s> <s>`, …),
/// which are never predicted.
pub const NEVER_PREDICTED: f64 = -99.0;

/// One stored ngram: its log10 probability and, when the ngram is also a
/// context, its log10 backoff weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub log10_prob: f64,
    pub log10_backoff: Option<f64>,
}

/// An order-N backoff model.
///
/// `P(w | h) = p(h w)` when `h w` is stored, otherwise `b(h) · P(w | h')`
/// where `h'` drops the oldest word of `h` and `b(h)` is 1 for contexts
/// without a stored backoff. Immutable once built; queries take `&self`.
#[derive(Debug, Clone)]
pub struct BackoffModel {
    order: NgramOrder,
    vocab: Vocabulary,
    entries: Vec<FxHashMap<Key, Entry>>,
}

/// Total log10 probability of a sentence and the number of predicted
/// positions (tokens plus `</s>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceScore {
    pub log10_prob: f64,
    pub token_count: usize,
}

fn gamma(d: &OrderDiscounts, cs: &ContextStats) -> f64 {
    (d.d1 * cs.n1 as f64 + d.d2 * cs.n2 as f64 + d.d3plus * cs.n3plus as f64) / cs.total as f64
}

/// Builds an interpolated modified Kneser-Ney model and stores it in backoff
/// form.
///
/// For a stored gram `h w` at order k with adjusted count `a`:
/// `p(h w) = (a − D_k(a)) / T(h) + γ(h) · p(h' w)`, with
/// `γ(h) = (D1·N1(h·) + D2·N2(h·) + D3+·N3+(h·)) / T(h)`. The unigram level
/// interpolates with the uniform distribution over every word except `<s>`.
/// `γ(h)` becomes the backoff weight of `h`.
pub fn train(
    counts: &CountTable,
    discounts: &Discounts,
    vocab: &Vocabulary,
    order: NgramOrder,
) -> Result<BackoffModel> {
    let n = order.get();
    assert_eq!(counts.order(), order, "count table order differs from requested order");
    assert_eq!(discounts.0.len(), n, "need one set of discounts per order");
    if counts.types(n) == 0 {
        return Err(LmError::EmptyCorpus);
    }
    let stats = counts.smoothing_stats();
    let bos = vocab.bos();
    let predictable = (vocab.len() - 1) as f64;

    // Linear probabilities while building; converted to log10 at the end.
    let mut entries: Vec<FxHashMap<Key, Entry>> = Vec::with_capacity(n);

    let uni_ctx = stats.context(&[]).ok_or(LmError::EmptyCorpus)?;
    let d = discounts.order(1);
    let uni_gamma = gamma(d, &uni_ctx);
    let mut unigrams = FxHashMap::default();
    for id in 0..vocab.len() as TokenId {
        if id == bos {
            continue;
        }
        let a = stats.adjusted_count(&[id]);
        let own = if a > 0 {
            (a as f64 - d.for_count(a)) / uni_ctx.total as f64
        } else {
            0.0
        };
        let p = own + uni_gamma / predictable;
        unigrams.insert(
            Key::new(&[id]),
            Entry {
                log10_prob: p,
                log10_backoff: None,
            },
        );
    }
    entries.push(unigrams);

    for k in 2..=n {
        let d = discounts.order(k);
        let lower = &entries[k - 2];
        let mut level = FxHashMap::default();
        level.reserve(stats.adjusted[k - 1].len());
        for (key, &a) in &stats.adjusted[k - 1] {
            let gram = key.ids(k);
            let cs = &stats.contexts[k - 1][&Key::new(&gram[..k - 1])];
            let lower_p = lower
                .get(&Key::new(&gram[1..]))
                .expect("suffix of a stored ngram is stored")
                .log10_prob;
            let p = (a as f64 - d.for_count(a)) / cs.total as f64 + gamma(d, cs) * lower_p;
            level.insert(
                *key,
                Entry {
                    log10_prob: p,
                    log10_backoff: None,
                },
            );
        }
        entries.push(level);
    }

    for level in &mut entries {
        for e in level.values_mut() {
            e.log10_prob = e.log10_prob.log10();
        }
    }

    entries[0].insert(
        Key::new(&[bos]),
        Entry {
            log10_prob: NEVER_PREDICTED,
            log10_backoff: None,
        },
    );

    // Backoff weights of contexts h (length k) used at order k + 1.
    for k in 1..n {
        let d = discounts.order(k + 1);
        for (ctx, cs) in &stats.contexts[k] {
            let bo = gamma(d, cs).log10();
            entries[k - 1]
                .entry(*ctx)
                .and_modify(|e| e.log10_backoff = Some(bo))
                .or_insert_with(|| {
                    debug_assert!(ctx.ids(k).iter().all(|&t| t == bos));
                    Entry {
                        log10_prob: NEVER_PREDICTED,
                        log10_backoff: Some(bo),
                    }
                });
        }
    }

    Ok(BackoffModel {
        order,
        vocab: vocab.clone(),
        entries,
    })
}

impl BackoffModel {
    /// Assembles a model from per-order entry tables (index 0 = unigrams).
    pub(crate) fn from_parts(order: NgramOrder, vocab: Vocabulary, entries: Vec<FxHashMap<Key, Entry>>) -> Self {
        debug_assert_eq!(entries.len(), order.get());
        BackoffModel { order, vocab, entries }
    }

    pub fn order(&self) -> NgramOrder {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Number of stored ngrams of length `len`.
    pub fn ngram_count(&self, len: usize) -> usize {
        self.entries.get(len.wrapping_sub(1)).map_or(0, |m| m.len())
    }

    pub fn entry(&self, gram: &[TokenId]) -> Option<Entry> {
        self.entries
            .get(gram.len().wrapping_sub(1))?
            .get(&Key::new(gram))
            .copied()
    }

    /// Stored ngrams of length `len`, sorted by id sequence.
    pub fn sorted_entries(&self, len: usize) -> Vec<(&[TokenId], Entry)> {
        let mut v: Vec<_> = self.entries[len - 1].iter().map(|(k, e)| (k.ids(len), *e)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Every context of length 1..N−1 that has a stored backoff weight.
    pub fn stored_contexts(&self) -> Vec<Vec<TokenId>> {
        let mut out = Vec::new();
        for len in 1..self.order.get() {
            for (ids, e) in self.sorted_entries(len) {
                if e.log10_backoff.is_some() {
                    out.push(ids.to_vec());
                }
            }
        }
        out
    }

    fn check(&self, word: TokenId, context: &[TokenId]) -> Result<()> {
        for &id in context.iter().chain(std::iter::once(&word)) {
            if !self.vocab.contains_id(id) {
                return Err(LmError::UnknownId(id));
            }
        }
        if word == self.vocab.bos() {
            return Err(LmError::StartSymbolTarget);
        }
        Ok(())
    }

    /// log10 P(word | context). Only the last N−1 context ids are used.
    pub fn log10_prob(&self, word: TokenId, context: &[TokenId]) -> Result<f64> {
        self.check(word, context)?;
        Ok(self.log10_prob_unchecked(word, context))
    }

    pub fn prob(&self, word: TokenId, context: &[TokenId]) -> Result<f64> {
        self.log10_prob(word, context).map(|lp| 10f64.powf(lp))
    }

    fn log10_prob_unchecked(&self, word: TokenId, context: &[TokenId]) -> f64 {
        let max_ctx = self.order.get() - 1;
        let ctx = &context[context.len().saturating_sub(max_ctx)..];
        let mut buf = [0 as TokenId; super::MAX_ORDER];
        let mut backoff = 0.0;
        for start in 0..=ctx.len() {
            let h = &ctx[start..];
            let len = h.len() + 1;
            buf[..h.len()].copy_from_slice(h);
            buf[h.len()] = word;
            if let Some(e) = self.entries[len - 1].get(&Key::new(&buf[..len])) {
                return backoff + e.log10_prob;
            }
            if !h.is_empty() {
                if let Some(bo) = self.entries[h.len() - 1]
                    .get(&Key::new(h))
                    .and_then(|e| e.log10_backoff)
                {
                    backoff += bo;
                }
            }
        }
        unreachable!("every vocabulary word except <s> has a unigram entry")
    }

    /// Scores one sentence of already-mapped ids: pads with N−1 `<s>` and a
    /// final `</s>`, and sums log10 probabilities of every real position.
    pub fn sentence_logprob_ids(&self, ids: &[TokenId]) -> Result<SentenceScore> {
        let n = self.order.get();
        let mut padded = Vec::with_capacity(ids.len() + n);
        padded.resize(n - 1, self.vocab.bos());
        padded.extend_from_slice(ids);
        padded.push(self.vocab.eos());
        let mut total = 0.0;
        for i in (n - 1)..padded.len() {
            total += self.log10_prob(padded[i], &padded[i + 1 - n..i])?;
        }
        Ok(SentenceScore {
            log10_prob: total,
            token_count: ids.len() + 1,
        })
    }

    /// Scores a tokenized sentence; out-of-vocabulary tokens read as `<unk>`.
    /// An empty sentence scores `P(</s> | <s> …)` with one position.
    pub fn sentence_logprob<S: AsRef<str>>(&self, tokens: &[S]) -> SentenceScore {
        let ids = self.vocab.encode(tokens);
        self.sentence_logprob_ids(&ids)
            .expect("encoded ids are in the vocabulary and never <s>")
    }
}

/// `10^(−Σ log10 P / positions)` over all sentences.
pub fn perplexity<S: AsRef<str>>(model: &BackoffModel, sentences: &[Vec<S>]) -> Result<f64> {
    let mut total = 0.0;
    let mut positions = 0usize;
    for s in sentences {
        let score = model.sentence_logprob(s);
        total += score.log10_prob;
        positions += score.token_count;
    }
    if positions == 0 {
        return Err(LmError::EmptyInput);
    }
    Ok(10f64.powf(-total / positions as f64))
}
