//! Test helpers shared by the integration suites.
#![allow(dead_code)]

pub mod kn_oracle;

use humorlm::corpus::{build_vocabulary, tokenize};
use humorlm::ngram::{count_ngrams_parallel, estimate_discounts, train, BackoffModel, NgramOrder};
use rand::Rng;

pub fn tokenize_all(lines: &[&str]) -> Vec<Vec<String>> {
    lines.iter().map(|l| tokenize(l)).collect()
}

pub fn train_model(sentences: &[Vec<String>], order: usize) -> BackoffModel {
    train_model_threads(sentences, order, 1)
}

pub fn train_model_threads(sentences: &[Vec<String>], order: usize, threads: usize) -> BackoffModel {
    let vocab = build_vocabulary(sentences, 1);
    let ids: Vec<_> = sentences.iter().map(|s| vocab.encode(s)).collect();
    let order = NgramOrder::new(order).unwrap();
    let counts = count_ngrams_parallel(&ids, &vocab, order, threads);
    let discounts = estimate_discounts(counts.smoothing_stats().counts_of_counts());
    train(&counts, &discounts, &vocab, order).unwrap()
}

/// Random corpus over at most `max_vocab` words `w0..`, with up to
/// `max_sentences` sentences of length 0..=6.
pub fn random_corpus<R: Rng>(rng: &mut R, max_vocab: usize, max_sentences: usize) -> Vec<Vec<String>> {
    let vocab = rng.gen_range(1..=max_vocab);
    let n = rng.gen_range(1..=max_sentences);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=6);
            (0..len).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect()
        })
        .collect()
}

/// All sequences of `len` symbols drawn from `alphabet`.
pub fn all_sequences(alphabet: &[String], len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s.clone());
                    p
                })
            })
            .collect();
    }
    out
}

pub const TOY_TRAINING: &[&str] = &[
    "the cat sat on the mat",
    "the dog sat on the log",
    "a cat ran after the dog",
    "the dog ran home",
    "a bird sat on the cat",
];

pub const TOY_HASHTAGS: &[(&str, &[&str])] = &[
    (
        "cat_jokes",
        &[
            "the cat sat",
            "the cat sat on the mat",
            "zebra quantum",
            "a dog",
            "mat mat mat mat",
        ],
    ),
    (
        "dog_days",
        &["the dog ran home", "dog the", "a bird sat on the log", "log log"],
    ),
    (
        "mixed_bag",
        &[
            "the cat",
            "the dog",
            "a bird",
            "cat dog bird",
            "on the mat",
            "ran after",
            "sat sat",
            "home home",
            "the log",
            "zebra",
            "a cat ran",
            "the bird sat on the dog",
        ],
    ),
];

/// Writes one `<hashtag>.tsv` per entry of `hashtags`, with gold labels that
/// follow the model's score order exactly. Texts within a hashtag must score
/// differently.
pub fn write_toy_dataset(
    dir: &std::path::Path,
    model: &BackoffModel,
    scoring: humorlm::rank::Scoring,
    hashtags: &[(&str, &[&str])],
) {
    use humorlm::corpus::{GoldLabel, HashtagSet, TweetRecord};
    for (tag, texts) in hashtags {
        let mut scored: Vec<(f64, usize)> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let s = humorlm::rank::score_tweet(model, scoring, &TweetRecord::new("x", *t, None)).score;
                (s, i)
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0));
        for w in scored.windows(2) {
            assert!(w[0].0 > w[1].0, "{tag}: tied scores in toy dataset");
        }
        let tweets = scored
            .iter()
            .enumerate()
            .map(|(rank, &(_, i))| {
                let gold = match rank {
                    0 => GoldLabel::Top1,
                    r if r <= 9 => GoldLabel::Next9,
                    _ => GoldLabel::Rest,
                };
                TweetRecord::new(format!("{tag}_{i:02}"), texts[i], Some(gold))
            })
            .collect();
        let set = HashtagSet {
            hashtag: tag.to_string(),
            tweets,
        };
        let file = std::fs::File::create(dir.join(format!("{tag}.tsv"))).unwrap();
        set.write_tsv(std::io::BufWriter::new(file)).unwrap();
    }
}
