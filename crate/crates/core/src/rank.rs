//! Turning model scores into funniness judgments: pairwise comparison,
//! three-bucket semi-ranking, and their evaluation against gold labels.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{read_hashtag_file, tokenize, CorpusError, GoldLabel, HashtagSet, TweetRecord};
use crate::ngram::BackoffModel;

#[derive(Debug, Error)]
pub enum RankError {
    #[error("both sides of the pair are tweet {0:?}")]
    SamePair(String),
    #[error("cannot rank an empty set of tweets")]
    EmptySet,
    #[error("no hashtag yields a pair of tweets with distinct gold labels")]
    NoPairs,
    #[error("predicted bucketing does not partition the gold tweet ids: {0}")]
    PartitionMismatch(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = RankError> = std::result::Result<T, E>;

/// How model probability maps to funniness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Model trained on funny tweets: more probable is funnier.
    HigherIsFunnier,
    /// Model trained on news: less probable is funnier.
    LowerIsFunnier,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::HigherIsFunnier => Polarity::LowerIsFunnier,
            Polarity::LowerIsFunnier => Polarity::HigherIsFunnier,
        }
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "funny" => Ok(Polarity::HigherIsFunnier),
            "news" => Ok(Polarity::LowerIsFunnier),
            other => Err(format!("unknown polarity {other:?} (expected funny or news)")),
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::HigherIsFunnier => "funny",
            Polarity::LowerIsFunnier => "news",
        })
    }
}

/// Scoring settings shared by every tweet in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scoring {
    pub polarity: Polarity,
    /// Divide the log probability by the number of scored positions.
    pub per_token: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTweet {
    pub tweet: TweetRecord,
    pub log10_prob: f64,
    pub token_count: usize,
    /// Greater is funnier, whatever the polarity.
    pub score: f64,
}

impl ScoredTweet {
    pub fn id(&self) -> &str {
        &self.tweet.tweet_id
    }
}

/// Orients a raw log probability into a funniness score.
pub fn orient(log10_prob: f64, token_count: usize, scoring: Scoring) -> f64 {
    let base = if scoring.per_token {
        log10_prob / token_count.max(1) as f64
    } else {
        log10_prob
    };
    match scoring.polarity {
        Polarity::HigherIsFunnier => base,
        Polarity::LowerIsFunnier => -base,
    }
}

pub fn score_tweet(model: &BackoffModel, scoring: Scoring, tweet: &TweetRecord) -> ScoredTweet {
    let s = model.sentence_logprob(&tokenize(&tweet.text));
    ScoredTweet {
        tweet: tweet.clone(),
        log10_prob: s.log10_prob,
        token_count: s.token_count,
        score: orient(s.log10_prob, s.token_count, scoring),
    }
}

/// Funnier first; exact score ties go to the smaller tweet id.
fn funnier_first(a: &ScoredTweet, b: &ScoredTweet) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.id().cmp(b.id()))
}

/// Returns the id of the funnier tweet.
pub fn compare_pair<'a>(a: &'a ScoredTweet, b: &'a ScoredTweet) -> Result<&'a str> {
    if a.id() == b.id() {
        return Err(RankError::SamePair(a.id().to_string()));
    }
    Ok(match funnier_first(a, b) {
        Ordering::Greater => b.id(),
        _ => a.id(),
    })
}

/// Top-1 / next-9 / rest partition of a hashtag's tweets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiRanking {
    pub top1: String,
    pub next9: Vec<String>,
    pub rest: Vec<String>,
}

impl SemiRanking {
    pub fn label_of(&self, id: &str) -> Option<GoldLabel> {
        if self.top1 == id {
            Some(GoldLabel::Top1)
        } else if self.next9.iter().any(|t| t == id) {
            Some(GoldLabel::Next9)
        } else if self.rest.iter().any(|t| t == id) {
            Some(GoldLabel::Rest)
        } else {
            None
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.top1.as_str())
            .chain(self.next9.iter().map(String::as_str))
            .chain(self.rest.iter().map(String::as_str))
    }

    fn labels(&self) -> HashMap<&str, GoldLabel> {
        let mut m = HashMap::new();
        m.insert(self.top1.as_str(), GoldLabel::Top1);
        m.extend(self.next9.iter().map(|t| (t.as_str(), GoldLabel::Next9)));
        m.extend(self.rest.iter().map(|t| (t.as_str(), GoldLabel::Rest)));
        m
    }
}

pub fn semi_rank(scored: &[ScoredTweet]) -> Result<SemiRanking> {
    if scored.is_empty() {
        return Err(RankError::EmptySet);
    }
    let mut order: Vec<&ScoredTweet> = scored.iter().collect();
    order.sort_by(|a, b| funnier_first(a, b));
    let next = 9.min(order.len() - 1);
    Ok(SemiRanking {
        top1: order[0].id().to_string(),
        next9: order[1..=next].iter().map(|t| t.id().to_string()).collect(),
        rest: order[next + 1..].iter().map(|t| t.id().to_string()).collect(),
    })
}

/// Pairwise accuracy tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PairTally {
    pub correct: usize,
    pub total: usize,
}

impl PairTally {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

/// Every unordered pair of tweets with distinct gold labels; a pair is
/// correct when `winner` picks the tweet with the higher label. Unlabeled
/// tweets are ignored.
pub fn tally_pairs<F>(set: &HashtagSet, mut winner: F) -> Result<PairTally>
where
    F: FnMut(&TweetRecord, &TweetRecord) -> Result<String>,
{
    let mut tally = PairTally::default();
    let labeled: Vec<(&TweetRecord, GoldLabel)> = set.tweets.iter().filter_map(|t| t.gold.map(|g| (t, g))).collect();
    for (i, &(a, ga)) in labeled.iter().enumerate() {
        for &(b, gb) in &labeled[i + 1..] {
            if ga == gb {
                continue;
            }
            let better = if ga > gb { a } else { b };
            tally.total += 1;
            if winner(a, b)? == better.tweet_id {
                tally.correct += 1;
            }
        }
    }
    Ok(tally)
}

/// Subtask A accuracy pooled over the pairs of every hashtag.
pub fn eval_subtask_a<F>(gold: &[HashtagSet], mut winner: F) -> Result<f64>
where
    F: FnMut(&TweetRecord, &TweetRecord) -> Result<String>,
{
    let mut pooled = PairTally::default();
    for set in gold {
        let t = tally_pairs(set, &mut winner)?;
        pooled.correct += t.correct;
        pooled.total += t.total;
    }
    pooled.accuracy().ok_or(RankError::NoPairs)
}

/// Subtask B distance: `Σ |gold − predicted| / (2n)` over bucket labels
/// (Top1 = 2, Next9 = 1, Rest = 0). Unlabeled gold tweets count as Rest.
pub fn eval_subtask_b(gold: &HashtagSet, predicted: &SemiRanking) -> Result<f64> {
    let pred = predicted.labels();
    let gold_ids: BTreeSet<&str> = gold.tweets.iter().map(|t| t.tweet_id.as_str()).collect();
    let pred_ids: BTreeSet<&str> = predicted.ids().collect();
    if gold_ids != pred_ids || pred.len() != predicted.ids().count() {
        let missing: Vec<_> = gold_ids.symmetric_difference(&pred_ids).take(5).collect();
        return Err(RankError::PartitionMismatch(format!("ids differ: {missing:?}")));
    }
    let n = gold.tweets.len();
    let total: u32 = gold
        .tweets
        .iter()
        .map(|t| {
            let g = t.gold.unwrap_or(GoldLabel::Rest).value() as i32;
            let p = pred[t.tweet_id.as_str()].value() as i32;
            (g - p).unsigned_abs()
        })
        .sum();
    Ok(total as f64 / (2 * n) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HashtagReport {
    pub hashtag: String,
    pub tweet_count: usize,
    pub pair_count: usize,
    pub correct_pairs: usize,
    /// `None` when the hashtag yields no labeled pairs.
    pub accuracy_a: Option<f64>,
    pub distance_b: f64,
}

/// A file that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub path: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub model: String,
    pub polarity: Polarity,
    pub per_token: bool,
    pub accuracy_a: f64,
    pub distance_b: f64,
    pub pair_count: usize,
    pub hashtag_count: usize,
    pub per_hashtag: Vec<HashtagReport>,
    pub skipped: Vec<Skipped>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scores every tweet of one hashtag once, then evaluates both subtasks.
pub fn evaluate_hashtag(model: &BackoffModel, scoring: Scoring, set: &HashtagSet) -> Result<HashtagReport> {
    set.validate_gold()?;
    let scored: Vec<ScoredTweet> = set.tweets.iter().map(|t| score_tweet(model, scoring, t)).collect();
    let by_id: HashMap<&str, &ScoredTweet> = scored.iter().map(|s| (s.id(), s)).collect();
    let tally = tally_pairs(set, |a, b| {
        compare_pair(by_id[a.tweet_id.as_str()], by_id[b.tweet_id.as_str()]).map(str::to_string)
    })?;
    let ranking = semi_rank(&scored)?;
    Ok(HashtagReport {
        hashtag: set.hashtag.clone(),
        tweet_count: set.len(),
        pair_count: tally.total,
        correct_pairs: tally.correct,
        accuracy_a: tally.accuracy(),
        distance_b: eval_subtask_b(set, &ranking)?,
    })
}

/// Folds per-hashtag results (sorted by hashtag name) into a report.
/// Accuracy is pooled over pairs; distance is the mean over hashtags.
pub fn aggregate(
    model: &str,
    scoring: Scoring,
    mut per_hashtag: Vec<HashtagReport>,
    skipped: Vec<Skipped>,
) -> Result<EvalReport> {
    per_hashtag.sort_by(|a, b| a.hashtag.cmp(&b.hashtag));
    let pairs: usize = per_hashtag.iter().map(|h| h.pair_count).sum();
    let correct: usize = per_hashtag.iter().map(|h| h.correct_pairs).sum();
    if pairs == 0 {
        return Err(RankError::NoPairs);
    }
    let distance = per_hashtag.iter().map(|h| h.distance_b).sum::<f64>() / per_hashtag.len() as f64;
    Ok(EvalReport {
        model: model.to_string(),
        polarity: scoring.polarity,
        per_token: scoring.per_token,
        accuracy_a: correct as f64 / pairs as f64,
        distance_b: distance,
        pair_count: pairs,
        hashtag_count: per_hashtag.len(),
        per_hashtag,
        skipped,
    })
}

/// Lists `*.tsv` files in `dir`, sorted by name.
pub fn hashtag_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let io_err = |source| RankError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "tsv") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Evaluates `model` over every `<hashtag>.tsv` in `data_dir`.
///
/// Files that fail to load or validate are listed in
/// [`EvalReport::skipped`]; evaluation continues over the rest. Hashtags are
/// scored in parallel and folded in name order.
pub fn run_experiment(model: &BackoffModel, model_name: &str, scoring: Scoring, data_dir: &Path) -> Result<EvalReport> {
    let files = hashtag_files(data_dir)?;
    let results: Vec<(PathBuf, Result<HashtagReport>)> = files
        .into_par_iter()
        .map(|path| {
            let r = read_hashtag_file(&path)
                .map_err(RankError::from)
                .and_then(|set| evaluate_hashtag(model, scoring, &set));
            (path, r)
        })
        .collect();
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for (path, r) in results {
        match r {
            Ok(h) => ok.push(h),
            Err(e) => skipped.push(Skipped {
                path: path.display().to_string(),
                error: e.to_string(),
            }),
        }
    }
    aggregate(model_name, scoring, ok, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FUNNY: Scoring = Scoring {
        polarity: Polarity::HigherIsFunnier,
        per_token: false,
    };

    fn st(id: &str, score: f64) -> ScoredTweet {
        ScoredTweet {
            tweet: TweetRecord::new(id, "", None),
            log10_prob: score,
            token_count: 1,
            score,
        }
    }

    fn labeled(labels: &[(&str, u8)]) -> HashtagSet {
        HashtagSet {
            hashtag: "h".into(),
            tweets: labels
                .iter()
                .map(|(id, l)| TweetRecord::new(*id, "", Some(l.to_string().parse().unwrap())))
                .collect(),
        }
    }

    #[test]
    fn orientation() {
        let news = Scoring {
            polarity: Polarity::LowerIsFunnier,
            per_token: false,
        };
        assert_eq!(orient(-12.0, 6, FUNNY), -12.0);
        assert_eq!(orient(-12.0, 6, news), 12.0);
        let per_token = Scoring {
            per_token: true,
            ..FUNNY
        };
        assert_eq!(orient(-12.0, 6, per_token), -2.0);
    }

    #[test]
    fn compare_rules() {
        assert_eq!(compare_pair(&st("a", -3.0), &st("b", -5.0)).unwrap(), "a");
        assert_eq!(compare_pair(&st("a", -5.0), &st("b", -3.0)).unwrap(), "b");
        assert_eq!(compare_pair(&st("b", -4.0), &st("a", -4.0)).unwrap(), "a");
        assert!(matches!(
            compare_pair(&st("a", 1.0), &st("a", 2.0)),
            Err(RankError::SamePair(_))
        ));
    }

    #[test]
    fn semi_rank_buckets() {
        let twelve: Vec<_> = (0..12).map(|i| st(&format!("t{i:02}"), -(i as f64))).collect();
        let r = semi_rank(&twelve).unwrap();
        assert_eq!(r.top1, "t00");
        assert_eq!(r.next9, (1..10).map(|i| format!("t{i:02}")).collect::<Vec<_>>());
        assert_eq!(r.rest, vec!["t10", "t11"]);

        let five: Vec<_> = (0..5).map(|i| st(&i.to_string(), i as f64)).collect();
        let r = semi_rank(&five).unwrap();
        assert_eq!((r.top1.as_str(), r.next9.len(), r.rest.len()), ("4", 4, 0));

        let r = semi_rank(&[st("y", 1.0), st("x", 1.0), st("z", 0.0)]).unwrap();
        assert_eq!(r.top1, "x");
        assert!(matches!(semi_rank(&[]), Err(RankError::EmptySet)));
    }

    #[test]
    fn subtask_a_arithmetic() {
        let set = labeled(&[("a", 2), ("b", 1), ("c", 0)]);
        // Always picks the lexicographically larger id: wrong on every pair.
        let acc = eval_subtask_a(std::slice::from_ref(&set), |a, b| {
            Ok(a.tweet_id.clone().max(b.tweet_id.clone()))
        })
        .unwrap();
        assert_eq!(acc, 0.0);
        // Right except on (b, c).
        let acc = eval_subtask_a(std::slice::from_ref(&set), |a, b| {
            Ok(if a.tweet_id == "a" || b.tweet_id == "a" {
                "a".into()
            } else {
                "c".into()
            })
        })
        .unwrap();
        assert!((acc - 2.0 / 3.0).abs() < 1e-12);
        let perfect = eval_subtask_a(std::slice::from_ref(&set), |a, b| {
            Ok(if a.gold > b.gold {
                a.tweet_id.clone()
            } else {
                b.tweet_id.clone()
            })
        })
        .unwrap();
        assert_eq!(perfect, 1.0);
        let single = labeled(&[("a", 2)]);
        assert!(matches!(
            eval_subtask_a(&[single], |a, _| Ok(a.tweet_id.clone())),
            Err(RankError::NoPairs)
        ));
    }

    #[test]
    fn accuracy_is_pooled_not_averaged() {
        // h1: 3 pairs, all correct. h2: 1 pair, wrong. Pooled 3/4, mean 1/2.
        let h1 = labeled(&[("a", 2), ("b", 1), ("c", 0)]);
        let mut h2 = labeled(&[("x", 2), ("y", 1)]);
        h2.hashtag = "h2".into();
        let acc = eval_subtask_a(&[h1, h2], |a, b| {
            if a.tweet_id == "x" || b.tweet_id == "x" {
                return Ok("y".into());
            }
            Ok(if a.gold > b.gold {
                a.tweet_id.clone()
            } else {
                b.tweet_id.clone()
            })
        })
        .unwrap();
        assert_eq!(acc, 0.75);
    }

    #[test]
    fn subtask_b_distance() {
        let mut labels = vec![("t0".to_string(), 2u8)];
        labels.extend((1..10).map(|i| (format!("t{i}"), 1)));
        labels.push(("t10".into(), 0));
        let refs: Vec<(&str, u8)> = labels.iter().map(|(i, l)| (i.as_str(), *l)).collect();
        let gold = labeled(&refs);
        let ident = SemiRanking {
            top1: "t0".into(),
            next9: (1..10).map(|i| format!("t{i}")).collect(),
            rest: vec!["t10".into()],
        };
        assert_eq!(eval_subtask_b(&gold, &ident).unwrap(), 0.0);
        let swapped = SemiRanking {
            top1: "t10".into(),
            next9: ident.next9.clone(),
            rest: vec!["t0".into()],
        };
        assert!((eval_subtask_b(&gold, &swapped).unwrap() - 4.0 / 22.0).abs() < 1e-12);
        let wrong = SemiRanking {
            rest: vec!["zz".into()],
            ..ident
        };
        assert!(matches!(
            eval_subtask_b(&gold, &wrong),
            Err(RankError::PartitionMismatch(_))
        ));
    }

    #[test]
    fn polarity_parsing() {
        assert_eq!("funny".parse::<Polarity>().unwrap(), Polarity::HigherIsFunnier);
        assert_eq!("news".parse::<Polarity>().unwrap(), Polarity::LowerIsFunnier);
        assert!("sad".parse::<Polarity>().is_err());
        assert_eq!(Polarity::LowerIsFunnier.flipped().to_string(), "funny");
    }
}
