//! Buckets one hashtag's tweets into top1 / next9 / rest and reports the
//! distance to the gold labels.
//!
//!     cargo run --example semi_rank -- data/hashtags/bad_food.tsv

use humorlm::cli::train_from_files;
use humorlm::corpus::read_hashtag_file;
use humorlm::ngram::NgramOrder;
use humorlm::rank::{eval_subtask_b, score_tweet, semi_rank, Polarity, Scoring};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let file = std::env::args()
        .nth(1)
        .unwrap_or_else(|| format!("{dir}/data/hashtags/cat_facts.tsv"));
    let model = train_from_files(&[format!("{dir}/data/news.txt").into()], NgramOrder::new(3)?, 1, 1)?;
    let set = read_hashtag_file(file.as_ref())?;
    let scoring = Scoring {
        polarity: Polarity::LowerIsFunnier,
        per_token: true,
    };
    let scored: Vec<_> = set.tweets.iter().map(|t| score_tweet(&model, scoring, t)).collect();
    let ranking = semi_rank(&scored)?;

    println!("#{}", set.hashtag);
    for t in &set.tweets {
        let predicted = ranking.label_of(&t.tweet_id).expect("every tweet is ranked");
        let gold = t.gold.map_or("-".to_string(), |g| g.to_string());
        println!("{}\tpredicted {predicted}\tgold {gold}\t{}", t.tweet_id, t.text);
    }
    if set.tweets.iter().all(|t| t.gold.is_some()) {
        println!("distance {:.4}", eval_subtask_b(&set, &ranking)?);
    }
    Ok(())
}
