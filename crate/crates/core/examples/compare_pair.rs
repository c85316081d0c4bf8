//! Decides which of two tweets is funnier under both polarities.
//!
//!     cargo run --example compare_pair -- "my cat ate the homework" "the cat sat on the mat"

use humorlm::cli::train_from_files;
use humorlm::corpus::TweetRecord;
use humorlm::ngram::NgramOrder;
use humorlm::rank::{compare_pair, score_tweet, Polarity, Scoring};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let a = args
        .next()
        .unwrap_or_else(|| "i only ate half the pizza so my diet is going great".into());
    let b = args
        .next()
        .unwrap_or_else(|| "the restaurant opened a new location downtown".into());
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let models = [
        ("tweets", Polarity::HigherIsFunnier, format!("{data}/tweets.txt")),
        ("news", Polarity::LowerIsFunnier, format!("{data}/news.txt")),
    ];
    let (ta, tb) = (
        TweetRecord::new("a", a.as_str(), None),
        TweetRecord::new("b", b.as_str(), None),
    );
    println!("a: {a}\nb: {b}");
    for (name, polarity, corpus) in models {
        let model = train_from_files(&[corpus.into()], NgramOrder::new(2)?, 1, 1)?;
        let scoring = Scoring {
            polarity,
            per_token: true,
        };
        let (sa, sb) = (score_tweet(&model, scoring, &ta), score_tweet(&model, scoring, &tb));
        println!(
            "{name} model ({polarity}): a={:.3} b={:.3} -> {} is funnier",
            sa.score,
            sb.score,
            compare_pair(&sa, &sb)?
        );
    }
    Ok(())
}
