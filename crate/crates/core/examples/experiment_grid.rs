//! Runs the {tweets, news} x {bigram, trigram} grid over the bundled
//! hashtag files and prints one row per configuration.
//!
//!     cargo run --example experiment_grid -- [hashtag_dir]

use std::path::PathBuf;

use humorlm::cli::train_from_files;
use humorlm::ngram::NgramOrder;
use humorlm::rank::{run_experiment, Polarity, Scoring};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let hashtags: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| format!("{dir}/data/hashtags").into(), PathBuf::from);
    println!("data\tngram\taccuracy_a\tdistance_b\tpairs");
    for (data, polarity) in [
        ("tweets", Polarity::HigherIsFunnier),
        ("news", Polarity::LowerIsFunnier),
    ] {
        for (order, label) in [(3, "trigram"), (2, "bigram")] {
            let corpus = PathBuf::from(format!("{dir}/data/{data}.txt"));
            let model = train_from_files(&[corpus], NgramOrder::new(order)?, 1, 1)?;
            let scoring = Scoring {
                polarity,
                per_token: false,
            };
            let report = run_experiment(&model, &format!("{data}-{label}"), scoring, &hashtags)?;
            for s in &report.skipped {
                eprintln!("skipped {}: {}", s.path, s.error);
            }
            println!(
                "{data}\t{label}\t{:.3}\t{:.3}\t{}",
                report.accuracy_a, report.distance_b, report.pair_count
            );
        }
    }
    Ok(())
}
