//! Writes a model as ARPA text, reads it back and checks that queries agree.
//!
//!     cargo run --example arpa_round_trip

use humorlm::cli::train_from_files;
use humorlm::ngram::{read_arpa_file, write_arpa_file, NgramOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = concat!(env!("CARGO_MANIFEST_DIR"), "/data/tweets.txt");
    let model = train_from_files(&[corpus.into()], NgramOrder::new(2)?, 1, 1)?;
    let path = std::env::temp_dir().join(format!("humorlm-example-{}.arpa", std::process::id()));
    write_arpa_file(&model, &path)?;
    let back = read_arpa_file(&path)?;
    let text = std::fs::read_to_string(&path)?;
    std::fs::remove_file(&path)?;

    for line in text.lines().take(12) {
        println!("{line}");
    }
    println!("...");

    let v = model.vocab();
    let mut worst = 0f64;
    for ctx in 0..v.len() as u32 {
        for w in (0..v.len() as u32).filter(|&w| w != v.bos()) {
            let a = model.log10_prob(w, &[ctx])?;
            let b = back.log10_prob(back.vocab().id(v.token(w).unwrap()).unwrap(), &[ctx])?;
            worst = worst.max((a - b).abs());
        }
    }
    println!(
        "{} vocabulary entries, max log10 difference after reload {worst:.2e}",
        v.len()
    );
    Ok(())
}
