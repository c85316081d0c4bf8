//! Trains a trigram model on the bundled news sample and queries it.
//!
//!     cargo run --example train_and_query

use humorlm::corpus::{build_vocabulary, read_plaintext_file};
use humorlm::ngram::{count_ngrams, estimate_discounts, perplexity, train, NgramOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/news.txt");
    let sentences = read_plaintext_file(path.as_ref())?;
    let vocab = build_vocabulary(&sentences, 1);
    let encoded: Vec<_> = sentences.iter().map(|s| vocab.encode(s)).collect();
    let order = NgramOrder::new(3)?;

    let counts = count_ngrams(&encoded, &vocab, order);
    let discounts = estimate_discounts(counts.smoothing_stats().counts_of_counts());
    for (k, d) in discounts.0.iter().enumerate() {
        println!("order {}: D1={:.3} D2={:.3} D3+={:.3}", k + 1, d.d1, d.d2, d.d3plus);
    }
    let model = train(&counts, &discounts, &vocab, order)?;

    let v = model.vocab();
    let ctx = [v.id_or_unk("the"), v.id_or_unk("city")];
    for w in ["council", "mayor", "giraffe", "qwerty"] {
        println!("P({w} | the city) = {:.6}", model.prob(v.id_or_unk(w), &ctx)?);
    }
    for s in [
        "the city council approved the budget",
        "budget the approved council city the",
    ] {
        let tokens: Vec<&str> = s.split(' ').collect();
        let score = model.sentence_logprob(&tokens);
        println!(
            "log10 P({s:?}) = {:.3} over {} positions",
            score.log10_prob, score.token_count
        );
    }
    println!("training perplexity {:.2}", perplexity(&model, &sentences)?);
    Ok(())
}
