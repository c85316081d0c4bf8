//! Tokenizes each argument (or each stdin line) and prints one token per
//! column.
//!
//!     cargo run --example tokenize -- "Monday called: it's running LATE!! #MondayFeelings @boss"

use std::io::BufRead;

use humorlm::corpus::tokenize;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let lines: Vec<String> = if args.is_empty() {
        std::io::stdin().lock().lines().map_while(Result::ok).collect()
    } else {
        args
    };
    for line in lines {
        println!("{}", tokenize(&line).join("\t"));
    }
}
