//! The `humorlm` command line: `train`, `score`, `compare`, `rank`, `eval`.
//!
//! Everything here is reachable through [`run`], which takes explicit
//! standard streams so the commands can be driven from tests.

use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{self, build_vocabulary, read_hashtag_file, read_plaintext_file, tokenize, TweetRecord};
use crate::ngram::{
    self, count_ngrams_parallel, estimate_discounts, read_arpa_file, train, write_arpa, BackoffModel, NgramOrder,
};
use crate::rank::{self, compare_pair, eval_subtask_b, run_experiment, score_tweet, semi_rank, Polarity, Scoring};

#[derive(Debug, Parser)]
#[command(
    name = "humorlm",
    version,
    about = "Ngram language models for ranking humorous tweets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a modified Kneser-Ney backoff model and write it as ARPA.
    Train(TrainArgs),
    /// Score lines of text; prints `score<TAB>log10_prob<TAB>token_count`.
    Score(ScoreArgs),
    /// Pick the funnier tweet of each input pair.
    Compare(ScoreArgs),
    /// Semi-rank one hashtag file into top1 / next9 / rest.
    Rank(RankArgs),
    /// Evaluate models on a directory of labeled hashtag files.
    Eval(EvalArgs),
}

fn parse_order(s: &str) -> Result<NgramOrder, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not an integer"))?;
    NgramOrder::new(n).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Plaintext corpora (one sentence per line) or tweet `.tsv` files.
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, value_parser = parse_order)]
    pub order: NgramOrder,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    /// Output ARPA file.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: u16,
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    /// `funny`: higher probability is funnier. `news`: lower is funnier.
    #[arg(long)]
    pub polarity: Polarity,
    /// Normalize log probabilities by the number of scored positions.
    #[arg(long)]
    pub per_token: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// Input file; standard input when absent.
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: u16,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// `<hashtag>.tsv` file.
    pub tweets: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// One or more ARPA models.
    #[arg(long, required = true)]
    pub model: Vec<PathBuf>,
    /// One polarity for all models, or one per model in the same order.
    #[arg(long, required = true)]
    pub polarity: Vec<Polarity>,
    #[arg(long)]
    pub per_token: bool,
    /// Directory of `<hashtag>.tsv` files with gold labels.
    #[arg(long)]
    pub data: PathBuf,
    /// Report destination. With several models, the model's file stem is
    /// inserted before the extension.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: u16,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Lm(#[from] ngram::LmError),
    #[error(transparent)]
    Rank(#[from] rank::RankError),
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// An output file created before any work starts and removed again unless
/// the command finishes.
struct PendingOutput {
    path: PathBuf,
    file: Option<File>,
    done: bool,
}

impl PendingOutput {
    fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(io_err(path))?;
        Ok(PendingOutput {
            path: path.to_path_buf(),
            file: Some(file),
            done: false,
        })
    }

    fn write_with<F>(mut self, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let file = self.file.take().expect("written once");
        let mut w = BufWriter::new(file);
        f(&mut w).and_then(|_| w.flush()).map_err(io_err(&self.path))?;
        self.done = true;
        Ok(())
    }
}

impl Drop for PendingOutput {
    fn drop(&mut self) {
        if !self.done {
            let _ = std::fs::remove_file(&self.path);
        }
    }
}

fn pool(threads: u16) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads as usize)
        .build()
        .expect("failed to build thread pool")
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return e.exit_code();
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "humorlm: error: {e}");
            match e {
                CliError::Usage(_) => 2,
                _ => 1,
            }
        }
    }
}

pub fn execute(
    command: Command,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(&a, stdout, stderr),
        Command::Score(a) => cmd_score(&a, stdin, stdout),
        Command::Compare(a) => cmd_compare(&a, stdin, stdout),
        Command::Rank(a) => cmd_rank(&a, stdout),
        Command::Eval(a) => cmd_eval(&a, stdout, stderr),
    }
}

fn read_training_corpus(path: &Path) -> Result<Vec<Vec<String>>> {
    if path.extension().is_some_and(|e| e == "tsv") {
        let set = read_hashtag_file(path)?;
        Ok(set
            .tweets
            .par_iter()
            .map(|t| tokenize(&t.text))
            .filter(|s| !s.is_empty())
            .collect())
    } else {
        Ok(read_plaintext_file(path)?)
    }
}

/// Trains a model on the given files and returns it with a stdout summary.
pub fn train_from_files(paths: &[PathBuf], order: NgramOrder, min_count: u64, threads: u16) -> Result<BackoffModel> {
    pool(threads).install(|| {
        let mut sentences = Vec::new();
        for p in paths {
            sentences.extend(read_training_corpus(p)?);
        }
        let vocab = build_vocabulary(&sentences, min_count);
        let ids: Vec<_> = sentences.par_iter().map(|s| vocab.encode(s)).collect();
        let counts = count_ngrams_parallel(&ids, &vocab, order, threads as usize);
        let discounts = estimate_discounts(counts.smoothing_stats().counts_of_counts());
        Ok(train(&counts, &discounts, &vocab, order)?)
    })
}

pub fn cmd_train(a: &TrainArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    for p in &a.corpus {
        if !p.is_file() {
            return Err(CliError::Usage(format!("{}: corpus file not found", p.display())));
        }
    }
    let out = PendingOutput::create(&a.model)?;
    let _ = writeln!(stderr, "training order-{} model on {} file(s)", a.order, a.corpus.len());
    let model = train_from_files(&a.corpus, a.order, a.min_count, a.threads)?;
    out.write_with(|w| write_arpa(&model, w))?;

    let counts = (|| -> std::io::Result<()> {
        writeln!(stdout, "order\tngrams")?;
        for k in 1..=a.order.get() {
            writeln!(stdout, "{k}\t{}", model.ngram_count(k))?;
        }
        Ok(())
    })();
    counts.map_err(io_err(Path::new("<stdout>")))?;
    Ok(())
}

fn read_input_lines(input: Option<&Path>, stdin: &mut dyn BufRead) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let mut push_all = |r: &mut dyn BufRead, name: &Path| -> Result<()> {
        for line in r.split(b'\n') {
            let mut line = line.map_err(io_err(name))?;
            if line.last() == Some(&b'\r') {
                line.pop();
            }
            lines.push(String::from_utf8_lossy(&line).into_owned());
        }
        Ok(())
    };
    match input {
        Some(p) => {
            let f = File::open(p).map_err(io_err(p))?;
            push_all(&mut std::io::BufReader::new(f), p)?;
        }
        None => push_all(stdin, Path::new("<stdin>"))?,
    }
    Ok(lines)
}

fn scoring(a: &ScoringArgs) -> Scoring {
    Scoring {
        polarity: a.polarity,
        per_token: a.per_token,
    }
}

pub fn cmd_score(a: &ScoreArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<()> {
    let model = read_arpa_file(&a.model)?;
    let lines = read_input_lines(a.input.as_deref(), stdin)?;
    let scoring = scoring(&a.scoring);
    let scored: Vec<_> = pool(a.threads).install(|| {
        lines
            .par_iter()
            .map(|l| score_tweet(&model, scoring, &TweetRecord::new("-", l.as_str(), None)))
            .collect()
    });
    let mut write = || -> std::io::Result<()> {
        for s in &scored {
            writeln!(stdout, "{:.6}\t{:.6}\t{}", s.score, s.log10_prob, s.token_count)?;
        }
        Ok(())
    };
    write().map_err(io_err(Path::new("<stdout>")))
}

/// Input lines are `id_a<TAB>text_a<TAB>id_b<TAB>text_b`, or
/// `text_a<TAB>text_b` with ids `a` and `b`. Output lines are
/// `winner<TAB>score_a<TAB>score_b`.
pub fn cmd_compare(a: &ScoreArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<()> {
    let model = read_arpa_file(&a.model)?;
    let lines = read_input_lines(a.input.as_deref(), stdin)?;
    let scoring = scoring(&a.scoring);
    let mut pairs = Vec::with_capacity(lines.len());
    for (n, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let pair = match f.as_slice() {
            [ta, tb] => (TweetRecord::new("a", *ta, None), TweetRecord::new("b", *tb, None)),
            [ia, ta, ib, tb] => (TweetRecord::new(*ia, *ta, None), TweetRecord::new(*ib, *tb, None)),
            _ => {
                return Err(CliError::Usage(format!(
                    "input line {}: expected 2 or 4 tab-separated fields, found {}",
                    n + 1,
                    f.len()
                )))
            }
        };
        pairs.push(pair);
    }
    let results: Vec<Result<(String, f64, f64)>> = pool(a.threads).install(|| {
        pairs
            .par_iter()
            .map(|(ta, tb)| {
                let sa = score_tweet(&model, scoring, ta);
                let sb = score_tweet(&model, scoring, tb);
                let w = compare_pair(&sa, &sb)?.to_string();
                Ok((w, sa.score, sb.score))
            })
            .collect()
    });
    for r in results {
        let (w, sa, sb) = r?;
        writeln!(stdout, "{w}\t{sa:.6}\t{sb:.6}").map_err(io_err(Path::new("<stdout>")))?;
    }
    Ok(())
}

pub fn cmd_rank(a: &RankArgs, stdout: &mut dyn Write) -> Result<()> {
    let model = read_arpa_file(&a.model)?;
    let set = read_hashtag_file(&a.tweets)?;
    let scoring = scoring(&a.scoring);
    let scored: Vec<_> = set.tweets.iter().map(|t| score_tweet(&model, scoring, t)).collect();
    let ranking = semi_rank(&scored)?;
    let distance = if set.tweets.iter().all(|t| t.gold.is_some()) {
        Some(eval_subtask_b(&set, &ranking)?)
    } else {
        None
    };
    let mut write = || -> std::io::Result<()> {
        writeln!(stdout, "top1\t{}", ranking.top1)?;
        for id in &ranking.next9 {
            writeln!(stdout, "next9\t{id}")?;
        }
        for id in &ranking.rest {
            writeln!(stdout, "rest\t{id}")?;
        }
        if let Some(d) = distance {
            writeln!(stdout, "distance\t{d:.6}")?;
        }
        Ok(())
    };
    write().map_err(io_err(Path::new("<stdout>")))
}

fn report_path(base: &Path, model: &Path, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let model_stem = model
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{model_stem}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{model_stem}"),
    };
    base.with_file_name(name)
}

/// Prints one `model<TAB>polarity<TAB>accuracy_a<TAB>distance_b` row per model.
pub fn cmd_eval(a: &EvalArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let polarities: Vec<Polarity> = match (a.polarity.len(), a.model.len()) {
        (1, m) => vec![a.polarity[0]; m],
        (p, m) if p == m => a.polarity.clone(),
        (p, m) => {
            return Err(CliError::Usage(format!(
                "{p} polarities given for {m} models; pass one, or one per model"
            )))
        }
    };
    if !a.data.is_dir() {
        return Err(CliError::Usage(format!("{}: not a directory", a.data.display())));
    }
    for m in &a.model {
        if !m.is_file() {
            return Err(CliError::Usage(format!("{}: model file not found", m.display())));
        }
    }
    let several = a.model.len() > 1;
    let outputs = a
        .model
        .iter()
        .map(|m| PendingOutput::create(&report_path(&a.report, m, several)))
        .collect::<Result<Vec<_>>>()?;

    let pool = pool(a.threads);
    for ((model_path, polarity), out) in a.model.iter().zip(polarities).zip(outputs) {
        let model = read_arpa_file(model_path)?;
        let scoring = Scoring {
            polarity,
            per_token: a.per_token,
        };
        let name = model_path.display().to_string();
        let report = pool.install(|| run_experiment(&model, &name, scoring, &a.data))?;
        for s in &report.skipped {
            let _ = writeln!(stderr, "humorlm: warning: skipped {}: {}", s.path, s.error);
        }
        out.write_with(|w| {
            w.write_all(report.to_json().as_bytes())?;
            writeln!(w)
        })?;
        writeln!(
            stdout,
            "{}\t{}\t{:.6}\t{:.6}",
            name, polarity, report.accuracy_a, report.distance_b
        )
        .map_err(io_err(Path::new("<stdout>")))?;
    }
    Ok(())
}
