//! Text ingestion: tokenization, the interned vocabulary, and the two on-disk
//! corpus formats (plaintext news, one sentence per line; tweet TSV files, one
//! file per hashtag prompt).

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

/// Sentence-start padding symbol. Never a prediction target.
pub const BOS: &str = "<s>";
/// Sentence-end symbol. Always a prediction target.
pub const EOS: &str = "</s>";
/// Stand-in for every out-of-vocabulary token.
pub const UNK: &str = "<unk>";

/// Dense integer id of a vocabulary entry.
pub type TokenId = u32;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: i/o error after line {line}: {source}")]
    Ingest {
        path: String,
        line: usize,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {reason}")]
    MalformedRecord { path: String, line: usize, reason: String },
    #[error("{path}:{line}: duplicate tweet id {id:?}")]
    DuplicateId { path: String, line: usize, id: String },
    #[error("hashtag {hashtag}: invalid gold labels: {reason}")]
    InvalidGold { hashtag: String, reason: String },
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

fn is_split_punct(c: char) -> bool {
    c.is_ascii_punctuation()
}

/// Starts a mention or hashtag: `@` or `#` followed by a word character.
fn starts_tag(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('@' | '#')) && chars.next().is_some_and(|c| c.is_alphanumeric() || c == '_')
}

fn push_chunk(chunk: &str, out: &mut Vec<String>) {
    let mut rest = chunk;
    // Leading punctuation, stopping at a mention/hashtag sigil.
    while let Some(c) = rest.chars().next() {
        if !is_split_punct(c) || starts_tag(rest) {
            break;
        }
        out.push(c.to_string());
        rest = &rest[c.len_utf8()..];
    }
    if rest.is_empty() {
        return;
    }
    if rest.contains("://") {
        out.push(rest.to_string());
        return;
    }
    let tag = starts_tag(rest);
    let mut end = rest.len();
    for (i, c) in rest.char_indices().rev() {
        if is_split_punct(c) && !(tag && c == '_') && i > 0 {
            end = i;
        } else {
            break;
        }
    }
    let (core, trailing) = rest.split_at(end);
    out.push(core.to_string());
    out.extend(trailing.chars().map(|c| c.to_string()));
}

/// Splits raw text into lowercased tokens.
///
/// Leading and trailing ASCII punctuation becomes standalone tokens.
/// Mentions (`@name`), hashtags (`#tag`) and anything containing `://` are
/// kept whole. The output never contains whitespace, empty strings, or any of
/// the special symbols.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut out = Vec::new();
    for chunk in lowered.split_whitespace() {
        push_chunk(chunk, &mut out);
    }
    out
}

/// Like [`tokenize`], but accepts arbitrary bytes; invalid UTF-8 sequences are
/// replaced with U+FFFD.
pub fn tokenize_bytes(bytes: &[u8]) -> Vec<String> {
    tokenize(&String::from_utf8_lossy(bytes))
}

/// Interned token table with dense ids. The special symbols are always
/// present; [`Vocabulary::new`] and [`build_vocabulary`] give them ids 0
/// (`<unk>`), 1 (`<s>`) and 2 (`</s>`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: FxHashMap<String, TokenId>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocabulary {
    /// A vocabulary holding only the three special symbols.
    pub fn new() -> Self {
        let mut v = Vocabulary {
            tokens: Vec::new(),
            ids: FxHashMap::default(),
        };
        for special in [UNK, BOS, EOS] {
            v.insert(special);
        }
        v
    }

    /// Builds a vocabulary from tokens in id order. The special symbols are
    /// placed wherever they occur; missing ones are appended.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut v = Vocabulary {
            tokens: Vec::new(),
            ids: FxHashMap::default(),
        };
        for t in tokens {
            v.insert(t.as_ref());
        }
        for special in [UNK, BOS, EOS] {
            v.insert(special);
        }
        v
    }

    /// Returns the id of `token`, adding it if new.
    pub fn insert(&mut self, token: &str) -> TokenId {
        if let Some(&id) = self.ids.get(token) {
            return id;
        }
        let id = self.tokens.len() as TokenId;
        self.tokens.push(token.to_string());
        self.ids.insert(token.to_string(), id);
        id
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.ids.get(token).copied()
    }

    /// Id of `token`, or the `<unk>` id when it is out of vocabulary.
    pub fn id_or_unk(&self, token: &str) -> TokenId {
        self.id(token).unwrap_or(self.unk())
    }

    pub fn token(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn unk(&self) -> TokenId {
        self.ids[UNK]
    }

    pub fn bos(&self) -> TokenId {
        self.ids[BOS]
    }

    pub fn eos(&self) -> TokenId {
        self.ids[EOS]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains_id(&self, id: TokenId) -> bool {
        (id as usize) < self.tokens.len()
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    /// Maps a tokenized sentence to ids, sending unknown tokens to `<unk>`.
    pub fn encode<S: AsRef<str>>(&self, sentence: &[S]) -> Vec<TokenId> {
        sentence.iter().map(|t| self.id_or_unk(t.as_ref())).collect()
    }
}

/// Collects every token whose corpus frequency is at least `min_count`.
///
/// Ids after the specials are assigned by descending frequency, ties broken
/// by the token string, so the result does not depend on input order.
pub fn build_vocabulary<S: AsRef<str> + Sync>(sentences: &[Vec<S>], min_count: u64) -> Vocabulary {
    let min_count = min_count.max(1);
    let freqs = sentences
        .par_iter()
        .fold(FxHashMap::<&str, u64>::default, |mut acc, sentence| {
            for t in sentence {
                *acc.entry(t.as_ref()).or_default() += 1;
            }
            acc
        })
        .reduce(FxHashMap::default, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let mut kept: Vec<(&str, u64)> = freqs
        .into_iter()
        .filter(|&(t, c)| c >= min_count && ![UNK, BOS, EOS].contains(&t))
        .collect();
    kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut vocab = Vocabulary::new();
    for (t, _) in kept {
        vocab.insert(t);
    }
    vocab
}

/// Reads one sentence per line, skipping blank lines. Lines are tokenized in
/// parallel; output order follows the input.
pub fn ingest_plaintext<R: BufRead>(source: R, path: &str) -> Result<Vec<Vec<String>>> {
    let mut lines = Vec::new();
    for (n, line) in split_lines(source).enumerate() {
        let line = line.map_err(|source| CorpusError::Ingest {
            path: path.to_string(),
            line: n,
            source,
        })?;
        lines.push(line);
    }
    Ok(lines
        .par_iter()
        .map(|l| tokenize_bytes(l))
        .filter(|s| !s.is_empty())
        .collect())
}

pub fn read_plaintext_file(path: &Path) -> Result<Vec<Vec<String>>> {
    let name = path.display().to_string();
    let file = File::open(path).map_err(|source| CorpusError::Ingest {
        path: name.clone(),
        line: 0,
        source,
    })?;
    ingest_plaintext(BufReader::new(file), &name)
}

/// Raw lines without the trailing `\n` (and `\r`), as bytes.
fn split_lines<R: BufRead>(source: R) -> impl Iterator<Item = std::io::Result<Vec<u8>>> {
    source.split(b'\n').map(|r| {
        r.map(|mut l| {
            if l.last() == Some(&b'\r') {
                l.pop();
            }
            l
        })
    })
}

/// Gold funniness label of a tweet within its hashtag set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GoldLabel {
    Rest = 0,
    Next9 = 1,
    Top1 = 2,
}

impl GoldLabel {
    pub fn value(self) -> u8 {
        self as u8
    }
}

impl FromStr for GoldLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "0" => Ok(GoldLabel::Rest),
            "1" => Ok(GoldLabel::Next9),
            "2" => Ok(GoldLabel::Top1),
            other => Err(format!("label {other:?} is not one of 0, 1, 2")),
        }
    }
}

impl fmt::Display for GoldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub text: String,
    pub gold: Option<GoldLabel>,
}

impl TweetRecord {
    pub fn new(tweet_id: impl Into<String>, text: impl Into<String>, gold: Option<GoldLabel>) -> Self {
        TweetRecord {
            tweet_id: tweet_id.into(),
            text: text.into(),
            gold,
        }
    }
}

/// All tweets answering one hashtag prompt, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashtagSet {
    pub hashtag: String,
    pub tweets: Vec<TweetRecord>,
}

impl HashtagSet {
    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Checks that every tweet carries a label, with exactly one `Top1` and
    /// `min(9, n - 1)` `Next9`.
    pub fn validate_gold(&self) -> Result<()> {
        let bad = |reason: String| CorpusError::InvalidGold {
            hashtag: self.hashtag.clone(),
            reason,
        };
        if self.tweets.is_empty() {
            return Err(bad("no tweets".into()));
        }
        let mut top = 0;
        let mut next = 0;
        for t in &self.tweets {
            match t.gold {
                None => return Err(bad(format!("tweet {} has no label", t.tweet_id))),
                Some(GoldLabel::Top1) => top += 1,
                Some(GoldLabel::Next9) => next += 1,
                Some(GoldLabel::Rest) => {}
            }
        }
        let want_next = 9.min(self.tweets.len() - 1);
        if top != 1 {
            return Err(bad(format!("{top} top-1 tweets, expected 1")));
        }
        if next != want_next {
            return Err(bad(format!("{next} next-9 tweets, expected {want_next}")));
        }
        Ok(())
    }

    /// Writes the set in the tweet TSV format read by [`ingest_tweet_tsv`].
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        for t in &self.tweets {
            match t.gold {
                Some(g) => writeln!(sink, "{}\t{}\t{}", t.tweet_id, t.text, g)?,
                None => writeln!(sink, "{}\t{}", t.tweet_id, t.text)?,
            }
        }
        Ok(())
    }
}

/// Parses `tweet_id<TAB>text[<TAB>label]` lines. Blank lines are skipped.
/// `path` is used only for error messages.
pub fn ingest_tweet_tsv<R: BufRead>(source: R, hashtag: &str, path: &str) -> Result<HashtagSet> {
    let mut tweets = Vec::new();
    let mut seen = HashSet::new();
    for (n, line) in split_lines(source).enumerate() {
        let lineno = n + 1;
        let raw = line.map_err(|source| CorpusError::Ingest {
            path: path.to_string(),
            line: n,
            source,
        })?;
        let line = String::from_utf8_lossy(&raw);
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: String| CorpusError::MalformedRecord {
            path: path.to_string(),
            line: lineno,
            reason,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let (id, text, gold) = match fields.as_slice() {
            [id, text] => (*id, *text, None),
            [id, text, label] => (*id, *text, Some(label.parse::<GoldLabel>().map_err(malformed)?)),
            _ => {
                return Err(malformed(format!(
                    "expected 2 or 3 tab-separated fields, found {}",
                    fields.len()
                )))
            }
        };
        if id.is_empty() {
            return Err(malformed("empty tweet id".into()));
        }
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId {
                path: path.to_string(),
                line: lineno,
                id: id.to_string(),
            });
        }
        tweets.push(TweetRecord::new(id, text, gold));
    }
    Ok(HashtagSet {
        hashtag: hashtag.to_string(),
        tweets,
    })
}

/// Reads `<hashtag>.tsv`; the file stem names the hashtag.
pub fn read_hashtag_file(path: &Path) -> Result<HashtagSet> {
    let name = path.display().to_string();
    let hashtag = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = File::open(path).map_err(|source| CorpusError::Ingest {
        path: name.clone(),
        line: 0,
        source,
    })?;
    ingest_tweet_tsv(BufReader::new(file), &hashtag, &name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("The CAT sat."), toks(&["the", "cat", "sat", "."]));
        assert_eq!(
            tokenize("@midnight loves #GhostMovies!"),
            toks(&["@midnight", "loves", "#ghostmovies", "!"])
        );
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \t \n").is_empty());
    }

    #[test]
    fn tokenize_edge_cases() {
        assert_eq!(tokenize("(hello)"), toks(&["(", "hello", ")"]));
        assert_eq!(tokenize("don't stop..."), toks(&["don't", "stop", ".", ".", "."]));
        assert_eq!(
            tokenize("see http://x.com/a?b=c."),
            toks(&["see", "http://x.com/a?b=c."])
        );
        assert_eq!(tokenize("@foo_bar_"), toks(&["@foo_bar_"]));
        assert_eq!(tokenize("# alone"), toks(&["#", "alone"]));
        assert_eq!(tokenize("\"#Tag\""), toks(&["\"", "#tag", "\""]));
        assert_eq!(
            tokenize("<s> </s> <unk>"),
            toks(&["<", "s", ">", "<", "/", "s", ">", "<", "unk", ">"])
        );
    }

    #[test]
    fn tokenize_replaces_invalid_bytes() {
        let t = tokenize_bytes(b"caf\xff ok");
        assert_eq!(t, toks(&["caf\u{fffd}", "ok"]));
    }

    #[test]
    fn plaintext_skips_blank_lines() {
        let s = ingest_plaintext(&b"A b\n\nc"[..], "mem").unwrap();
        assert_eq!(s, vec![toks(&["a", "b"]), toks(&["c"])]);
        assert!(ingest_plaintext(&b""[..], "mem").unwrap().is_empty());
    }

    #[test]
    fn unreadable_path_is_ingest_error() {
        let err = read_plaintext_file(Path::new("/nonexistent/definitely/missing.txt")).unwrap_err();
        assert!(matches!(err, CorpusError::Ingest { .. }));
    }

    #[test]
    fn tsv_records() {
        let set = ingest_tweet_tsv(&b"42\tfunny text\t2\n43\tanother tweet\n"[..], "tag", "mem").unwrap();
        assert_eq!(
            set.tweets[0],
            TweetRecord::new("42", "funny text", Some(GoldLabel::Top1))
        );
        assert_eq!(set.tweets[1], TweetRecord::new("43", "another tweet", None));
        assert_eq!(set.hashtag, "tag");
    }

    #[test]
    fn tsv_errors() {
        let err = ingest_tweet_tsv(&b"44\ttext\t7\n"[..], "t", "mem").unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRecord { line: 1, .. }));
        let err = ingest_tweet_tsv(&b"1\ta\n\n2\tb\tc\td\n"[..], "t", "mem").unwrap_err();
        assert!(matches!(err, CorpusError::MalformedRecord { line: 3, .. }));
        let err = ingest_tweet_tsv(&b"1\ta\n1\tb\n"[..], "t", "mem").unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn hashtag_name_from_file_stem() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("Ghost_Movies.tsv");
        std::fs::write(&path, "1\tboo\t2\n").unwrap();
        let set = read_hashtag_file(&path).unwrap();
        assert_eq!(set.hashtag, "Ghost_Movies");
        set.validate_gold().unwrap();
    }

    #[test]
    fn gold_validation() {
        let mk = |labels: &[u8]| HashtagSet {
            hashtag: "h".into(),
            tweets: labels
                .iter()
                .enumerate()
                .map(|(i, l)| TweetRecord::new(i.to_string(), "x", Some(l.to_string().parse().unwrap())))
                .collect(),
        };
        mk(&[2, 1, 0]).validate_gold().unwrap_err();
        mk(&[2, 1]).validate_gold().unwrap();
        mk(&[2, 2, 1]).validate_gold().unwrap_err();
        let mut twelve = vec![2u8];
        twelve.extend([1; 9]);
        twelve.extend([0; 2]);
        mk(&twelve).validate_gold().unwrap();
    }

    #[test]
    fn vocabulary_examples() {
        let corpus = vec![toks(&["a", "b", "a"])];
        let v = build_vocabulary(&corpus, 1);
        assert_eq!(v.len(), 5);
        assert!(v.id("a").is_some() && v.id("b").is_some());
        let v = build_vocabulary(&corpus, 2);
        assert_eq!(v.len(), 4);
        assert_eq!(v.id_or_unk("b"), v.unk());
        let v = build_vocabulary::<String>(&[], 1);
        assert_eq!(v.len(), 3);
        assert_eq!((v.unk(), v.bos(), v.eos()), (0, 1, 2));
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        proptest::string::string_regex("[a-zA-Z0-9@#.,!?'\"():/ _-]{0,40}").unwrap()
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent(text in text_strategy()) {
            let once = tokenize(&text);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(&once, &twice);
            for t in &once {
                prop_assert!(!t.is_empty());
                prop_assert!(!t.chars().any(char::is_whitespace));
                prop_assert!(![BOS, EOS, UNK].contains(&t.as_str()));
            }
        }

        #[test]
        fn vocabulary_ids_are_a_bijection(
            corpus in prop::collection::vec(prop::collection::vec("[a-e]{1,2}", 0..6), 0..8)
        ) {
            let v = build_vocabulary(&corpus, 1);
            for id in 0..v.len() as TokenId {
                prop_assert_eq!(v.id(v.token(id).unwrap()), Some(id));
            }
            for s in &corpus {
                prop_assert!(v.encode(s).iter().all(|&id| id != v.unk()));
            }
        }

        #[test]
        fn tsv_round_trip(
            rows in prop::collection::btree_map("[a-z0-9]{1,6}", ("[a-zA-Z .!#@]{0,20}", prop::option::of(0u8..3)), 0..10)
        ) {
            let set = HashtagSet {
                hashtag: "tag".into(),
                tweets: rows
                    .into_iter()
                    .map(|(id, (text, l))| TweetRecord::new(id, text, l.map(|l| l.to_string().parse().unwrap())))
                    .collect(),
            };
            let mut buf = Vec::new();
            set.write_tsv(&mut buf).unwrap();
            let back = ingest_tweet_tsv(&buf[..], "tag", "mem").unwrap();
            prop_assert_eq!(back, set);
        }
    }
}
