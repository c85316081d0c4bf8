//! ARPA text serialization.
//!
//! ```text
//! \data\
//! ngram 1=<count>
//! ngram 2=<count>
//!
//! \1-grams:
//! <log10prob>\t<w1>\t<log10backoff>
//!
//! \2-grams:
//! <log10prob>\t<w1> <w2>
//!
//! \end\
//! ```
//!
//! Values carry six fractional digits. The backoff column is omitted at the
//! highest order and for entries without a stored backoff. Unigrams are
//! written in vocabulary id order, which is how the reader rebuilds ids;
//! higher orders are sorted by id sequence.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rustc_hash::FxHashMap;

use super::model::{BackoffModel, Entry};
use super::{Key, LmError, NgramOrder, Result, MAX_ORDER};
use crate::corpus::{TokenId, Vocabulary, BOS, EOS, UNK};

pub fn write_arpa<W: Write>(model: &BackoffModel, mut sink: W) -> std::io::Result<()> {
    let n = model.order().get();
    let vocab = model.vocab();
    writeln!(sink, "\\data\\")?;
    for k in 1..=n {
        writeln!(sink, "ngram {}={}", k, model.ngram_count(k))?;
    }
    let mut line = String::new();
    for k in 1..=n {
        writeln!(sink)?;
        writeln!(sink, "\\{k}-grams:")?;
        for (ids, e) in model.sorted_entries(k) {
            line.clear();
            for (i, &id) in ids.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(vocab.token(id).expect("stored ids are in the vocabulary"));
            }
            match e.log10_backoff {
                Some(bo) if k < n => writeln!(sink, "{:.6}\t{}\t{:.6}", e.log10_prob, line, bo)?,
                _ => writeln!(sink, "{:.6}\t{}", e.log10_prob, line)?,
            }
        }
    }
    writeln!(sink)?;
    writeln!(sink, "\\end\\")?;
    sink.flush()
}

pub fn write_arpa_file(model: &BackoffModel, path: &Path) -> Result<()> {
    let io_err = |source| LmError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_arpa(model, BufWriter::new(file)).map_err(io_err)
}

fn parse_err(line: usize, reason: impl Into<String>) -> LmError {
    LmError::ArpaParse {
        line,
        reason: reason.into(),
    }
}

fn parse_value(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| parse_err(line, format!("{s:?} is not a number")))
}

fn section_order(s: &str) -> Option<usize> {
    s.strip_prefix('\\')?.strip_suffix("-grams:")?.parse().ok()
}

pub fn read_arpa<R: BufRead>(source: R) -> Result<BackoffModel> {
    let mut lines = source.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_line = move || -> Result<Option<(usize, String)>> {
        match lines.next() {
            None => Ok(None),
            Some((n, Ok(l))) => Ok(Some((n, l.trim_end_matches('\r').to_string()))),
            Some((n, Err(e))) => Err(parse_err(n, e.to_string())),
        }
    };

    // Anything before \data\ is ignored.
    loop {
        match next_line()? {
            None => return Err(parse_err(0, "missing \\data\\ header")),
            Some((_, l)) if l.trim() == "\\data\\" => break,
            Some(_) => {}
        }
    }

    let mut declared: Vec<usize> = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    while let Some((n, l)) = next_line()? {
        let t = l.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(spec) = t.strip_prefix("ngram ") {
            let (k, c) = spec
                .split_once('=')
                .ok_or_else(|| parse_err(n, "expected `ngram k=count`"))?;
            let k: usize = k.trim().parse().map_err(|_| parse_err(n, "bad ngram order"))?;
            let c: usize = c.trim().parse().map_err(|_| parse_err(n, "bad ngram count"))?;
            if k != declared.len() + 1 {
                return Err(parse_err(n, format!("expected ngram {} next", declared.len() + 1)));
            }
            declared.push(c);
        } else {
            pending = Some((n, l));
            break;
        }
    }
    let order = match NgramOrder::new(declared.len()) {
        Ok(o) => o,
        Err(_) => {
            return Err(parse_err(
                0,
                format!("header declares {} orders, expected 1..={MAX_ORDER}", declared.len()),
            ))
        }
    };
    let n = order.get();

    let mut vocab: Option<Vocabulary> = None;
    let mut tokens: Vec<String> = Vec::new();
    let mut token_ids: FxHashMap<String, TokenId> = FxHashMap::default();
    let mut entries: Vec<FxHashMap<Key, Entry>> = Vec::with_capacity(n);

    for k in 1..=n {
        let (hn, header) = match pending.take() {
            Some(p) => p,
            None => return Err(parse_err(0, format!("missing \\{k}-grams: section"))),
        };
        if section_order(header.trim()) != Some(k) {
            return Err(parse_err(
                hn,
                format!("expected \\{k}-grams:, found {:?}", header.trim()),
            ));
        }
        let mut level: FxHashMap<Key, Entry> = FxHashMap::default();
        level.reserve(declared[k - 1]);
        let mut ids = Vec::with_capacity(k);
        loop {
            let (ln, l) = match next_line()? {
                Some(x) => x,
                None => return Err(parse_err(0, "missing \\end\\")),
            };
            let t = l.trim();
            if t.is_empty() {
                continue;
            }
            if t.starts_with('\\') {
                pending = Some((ln, l));
                break;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            let has_backoff = match fields.len() {
                f if f == k + 1 => false,
                f if f == k + 2 => true,
                f => return Err(parse_err(ln, format!("{f} fields in a {k}-gram entry"))),
            };
            if has_backoff && k == n {
                return Err(parse_err(ln, "backoff weight at the highest order"));
            }
            let log10_prob = parse_value(fields[0], ln)?;
            let log10_backoff = if has_backoff {
                Some(parse_value(fields[k + 1], ln)?)
            } else {
                None
            };
            ids.clear();
            for w in &fields[1..=k] {
                let id = if k == 1 {
                    if token_ids.contains_key(*w) {
                        return Err(parse_err(ln, format!("duplicate unigram {w:?}")));
                    }
                    let id = tokens.len() as TokenId;
                    tokens.push(w.to_string());
                    token_ids.insert(w.to_string(), id);
                    id
                } else {
                    *token_ids
                        .get(*w)
                        .ok_or_else(|| parse_err(ln, format!("{w:?} is not a unigram")))?
                };
                ids.push(id);
            }
            let entry = Entry {
                log10_prob,
                log10_backoff,
            };
            if level.insert(Key::new(&ids), entry).is_some() {
                return Err(parse_err(ln, "duplicate ngram"));
            }
        }
        if level.len() != declared[k - 1] {
            return Err(LmError::ArpaCountMismatch {
                order: k,
                declared: declared[k - 1],
                found: level.len(),
            });
        }
        if k == 1 {
            for special in [UNK, BOS, EOS] {
                if !token_ids.contains_key(special) {
                    return Err(parse_err(hn, format!("unigram section lacks {special}")));
                }
            }
            vocab = Some(Vocabulary::from_tokens(&tokens));
        }
        entries.push(level);
    }

    match pending {
        Some((_, l)) if l.trim() == "\\end\\" => {}
        Some((ln, l)) => return Err(parse_err(ln, format!("expected \\end\\, found {:?}", l.trim()))),
        None => return Err(parse_err(0, "missing \\end\\")),
    }
    let vocab = vocab.expect("unigram section parsed");
    Ok(BackoffModel::from_parts(order, vocab, entries))
}

pub fn read_arpa_file(path: &Path) -> Result<BackoffModel> {
    let file = File::open(path).map_err(|source| LmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_arpa(BufReader::new(file))
}
