//! Brute-force interpolated modified Kneser-Ney evaluator.
//!
//! Works on strings straight from the sentences, counts by scanning padded
//! sentences, derives continuation counts by enumerating every possible left
//! word, and evaluates the interpolation recursion directly with sums over
//! the whole vocabulary. Nothing here touches the library's counting or
//! model code.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const UNK: &str = "<unk>";
const MIN_DISCOUNT: f64 = 1e-3;

pub struct KnOracle {
    order: usize,
    /// Every symbol, including <s>.
    symbols: Vec<String>,
    /// Every symbol that can be predicted (all but <s>).
    targets: Vec<String>,
    raw: HashMap<Vec<String>, u64>,
    discounts: Vec<[f64; 3]>,
    adjusted_cache: RefCell<HashMap<Vec<String>, u64>>,
}

fn discounts_from(n: [u64; 4]) -> [f64; 3] {
    let [n1, n2, n3, n4] = n.map(|x| x as f64);
    if n[0] == 0 || n[1] == 0 {
        return [0.5, 1.0, 1.5];
    }
    let y = n1 / (n1 + 2.0 * n2);
    let d1 = 1.0 - 2.0 * y * n2 / n1;
    let d2 = 2.0 - 3.0 * y * n3 / n2;
    let d3 = if n[2] == 0 { d2 + 0.5 } else { 3.0 - 4.0 * y * n4 / n3 };
    [
        d1.clamp(MIN_DISCOUNT, 1.0),
        d2.clamp(MIN_DISCOUNT, 2.0),
        d3.clamp(MIN_DISCOUNT, 3.0),
    ]
}

impl KnOracle {
    pub fn new(sentences: &[Vec<String>], order: usize) -> Self {
        let mut words: BTreeSet<String> = BTreeSet::new();
        let mut raw: HashMap<Vec<String>, u64> = HashMap::new();
        for s in sentences {
            let mut padded: Vec<String> = vec![BOS.to_string(); order - 1];
            padded.extend(s.iter().cloned());
            padded.push(EOS.to_string());
            words.extend(s.iter().cloned());
            for end in 0..padded.len() {
                if padded[end] == BOS {
                    continue;
                }
                for k in 1..=order.min(end + 1) {
                    *raw.entry(padded[end + 1 - k..=end].to_vec()).or_insert(0) += 1;
                }
            }
        }
        let mut symbols: Vec<String> = vec![UNK.into(), BOS.into(), EOS.into()];
        symbols.extend(words);
        let targets = symbols.iter().filter(|s| *s != BOS).cloned().collect();
        let mut oracle = KnOracle {
            order,
            symbols,
            targets,
            raw,
            discounts: Vec::new(),
            adjusted_cache: RefCell::new(HashMap::new()),
        };
        oracle.discounts = (1..=order)
            .map(|k| discounts_from(oracle.counts_of_counts(k)))
            .collect();
        oracle
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    fn raw(&self, g: &[String]) -> u64 {
        self.raw.get(g).copied().unwrap_or(0)
    }

    /// Raw count at the top order and for grams starting with <s>; otherwise
    /// the number of distinct symbols seen immediately to the left.
    pub fn adjusted(&self, g: &[String]) -> u64 {
        if let Some(&c) = self.adjusted_cache.borrow().get(g) {
            return c;
        }
        let c = if g.len() == self.order || g[0] == BOS {
            self.raw(g)
        } else {
            self.symbols
                .iter()
                .filter(|v| {
                    let mut ext = vec![(*v).clone()];
                    ext.extend_from_slice(g);
                    self.raw(&ext) > 0
                })
                .count() as u64
        };
        self.adjusted_cache.borrow_mut().insert(g.to_vec(), c);
        c
    }

    /// (n1, n2, n3, n4) of adjusted counts over every possible k-gram.
    pub fn counts_of_counts(&self, k: usize) -> [u64; 4] {
        let mut n = [0u64; 4];
        for ctx in super::all_sequences(&self.symbols, k - 1) {
            for w in &self.targets {
                let mut g = ctx.clone();
                g.push(w.clone());
                let a = self.adjusted(&g);
                if (1..=4).contains(&a) {
                    n[a as usize - 1] += 1;
                }
            }
        }
        n
    }

    pub fn discounts(&self, k: usize) -> [f64; 3] {
        self.discounts[k - 1]
    }

    fn discount(&self, k: usize, a: u64) -> f64 {
        match a {
            0 => 0.0,
            1 => self.discounts[k - 1][0],
            2 => self.discounts[k - 1][1],
            _ => self.discounts[k - 1][2],
        }
    }

    /// P(w | ctx), using at most the last order−1 context symbols.
    pub fn prob(&self, w: &str, ctx: &[String]) -> f64 {
        let keep = ctx.len().min(self.order - 1);
        let h = &ctx[ctx.len() - keep..];
        self.interpolated(h.len() + 1, w, h)
    }

    fn interpolated(&self, k: usize, w: &str, h: &[String]) -> f64 {
        if k == 0 {
            return 1.0 / self.targets.len() as f64;
        }
        let lower = |s: &Self| s.interpolated(k - 1, w, &h[1.min(h.len())..]);
        let mut total = 0u64;
        let mut held_out = 0.0;
        for x in &self.targets {
            let mut g = h.to_vec();
            g.push(x.clone());
            let a = self.adjusted(&g);
            total += a;
            held_out += self.discount(k, a);
        }
        if total == 0 {
            return lower(self);
        }
        let mut g = h.to_vec();
        g.push(w.to_string());
        let a = self.adjusted(&g);
        let own = (a as f64 - self.discount(k, a)).max(0.0) / total as f64;
        own + held_out / total as f64 * lower(self)
    }
}
