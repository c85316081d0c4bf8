use serde::Serialize;

/// Number of ngram types seen exactly 1, 2, 3 and 4 times.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CountsOfCounts {
    pub n1: u64,
    pub n2: u64,
    pub n3: u64,
    pub n4: u64,
}

impl CountsOfCounts {
    pub fn new(n1: u64, n2: u64, n3: u64, n4: u64) -> Self {
        CountsOfCounts { n1, n2, n3, n4 }
    }

    pub(crate) fn add(&mut self, count: u64) {
        match count {
            1 => self.n1 += 1,
            2 => self.n2 += 1,
            3 => self.n3 += 1,
            4 => self.n4 += 1,
            _ => {}
        }
    }
}

/// Discounts for adjusted counts 1, 2 and ≥3 at one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderDiscounts {
    pub d1: f64,
    pub d2: f64,
    pub d3plus: f64,
}

impl OrderDiscounts {
    /// Used when n1 or n2 is zero.
    pub const FALLBACK: OrderDiscounts = OrderDiscounts {
        d1: 0.5,
        d2: 1.0,
        d3plus: 1.5,
    };

    /// Lower clamp. A zero discount would give a seen context zero backoff
    /// mass and leave unseen continuations with probability 0.
    pub const MIN: f64 = 1e-3;

    /// Closed-form estimate from counts-of-counts, with fallbacks for
    /// degenerate inputs and each `Dk` clamped into `[MIN, k]`.
    pub fn estimate(coc: CountsOfCounts) -> Self {
        if coc.n1 == 0 || coc.n2 == 0 {
            return Self::FALLBACK;
        }
        let (n1, n2, n3, n4) = (coc.n1 as f64, coc.n2 as f64, coc.n3 as f64, coc.n4 as f64);
        let y = n1 / (n1 + 2.0 * n2);
        let d1 = 1.0 - 2.0 * y * n2 / n1;
        let d2 = 2.0 - 3.0 * y * n3 / n2;
        let d3plus = if coc.n3 == 0 { d2 + 0.5 } else { 3.0 - 4.0 * y * n4 / n3 };
        OrderDiscounts {
            d1: d1.clamp(Self::MIN, 1.0),
            d2: d2.clamp(Self::MIN, 2.0),
            d3plus: d3plus.clamp(Self::MIN, 3.0),
        }
    }

    pub fn for_count(&self, count: u64) -> f64 {
        match count {
            0 => 0.0,
            1 => self.d1,
            2 => self.d2,
            _ => self.d3plus,
        }
    }
}

/// Per-order discounts; index 0 is the unigram order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discounts(pub Vec<OrderDiscounts>);

impl Discounts {
    /// Discounts for order `k` (1-based).
    pub fn order(&self, k: usize) -> &OrderDiscounts {
        &self.0[k - 1]
    }
}

pub fn estimate_discounts(counts_of_counts: &[CountsOfCounts]) -> Discounts {
    Discounts(counts_of_counts.iter().map(|&c| OrderDiscounts::estimate(c)).collect())
}
