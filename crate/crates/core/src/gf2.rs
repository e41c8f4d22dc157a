//! Bit-packed GF(2) rows and Gaussian elimination.
//!
//! Rows store only the window of 64-bit words between their lowest and highest set
//! bit. When columns follow a spatial order, generators of local codes touch a narrow
//! band of columns and elimination fill stays inside that band.

use std::collections::BTreeMap;

/// Bits at even positions of a word.
pub const EVEN: u64 = 0x5555_5555_5555_5555;

/// A GF(2) row vector stored as a window of words starting at word index `start`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitRow {
    start: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn new() -> Self {
        BitRow::default()
    }

    pub fn from_bits<I: IntoIterator<Item = usize>>(bits: I) -> Self {
        let mut row = BitRow::new();
        for b in bits {
            row.toggle(b);
        }
        row
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Index of the first stored word.
    pub fn start_word(&self) -> usize {
        self.start
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Word at absolute index `i` (zero outside the window).
    pub fn word(&self, i: usize) -> u64 {
        if i < self.start {
            0
        } else {
            self.words.get(i - self.start).copied().unwrap_or(0)
        }
    }

    pub fn get(&self, bit: usize) -> bool {
        self.word(bit / 64) >> (bit % 64) & 1 == 1
    }

    fn ensure(&mut self, lo: usize, hi: usize) {
        if self.words.is_empty() {
            self.start = lo;
            self.words = vec![0; hi - lo + 1];
            return;
        }
        let end = self.start + self.words.len() - 1;
        if lo < self.start {
            let mut w = vec![0; self.start - lo];
            w.extend_from_slice(&self.words);
            self.words = w;
            self.start = lo;
        }
        if hi > end {
            self.words.resize(hi - self.start + 1, 0);
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
        let lead = self.words.iter().take_while(|w| **w == 0).count();
        if lead == self.words.len() {
            self.words.clear();
            self.start = 0;
        } else if lead > 0 {
            self.words.drain(..lead);
            self.start += lead;
        }
    }

    pub fn toggle(&mut self, bit: usize) {
        let w = bit / 64;
        self.ensure(w, w);
        self.words[w - self.start] ^= 1 << (bit % 64);
        self.trim();
    }

    pub fn set(&mut self, bit: usize, value: bool) {
        if self.get(bit) != value {
            self.toggle(bit);
        }
    }

    /// Lowest set bit.
    pub fn lead(&self) -> Option<usize> {
        self.words.first().map(|w| self.start * 64 + w.trailing_zeros() as usize)
    }

    /// Highest set bit.
    pub fn last(&self) -> Option<usize> {
        self.words
            .last()
            .map(|w| (self.start + self.words.len() - 1) * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        if other.words.is_empty() {
            return;
        }
        self.ensure(other.start, other.start + other.words.len() - 1);
        let off = other.start - self.start;
        for (a, b) in self.words[off..].iter_mut().zip(&other.words) {
            *a ^= b;
        }
        self.trim();
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bitwise AND with `other`.
    pub fn dot(&self, other: &BitRow) -> bool {
        let lo = self.start.max(other.start);
        let hi = (self.start + self.words.len()).min(other.start + other.words.len());
        (lo..hi).map(|i| (self.word(i) & other.word(i)).count_ones()).sum::<u32>() % 2 == 1
    }

    /// Set bit positions in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(move |(k, &w)| {
            let base = (self.start + k) * 64;
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(base + t)
                }
            })
        })
    }

    /// Swap the two bits of every aligned pair (x and z halves of interleaved Pauli rows).
    pub fn swap_pairs(&self) -> BitRow {
        let mut out = BitRow { start: self.start, words: self.words.iter().map(|&w| swap_pairs(w)).collect() };
        out.trim();
        out
    }
}

/// Swap bits 2j and 2j+1 for every j.
pub fn swap_pairs(w: u64) -> u64 {
    ((w & EVEN) << 1) | ((w >> 1) & EVEN)
}

/// A row that can take part in elimination.
pub trait EchelonRow: Clone {
    fn bits(&self) -> &BitRow;
    /// Replace `self` by `self + pivot` (for Pauli rows: the product `self * pivot`).
    fn combine(&mut self, pivot: &Self);
}

impl EchelonRow for BitRow {
    fn bits(&self) -> &BitRow {
        self
    }
    fn combine(&mut self, pivot: &Self) {
        self.xor_assign(pivot);
    }
}

/// Rows in echelon form: distinct leading columns, sorted by leading column.
#[derive(Clone, Debug)]
pub struct Echelon<R> {
    rows: Vec<R>,
    leads: BTreeMap<usize, usize>,
}

impl<R: EchelonRow> Echelon<R> {
    /// Eliminate with buckets keyed by leading column. Within a bucket the row with
    /// the smallest highest bit becomes pivot, which keeps fill inside narrow bands.
    pub fn new<I: IntoIterator<Item = R>>(rows: I) -> Self {
        let mut buckets: BTreeMap<usize, Vec<R>> = BTreeMap::new();
        for r in rows {
            if let Some(l) = r.bits().lead() {
                buckets.entry(l).or_default().push(r);
            }
        }
        let mut out = Echelon { rows: vec![], leads: BTreeMap::new() };
        while let Some((lead, mut bucket)) = buckets.pop_first() {
            let k = (0..bucket.len()).min_by_key(|&i| (bucket[i].bits().last(), i)).unwrap();
            let pivot = bucket.swap_remove(k);
            for mut r in bucket {
                r.combine(&pivot);
                if let Some(l) = r.bits().lead() {
                    buckets.entry(l).or_default().push(r);
                }
            }
            out.leads.insert(lead, out.rows.len());
            out.rows.push(pivot);
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[R] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<R> {
        self.rows
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.leads.keys().copied()
    }

    /// Pivot row whose leading column is `col`.
    pub fn pivot(&self, col: usize) -> Option<&R> {
        self.leads.get(&col).map(|&i| &self.rows[i])
    }

    /// Reduce `v` by pivots until its leading column has no pivot. Zero residual means `v` is in the span.
    pub fn reduce(&self, mut v: R) -> R {
        while let Some(l) = v.bits().lead() {
            match self.pivot(l) {
                Some(p) => v.combine(p),
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: R) -> bool {
        self.reduce(v).bits().is_zero()
    }

    /// Reduced row echelon form: each pivot column has a single set bit.
    pub fn into_rref(mut self) -> Self {
        let leads: Vec<usize> = self.leads.keys().copied().collect();
        for (k, &c) in leads.iter().enumerate().rev() {
            let pi = self.leads[&c];
            let pivot = self.rows[pi].clone();
            for &c2 in &leads[..k] {
                let j = self.leads[&c2];
                if self.rows[j].bits().get(c) {
                    self.rows[j].combine(&pivot);
                }
            }
        }
        self
    }
}

/// Rank of a set of rows.
pub fn rank<I: IntoIterator<Item = BitRow>>(rows: I) -> usize {
    Echelon::new(rows).rank()
}

/// Basis of `{v : M'v = 0}` where `M'` is `rows` with bit pairs swapped: the
/// symplectic complement of the span of interleaved Pauli rows on `ncols / 2` qubits.
pub fn symplectic_complement(rows: &[BitRow], ncols: usize) -> Vec<BitRow> {
    let swapped = Echelon::new(rows.iter().map(BitRow::swap_pairs)).into_rref();
    let pivots: Vec<(usize, &BitRow)> = swapped.pivot_columns().map(|c| (c, swapped.pivot(c).unwrap())).collect();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().map(|p| p.0).collect();
    let mut out = vec![];
    for free in (0..ncols).filter(|c| !pivot_set.contains(c)) {
        let mut v = BitRow::new();
        v.toggle(free);
        for (c, row) in &pivots {
            if row.get(free) {
                v.toggle(*c);
            }
        }
        out.push(v);
    }
    out
}
