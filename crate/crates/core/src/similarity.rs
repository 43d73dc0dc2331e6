//! Cosine string similarity over per-word character bigrams.
//!
//! Text is normalized first ([`normalize_text`]), split on whitespace, and each
//! word contributes its consecutive character bigrams (a one-character word
//! contributes itself). Similarity is the cosine of the two bigram count
//! vectors.
//!
//! [`SimilarityIndex`] answers "lowest-id indexed item with cosine at least
//! `t`" without scanning every item, and returns exactly what a linear scan
//! with [`cosine`] would.

use std::collections::{BTreeMap, HashMap};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const DEFAULT_AUTHOR_THRESHOLD: f64 = 0.75;
pub const DEFAULT_JOURNAL_THRESHOLD: f64 = 0.75;
pub const DEFAULT_TITLE_THRESHOLD: f64 = 0.90;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("similarity threshold must lie in (0, 1], got {0}")]
pub struct InvalidThreshold(pub f64);

/// A similarity threshold in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self, InvalidThreshold> {
        if value > 0.0 && value <= 1.0 {
            Ok(Threshold(value))
        } else {
            Err(InvalidThreshold(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

pub fn normalize_text(raw: &str) -> String {
    let folded: String = raw.nfkc().flat_map(char::to_lowercase).nfkc().collect();
    let mut out = String::with_capacity(folded.len());
    let mut pending_space = false;
    for c in folded.chars() {
        if c.is_control() {
            continue;
        }
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Bigram multiset. Counts are always positive and tokens non-empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenMultiset(BTreeMap<String, u32>);

impl TokenMultiset {
    pub fn get(&self, token: &str) -> u32 {
        self.0.get(token).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Sum of squared counts.
    pub fn norm_sq(&self) -> u64 {
        self.0.values().map(|&c| u64::from(c) * u64::from(c)).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn dot(&self, other: &TokenMultiset) -> u64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .0
            .iter()
            .map(|(k, &v)| u64::from(v) * u64::from(large.get(k)))
            .sum()
    }

    pub fn cosine(&self, other: &TokenMultiset) -> f64 {
        cosine_from_parts(self.dot(other), self.norm_sq(), other.norm_sq())
    }
}

/// Cosine from integer dot product and squared norms. Both norms go under a
/// single square root, so identical vectors give exactly 1.
fn cosine_from_parts(dot: u64, norm_sq_a: u64, norm_sq_b: u64) -> f64 {
    match (norm_sq_a == 0, norm_sq_b == 0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => (dot as f64 / (norm_sq_a as f64 * norm_sq_b as f64).sqrt()).clamp(0.0, 1.0),
    }
}

/// Tokenizes already-normalized text into per-word character bigrams.
pub fn tokenize(s: &str) -> TokenMultiset {
    let mut counts = BTreeMap::new();
    let mut buf = String::new();
    for word in s.split_whitespace() {
        let chars: Vec<char> = word.chars().collect();
        if chars.len() == 1 {
            *counts.entry(word.to_string()).or_insert(0) += 1;
            continue;
        }
        for pair in chars.windows(2) {
            buf.clear();
            buf.push(pair[0]);
            buf.push(pair[1]);
            *counts.entry(buf.clone()).or_insert(0) += 1;
        }
    }
    TokenMultiset(counts)
}

pub fn cosine(a: &str, b: &str) -> f64 {
    tokenize(&normalize_text(a)).cosine(&tokenize(&normalize_text(b)))
}

pub fn same_entity(a: &str, b: &str, threshold: f64) -> Result<bool, InvalidThreshold> {
    let t = Threshold::new(threshold)?;
    Ok(cosine(a, b) >= t.get())
}

/// Token counts keyed by rank, ascending.
#[derive(Debug, Clone)]
struct SparseVec {
    /// `(rank, token id, count)`
    entries: Vec<(u32, u32, u32)>,
    norm_sq: u64,
    norm: f64,
}

impl SparseVec {
    fn dot(&self, other: &SparseVec) -> u64 {
        let (mut i, mut j, mut acc) = (0, 0, 0u64);
        while i < self.entries.len() && j < other.entries.len() {
            let (ra, _, ca) = self.entries[i];
            let (rb, _, cb) = other.entries[j];
            match ra.cmp(&rb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += u64::from(ca) * u64::from(cb);
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Share of the threshold norm left unprobed by a query. Lower values scan
/// more postings and score fewer items; it never changes results.
const PROBE_FRACTION: f64 = 0.9;

/// Ranks of observed tokens start here; tokens first seen later count down
/// from just below it, so they sort as rarest.
const OBSERVED_RANK_BASE: u32 = 1 << 31;

/// Incremental threshold-similarity index over normalized strings.
///
/// Tokens are ordered rarest-first (by frequencies supplied up front through
/// [`SimilarityIndex::observe`]). A query probes the postings of its rarest
/// tokens only, accumulating partial dot products; the norm of the unprobed
/// tokens bounds how much any item could still gain. Items that survive the
/// bound are scored exactly, with the same arithmetic as
/// [`TokenMultiset::cosine`].
#[derive(Debug, Clone)]
pub struct SimilarityIndex {
    threshold: f64,
    vocab: HashMap<String, u32>,
    frequency: Vec<u64>,
    /// Token id → rank, fixed when the first insert or query seals the
    /// frequency table.
    rank: Vec<u32>,
    sealed: bool,
    next_unseen_rank: u32,
    items: Vec<SparseVec>,
    /// Token id → `(item, count)` in insertion order.
    postings: Vec<Vec<(u32, u32)>>,
    /// Per-item scratch for one query: partial dot product, valid while
    /// `seen` holds the current stamp.
    acc: Vec<u64>,
    seen: Vec<u32>,
    stamp: u32,
}

impl SimilarityIndex {
    pub fn new(threshold: Threshold) -> Self {
        SimilarityIndex {
            threshold: threshold.get(),
            vocab: HashMap::new(),
            frequency: Vec::new(),
            rank: Vec::new(),
            sealed: false,
            next_unseen_rank: OBSERVED_RANK_BASE - 1,
            items: Vec::new(),
            postings: Vec::new(),
            acc: Vec::new(),
            seen: Vec::new(),
            stamp: 0,
        }
    }

    fn seal(&mut self) {
        if self.sealed {
            return;
        }
        self.sealed = true;
        let mut order: Vec<u32> = (0..self.frequency.len() as u32).collect();
        order.sort_by_key(|&t| (self.frequency[t as usize], t));
        self.rank = vec![0; order.len()];
        for (r, &t) in order.iter().enumerate() {
            self.rank[t as usize] = OBSERVED_RANK_BASE + r as u32;
        }
    }

    fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.vocab.get(token) {
            return id;
        }
        let id = self.frequency.len() as u32;
        self.vocab.insert(token.to_string(), id);
        self.frequency.push(0);
        self.postings.push(Vec::new());
        if self.sealed {
            self.rank.push(self.next_unseen_rank);
            self.next_unseen_rank -= 1;
        }
        id
    }

    /// Records token frequencies from a text that may be indexed or queried
    /// later. Only affects speed, never results. Must be called before the
    /// first insert or query.
    pub fn observe(&mut self, normalized: &str) {
        assert!(!self.sealed, "observe after insert or query");
        for (tok, _) in tokenize(normalized).iter() {
            let id = self.intern(tok);
            self.frequency[id as usize] += 1;
        }
    }

    fn vectorize(&mut self, normalized: &str) -> SparseVec {
        self.seal();
        let tokens = tokenize(normalized);
        let mut entries: Vec<(u32, u32, u32)> = tokens
            .iter()
            .map(|(tok, c)| {
                let id = self.intern(tok);
                (self.rank[id as usize], id, c)
            })
            .collect();
        entries.sort_unstable();
        let norm_sq = tokens.norm_sq();
        SparseVec {
            entries,
            norm_sq,
            norm: (norm_sq as f64).sqrt(),
        }
    }

    /// An empty index sharing this one's token order and threshold, for
    /// searching a subset of items without re-observing the corpus.
    pub fn empty_like(&mut self) -> Self {
        self.seal();
        SimilarityIndex {
            threshold: self.threshold,
            vocab: self.vocab.clone(),
            frequency: self.frequency.clone(),
            rank: self.rank.clone(),
            sealed: true,
            next_unseen_rank: self.next_unseen_rank,
            items: Vec::new(),
            postings: vec![Vec::new(); self.postings.len()],
            acc: Vec::new(),
            seen: Vec::new(),
            stamp: 0,
        }
    }

    /// Adds an item; returns its index (insertion order).
    pub fn insert(&mut self, normalized: &str) -> usize {
        let vec = self.vectorize(normalized);
        let idx = self.items.len();
        for &(_, t, c) in &vec.entries {
            self.postings[t as usize].push((idx as u32, c));
        }
        self.items.push(vec);
        self.seen.push(0);
        self.acc.push(0);
        idx
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// All indexed items with cosine ≥ threshold, ascending by index.
    pub fn matches(&mut self, normalized: &str) -> Vec<(usize, f64)> {
        let query = self.vectorize(normalized);
        if query.entries.is_empty() {
            // Indexed items may be empty too; both-empty counts as identical.
            return (0..self.items.len())
                .filter(|&i| self.items[i].entries.is_empty())
                .map(|i| (i, 1.0))
                .collect();
        }
        // Probe the rarest tokens until the unprobed remainder of the query
        // falls to PROBE_FRACTION of the norm needed to reach the threshold. For any
        // item c, dot(q, c) ≤ acc + ‖q_rest‖·‖c‖ where acc is the dot product
        // over the probed tokens; items whose acc cannot close the gap are
        // never scored.
        let q_norm = (query.norm_sq as f64).sqrt();
        let target = self.threshold * q_norm;
        let mut rest_sq = query.norm_sq;
        let mut probe_len = 0;
        for &(_, _, c) in &query.entries {
            if (rest_sq as f64).sqrt() <= PROBE_FRACTION * target {
                break;
            }
            rest_sq -= u64::from(c) * u64::from(c);
            probe_len += 1;
        }
        let rest = (rest_sq as f64).sqrt();
        // Shrunk slightly so rounding can only admit extra candidates.
        let gap = (target - rest) * (1.0 - 1e-9);

        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.stamp = 1;
        }
        let mut touched = Vec::new();
        for &(_, t, qc) in &query.entries[..probe_len] {
            for &(item, ic) in &self.postings[t as usize] {
                let i = item as usize;
                if self.seen[i] != self.stamp {
                    self.seen[i] = self.stamp;
                    self.acc[i] = 0;
                    touched.push(i);
                }
                self.acc[i] += u64::from(qc) * u64::from(ic);
            }
        }
        let mut candidates: Vec<usize> = touched
            .into_iter()
            .filter(|&i| self.acc[i] as f64 >= gap * self.items[i].norm)
            .collect();
        candidates.sort_unstable();
        candidates
            .into_iter()
            .filter_map(|i| {
                let item = &self.items[i];
                let sim = cosine_from_parts(item.dot(&query), item.norm_sq, query.norm_sq);
                (sim >= self.threshold).then_some((i, sim))
            })
            .collect()
    }

    /// Lowest-index item with cosine ≥ threshold.
    pub fn first_match(&mut self, normalized: &str) -> Option<usize> {
        self.matches(normalized).first().map(|&(i, _)| i)
    }
}
