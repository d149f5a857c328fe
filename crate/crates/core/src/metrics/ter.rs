//! Translation edit rate with greedy block shifts.

use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of shifts applied to one segment.
pub const MAX_SHIFTS: usize = 10;
/// Longest block considered for a shift.
pub const MAX_SHIFT_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TerSegmentStats {
    /// Insertions, deletions, substitutions and shifts.
    pub edit_count: u64,
    pub ref_length: u64,
}

impl AddAssign<&TerSegmentStats> for TerSegmentStats {
    fn add_assign(&mut self, rhs: &TerSegmentStats) {
        self.edit_count += rhs.edit_count;
        self.ref_length += rhs.ref_length;
    }
}

impl TerSegmentStats {
    /// Edits per reference token. Zero-length references give 0 edits/0 tokens -> 0.
    pub fn rate(&self) -> f64 {
        if self.ref_length == 0 {
            return 0.0;
        }
        self.edit_count as f64 / self.ref_length as f64
    }
}

/// Word-level Levenshtein distance with unit costs.
#[cfg(test)]
pub(crate) fn edit_distance<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> usize {
    let a: Vec<&str> = a.iter().map(AsRef::as_ref).collect();
    let b: Vec<&str> = b.iter().map(AsRef::as_ref).collect();
    dp_distance(&a, &b)
}

#[cfg(test)]
fn dp_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Bit-parallel global edit distance (Myers' algorithm in Hyyrö's
/// block-based form) against a fixed reference. Token ids come from
/// [`Interned`]; the reference is split into 64-row blocks.
struct BitMatcher {
    /// `peq[c * blocks + b]`: rows of block `b` where the reference holds token `c`.
    peq: Vec<u64>,
    blocks: usize,
    last_high: u64,
    m: usize,
}

/// Vertical delta vectors of one column plus the bottom-row distance.
#[derive(Debug, Clone, PartialEq)]
struct Column {
    pv: Vec<u64>,
    mv: Vec<u64>,
    score: usize,
}

impl BitMatcher {
    fn new(reference: &[u32], alphabet: usize) -> Self {
        let m = reference.len();
        let blocks = m.div_ceil(64).max(1);
        let mut peq = vec![0u64; alphabet * blocks];
        for (i, &c) in reference.iter().enumerate() {
            peq[c as usize * blocks + i / 64] |= 1 << (i % 64);
        }
        Self {
            peq,
            blocks,
            last_high: 1 << ((m.max(1) - 1) % 64),
            m,
        }
    }

    fn start(&self) -> Column {
        Column {
            pv: vec![!0; self.blocks],
            mv: vec![0; self.blocks],
            score: self.m,
        }
    }

    fn step(&self, col: &mut Column, c: u32) {
        let eqs = &self.peq[c as usize * self.blocks..(c as usize + 1) * self.blocks];
        // Global alignment: the top row grows by one per hypothesis token.
        let mut hin: i8 = 1;
        for b in 0..self.blocks {
            let (pv, mv) = (col.pv[b], col.mv[b]);
            let mut eq = eqs[b];
            let xv = eq | mv;
            if hin < 0 {
                eq |= 1;
            }
            let xh = ((eq & pv).wrapping_add(pv) ^ pv) | eq;
            let mut ph = mv | !(xh | pv);
            let mut mh = pv & xh;
            let high = if b + 1 == self.blocks { self.last_high } else { 1 << 63 };
            let hout = if ph & high != 0 {
                1
            } else if mh & high != 0 {
                -1
            } else {
                0
            };
            ph <<= 1;
            mh <<= 1;
            if hin < 0 {
                mh |= 1;
            } else if hin > 0 {
                ph |= 1;
            }
            col.pv[b] = mh | !(xv | ph);
            col.mv[b] = ph & xv;
            hin = hout;
        }
        col.score = col.score.checked_add_signed(isize::from(hin)).expect("edit distance stays non-negative");
    }
}

/// Tokens mapped to dense ids; reference tokens first, every other
/// hypothesis token shares the id `alphabet - 1`.
struct Interned {
    hyp: Vec<u32>,
    reference: Vec<u32>,
    alphabet: usize,
}

impl Interned {
    fn new(hyp: &[&str], reference: &[&str]) -> Self {
        let mut ids: HashMap<&str, u32> = HashMap::new();
        let reference: Vec<u32> = reference
            .iter()
            .map(|t| {
                let next = ids.len() as u32;
                *ids.entry(t).or_insert(next)
            })
            .collect();
        let other = ids.len() as u32;
        let hyp = hyp.iter().map(|t| ids.get(t).copied().unwrap_or(other)).collect();
        Self { hyp, reference, alphabet: other as usize + 1 }
    }
}

/// Edit distances of candidates that share a prefix with a base sequence.
struct Scorer<'m> {
    matcher: &'m BitMatcher,
    /// Column after each prefix of the base sequence.
    prefix: Vec<Column>,
    scratch: Column,
}

impl<'m> Scorer<'m> {
    fn new(base: &[u32], matcher: &'m BitMatcher) -> Self {
        let mut col = matcher.start();
        let mut prefix = Vec::with_capacity(base.len() + 1);
        prefix.push(col.clone());
        for &c in base {
            matcher.step(&mut col, c);
            prefix.push(col.clone());
        }
        Self { matcher, prefix, scratch: col }
    }

    /// Distance of `candidate`, which equals the base sequence on `..from`.
    fn distance(&mut self, candidate: &[u32], from: usize) -> usize {
        self.scratch.clone_from(&self.prefix[from]);
        for &c in &candidate[from..] {
            self.matcher.step(&mut self.scratch, c);
        }
        self.scratch.score
    }
}

/// Writes `tokens` with `tokens[start..start + len]` moved to begin at `dest` into `out`.
fn shift_into(tokens: &[u32], start: usize, len: usize, dest: usize, out: &mut Vec<u32>) {
    out.clear();
    let block = &tokens[start..start + len];
    if dest < start {
        out.extend_from_slice(&tokens[..dest]);
        out.extend_from_slice(block);
        out.extend_from_slice(&tokens[dest..start]);
        out.extend_from_slice(&tokens[start + len..]);
    } else {
        out.extend_from_slice(&tokens[..start]);
        out.extend_from_slice(&tokens[start + len..dest + len]);
        out.extend_from_slice(block);
        out.extend_from_slice(&tokens[dest + len..]);
    }
}

fn occurs_in(block: &[u32], reference: &[u32]) -> bool {
    reference.windows(block.len()).any(|w| w == block)
}

/// Node budget for exploring tied shifts; past it only the first tied shift is followed.
const TIE_EXPANSIONS: usize = 16;

struct ShiftSearch<'r> {
    reference: &'r [u32],
    matcher: BitMatcher,
    best: usize,
    seen: HashMap<Vec<u32>, usize>,
    expansions: usize,
}

impl ShiftSearch<'_> {
    /// All shifts of `current` that reach the lowest edit distance below
    /// `distance`, in enumeration order, without duplicates.
    fn best_shifts(&self, current: &[u32], distance: usize) -> (usize, Vec<Vec<u32>>) {
        let mut best_d = distance;
        let mut found: Vec<Vec<u32>> = Vec::new();
        let mut scorer = Scorer::new(current, &self.matcher);
        let n = current.len();
        let mut candidate = Vec::with_capacity(n);
        for start in 0..n {
            for len in 1..=MAX_SHIFT_SIZE.min(n - start) {
                if !occurs_in(&current[start..start + len], self.reference) {
                    // Longer blocks starting here cannot occur either.
                    break;
                }
                for dest in 0..=(n - len) {
                    if dest == start {
                        continue;
                    }
                    shift_into(current, start, len, dest, &mut candidate);
                    let d = scorer.distance(&candidate, start.min(dest));
                    if d < best_d {
                        best_d = d;
                        found.clear();
                    }
                    if d == best_d && d < distance && !found.contains(&candidate) {
                        found.push(candidate.clone());
                    }
                }
            }
        }
        (best_d, found)
    }

    fn visit(&mut self, current: Vec<u32>, distance: usize, shifts: usize) {
        self.best = self.best.min(shifts + distance);
        if distance == 0 || shifts == MAX_SHIFTS || shifts + 1 >= self.best {
            return;
        }
        if self.seen.get(&current).is_some_and(|&s| s <= shifts) {
            return;
        }
        let (d, tied) = self.best_shifts(&current, distance);
        self.seen.insert(current, shifts);
        self.expansions += 1;
        for (i, candidate) in tied.into_iter().enumerate() {
            if i > 0 && self.expansions >= TIE_EXPANSIONS {
                break;
            }
            self.visit(candidate, d, shifts + 1);
        }
    }
}

/// Edit count of `hyp` against `reference`.
///
/// Greedy shifting: each step applies a block shift that lowers the edit
/// distance the most (blocks must occur verbatim in the reference), at most
/// [`MAX_SHIFTS`] times, then adds the remaining edit distance. When several
/// shifts reach the same lowest distance they are all followed (up to a small
/// node budget) and the cheapest outcome is kept; committing to an arbitrary
/// one can strand the search in a local optimum.
pub fn ter_segment<H: AsRef<str>, R: AsRef<str>>(hyp: &[H], reference: &[R]) -> Result<TerSegmentStats> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    let hyp: Vec<&str> = hyp.iter().map(AsRef::as_ref).collect();
    let reference: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    let ids = Interned::new(&hyp, &reference);
    let matcher = BitMatcher::new(&ids.reference, ids.alphabet);
    let distance = Scorer::new(&[], &matcher).distance(&ids.hyp, 0);
    let mut search = ShiftSearch {
        reference: &ids.reference,
        matcher,
        best: distance,
        seen: HashMap::new(),
        expansions: 0,
    };
    search.visit(ids.hyp, distance, 0);
    Ok(TerSegmentStats {
        edit_count: search.best as u64,
        ref_length: reference.len() as u64,
    })
}

pub fn corpus_ter(stats: &[TerSegmentStats]) -> Result<f64> {
    if stats.is_empty() {
        return Err(Error::NoSegments);
    }
    let mut total = TerSegmentStats::default();
    for s in stats {
        total += s;
    }
    Ok(total.rate())
}
