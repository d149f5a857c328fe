//! Independent reference implementations used as test oracles.
//!
//! Everything here is written straight from the definitions, without calling
//! into the library except for data types, so agreement is meaningful.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, VecDeque};

use mtpairs::data_model::{Campaign, Collection, MetricScores};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

// ---------------------------------------------------------------- ranks

/// 1-based ranks with ties sharing the mean position, counted pairwise.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            let below = xs.iter().filter(|y| *y < x).count() as f64;
            let equal = xs.iter().filter(|y| *y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

// ---------------------------------------------------------------- Wilcoxon

/// Exact two-sided signed-rank p by enumerating all 2^n sign assignments
/// (zeros dropped). Ranks are doubled so tied (half-integer) ranks compare exactly.
pub fn wilcoxon_brute_force(diffs: &[f64]) -> f64 {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nz.len();
    if n == 0 {
        return 1.0;
    }
    let abs: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
    let doubled: Vec<u64> = ranks(&abs).iter().map(|r| (2.0 * r) as u64).collect();
    let observed: u64 = nz.iter().zip(&doubled).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: u64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| doubled[i]).sum();
        le += u64::from(w <= observed);
        ge += u64::from(w >= observed);
    }
    (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
}

/// Runs `p_value` on every sign pattern of `magnitudes` (all nonzero) and
/// compares with the brute-force null distribution of the same magnitudes.
/// Returns (patterns checked, largest absolute difference).
pub fn sign_pattern_sweep(magnitudes: &[f64], p_value: impl Fn(&[f64]) -> f64) -> (usize, f64) {
    let n = magnitudes.len();
    let doubled: Vec<u64> = ranks(magnitudes).iter().map(|r| (2.0 * r) as u64).collect();
    let w_of = |mask: u64| -> u64 { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| doubled[i]).sum() };
    let mut null: Vec<u64> = (0u64..(1 << n)).map(w_of).collect();
    null.sort_unstable();
    let mut worst = 0.0f64;
    for mask in 0u64..(1 << n) {
        let w = w_of(mask);
        let le = null.partition_point(|x| *x <= w) as u64;
        let ge = (null.len() - null.partition_point(|x| *x < w)) as u64;
        let want = (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0);
        let diffs: Vec<f64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { magnitudes[i] } else { -magnitudes[i] })
            .collect();
        worst = worst.max((p_value(&diffs) - want).abs());
    }
    (1 << n, worst)
}

/// Two-sided signed-rank p: exact (polynomial expansion of the null
/// distribution) up to `exact_max_n` nonzero differences, otherwise the normal
/// approximation with tie-corrected variance and continuity correction.
pub fn wilcoxon_oracle(diffs: &[f64], exact_max_n: usize) -> f64 {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nz.len();
    if n == 0 {
        return 1.0;
    }
    let abs: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
    let r = ranks(&abs);
    let w_plus: f64 = nz.iter().zip(&r).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    if n <= exact_max_n {
        // generating function prod_i (1 + x^{2 r_i})
        let mut poly: Vec<u128> = vec![1];
        for ri in &r {
            let k = (2.0 * ri) as usize;
            let mut next = vec![0u128; poly.len() + k];
            for (e, c) in poly.iter().enumerate() {
                next[e] += c;
                next[e + k] += c;
            }
            poly = next;
        }
        let w = (2.0 * w_plus) as usize;
        let le: u128 = poly.iter().take(w + 1).sum();
        let ge: u128 = poly.iter().skip(w).sum();
        return (2.0 * le.min(ge) as f64 / (1u128 << n) as f64).min(1.0);
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    // n(n+1)(2n+1)/24 minus the tie correction sum(t^3 - t)/48
    let mut groups: BTreeMap<u64, f64> = BTreeMap::new();
    for a in &abs {
        *groups.entry(a.to_bits()).or_default() += 1.0;
    }
    let ties: f64 = groups.values().map(|t| t * t * t - t).sum();
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let dev = ((w_plus - mean).abs() - 0.5).max(0.0);
    erfc(dev / var.sqrt() / std::f64::consts::SQRT_2).min(1.0)
}

// ---------------------------------------------------------------- correlations

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&ranks(x), &ranks(y))
}

// ---------------------------------------------------------------- resampling

/// Index stream of one resample: ChaCha8 seeded with `seed`, stream `resample`,
/// `n` uniform draws from 0..n.
pub fn draw(seed: u64, resample: usize, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(resample as u64);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Paired bootstrap over segment-mean scores, two-sided p with ties counted
/// for neither side. Returns (p, wins_a, wins_b, ties).
pub fn bootstrap_mean_test(a: &[f64], b: &[f64], seed: u64, resamples: usize) -> (f64, usize, usize, usize) {
    let (mut wa, mut wb, mut t) = (0, 0, 0);
    for r in 0..resamples {
        let idx = draw(seed, r, a.len());
        let mut sa = 0.0;
        let mut sb = 0.0;
        for &i in &idx {
            sa += a[i];
            sb += b[i];
        }
        let (sa, sb) = (sa / idx.len() as f64, sb / idx.len() as f64);
        if sa > sb {
            wa += 1;
        } else if sb > sa {
            wb += 1;
        } else {
            t += 1;
        }
    }
    let p = (2 * wa.min(wb) + t).min(resamples) as f64 / resamples as f64;
    (p, wa, wb, t)
}

// ---------------------------------------------------------------- pair analysis

/// One system pair as the oracle sees it.
#[derive(Debug, Clone)]
pub struct OraclePair {
    pub campaign: String,
    pub a: String,
    pub b: String,
    pub source: String,
    pub target: String,
    pub human_delta: f64,
    pub human_p: f64,
    pub metric_deltas: BTreeMap<String, f64>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Per-unit differences under annotator-aware matching: a segment judged by
/// the same annotator for both systems yields one unit per shared annotator;
/// a segment judged for both but by disjoint annotators yields one unit
/// (difference of segment means).
pub fn matched_diffs(c: &Campaign, a: &str, b: &str) -> Vec<f64> {
    let mut seg_order: Vec<String> = c.segments.iter().map(|s| s.segment_id.clone()).collect();
    for j in &c.judgements {
        if !seg_order.contains(&j.segment_id) {
            seg_order.push(j.segment_id.clone());
        }
    }
    let mut out = Vec::new();
    for seg in seg_order {
        let of = |sys: &str| -> Vec<(&str, f64)> {
            c.judgements
                .iter()
                .filter(|j| j.system_id == sys && j.segment_id == seg)
                .map(|j| (j.annotator_id.as_str(), j.score))
                .collect()
        };
        let ja = of(a);
        let jb = of(b);
        if ja.is_empty() || jb.is_empty() {
            continue;
        }
        let mut annotators: Vec<&str> = ja.iter().map(|x| x.0).filter(|x| jb.iter().any(|y| y.0 == *x)).collect();
        annotators.sort_unstable();
        annotators.dedup();
        if annotators.is_empty() {
            let ma: Vec<f64> = ja.iter().map(|x| x.1).collect();
            let mb: Vec<f64> = jb.iter().map(|x| x.1).collect();
            out.push(mean(&ma) - mean(&mb));
        } else {
            for ann in annotators {
                let ma: Vec<f64> = ja.iter().filter(|x| x.0 == ann).map(|x| x.1).collect();
                let mb: Vec<f64> = jb.iter().filter(|x| x.0 == ann).map(|x| x.1).collect();
                out.push(mean(&ma) - mean(&mb));
            }
        }
    }
    out
}

fn system_level(c: &Campaign, metric: &str, system: &str) -> Option<f64> {
    let set = c.metric_scores.iter().find(|s| s.metric_name == metric)?;
    match &set.scores {
        MetricScores::System(m) => m.get(system).copied(),
        MetricScores::Segment(m) => {
            let v: Vec<f64> = m.get(system)?.values().copied().collect();
            (!v.is_empty()).then(|| mean(&v))
        }
    }
}

/// All pairs of all judged campaigns, systems in lexicographic order.
pub fn oracle_pairs(collection: &Collection, metrics: &[&str]) -> Vec<OraclePair> {
    let mut out = Vec::new();
    for c in &collection.campaigns {
        if c.judgements.is_empty() {
            continue;
        }
        let mut systems: Vec<String> = c.judgements.iter().map(|j| j.system_id.clone()).collect();
        systems.extend(c.outputs.iter().map(|o| o.system_id.clone()));
        systems.sort();
        systems.dedup();
        for i in 0..systems.len() {
            for k in i + 1..systems.len() {
                let (a, b) = (&systems[i], &systems[k]);
                let human = |s: &str| -> f64 {
                    let v: Vec<f64> = c.judgements.iter().filter(|j| j.system_id == s).map(|j| j.score).collect();
                    mean(&v)
                };
                let mut metric_deltas = BTreeMap::new();
                for m in metrics {
                    if let (Some(x), Some(y)) = (system_level(c, m, a), system_level(c, m, b)) {
                        metric_deltas.insert((*m).to_owned(), x - y);
                    }
                }
                out.push(OraclePair {
                    campaign: c.campaign_id.clone(),
                    a: a.clone(),
                    b: b.clone(),
                    source: c.language_pair.source.clone(),
                    target: c.language_pair.target.clone(),
                    human_delta: human(a) - human(b),
                    human_p: wilcoxon_oracle(&matched_diffs(c, a, b), 25),
                    metric_deltas,
                });
            }
        }
    }
    out
}

pub fn sign(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// (scored pairs, agreeing pairs) of `metric` over the pairs accepted by `keep`.
pub fn agreement(pairs: &[OraclePair], metric: &str, keep: impl Fn(&OraclePair) -> bool) -> (usize, usize) {
    let mut n = 0;
    let mut k = 0;
    for p in pairs.iter().filter(|p| keep(p)) {
        if let Some(d) = p.metric_deltas.get(metric) {
            n += 1;
            if sign(*d) == sign(p.human_delta) {
                k += 1;
            }
        }
    }
    (n, k)
}

/// Segment-level scores of `system` in campaign segment order.
pub fn segment_scores(c: &Campaign, metric: &str, system: &str) -> Option<Vec<f64>> {
    let set = c.metric_scores.iter().find(|s| s.metric_name == metric)?;
    match &set.scores {
        MetricScores::Segment(m) => {
            let per = m.get(system)?;
            c.segments.iter().map(|s| per.get(&s.segment_id).copied()).collect()
        }
        MetricScores::System(_) => None,
    }
}

/// Quadrant counts (truly differing, type I, type II, equal quality) with
/// metric significance from [`bootstrap_mean_test`].
pub fn quadrant_counts(
    collection: &Collection,
    pairs: &[OraclePair],
    metric: &str,
    human_alpha: f64,
    metric_alpha: f64,
    seed: u64,
    resamples: usize,
) -> [usize; 4] {
    let mut q = [0; 4];
    for p in pairs {
        let c = collection.campaigns.iter().find(|c| c.campaign_id == p.campaign).unwrap();
        let (Some(sa), Some(sb)) = (segment_scores(c, metric, &p.a), segment_scores(c, metric, &p.b)) else {
            continue;
        };
        if !p.metric_deltas.contains_key(metric) {
            continue;
        }
        let metric_sig = bootstrap_mean_test(&sa, &sb, seed, resamples).0 <= metric_alpha;
        let human_sig = p.human_p <= human_alpha;
        let slot = match (human_sig, metric_sig) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (false, false) => 3,
        };
        q[slot] += 1;
    }
    q
}

// ---------------------------------------------------------------- text metrics

fn ngrams<T: Clone + std::hash::Hash + Eq>(xs: &[T], n: usize) -> HashMap<Vec<T>, u64> {
    let mut m = HashMap::new();
    for i in 0..xs.len().saturating_sub(n - 1) {
        if i + n <= xs.len() {
            *m.entry(xs[i..i + n].to_vec()).or_insert(0) += 1;
        }
    }
    m
}

fn clipped<T: Clone + std::hash::Hash + Eq>(h: &HashMap<Vec<T>, u64>, r: &HashMap<Vec<T>, u64>) -> u64 {
    h.iter().map(|(g, c)| (*c).min(*r.get(g).unwrap_or(&0))).sum()
}

/// Corpus BLEU straight from token lists (orders without hypothesis n-grams skipped).
pub fn corpus_bleu_direct(pairs: &[(Vec<String>, Vec<String>)]) -> f64 {
    let mut m = [0u64; 4];
    let mut t = [0u64; 4];
    let (mut hl, mut rl) = (0u64, 0u64);
    for (h, r) in pairs {
        hl += h.len() as u64;
        rl += r.len() as u64;
        for n in 1..=4 {
            let hg = ngrams(h, n);
            m[n - 1] += clipped(&hg, &ngrams(r, n));
            t[n - 1] += hg.values().sum::<u64>();
        }
    }
    if hl == 0 {
        return 0.0;
    }
    let mut logs = 0.0;
    let mut k = 0;
    for n in 0..4 {
        if t[n] == 0 {
            continue;
        }
        if m[n] == 0 {
            return 0.0;
        }
        logs += (m[n] as f64 / t[n] as f64).ln();
        k += 1;
    }
    let bp = if hl < rl { (1.0 - rl as f64 / hl as f64).exp() } else { 1.0 };
    100.0 * bp * (logs / k as f64).exp()
}

/// Corpus chrF (beta 2, orders 1..=6, whitespace ignored) straight from text.
pub fn corpus_chrf_direct(pairs: &[(&str, &str)]) -> f64 {
    let mut m = [0u64; 6];
    let mut th = [0u64; 6];
    let mut tr = [0u64; 6];
    for (h, r) in pairs {
        let h: Vec<char> = h.chars().filter(|c| !c.is_whitespace()).collect();
        let r: Vec<char> = r.chars().filter(|c| !c.is_whitespace()).collect();
        for n in 1..=6 {
            let hg = ngrams(&h, n);
            let rg = ngrams(&r, n);
            m[n - 1] += clipped(&hg, &rg);
            th[n - 1] += hg.values().sum::<u64>();
            tr[n - 1] += rg.values().sum::<u64>();
        }
    }
    let (mut p, mut rc, mut k) = (0.0, 0.0, 0);
    for n in 0..6 {
        if th[n] == 0 && tr[n] == 0 {
            continue;
        }
        if th[n] > 0 {
            p += m[n] as f64 / th[n] as f64;
        }
        if tr[n] > 0 {
            rc += m[n] as f64 / tr[n] as f64;
        }
        k += 1;
    }
    if k == 0 {
        return 0.0;
    }
    p /= k as f64;
    rc /= k as f64;
    let b2 = 4.0;
    if b2 * p + rc == 0.0 {
        return 0.0;
    }
    100.0 * (1.0 + b2) * p * rc / (b2 * p + rc)
}

// ---------------------------------------------------------------- TER

pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

fn occurs_in(block: &[u8], reference: &[u8]) -> bool {
    reference.windows(block.len()).any(|w| w == block)
}

/// Every block move of `s`: block [i, i+len) re-inserted at position `to` of the remainder.
/// With `reference`, only blocks that occur verbatim in it may move.
pub fn shifts(s: &[u8], reference: Option<&[u8]>) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for i in 0..s.len() {
        for len in 1..=s.len() - i {
            let block = &s[i..i + len];
            if reference.is_some_and(|r| !occurs_in(block, r)) {
                continue;
            }
            let mut rest = s[..i].to_vec();
            rest.extend_from_slice(&s[i + len..]);
            for to in 0..=rest.len() {
                if to == i {
                    continue;
                }
                let mut v = rest[..to].to_vec();
                v.extend_from_slice(block);
                v.extend_from_slice(&rest[to..]);
                out.push(v);
            }
        }
    }
    out
}

/// min over shift sequences of (#shifts + Levenshtein(shifted hypothesis, reference)).
pub fn exhaustive_ter_edits(hyp: &[u8], reference: &[u8], ter_shifts_only: bool) -> usize {
    let mut depth: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    depth.insert(hyp.to_vec(), 0);
    queue.push_back(hyp.to_vec());
    let mut best = usize::MAX;
    while let Some(s) = queue.pop_front() {
        let d = depth[&s];
        best = best.min(d + levenshtein(&s, reference));
        if d + 1 >= best {
            continue;
        }
        for t in shifts(&s, ter_shifts_only.then_some(reference)) {
            if !depth.contains_key(&t) {
                depth.insert(t.clone(), d + 1);
                queue.push_back(t);
            }
        }
    }
    best
}

pub fn letters(s: &[u8]) -> Vec<String> {
    s.iter().map(|c| ((b'a' + c) as char).to_string()).collect()
}

/// Random (hypothesis, reference) over a small alphabet, combined length 2..=8.
pub fn random_ter_case(rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>) {
    let total = rng.random_range(2..=8usize);
    let ref_len = rng.random_range(1..=total);
    let vocab = rng.random_range(2..=5u8);
    let reference: Vec<u8> = (0..ref_len).map(|_| rng.random_range(0..vocab)).collect();
    let hyp: Vec<u8> = (0..total - ref_len).map(|_| rng.random_range(0..vocab)).collect();
    (hyp, reference)
}
