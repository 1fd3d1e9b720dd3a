//! Random greedy construction of constant-weight codes with bounded overlap.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::binmat::{BinaryCode, CodeMeta, Provenance};
use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Reached the requested number of columns.
    Target,
    /// Used up the draw budget first.
    Budget,
}

#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    pub code: BinaryCode,
    pub stop: StopReason,
    pub draws: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct GreedyParams {
    pub t: usize,
    pub w: usize,
    pub d: usize,
    pub target_n: usize,
    pub seed: u64,
    /// Maximum number of candidate draws.
    pub max_draws: u64,
}

/// Draws weight-`w` candidates uniformly from `[t] choose w` and keeps each
/// one whose overlap with every kept column is at most `⌊(w−1)/d⌋`.
pub fn greedy_construct(p: GreedyParams) -> Result<GreedyOutcome> {
    if p.w == 0 || p.w > p.t {
        return Err(Error::InvalidParams(format!("need 1 <= w <= t, got w = {}, t = {}", p.w, p.t)));
    }
    if p.d == 0 {
        return Err(Error::InvalidParams("d must be at least 1".into()));
    }
    let mu = (p.w - 1) / p.d;
    let mut guard = OverlapGuard::new(p.t, p.w, mu);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut columns = Vec::new();
    let (stop, draws) = run(&mut guard, &mut columns, p.t, p.w, p.target_n, p.max_draws, &mut rng);
    let n = columns.len();
    if n == 0 {
        return Err(Error::Degenerate("greedy search kept no columns".into()));
    }
    let meta = CodeMeta {
        certified_d: Some(if mu == 0 { (n - 1) as u32 } else { p.d as u32 }),
        weight: Some(p.w as u32),
        max_overlap: (n >= 2).then_some(mu as u32),
        descriptor: format!("greedy(t={},w={},d={},seed={})", p.t, p.w, p.d, p.seed),
        provenance: Provenance::Overlap,
        separable_1: false,
    };
    let code = BinaryCode::new(p.t, columns, meta)?;
    Ok(GreedyOutcome { code, stop, draws })
}

/// Runs [`greedy_construct`] for each weight in `ws` and keeps the largest
/// code; the first weight to reach the target wins and ends the sweep.
/// Every weight gets the full draw budget and the same seed.
pub fn greedy_w_sweep(p: GreedyParams, ws: &[usize]) -> Result<(usize, GreedyOutcome)> {
    let mut best: Option<(usize, GreedyOutcome)> = None;
    for &w in ws {
        let out = match greedy_construct(GreedyParams { w, ..p }) {
            Ok(o) => o,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let done = out.stop == StopReason::Target;
        if best.as_ref().map_or(true, |(_, b)| out.code.n() > b.code.n()) {
            best = Some((w, out));
        }
        if done {
            break;
        }
    }
    best.ok_or_else(|| Error::Degenerate("no weight in the sweep kept a column".into()))
}

/// Appends random weight-`w` columns that keep every pairwise overlap within
/// the code's recorded overlap bound.
pub fn extend_greedy(code: &BinaryCode, target_n: usize, seed: u64, max_draws: u64) -> Result<GreedyOutcome> {
    let w = code.uniform_weight().ok_or(Error::NonUniformWeight)?;
    let mu = match code.meta().max_overlap {
        Some(mu) => mu as usize,
        None => code.max_overlap()?.mu,
    };
    let t = code.t();
    let mut guard = OverlapGuard::new(t, w, mu);
    let mut columns = code.columns().to_vec();
    for c in &columns {
        guard.insert(c);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (stop, draws) = if columns.len() >= target_n {
        (StopReason::Target, 0)
    } else {
        run(&mut guard, &mut columns, t, w, target_n, max_draws, &mut rng)
    };
    let mut meta = code.meta().clone();
    let added = columns.len() - code.n();
    if added > 0 {
        // New columns are only guaranteed the overlap bound, not whatever
        // argument certified the original columns.
        let n = columns.len() as u32;
        let bound = if mu == 0 { n - 1 } else { (w as u32 - 1) / mu as u32 };
        meta.certified_d = Some(meta.certified_d.map_or(bound, |d| d.min(bound)));
        if meta.provenance == Provenance::None {
            meta.provenance = Provenance::Overlap;
        }
        meta.max_overlap = Some(mu as u32);
        meta.descriptor = extend_descriptor(&meta.descriptor);
    }
    let code = BinaryCode::new(t, columns, meta)?;
    Ok(GreedyOutcome { code, stop, draws })
}

fn extend_descriptor(desc: &str) -> String {
    if desc.contains('^') {
        format!("{desc},x")
    } else {
        format!("{desc}^x")
    }
}

fn run(
    guard: &mut OverlapGuard,
    columns: &mut Vec<Vec<u32>>,
    t: usize,
    w: usize,
    target_n: usize,
    max_draws: u64,
    rng: &mut ChaCha8Rng,
) -> (StopReason, u64) {
    let mut draws = 0;
    while columns.len() < target_n {
        if draws >= max_draws {
            return (StopReason::Budget, draws);
        }
        draws += 1;
        let mut cand: Vec<u32> = sample(rng, t, w).into_iter().map(|r| r as u32).collect();
        cand.sort_unstable();
        if guard.admits(&cand) {
            guard.insert(&cand);
            columns.push(cand);
        }
    }
    (StopReason::Target, draws)
}

/// Tracks accepted columns and answers "does this candidate overlap any of
/// them in more than `mu` rows".
///
/// For short codes with few `(mu+1)`-subsets per column the guard hashes
/// every such subset, so a candidate is rejected exactly when it shares one.
/// Otherwise it scans the kept columns pairwise.
pub(crate) struct OverlapGuard {
    mu: usize,
    mode: GuardMode,
}

enum GuardMode {
    Subsets(HashSet<u128>),
    Narrow(Vec<u128>),
    Wide { t: usize, cols: Vec<BitVec> },
}

const SUBSET_LIMIT: u128 = 600;

impl OverlapGuard {
    pub(crate) fn new(t: usize, w: usize, mu: usize) -> Self {
        // Overlap w would allow duplicate columns.
        let mu = mu.min(w.saturating_sub(1));
        let mode = if t <= 128 {
            if binomial(w as u128, mu as u128 + 1) <= SUBSET_LIMIT {
                GuardMode::Subsets(HashSet::new())
            } else {
                GuardMode::Narrow(Vec::new())
            }
        } else {
            GuardMode::Wide { t, cols: Vec::new() }
        };
        Self { mu, mode }
    }

    pub(crate) fn admits(&self, col: &[u32]) -> bool {
        match &self.mode {
            GuardMode::Subsets(set) => {
                let mut ok = true;
                for_each_subset(col, self.mu + 1, &mut |m| {
                    if set.contains(&m) {
                        ok = false;
                    }
                    ok
                });
                ok
            }
            GuardMode::Narrow(cols) => {
                let m = mask(col);
                cols.iter().all(|&c| (c & m).count_ones() as usize <= self.mu)
            }
            GuardMode::Wide { t, cols } => {
                let v = BitVec::from_indices(*t, col.iter().map(|&r| r as usize));
                cols.iter().all(|c| c.intersection_count(&v) <= self.mu)
            }
        }
    }

    pub(crate) fn insert(&mut self, col: &[u32]) {
        let k = self.mu + 1;
        match &mut self.mode {
            GuardMode::Subsets(set) => for_each_subset(col, k, &mut |m| {
                set.insert(m);
                true
            }),
            GuardMode::Narrow(cols) => cols.push(mask(col)),
            GuardMode::Wide { t, cols } => {
                cols.push(BitVec::from_indices(*t, col.iter().map(|&r| r as usize)))
            }
        }
    }
}

fn mask(col: &[u32]) -> u128 {
    col.iter().fold(0u128, |m, &r| m | 1u128 << r)
}

/// Calls `f` on the bitmask of every `k`-subset of `col` until it returns
/// false.
fn for_each_subset(col: &[u32], k: usize, f: &mut dyn FnMut(u128) -> bool) {
    fn rec(col: &[u32], k: usize, start: usize, acc: u128, f: &mut dyn FnMut(u128) -> bool) -> bool {
        if k == 0 {
            return f(acc);
        }
        for i in start..=col.len() - k {
            if !rec(col, k - 1, i + 1, acc | 1u128 << col[i], f) {
                return false;
            }
        }
        true
    }
    if k <= col.len() {
        rec(col, k, 0, 0, f);
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::inner_affine_lines;

    fn params(t: usize, w: usize, d: usize, target_n: usize, seed: u64, max_draws: u64) -> GreedyParams {
        GreedyParams { t, w, d, target_n, seed, max_draws }
    }

    /// Oracle: largest family of 3-subsets of [9] with pairwise overlap ≤ 1,
    /// by exhaustive backtracking.
    fn max_packing_9_3() -> usize {
        let mut cands = Vec::new();
        for a in 0..9u32 {
            for b in a + 1..9 {
                for c in b + 1..9 {
                    cands.push(1u16 << a | 1 << b | 1 << c);
                }
            }
        }
        fn rec(cands: &[u16], start: usize, chosen: &mut Vec<u16>, best: &mut usize) {
            *best = (*best).max(chosen.len());
            if chosen.len() + (cands.len() - start) <= *best {
                return;
            }
            for i in start..cands.len() {
                if chosen.iter().all(|&c| (c & cands[i]).count_ones() <= 1) {
                    chosen.push(cands[i]);
                    rec(cands, i + 1, chosen, best);
                    chosen.pop();
                }
            }
        }
        let mut best = 0;
        rec(&cands, 0, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn nine_three_two() {
        assert_eq!(max_packing_9_3(), 12);
        for seed in 0..5 {
            let out = greedy_construct(params(9, 3, 2, 12, seed, 1_000_000)).unwrap();
            assert!(out.code.n() >= 9, "seed {seed}: {}", out.code.n());
            assert!(out.code.max_overlap().unwrap().mu <= 1);
        }
    }

    #[test]
    fn saturated_weight_gives_one_column() {
        let out = greedy_construct(params(5, 5, 2, 10, 1, 1000)).unwrap();
        assert_eq!(out.code.n(), 1);
        assert_eq!(out.stop, StopReason::Budget);
    }

    #[test]
    fn deterministic_and_overlap_bounded_all_modes() {
        // Subset hashing, narrow pairwise and wide pairwise guards.
        for (t, w, d) in [(40, 6, 2), (60, 24, 2), (150, 9, 2)] {
            let p = params(t, w, d, 300, 42, 20_000);
            let a = greedy_construct(p).unwrap();
            let b = greedy_construct(p).unwrap();
            assert_eq!(a.code, b.code);
            let mu = a.code.max_overlap().unwrap().mu;
            assert!(mu <= (w - 1) / d, "t = {t}: mu = {mu}");
        }
    }

    #[test]
    fn affine_lines_cannot_be_extended() {
        let lines = inner_affine_lines(3).unwrap();
        let mut guard = OverlapGuard::new(9, 3, 1);
        for c in lines.columns() {
            guard.insert(c);
        }
        let mut admitted = 0;
        for a in 0..9u32 {
            for b in a + 1..9 {
                for c in b + 1..9 {
                    admitted += guard.admits(&[a, b, c]) as usize;
                }
            }
        }
        assert_eq!(admitted, 0);
        let out = extend_greedy(&lines, 13, 3, 10_000).unwrap();
        assert_eq!(out.code.n(), 12);
        assert_eq!(extend_greedy(&lines, 12, 3, 10).unwrap().draws, 0);
    }

    #[test]
    fn extension_keeps_overlap_bound() {
        let base = greedy_construct(params(30, 5, 2, 40, 9, 100_000)).unwrap().code;
        let out = extend_greedy(&base, 60, 11, 200_000).unwrap();
        assert!(out.code.n() > 40);
        assert_eq!(&out.code.columns()[..40], base.columns());
        assert!(out.code.max_overlap().unwrap().mu <= 2);
    }

    #[test]
    fn w_sweep_keeps_best() {
        let (w, out) = greedy_w_sweep(params(20, 0, 2, 10_000, 3, 20_000), &[2, 3, 5, 20]).unwrap();
        let single = |w| greedy_construct(params(20, w, 2, 10_000, 3, 20_000)).unwrap().code.n();
        let best = [2, 3, 5, 20].into_iter().map(single).max().unwrap();
        assert_eq!(out.code.n(), best);
        assert_eq!(single(w), best);
        let (w, out) = greedy_w_sweep(params(20, 0, 2, 5, 3, 20_000), &[3, 5]).unwrap();
        assert_eq!((w, out.stop), (3, StopReason::Target));
    }
}
