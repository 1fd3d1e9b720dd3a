//! Certification and falsification of disjunctness and separability.
//!
//! Three tiers: the overlap certificate (instant, sufficient only), an exact
//! branch-and-bound search, and random sampling for quick falsification.

mod exact;

pub use exact::exact_check;

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binmat::{is_sorted_subset, BinaryCode};
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    CertifiedTrue,
    CertifiedFalse,
    NoViolationFound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Column `target` lies inside the union of `cover`.
    Cover { target: usize, cover: Vec<usize> },
    /// Two different supports with the same union.
    Collision { a: Vec<usize>, b: Vec<usize> },
}

impl Witness {
    /// Re-checks the witness against the code from scratch.
    pub fn replays(&self, code: &BinaryCode, d: usize) -> bool {
        let in_range = |s: &[usize]| s.iter().all(|&j| j < code.n());
        match self {
            Witness::Cover { target, cover } => {
                if *target >= code.n() || !in_range(cover) || cover.len() > d || cover.contains(target) {
                    return false;
                }
                let mut sorted = cover.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != cover.len() {
                    return false;
                }
                let y = code.superimpose(cover).expect("indices checked");
                is_sorted_subset(code.column(*target), y.rows())
            }
            Witness::Collision { a, b } => {
                if !in_range(a) || !in_range(b) || a.len() > d || b.len() > d {
                    return false;
                }
                let (mut sa, mut sb) = (a.clone(), b.clone());
                sa.sort_unstable();
                sb.sort_unstable();
                sa != sb && code.superimpose(a).unwrap() == code.superimpose(b).unwrap()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    /// Search nodes, random trials or hashed unions, depending on the check.
    pub effort: u64,
    /// Target columns covered by the verdict (exact check); `n` otherwise.
    pub targets: usize,
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        self.kind == VerdictKind::CertifiedFalse
    }
}

/// Constant weight `w` and overlap `μ` give disjunctness `⌊(w−1)/μ⌋`.
pub fn check_overlap_certificate(code: &BinaryCode, d: usize) -> Result<Verdict> {
    let w = code.uniform_weight().ok_or(Error::NonUniformWeight)?;
    let n = code.n();
    let ok = if n < 2 {
        true
    } else {
        let mu = code.max_overlap()?.mu;
        if mu == 0 {
            d < n || w > 0
        } else {
            (w.saturating_sub(1)) / mu >= d
        }
    };
    Ok(Verdict {
        kind: if ok { VerdictKind::CertifiedTrue } else { VerdictKind::NoViolationFound },
        witness: None,
        effort: 0,
        targets: n,
    })
}

/// Samples a target column and `d` distinct other columns uniformly and
/// checks whether the others cover the target.
pub fn random_check(code: &BinaryCode, d: usize, trials: u64, seed: u64) -> Result<Verdict> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let n = code.n();
    let k = d.min(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mark = vec![0u64; code.t()];
    for trial in 1..=trials {
        let target = rng.gen_range(0..n);
        let others: Vec<usize> = sample(&mut rng, n - 1, k)
            .into_iter()
            .map(|i| if i >= target { i + 1 } else { i })
            .collect();
        for &j in &others {
            for &r in code.column(j) {
                mark[r as usize] = trial;
            }
        }
        if code.column(target).iter().all(|&r| mark[r as usize] == trial) {
            let mut cover = others;
            cover.sort_unstable();
            return Ok(Verdict {
                kind: VerdictKind::CertifiedFalse,
                witness: Some(Witness::Cover { target, cover }),
                effort: trial,
                targets: n,
            });
        }
    }
    Ok(Verdict {
        kind: VerdictKind::NoViolationFound,
        witness: None,
        effort: trials,
        targets: n,
    })
}

/// Hashes the union of every support of size at most `d`, including the
/// empty one, and reports the first collision.
pub fn check_separable(code: &BinaryCode, d: usize, budget: u64) -> Result<Verdict> {
    let n = code.n();
    let total: u128 = (0..=d.min(n)).map(|i| binomial(n as u128, i as u128)).sum();
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { budget, checked: 0, total: total.min(usize::MAX as u128) as usize });
    }
    let mut seen: HashMap<Vec<u32>, Vec<usize>> = HashMap::with_capacity(total as usize);
    let mut effort = 0u64;
    let mut support = Vec::new();
    let mut found = None;
    for size in 0..=d.min(n) {
        combinations(n, size, &mut support, &mut |s| {
            effort += 1;
            let y = code.superimpose(s).expect("indices in range").rows().to_vec();
            if let Some(prev) = seen.get(&y) {
                found = Some(Witness::Collision { a: prev.clone(), b: s.to_vec() });
                return false;
            }
            seen.insert(y, s.to_vec());
            true
        });
        if found.is_some() {
            break;
        }
    }
    Ok(Verdict {
        kind: if found.is_some() { VerdictKind::CertifiedFalse } else { VerdictKind::CertifiedTrue },
        witness: found,
        effort,
        targets: n,
    })
}

/// Visits every `k`-subset of `0..n` in lexicographic order until `f`
/// returns false.
fn combinations(n: usize, k: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(n: usize, k: usize, start: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if buf.len() == k {
            return f(buf);
        }
        for i in start..=n - (k - buf.len()) {
            buf.push(i);
            let go = rec(n, k, i + 1, buf, f);
            buf.pop();
            if !go {
                return false;
            }
        }
        true
    }
    buf.clear();
    rec(n, k, 0, buf, f)
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
