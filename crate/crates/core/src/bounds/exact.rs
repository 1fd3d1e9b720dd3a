//! Exact and floating-point binomial arithmetic for the bound searches.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `ln C(n, k)` from a table of `ln k!`, with direct sums past its end.
pub struct LnFact {
    table: Vec<f64>,
}

impl LnFact {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..=max {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn ln_binom(&self, n: u64, k: u64) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        if (n as usize) < self.table.len() {
            return self.table[n as usize] - self.table[k as usize] - self.table[(n - k) as usize];
        }
        let k = k.min(n - k);
        (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
    }
}

/// Number of ordered `d`-tuples of weight-`w` columns in `[t]` that cover a
/// fixed weight-`w` set, given `i` of its entries are already covered.
///
/// With one column left the remaining `w − i` entries are forced and the
/// other `i` ones fall anywhere outside them. Otherwise the next column
/// covers `j` new entries and its other `w − j` ones avoid the still
/// uncovered `w − i − j` entries.
pub fn r_coverings(d: u32, t: u64, w: u64, i: u64) -> BigUint {
    assert!(d >= 1 && i <= w && w <= t);
    RCover::new(t, w).get(d, i)
}

pub(crate) struct RCover {
    t: u64,
    w: u64,
    memo: HashMap<(u32, u64), BigUint>,
    binoms: HashMap<(u64, u64), BigUint>,
}

impl RCover {
    pub(crate) fn new(t: u64, w: u64) -> Self {
        Self { t, w, memo: HashMap::new(), binoms: HashMap::new() }
    }

    fn c(&mut self, n: u64, k: u64) -> BigUint {
        self.binoms.entry((n, k)).or_insert_with(|| binom(n, k)).clone()
    }

    pub(crate) fn get(&mut self, d: u32, i: u64) -> BigUint {
        if let Some(v) = self.memo.get(&(d, i)) {
            return v.clone();
        }
        let (t, w) = (self.t, self.w);
        let v = if d == 1 {
            self.c(t - w + i, i)
        } else {
            let mut acc = BigUint::zero();
            for j in 0..=w - i {
                let a = self.c(w - i, j);
                let b = self.c(t - w + i, w - j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc += a * b * self.get(d - 1, i + j);
            }
            acc
        };
        self.memo.insert((d, i), v.clone());
        v
    }
}

/// `ln(R_d(t,w,0) / C(t,w)^d)`, the probability that `d` uniform weight-`w`
/// columns cover a fixed one. Each step is a hypergeometric law, so the
/// recursion stays within [0, 1].
pub fn ln_cover_prob(lf: &LnFact, d: u32, t: u64, w: u64) -> f64 {
    if w == 0 {
        return 0.0;
    }
    let w_ = w as usize;
    let ln_ctw = lf.ln_binom(t, w);
    let mut prev: Vec<f64> = (0..=w).map(|i| (lf.ln_binom(t - w + i, i) - ln_ctw).exp()).collect();
    let mut cur = vec![0.0f64; w_ + 1];
    for _ in 1..d {
        for i in 0..=w {
            // j new entries: C(w−i, j) C(t−w+i, w−j) / C(t, w)
            let mut acc = 0.0;
            for j in 0..=w - i {
                if w - j > t - w + i {
                    continue;
                }
                let ln_h = lf.ln_binom(w - i, j) + lf.ln_binom(t - w + i, w - j) - ln_ctw;
                acc += ln_h.exp() * prev[(i + j) as usize];
            }
            cur[i as usize] = acc;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[0].ln()
}

/// Rational lower and upper bounds on `e` within `1/(K!·K)`.
pub fn e_bracket(terms: u32) -> (num_rational::BigRational, num_rational::BigRational) {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for k in 0..=terms {
        if k > 0 {
            fact *= k;
        }
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    let tail = BigRational::new(BigInt::one(), fact * BigInt::from(terms));
    (sum.clone(), sum + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_sets(t: u32, w: u32) -> Vec<u32> {
        (0u32..1 << t).filter(|m| m.count_ones() == w).collect()
    }

    /// Oracle: count ordered d-tuples of weight-w masks whose union, joined
    /// with the already covered part, contains the target.
    fn brute(d: u32, t: u32, w: u32, i: u32) -> u64 {
        let sets = mask_sets(t, w);
        let target = (1u32 << w) - 1;
        let pre = (1u32 << i) - 1;
        fn go(sets: &[u32], left: u32, acc: u32, target: u32) -> u64 {
            if left == 0 {
                return (acc & target == target) as u64;
            }
            sets.iter().map(|&s| go(sets, left - 1, acc | s, target)).sum()
        }
        go(&sets, d, pre, target)
    }

    #[test]
    fn matches_enumeration() {
        for d in 1..=3 {
            for t in 1..=8u32 {
                for w in 1..=4.min(t) {
                    let max_i = if d == 3 && t > 6 { 0 } else { w };
                    for i in 0..=max_i {
                        let got = r_coverings(d, t as u64, w as u64, i as u64);
                        assert_eq!(got, BigUint::from(brute(d, t, w, i)), "d={d} t={t} w={w} i={i}");
                    }
                }
            }
        }
        assert_eq!(r_coverings(1, 5, 2, 0), BigUint::one());
        assert_eq!(r_coverings(1, 9, 4, 4), binom(9, 4));
    }

    #[test]
    fn float_probability_tracks_exact() {
        let lf = LnFact::new(2_000);
        for &(d, t, w) in &[(2u32, 40u64, 9u64), (4, 120, 20), (6, 300, 30), (3, 12, 12)] {
            let exact = r_coverings(d, t, w, 0);
            let den = binom(t, w).pow(d);
            let ln_exact = ln_big(&exact) - ln_big(&den);
            let got = ln_cover_prob(&lf, d, t, w);
            assert!((got - ln_exact).abs() < 1e-9 * ln_exact.abs().max(1.0), "{d} {t} {w}: {got} {ln_exact}");
        }
    }

    #[test]
    fn e_is_bracketed() {
        let (lo, hi) = e_bracket(20);
        use num_traits::ToPrimitive;
        assert!(lo.to_f64().unwrap() <= std::f64::consts::E && std::f64::consts::E <= hi.to_f64().unwrap());
    }
}

/// Natural log of a big integer (`-inf` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top: BigUint = x >> shift;
    let lead = top.iter_u64_digits().next().unwrap_or(0) as f64;
    lead.ln() + shift as f64 * std::f64::consts::LN_2
}
