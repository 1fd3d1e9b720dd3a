use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::exact::{binom, e_bracket, ln_big, ln_cover_prob, LnFact, RCover};
use super::search::min_feasible;
use super::{BoundResult, Optimizer, Row};
use crate::error::{Error, Result};

/// Float margins within this distance of zero are decided exactly.
const GUARD: f64 = 1e-7;
const M_SPAN: u64 = 32;
const LN_TABLE: usize = 1 << 17;

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg.into()))
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.filter(|x| x.is_finite()).collect();
    let Some(max) = v.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn overlap_from(w: u64, d: u32) -> u64 {
    w.div_ceil(d as u64)
}

/// `Σ_{i=⌈w/d⌉}^{w} C(w,i) C(t−w,w−i)`: weight-`w` sets meeting a fixed one
/// in at least `w/d` places.
pub fn overlap_count(t: u64, w: u64, d: u32) -> BigUint {
    (overlap_from(w, d)..=w).map(|i| binom(w, i) * binom(t - w, w - i)).sum()
}

fn ln_overlap_count(lf: &LnFact, t: u64, w: u64, d: u32) -> f64 {
    log_sum_exp((overlap_from(w, d)..=w).map(|i| lf.ln_binom(w, i) + lf.ln_binom(t - w, w - i)))
}

/// Information bound: `⌈log₂ Σ_{i≤d} C(n,i)⌉`.
pub fn lb_info(n: u64, d: u32) -> Result<BoundResult> {
    need(d as u64 <= n, "need d <= n")?;
    let s: BigUint = (0..=d as u64).map(|i| binom(n, i)).sum();
    let v = (s - BigUint::one()).bits();
    Ok(BoundResult::computed(Row::T, n, d, v, Optimizer::default()))
}

/// `⌊16 d² log₃2 (log₂ n − 1)⌋`.
pub fn ub_hwang_sos(n: u64, d: u32) -> Result<BoundResult> {
    need(n >= 2, "need n >= 2")?;
    let x = 16.0 * (d as f64).powi(2) * (2f64.ln() / 3f64.ln()) * ((n as f64).log2() - 1.0);
    let mut r = BoundResult::computed(Row::A, n, d, x.floor() as u64, Optimizer::default());
    if (x - x.round()).abs() < 1e-9 && x.round() != 0.0 {
        r.note = Some("value lies within 1e-9 of an integer; floor is float-limited".into());
    }
    Ok(r)
}

fn bernoulli_ratio(d: u32) -> (BigUint, BigUint) {
    let b = big(d as u64 + 1).pow(d + 1);
    let a = &b - big(d as u64).pow(d);
    (a, b)
}

/// Bernoulli ensemble with `β = 1/(d+1)` under the union bound.
pub fn ub_bernoulli(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1 && (d as u64) < n, "need 1 <= d < n")?;
    let big_n = big(n) * binom(n - 1, d as u64);
    let (a, b) = bernoulli_ratio(d);
    // Largest k with N a^k >= b^k; the bound is k + 1.
    let per = ln_big(&b) - ln_big(&a);
    let mut k = ((ln_big(&big_n) / per).floor() as u64).saturating_sub(1);
    let holds = |k: u64| &big_n * a.pow(k as u32) >= b.pow(k as u32);
    while holds(k + 1) {
        k += 1;
    }
    while k > 0 && !holds(k) {
        k -= 1;
    }
    let opt = Optimizer { beta: Some((1, d as u64 + 1)), ..Optimizer::default() };
    Ok(BoundResult::computed(Row::D, n, d, k + 1, opt))
}

/// The closed form as printed, in floating point.
pub fn ub_bernoulli_closed_form(n: u64, d: u32) -> f64 {
    let lf = LnFact::new(0);
    let ln_n = (n as f64).ln() + lf.ln_binom(n - 1, d as u64);
    let dd = d as f64;
    (1.0 - ln_n / (1.0 - dd.powf(dd) / (dd + 1.0).powf(dd + 1.0)).ln()).floor()
}

fn search_row(
    row: Row,
    n: u64,
    d: u32,
    pred: impl FnMut(u64) -> Option<Optimizer>,
) -> Result<BoundResult> {
    if n <= 1 {
        let mut r = BoundResult::computed(row, n, d, 1, Optimizer::default());
        r.note = Some("single column".into());
        return Ok(r);
    }
    let (t, opt, trace) = min_feasible(pred)?;
    let mut r = BoundResult::computed(row, n, d, t, opt);
    r.trace = trace;
    Ok(r)
}

/// Sequential picking: smallest `t` with `C(t,w) ≥ n Σ_{i≥⌈w/d⌉} C(w,i)C(t−w,w−i)`.
pub fn ub_sequential(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1, "need d >= 1")?;
    let lf = LnFact::new(LN_TABLE);
    let ln_n = (n as f64).ln();
    search_row(Row::C, n, d, |t| {
        (1..=t).find_map(|w| {
            let margin = ln_n + ln_overlap_count(&lf, t, w, d) - lf.ln_binom(t, w);
            (margin <= GUARD && sequential_holds(n, d, t, w)).then(|| Optimizer::w(w))
        })
    })
}

fn sequential_holds(n: u64, d: u32, t: u64, w: u64) -> bool {
    binom(t, w) >= big(n) * overlap_count(t, w, d)
}

/// Constant-weight ensemble under the union bound over `(column, d-set)`.
pub fn ub_cw_group(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1 && (d as u64) < n, "need 1 <= d < n")?;
    let lf = LnFact::new(LN_TABLE);
    let base = (n as f64).ln() + lf.ln_binom(n - 1, d as u64);
    search_row(Row::E, n, d, |t| {
        (1..=t).find_map(|w| {
            let margin = base + ln_cover_prob(&lf, d, t, w);
            (margin < GUARD && cw_group_holds(n, d, t, w)).then(|| Optimizer::w(w))
        })
    })
}

fn cw_group_holds(n: u64, d: u32, t: u64, w: u64) -> bool {
    let r = RCover::new(t, w).get(d, 0);
    big(n) * binom(n - 1, d as u64) * r < binom(t, w).pow(d)
}

/// Dependency count for the local lemma: events sharing a column.
pub fn lll_dependencies(n: u64, d: u32) -> BigUint {
    let k = d as u64 + 1;
    let far = if n >= 2 * k { binom(n - k, k) } else { BigUint::zero() };
    big(k) * (binom(n, k) - far)
}

/// Constant-weight ensemble under the symmetric local lemma.
pub fn ub_cw_lll(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1 && n > 2 * (d as u64 + 1), "need d >= 1 and n > 2(d+1)")?;
    let lf = LnFact::new(LN_TABLE);
    let mu1 = lll_dependencies(n, d) + BigUint::one();
    let base = 1.0 + ln_big(&mu1);
    search_row(Row::F, n, d, |t| {
        (1..=t).find_map(|w| {
            let margin = base + ln_cover_prob(&lf, d, t, w);
            (margin <= GUARD && lll_holds(&mu1, d, t, w)).then(|| Optimizer::w(w))
        })
    })
}

/// `e · R · (μ+1) ≤ C(t,w)^d`, deciding `e` by rational brackets.
fn lll_holds(mu1: &BigUint, d: u32, t: u64, w: u64) -> bool {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let x = BigInt::from(RCover::new(t, w).get(d, 0) * mu1);
    let y = BigRational::from_integer(BigInt::from(binom(t, w).pow(d)));
    let mut terms = 30;
    loop {
        let (lo, hi) = e_bracket(terms);
        if hi * &x <= y {
            return true;
        }
        if lo * &x > y {
            return false;
        }
        terms *= 2;
    }
}

/// First `m` in `[n, 32n]` where `step(m) ≥ 0`, with `step` increasing;
/// the flag is set when no such `m` exists below the cap.
fn first_m(n: u64, step: impl Fn(u64) -> f64) -> (u64, bool) {
    let (mut lo, mut hi) = (n, M_SPAN * n);
    if step(lo) >= 0.0 {
        return (lo, false);
    }
    if step(hi) < 0.0 {
        return (hi, true);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if step(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, false)
}

fn m_candidates(n: u64, m: u64) -> impl Iterator<Item = u64> {
    [m.saturating_sub(1), m, m + 1].into_iter().filter(move |&x| x >= n && x <= M_SPAN * n)
}

/// Bernoulli ensemble of `m ≥ n` columns, deleting every covered column.
pub fn ub_bern_delete(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1 && (d as u64) < n, "need 1 <= d < n")?;
    let lf = LnFact::new(LN_TABLE);
    let (a, b) = bernoulli_ratio(d);
    let ln_r = ln_big(&a) - ln_big(&b);
    let dd = d as u64;
    let mut r = search_row(Row::G, n, d, |t| {
        let lp = t as f64 * ln_r;
        let (m, _) = first_m(n, |m| ((dd + 1) as f64).ln() + lf.ln_binom(m, dd) + lp);
        let margin = (m as f64).ln() + lf.ln_binom(m - 1, dd) + lp - ((m - n + 1) as f64).ln();
        if margin >= GUARD {
            return None;
        }
        let m = m_candidates(n, m).find(|&m| bern_delete_holds(n, d, t, m, &a, &b))?;
        Some(Optimizer { m: Some(m), beta: Some((1, dd + 1)), ..Optimizer::default() })
    })?;
    r.boundary_hit = r.optimizer.m == Some(M_SPAN * n);
    Ok(r)
}

fn bern_delete_holds(n: u64, d: u32, t: u64, m: u64, a: &BigUint, b: &BigUint) -> bool {
    big(m) * binom(m - 1, d as u64) * a.pow(t as u32) < big(m - n + 1) * b.pow(t as u32)
}

/// Constant-weight ensemble of `m ≥ n` columns, deleting one of each pair
/// with overlap at least `w/d`.
pub fn ub_cw_pairwise_delete(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1, "need d >= 1")?;
    let lf = LnFact::new(LN_TABLE);
    search_row(Row::H, n, d, |t| {
        (1..=t).find_map(|w| {
            let lq = ln_overlap_count(&lf, t, w, d) - lf.ln_binom(t, w);
            let (m, _) = first_m(n, |m| (m as f64).ln() + lq);
            let margin = lf.ln_binom(m, 2) + lq - ((m - n + 1) as f64).ln();
            if margin >= GUARD {
                return None;
            }
            let m = m_candidates(n, m).find(|&m| pairwise_delete_holds(n, d, t, w, m))?;
            Some(Optimizer { w: Some(w), m: Some(m), ..Optimizer::default() })
        })
    })
    .map(|mut r| {
        r.boundary_hit = r.optimizer.m == Some(M_SPAN * n);
        r
    })
}

fn pairwise_delete_holds(n: u64, d: u32, t: u64, w: u64, m: u64) -> bool {
    binom(m, 2) * overlap_count(t, w, d) < big(m - n + 1) * binom(t, w)
}

/// Constant-weight ensemble of `m ≥ n` columns, deleting every column
/// covered by `d` others.
pub fn ub_cw_group_delete(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1 && (d as u64) < n, "need 1 <= d < n")?;
    let lf = LnFact::new(LN_TABLE);
    let dd = d as u64;
    search_row(Row::I, n, d, |t| {
        (1..=t).find_map(|w| {
            let lp = ln_cover_prob(&lf, d, t, w);
            let (m, _) = first_m(n, |m| ((dd + 1) as f64).ln() + lf.ln_binom(m, dd) + lp);
            let margin = (m as f64).ln() + lf.ln_binom(m - 1, dd) + lp - ((m - n + 1) as f64).ln();
            if margin >= GUARD {
                return None;
            }
            let m = m_candidates(n, m).find(|&m| group_delete_holds(n, d, t, w, m))?;
            Some(Optimizer { w: Some(w), m: Some(m), ..Optimizer::default() })
        })
    })
    .map(|mut r| {
        r.boundary_hit = r.optimizer.m == Some(M_SPAN * n);
        r
    })
}

fn group_delete_holds(n: u64, d: u32, t: u64, w: u64, m: u64) -> bool {
    let r = RCover::new(t, w).get(d, 0);
    big(m) * binom(m - 1, d as u64) * r < big(m - n + 1) * binom(t, w).pow(d)
}

/// Private `(μ+1)`-subsets: smallest `t` with `C(t,μ+1) ≥ n C(w,μ+1)` for
/// some `⌊(w−1)/μ⌋ ≥ d`.
pub fn lb_private_pairs(n: u64, d: u32) -> Result<BoundResult> {
    need(d >= 1, "need d >= 1")?;
    let lf = LnFact::new(LN_TABLE);
    let ln_n = (n as f64).ln();
    let dd = d as u64;
    search_row(Row::P, n, d, |t| {
        (1..t).find_map(|mu| {
            (dd * mu + 1..=t).find_map(|w| {
                let margin = ln_n + lf.ln_binom(w, mu + 1) - lf.ln_binom(t, mu + 1);
                (margin <= GUARD && private_pairs_holds(n, t, w, mu)).then_some(Optimizer {
                    w: Some(w),
                    mu: Some(mu),
                    ..Optimizer::default()
                })
            })
        })
    })
}

fn private_pairs_holds(n: u64, t: u64, w: u64, mu: u64) -> bool {
    binom(t, mu + 1) >= big(n) * binom(w, mu + 1)
}

/// Private `w/d`-subsets: smallest `t` with `d C(t,w/d) ≥ n C(w,w/d)`.
/// `floor_variant` admits every `w` with `⌊w/d⌋` in place of `w/d`.
pub fn lb_ruszinko(n: u64, d: u32, floor_variant: bool) -> Result<BoundResult> {
    need(d >= 1, "need d >= 1")?;
    let lf = LnFact::new(LN_TABLE);
    let ln_n = (n as f64).ln();
    let dd = d as u64;
    search_row(Row::S, n, d, |t| {
        (1..=t).filter(|w| floor_variant || w % dd == 0).find_map(|w| {
            let k = w / dd;
            if k == 0 {
                return None;
            }
            let margin = ln_n + lf.ln_binom(w, k) - (dd as f64).ln() - lf.ln_binom(t, k);
            (margin <= GUARD && ruszinko_holds(n, d, t, w)).then(|| Optimizer::w(w))
        })
    })
}

fn ruszinko_holds(n: u64, d: u32, t: u64, w: u64) -> bool {
    let k = w / d as u64;
    big(d as u64) * binom(t, k) >= big(n) * binom(w, k)
}

/// Re-evaluates a row's condition at `t` with the recorded parameters.
pub(crate) fn holds(r: &BoundResult) -> Result<bool> {
    let (n, d, t, o) = (r.n, r.d, r.value, &r.optimizer);
    if n <= 1 && !matches!(r.row, Row::A | Row::D | Row::T) {
        return Ok(r.value == 1);
    }
    let w = || o.w.ok_or(Error::Invalid("optimizer lacks w".into()));
    let m = || o.m.ok_or(Error::Invalid("optimizer lacks m".into()));
    Ok(match r.row {
        Row::T => lb_info(n, d)?.value == t,
        Row::A => ub_hwang_sos(n, d)?.value == t,
        Row::D => ub_bernoulli(n, d)?.value == t,
        Row::C => sequential_holds(n, d, t, w()?),
        Row::E => cw_group_holds(n, d, t, w()?),
        Row::F => lll_holds(&(lll_dependencies(n, d) + BigUint::one()), d, t, w()?),
        Row::G => {
            let (a, b) = bernoulli_ratio(d);
            bern_delete_holds(n, d, t, m()?, &a, &b)
        }
        Row::H => pairwise_delete_holds(n, d, t, w()?, m()?),
        Row::I => group_delete_holds(n, d, t, w()?, m()?),
        Row::P => private_pairs_holds(n, t, w()?, o.mu.ok_or(Error::Invalid("optimizer lacks mu".into()))?),
        Row::S => ruszinko_holds(n, d, t, w()?),
        _ => return Err(Error::Invalid(format!("row ({}) is not computed", r.row.id()))),
    })
}
