//! Smallest feasible `t` for predicates that are expected, but not proven,
//! to be monotone in `t`.

use crate::error::{Error, Result};

const AUDIT_POINTS: u64 = 8;
const MAX_T: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchTrace {
    /// Predicate evaluations spent.
    pub evaluations: u64,
    /// The audit found a non-monotone pattern and fell back to a scan.
    pub linear_scan: bool,
}

/// Doubles `t` from 1 until the predicate holds, samples the bracket to
/// audit monotonicity, then bisects (or scans when the audit fails).
pub fn min_feasible<T>(mut pred: impl FnMut(u64) -> Option<T>) -> Result<(u64, T, SearchTrace)> {
    let mut trace = SearchTrace::default();
    let mut eval = |t: u64, trace: &mut SearchTrace| {
        trace.evaluations += 1;
        pred(t)
    };
    let mut lo = 0u64;
    let mut hi = 1u64;
    let mut found = loop {
        if let Some(x) = eval(hi, &mut trace) {
            break x;
        }
        lo = hi;
        hi *= 2;
        if hi > MAX_T {
            return Err(Error::Invalid(format!("no feasible t below {MAX_T}")));
        }
    };
    if hi - lo <= 1 {
        return Ok((hi, found, trace));
    }

    let step = ((hi - lo) / (AUDIT_POINTS + 1)).max(1);
    let mut samples = Vec::new();
    let mut t = lo + step;
    while t < hi && samples.len() < AUDIT_POINTS as usize {
        samples.push((t, eval(t, &mut trace)));
        t += step;
    }
    let first_true = samples.iter().position(|(_, r)| r.is_some());
    let monotone = match first_true {
        Some(k) => samples[k..].iter().all(|(_, r)| r.is_some()),
        None => true,
    };
    if !monotone {
        trace.linear_scan = true;
        for t in lo + 1..hi {
            if let Some(x) = eval(t, &mut trace) {
                return Ok((t, x, trace));
            }
        }
        return Ok((hi, found, trace));
    }
    if let Some(k) = first_true {
        let (t, r) = samples.swap_remove(k);
        hi = t;
        found = r.expect("sample is feasible");
        if k > 0 {
            lo = samples[k - 1].0;
        }
    } else if let Some(&(t, _)) = samples.last() {
        lo = t;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match eval(mid, &mut trace) {
            Some(x) => {
                hi = mid;
                found = x;
            }
            None => lo = mid,
        }
    }
    Ok((hi, found, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_threshold_and_falls_back() {
        for target in [1u64, 2, 3, 7, 64, 65, 1000, 12345] {
            let (t, _, tr) = min_feasible(|t| (t >= target).then_some(())).unwrap();
            assert_eq!(t, target);
            assert!(!tr.linear_scan);
        }
        let (t, _, tr) = min_feasible(|t| (t >= 600 && !(700..760).contains(&t)).then_some(())).unwrap();
        assert_eq!(t, 600);
        assert!(tr.linear_scan);
    }
}
