//! Decoding TDC test vectors back to the pixels that fired.
//!
//! The cover decoder collects every column contained in the test vector and
//! accepts the result only when each collected column has a row no other
//! collected column reaches. For a `d`-disjunct code this recovers every
//! firing set of size at most `d`; for larger sets it may answer ambiguous
//! but never wrong.

mod stream;

pub use stream::{
    burst_decode, read_tdc_csv, window_decode, write_burst_report, write_report, BurstOutcome, TdcStream, WindowOutcome,
};

use std::collections::HashMap;

use crate::binmat::{BinaryCode, TestVector};
use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeKind {
    Success,
    Ambiguous,
    Inconsistent,
}

impl DecodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodeKind::Success => "success",
            DecodeKind::Ambiguous => "ambiguous",
            DecodeKind::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub kind: DecodeKind,
    /// Success: the decoded firing set. Otherwise: every covered column.
    pub support: Vec<usize>,
    /// Rows of `y` reached by no covered column (Inconsistent only).
    pub residual: Vec<u32>,
    /// Exact-match decoding of a 1-separable code: `y` is also the union of
    /// two or more other columns, so a multi-pixel window would be misread.
    pub caveat: bool,
}

/// Precomputed indexes for repeated cover decoding against one code.
///
/// Columns of weight two or more are bucketed by their two smallest rows, so
/// a test vector only visits columns whose first two rows it contains.
pub struct Decoder<'a> {
    code: &'a BinaryCode,
    cols: Vec<BitVec>,
    /// CSR over `r1 * t + r2`.
    pair_start: Vec<u32>,
    pair_cols: Vec<u32>,
    singles: Vec<Vec<u32>>,
    empties: Vec<u32>,
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a BinaryCode) -> Self {
        let t = code.t();
        let cols = code
            .columns()
            .iter()
            .map(|c| BitVec::from_indices(t, c.iter().map(|&r| r as usize)))
            .collect();
        let mut counts = vec![0u32; t * t + 1];
        let mut singles = vec![Vec::new(); t];
        let mut empties = Vec::new();
        for (j, c) in code.columns().iter().enumerate() {
            match c.len() {
                0 => empties.push(j as u32),
                1 => singles[c[0] as usize].push(j as u32),
                _ => counts[c[0] as usize * t + c[1] as usize + 1] += 1,
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut pair_cols = vec![0u32; *counts.last().unwrap() as usize];
        for (j, c) in code.columns().iter().enumerate() {
            if c.len() >= 2 {
                let key = c[0] as usize * t + c[1] as usize;
                pair_cols[fill[key] as usize] = j as u32;
                fill[key] += 1;
            }
        }
        Self { code, cols, pair_start: counts, pair_cols, singles, empties }
    }

    pub fn code(&self) -> &BinaryCode {
        self.code
    }

    /// Every column contained in `y`, ascending.
    pub fn covered(&self, y: &TestVector) -> Vec<usize> {
        let t = self.code.t();
        let ybits = BitVec::from_indices(t, y.rows().iter().map(|&r| r as usize));
        let rows = y.rows();
        let mut out: Vec<usize> = self.empties.iter().map(|&j| j as usize).collect();
        for (a, &r1) in rows.iter().enumerate() {
            out.extend(self.singles[r1 as usize].iter().map(|&j| j as usize));
            for &r2 in &rows[a + 1..] {
                let key = r1 as usize * t + r2 as usize;
                let (s, e) = (self.pair_start[key] as usize, self.pair_start[key + 1] as usize);
                for &j in &self.pair_cols[s..e] {
                    if self.cols[j as usize].is_subset_of(&ybits) {
                        out.push(j as usize);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn decode(&self, y: &TestVector) -> DecodeOutcome {
        let covered = self.covered(y);
        let t = self.code.t();
        let mut hits = vec![0u32; t];
        for &j in &covered {
            for &r in self.code.column(j) {
                hits[r as usize] += 1;
            }
        }
        let residual: Vec<u32> = y.rows().iter().copied().filter(|&r| hits[r as usize] == 0).collect();
        if !residual.is_empty() {
            return DecodeOutcome { kind: DecodeKind::Inconsistent, support: covered, residual, caveat: false };
        }
        let necessary = covered
            .iter()
            .all(|&j| self.code.column(j).iter().any(|&r| hits[r as usize] == 1));
        let kind = if necessary { DecodeKind::Success } else { DecodeKind::Ambiguous };
        DecodeOutcome { kind, support: covered, residual, caveat: false }
    }
}

/// One-shot cover decoding; build a [`Decoder`] to decode many vectors.
pub fn cover_decode(code: &BinaryCode, y: &TestVector) -> Result<DecodeOutcome> {
    if y.t() != code.t() {
        return Err(Error::Invalid(format!("test vector has t = {}, code has t = {}", y.t(), code.t())));
    }
    Ok(Decoder::new(code).decode(y))
}

/// Exact-match decoding for codes that are 1-separable but not disjunct.
pub fn lookup_decode_1(code: &BinaryCode, y: &TestVector) -> Result<DecodeOutcome> {
    if !code.meta().separable_1 {
        return Err(Error::Invalid("exact-match decoding needs a code flagged 1-separable".into()));
    }
    if y.t() != code.t() {
        return Err(Error::Invalid(format!("test vector has t = {}, code has t = {}", y.t(), code.t())));
    }
    let table: HashMap<&[u32], usize> = code
        .columns()
        .iter()
        .enumerate()
        .rev()
        .map(|(j, c)| (c.as_slice(), j))
        .collect();
    let cover = Decoder::new(code).decode(y);
    if y.is_empty() {
        return Ok(DecodeOutcome { kind: DecodeKind::Success, support: vec![], residual: vec![], caveat: false });
    }
    match table.get(y.rows()) {
        Some(&j) => {
            // Do the other columns inside y also reproduce it?
            let mut union = vec![false; code.t()];
            for &i in cover.support.iter().filter(|&&i| i != j) {
                for &r in code.column(i) {
                    union[r as usize] = true;
                }
            }
            let caveat = y.rows().iter().all(|&r| union[r as usize]);
            Ok(DecodeOutcome { kind: DecodeKind::Success, support: vec![j], residual: vec![], caveat })
        }
        None => Ok(DecodeOutcome {
            kind: if cover.kind == DecodeKind::Inconsistent { DecodeKind::Inconsistent } else { DecodeKind::Ambiguous },
            ..cover
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binmat::tests::printed_example;
    use crate::binmat::{reference_design, CodeMeta, ReferenceKind};
    use crate::construct::build_descriptor;
    use crate::construct::{BuildOptions, Registry};
    use proptest::prelude::*;
    use rand::{seq::index::sample, SeedableRng};

    #[test]
    fn printed_vector_is_ambiguous() {
        let a = printed_example();
        let y = a.superimpose(&[1, 3]).unwrap();
        let out = cover_decode(&a, &y).unwrap();
        assert_eq!(out.kind, DecodeKind::Ambiguous);
        assert_eq!(out.support, vec![1, 3, 4]);
        let out = cover_decode(&a, &TestVector::empty(3)).unwrap();
        assert_eq!((out.kind, out.support.len()), (DecodeKind::Success, 0));
        let partial = TestVector::new(3, vec![1, 2]).unwrap();
        // Row 1 (0-based) is reached only by pixels 2 and 4, neither inside.
        let a2 = BinaryCode::new(3, vec![vec![0, 1], vec![2]], CodeMeta::default()).unwrap();
        let out = cover_decode(&a2, &partial).unwrap();
        assert_eq!((out.kind, out.residual.clone()), (DecodeKind::Inconsistent, vec![1]));
    }

    #[test]
    fn three_disjunct_code_recovers_triples() {
        let reg = Registry::default();
        let code = build_descriptor("(10,4,7)_11^Iq", &BuildOptions::new(14_400), &reg).unwrap().code;
        let dec = Decoder::new(&code);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let mut s: Vec<usize> = sample(&mut rng, code.n(), 3).into_vec();
            s.sort_unstable();
            let out = dec.decode(&code.superimpose(&s).unwrap());
            assert_eq!(out.kind, DecodeKind::Success);
            assert_eq!(out.support, s);
        }
    }

    #[test]
    fn lookup_decoding_binary_counting() {
        let bc = reference_design(ReferenceKind::BinaryCounting, 4).unwrap();
        // Pixel numbers are 1-based; column index = pixel − 1.
        let y = bc.superimpose(&[10]).unwrap();
        let out = lookup_decode_1(&bc, &y).unwrap();
        assert_eq!((out.kind, out.support.clone()), (DecodeKind::Success, vec![10]));
        let y = bc.superimpose(&[0, 1]).unwrap();
        let out = lookup_decode_1(&bc, &y).unwrap();
        assert_eq!((out.kind, out.support.clone(), out.caveat), (DecodeKind::Success, vec![2], true));
        let y = bc.superimpose(&[7]).unwrap();
        assert!(!lookup_decode_1(&bc, &y).unwrap().caveat);
        let lone = BinaryCode::new(3, vec![vec![0], vec![1]], CodeMeta { separable_1: true, ..CodeMeta::default() })
            .unwrap();
        let out = lookup_decode_1(&lone, &TestVector::new(3, vec![2]).unwrap()).unwrap();
        assert_eq!(out.kind, DecodeKind::Inconsistent);
        assert!(lookup_decode_1(&printed_example(), &TestVector::empty(3)).is_err());
    }

    fn arb_code() -> impl Strategy<Value = BinaryCode> {
        (2usize..10, 2usize..30).prop_flat_map(|(t, n)| {
            prop::collection::vec(prop::collection::btree_set(0..t as u32, 0..=t.min(4)), n).prop_map(move |cols| {
                BinaryCode::new(t, cols.into_iter().map(|s| s.into_iter().collect()).collect(), CodeMeta::default())
                    .unwrap()
            })
        })
    }

    proptest! {
        /// Oracle: a direct scan of all columns against a bool mask.
        #[test]
        fn matches_direct_scan(code in arb_code(), picks in prop::collection::btree_set(0usize..30, 0..5)) {
            let s: Vec<usize> = picks.into_iter().filter(|&j| j < code.n()).collect();
            let y = code.superimpose(&s).unwrap();
            let mut in_y = vec![false; code.t()];
            for &r in y.rows() { in_y[r as usize] = true; }
            let covered: Vec<usize> = (0..code.n())
                .filter(|&j| code.column(j).iter().all(|&r| in_y[r as usize]))
                .collect();
            let out = cover_decode(&code, &y).unwrap();
            prop_assert_ne!(out.kind, DecodeKind::Inconsistent);
            prop_assert_eq!(&out.support, &covered);
            let necessary = covered.iter().all(|&j| {
                let others: Vec<usize> = covered.iter().copied().filter(|&i| i != j).collect();
                code.superimpose(&others).unwrap() != y
            });
            prop_assert_eq!(out.kind == DecodeKind::Success, necessary);
            // No false positives: success means the true support was found.
            if out.kind == DecodeKind::Success {
                prop_assert_eq!(&out.support, &s);
            }
        }
    }
}
