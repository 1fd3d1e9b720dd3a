//! Binary group-testing matrices.
//!
//! A [`BinaryCode`] is a `t × n` incidence matrix stored column-wise: column
//! `j` is the ascending list of rows (tests, TDCs) that item `j` (a pixel) is
//! wired to. Outcomes combine by Boolean OR, so the test vector produced by a
//! set of firing pixels is the union of their columns.

mod design;
mod gtmx;
mod index;

pub use design::{reference_design, ReferenceKind};
pub use gtmx::{load, load_path, read_gtmx, save, save_path, write_gtmx};
pub use index::ColumnIndex;

use std::fmt;

use crate::error::{Error, Result};

/// How a code's `certified_d` was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Provenance {
    #[default]
    None,
    /// `⌊(w−1)/μ⌋` from uniform weight and maximum overlap.
    Overlap,
    /// A construction argument: CRT product bound or concatenation pigeonhole.
    Construction,
    /// Exhaustive verification.
    Exact,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::None => "none",
            Provenance::Overlap => "overlap",
            Provenance::Construction => "construction",
            Provenance::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "none" => Provenance::None,
            "overlap" => Provenance::Overlap,
            "construction" => Provenance::Construction,
            "exact" => Provenance::Exact,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CodeMeta {
    pub certified_d: Option<u32>,
    pub weight: Option<u32>,
    pub max_overlap: Option<u32>,
    pub descriptor: String,
    pub provenance: Provenance,
    /// Every single column is distinguishable (1-separable) even though the
    /// code is not 1-disjunct; used by the binary-counting design.
    pub separable_1: bool,
}

impl CodeMeta {
    pub fn described(descriptor: impl Into<String>) -> Self {
        Self {
            descriptor: descriptor.into(),
            ..Self::default()
        }
    }

    /// A certified disjunctness above the overlap bound needs a stronger
    /// provenance than the overlap bound itself.
    fn check(&self) -> Result<()> {
        if let (Some(w), Some(mu), Some(d)) = (self.weight, self.max_overlap, self.certified_d) {
            if mu >= 1 {
                let bound = (w.saturating_sub(1)) / mu;
                if d > bound
                    && matches!(self.provenance, Provenance::None | Provenance::Overlap)
                {
                    return Err(Error::Invalid(format!(
                        "certified_d = {d} exceeds the overlap bound {bound} without a construction or exact provenance"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryCode {
    t: usize,
    columns: Vec<Vec<u32>>,
    meta: CodeMeta,
}

impl BinaryCode {
    pub fn new(t: usize, columns: Vec<Vec<u32>>, meta: CodeMeta) -> Result<Self> {
        if t == 0 || columns.is_empty() {
            return Err(Error::EmptyCode {
                t,
                n: columns.len(),
            });
        }
        for (j, col) in columns.iter().enumerate() {
            for pair in col.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(Error::NotAscending { column: j });
                }
            }
            if let Some(&last) = col.last() {
                if last as usize >= t {
                    return Err(Error::RowOutOfRange {
                        column: j,
                        row: last as usize,
                        t,
                    });
                }
            }
            if let Some(w) = meta.weight {
                if col.len() != w as usize {
                    return Err(Error::WeightMismatch {
                        column: j,
                        found: col.len(),
                        declared: w as usize,
                    });
                }
            }
        }
        meta.check()?;
        Ok(Self { t, columns, meta })
    }

    /// `k × k` identity; (k−1)-disjunct.
    pub fn identity(k: usize) -> Result<Self> {
        let columns = (0..k).map(|j| vec![j as u32]).collect();
        let meta = CodeMeta {
            certified_d: Some(k.saturating_sub(1) as u32),
            weight: Some(1),
            max_overlap: if k >= 2 { Some(0) } else { None },
            descriptor: format!("I_{k}"),
            provenance: Provenance::Construction,
            separable_1: false,
        };
        Self::new(k, columns, meta)
    }

    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn meta(&self) -> &CodeMeta {
        &self.meta
    }

    pub fn into_parts(self) -> (usize, Vec<Vec<u32>>, CodeMeta) {
        (self.t, self.columns, self.meta)
    }

    pub fn with_meta(self, meta: CodeMeta) -> Result<Self> {
        Self::new(self.t, self.columns, meta)
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.meta.descriptor = descriptor.into();
        self
    }

    /// The common column weight, if all columns have the same weight.
    pub fn uniform_weight(&self) -> Option<usize> {
        let w = self.columns[0].len();
        self.columns.iter().all(|c| c.len() == w).then_some(w)
    }

    /// Keep the first `n` columns. Disjunctness certificates survive column
    /// deletion unchanged.
    pub fn truncate(mut self, n: usize) -> Result<Self> {
        if n == 0 || n > self.columns.len() {
            return Err(Error::TooFewColumns {
                needed: n,
                n: self.columns.len(),
            });
        }
        self.columns.truncate(n);
        if self.columns.len() < 2 {
            self.meta.max_overlap = None;
        }
        Ok(self)
    }

    /// Number of ones in every row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.t];
        for col in &self.columns {
            for &r in col {
                counts[r as usize] += 1;
            }
        }
        counts
    }

    /// `y = A x` over the Boolean semiring: union of the selected columns.
    pub fn superimpose(&self, support: &[usize]) -> Result<TestVector> {
        let mut mark = vec![false; self.t];
        for &j in support {
            let col = self
                .columns
                .get(j)
                .ok_or(Error::ColumnOutOfRange { index: j, n: self.n() })?;
            for &r in col {
                mark[r as usize] = true;
            }
        }
        let rows = mark
            .iter()
            .enumerate()
            .filter_map(|(r, &m)| m.then_some(r as u32))
            .collect();
        Ok(TestVector { t: self.t, rows })
    }

    /// Exact maximum pairwise overlap `μ = max_{i≠j} |a_i ∩ a_j|` together with
    /// the lexicographically first pair attaining it.
    pub fn max_overlap(&self) -> Result<OverlapReport> {
        let scan = self.overlap_scan()?;
        Ok(OverlapReport {
            mu: scan.mu,
            pair: scan.pair,
        })
    }

    /// For every column the largest overlap it has with any other column.
    pub fn per_column_max_overlap(&self) -> Result<Vec<usize>> {
        Ok(self.overlap_scan()?.per_column)
    }

    fn overlap_scan(&self) -> Result<OverlapScan> {
        let n = self.n();
        if n < 2 {
            return Err(Error::TooFewColumns { needed: 2, n });
        }
        let rows = self.row_lists();
        let mut counts = vec![0u32; n];
        let mut touched = Vec::new();
        let mut best = (0usize, (0usize, 1usize));
        let mut per_column = vec![0usize; n];
        for i in 0..n {
            for &r in &self.columns[i] {
                for &j in &rows[r as usize] {
                    let j = j as usize;
                    if j > i {
                        if counts[j] == 0 {
                            touched.push(j);
                        }
                        counts[j] += 1;
                    }
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                let c = counts[j] as usize;
                if c > best.0 {
                    best = (c, (i, j));
                }
                per_column[i] = per_column[i].max(c);
                per_column[j] = per_column[j].max(c);
                counts[j] = 0;
            }
            touched.clear();
        }
        Ok(OverlapScan {
            mu: best.0,
            pair: best.1,
            per_column,
        })
    }

    /// For every row the ascending list of columns containing it.
    pub fn row_lists(&self) -> Vec<Vec<u32>> {
        let mut rows = vec![Vec::new(); self.t];
        for (j, col) in self.columns.iter().enumerate() {
            for &r in col {
                rows[r as usize].push(j as u32);
            }
        }
        rows
    }

    /// Dense `t × n` 0/1 matrix, row-major. Only for small codes.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.n()]; self.t];
        for (j, col) in self.columns.iter().enumerate() {
            for &r in col {
                m[r as usize][j] = 1;
            }
        }
        m
    }

    /// Build from a dense row-major 0/1 matrix.
    pub fn from_dense(rows: &[Vec<u8>], meta: CodeMeta) -> Result<Self> {
        let t = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        let mut columns = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!("row {i} has length {}, expected {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    columns[j].push(i as u32);
                }
            }
        }
        Self::new(t, columns, meta)
    }
}

impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{}", self.t, self.n())?;
        if !self.meta.descriptor.is_empty() {
            write!(f, " {}", self.meta.descriptor)?;
        }
        if let Some(d) = self.meta.certified_d {
            write!(f, " (d = {d})")?;
        }
        Ok(())
    }
}

struct OverlapScan {
    mu: usize,
    pair: (usize, usize),
    per_column: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OverlapReport {
    pub mu: usize,
    pub pair: (usize, usize),
}

/// A set of activated tests (rows), kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TestVector {
    t: usize,
    rows: Vec<u32>,
}

impl TestVector {
    pub fn new(t: usize, mut rows: Vec<u32>) -> Result<Self> {
        rows.sort_unstable();
        rows.dedup();
        if let Some(&last) = rows.last() {
            if last as usize >= t {
                return Err(Error::Invalid(format!(
                    "test vector entry {last} out of range for t = {t}"
                )));
            }
        }
        Ok(Self { t, rows })
    }

    pub fn empty(t: usize) -> Self {
        Self { t, rows: Vec::new() }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// `self` covers `other` when `other ⊆ self`.
    pub fn covers(&self, other: &TestVector) -> bool {
        debug_assert_eq!(self.t, other.t);
        is_sorted_subset(&other.rows, &self.rows)
    }

    pub fn union(&self, other: &TestVector) -> TestVector {
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        rows.sort_unstable();
        rows.dedup();
        TestVector { t: self.t, rows }
    }
}

/// `u` covers `v` iff `u ∪ v = u`.
pub fn covers(u: &TestVector, v: &TestVector) -> bool {
    u.covers(v)
}

/// Ascending slices: `small ⊆ big`.
pub(crate) fn is_sorted_subset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    'outer: for s in small {
        for b in it.by_ref() {
            if b == s {
                continue 'outer;
            }
            if b > s {
                return false;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The 3×5 example: pixels 1, 4, 5 on the first TDC, 2 and 4 on the
    /// second, 1 and 3 on the third (1-based in print, 0-based here).
    pub fn printed_example() -> BinaryCode {
        BinaryCode::from_dense(
            &[
                vec![1, 0, 0, 1, 1],
                vec![0, 1, 0, 1, 0],
                vec![1, 0, 1, 0, 0],
            ],
            CodeMeta::described("example 3x5"),
        )
        .unwrap()
    }

    #[test]
    fn superimpose_example_pixels_two_and_four() {
        let a = printed_example();
        let y = a.superimpose(&[1, 3]).unwrap();
        assert_eq!(y.rows(), &[0, 1]);
    }

    #[test]
    fn superimpose_empty_and_identity() {
        let a = printed_example();
        assert!(a.superimpose(&[]).unwrap().is_empty());
        let i5 = BinaryCode::identity(5).unwrap();
        assert_eq!(i5.superimpose(&[1, 3]).unwrap().rows(), &[1, 3]);
        assert!(matches!(
            a.superimpose(&[5]),
            Err(Error::ColumnOutOfRange { index: 5, n: 5 })
        ));
    }

    #[test]
    fn covers_examples() {
        let a = printed_example();
        let a1 = a.superimpose(&[0]).unwrap();
        let a3 = a.superimpose(&[2]).unwrap();
        assert!(covers(&a1, &a3));
        assert!(covers(&a1, &a1));
        let u = TestVector::new(3, vec![1]).unwrap();
        let v = TestVector::new(3, vec![0, 1]).unwrap();
        assert!(!covers(&u, &v));
    }

    #[test]
    fn overlap_of_example_and_identity() {
        // Oracle: all 10 pairs of the printed matrix by hand.
        let a = printed_example();
        let dense = a.to_dense();
        let mut brute = 0;
        for i in 0..5 {
            for j in i + 1..5 {
                let ov = (0..3).filter(|&r| dense[r][i] == 1 && dense[r][j] == 1).count();
                brute = brute.max(ov);
            }
        }
        assert_eq!(brute, 1);
        assert_eq!(a.max_overlap().unwrap().mu, 1);
        assert_eq!(BinaryCode::identity(7).unwrap().max_overlap().unwrap().mu, 0);
        assert!(matches!(
            BinaryCode::identity(1).unwrap().max_overlap(),
            Err(Error::TooFewColumns { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_columns() {
        let meta = CodeMeta::default();
        assert!(matches!(
            BinaryCode::new(3, vec![vec![2, 1]], meta.clone()),
            Err(Error::NotAscending { column: 0 })
        ));
        assert!(matches!(
            BinaryCode::new(3, vec![vec![0], vec![3]], meta.clone()),
            Err(Error::RowOutOfRange { column: 1, .. })
        ));
        assert!(matches!(
            BinaryCode::new(0, vec![], meta.clone()),
            Err(Error::EmptyCode { .. })
        ));
        let w2 = CodeMeta {
            weight: Some(2),
            ..CodeMeta::default()
        };
        assert!(matches!(
            BinaryCode::new(3, vec![vec![0, 1], vec![2]], w2),
            Err(Error::WeightMismatch { column: 1, .. })
        ));
        let overclaim = CodeMeta {
            weight: Some(3),
            max_overlap: Some(1),
            certified_d: Some(3),
            provenance: Provenance::Overlap,
            ..CodeMeta::default()
        };
        assert!(BinaryCode::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]], overclaim).is_err());
    }

    fn arb_code() -> impl Strategy<Value = BinaryCode> {
        (1usize..12, 1usize..10).prop_flat_map(|(t, n)| {
            prop::collection::vec(prop::collection::btree_set(0..t as u32, 0..=t), n).prop_map(
                move |cols| {
                    let cols = cols.into_iter().map(|s| s.into_iter().collect()).collect();
                    BinaryCode::new(t, cols, CodeMeta::default()).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn superimpose_is_monotone_and_covers_members(
            code in arb_code(),
            picks in prop::collection::vec(any::<prop::sample::Index>(), 0..6),
            extra in prop::collection::vec(any::<prop::sample::Index>(), 0..4),
        ) {
            let n = code.n();
            let s1: Vec<usize> = picks.iter().map(|i| i.index(n)).collect();
            let mut s2 = s1.clone();
            s2.extend(extra.iter().map(|i| i.index(n)));
            let y1 = code.superimpose(&s1).unwrap();
            let y2 = code.superimpose(&s2).unwrap();
            prop_assert!(y2.covers(&y1));
            for &j in &s1 {
                prop_assert!(y1.covers(&code.superimpose(&[j]).unwrap()));
            }
        }

        #[test]
        fn overlap_invariant_under_permutation(code in arb_code(), seed in any::<u64>()) {
            prop_assume!(code.n() >= 2);
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut row_perm: Vec<u32> = (0..code.t() as u32).collect();
            row_perm.shuffle(&mut rng);
            let mut cols: Vec<Vec<u32>> = code
                .columns()
                .iter()
                .map(|c| {
                    let mut c: Vec<u32> = c.iter().map(|&r| row_perm[r as usize]).collect();
                    c.sort_unstable();
                    c
                })
                .collect();
            cols.shuffle(&mut rng);
            let permuted = BinaryCode::new(code.t(), cols, CodeMeta::default()).unwrap();
            prop_assert_eq!(code.max_overlap().unwrap().mu, permuted.max_overlap().unwrap().mu);
        }
    }
}
