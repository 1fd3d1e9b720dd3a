use super::BinaryCode;
use crate::bits::BitVec;

/// Packed-bit views of a code: each column as a `t`-bit set and each row as
/// an `n`-bit set.
#[derive(Clone, Debug)]
pub struct ColumnIndex {
    pub(crate) cols: Vec<BitVec>,
    pub(crate) rows: Vec<BitVec>,
}

impl ColumnIndex {
    pub fn new(code: &BinaryCode) -> Self {
        let t = code.t();
        let n = code.n();
        let cols = code
            .columns()
            .iter()
            .map(|c| BitVec::from_indices(t, c.iter().map(|&r| r as usize)))
            .collect();
        let mut rows = vec![BitVec::zeros(n); t];
        for (j, c) in code.columns().iter().enumerate() {
            for &r in c {
                rows[r as usize].set(j);
            }
        }
        Self { cols, rows }
    }

    pub fn column(&self, j: usize) -> &BitVec {
        &self.cols[j]
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }
}
