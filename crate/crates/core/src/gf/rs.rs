use super::Field;
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1_000_000;

/// A linear `(n_q, k, d_q)_q` code given by evaluating messages, read as
/// polynomials of degree `< k`, at fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QaryCode {
    field: Field,
    n_q: usize,
    k_dim: usize,
    d_q: usize,
    points: Vec<u32>,
    /// Doubly extended code: one extra coordinate carrying the leading
    /// message coefficient (the evaluation "at infinity").
    infinity: bool,
}

/// Reed–Solomon code evaluated at the first `n_q` field elements.
pub fn rs_code(field: &Field, n_q: usize, k_dim: usize) -> Result<QaryCode> {
    let q = field.order() as usize;
    if k_dim == 0 || k_dim > n_q {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= n_q, got n_q = {n_q}, k = {k_dim}"
        )));
    }
    if n_q > q {
        return Err(Error::InvalidParams(format!(
            "length {n_q} exceeds q = {q}; use rs_code_extended for n_q = q + 1"
        )));
    }
    Ok(QaryCode {
        field: field.clone(),
        n_q,
        k_dim,
        d_q: n_q - k_dim + 1,
        points: (0..n_q as u32).collect(),
        infinity: false,
    })
}

/// Doubly extended Reed–Solomon code of length `q + 1`, still MDS.
pub fn rs_code_extended(field: &Field, k_dim: usize) -> Result<QaryCode> {
    let q = field.order() as usize;
    if k_dim == 0 || k_dim > q {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= q for the extended code, got k = {k_dim}"
        )));
    }
    Ok(QaryCode {
        field: field.clone(),
        n_q: q + 1,
        k_dim,
        d_q: q - k_dim + 2,
        points: (0..q as u32).collect(),
        infinity: true,
    })
}

impl QaryCode {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order() as usize
    }

    pub fn length(&self) -> usize {
        self.n_q
    }

    pub fn dimension(&self) -> usize {
        self.k_dim
    }

    pub fn distance(&self) -> usize {
        self.d_q
    }

    pub fn is_extended(&self) -> bool {
        self.infinity
    }

    /// `q^k`, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        (self.q() as u128)
            .checked_pow(self.k_dim as u32)
            .unwrap_or(u128::MAX)
    }

    /// `(n,k,d)_q`.
    pub fn label(&self) -> String {
        format!("({},{},{})_{}", self.n_q, self.k_dim, self.d_q, self.q())
    }

    /// Message digits of codeword `index`: `m_i = (index / q^i) mod q`.
    pub fn message(&self, mut index: u128) -> Vec<u32> {
        let q = self.q() as u128;
        (0..self.k_dim)
            .map(|_| {
                let d = (index % q) as u32;
                index /= q;
                d
            })
            .collect()
    }

    pub fn encode(&self, message: &[u32]) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.n_q);
        self.encode_into(message, &mut out);
        out
    }

    pub fn encode_into(&self, message: &[u32], out: &mut Vec<u32>) {
        debug_assert_eq!(message.len(), self.k_dim);
        out.clear();
        out.extend(self.points.iter().map(|&x| self.field.eval_poly(message, x)));
        if self.infinity {
            out.push(message[self.k_dim - 1]);
        }
    }

    pub fn codeword(&self, index: u128) -> Vec<u32> {
        self.encode(&self.message(index))
    }

    /// All codewords in order of message index, refusing codes larger than
    /// `limit`.
    pub fn enumerate_codewords(&self, limit: u128) -> Result<CodewordIter<'_>> {
        self.first_codewords(self.size(), limit)
    }

    /// The first `count` codewords in message-index order.
    pub fn first_codewords(&self, count: u128, limit: u128) -> Result<CodewordIter<'_>> {
        let count = count.min(self.size());
        if count > limit {
            return Err(Error::EnumerationLimit { count, limit });
        }
        Ok(CodewordIter {
            code: self,
            next: 0,
            end: count,
            message: vec![0; self.k_dim],
        })
    }

    /// True iff the minimum nonzero codeword weight is `n_q − k + 1`. By
    /// linearity this is the minimum distance.
    pub fn verify_mds(&self, limit: u128) -> Result<bool> {
        Ok(self.min_weight(limit)? == Some(self.n_q - self.k_dim + 1))
    }

    /// Minimum weight over nonzero codewords, `None` if the code is `{0}`.
    pub fn min_weight(&self, limit: u128) -> Result<Option<usize>> {
        let iter = self.enumerate_codewords(limit)?;
        Ok(iter
            .skip(1)
            .map(|w| w.iter().filter(|&&s| s != 0).count())
            .min())
    }
}

pub struct CodewordIter<'a> {
    code: &'a QaryCode,
    next: u128,
    end: u128,
    message: Vec<u32>,
}

impl Iterator for CodewordIter<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.next >= self.end {
            return None;
        }
        let word = self.code.encode(&self.message);
        self.next += 1;
        let q = self.code.q() as u32;
        for d in self.message.iter_mut() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
        Some(word)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = (self.end - self.next) as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for CodewordIter<'_> {}
