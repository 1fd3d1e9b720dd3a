//! The Chinese remainder sieve.

use num_bigint::BigUint;
use num_traits::One;

use crate::binmat::{BinaryCode, CodeMeta, Provenance};
use crate::error::{Error, Result};
use crate::gf::prime_power;

/// Powers of pairwise distinct primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePowerSet {
    entries: Vec<u64>,
}

impl PrimePowerSet {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        let mut bases = Vec::with_capacity(entries.len());
        for &e in &entries {
            let (p, _) = prime_power(e).ok_or_else(|| {
                Error::InvalidParams(format!("{e} is not a prime power >= 2"))
            })?;
            if bases.contains(&p) {
                return Err(Error::InvalidParams(format!("prime {p} appears twice")));
            }
            bases.push(p);
        }
        if entries.is_empty() {
            return Err(Error::InvalidParams("empty prime-power set".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn sum(&self) -> u64 {
        self.entries.iter().sum()
    }

    pub fn product(&self) -> BigUint {
        self.entries
            .iter()
            .fold(BigUint::one(), |acc, &e| acc * BigUint::from(e))
    }

    /// Largest `d ≥ 1` with `product ≥ n^d`, or 0 when `product < n`.
    pub fn certified_d(&self, n: usize) -> u32 {
        let prod = self.product();
        let n_big = BigUint::from(n);
        if n <= 1 {
            // Every power of 1 is covered; cap at the number of columns.
            return 0;
        }
        let mut d = 0u32;
        let mut pow = n_big.clone();
        while pow <= prod {
            d += 1;
            pow *= &n_big;
        }
        d
    }
}

/// The prime-power sets printed for d = 2..=6 in the sieve table.
pub fn tabulated_set(d: u32) -> Option<PrimePowerSet> {
    let entries: &[u64] = match d {
        2 => &[8, 9, 5, 7, 11, 13, 17, 23],
        3 => &[4, 3, 5, 7, 11, 13, 17, 19, 23, 29, 37],
        4 => &[8, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 43],
        5 => &[8, 9, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 53],
        6 => &[8, 9, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 53, 61],
        _ => return None,
    };
    Some(PrimePowerSet::new(entries.to_vec()).expect("table sets are valid"))
}

/// Rows are residue indicators stacked block by block: column `j` has a one
/// in row `offset_ℓ + (j mod m_ℓ)` of every block `ℓ`.
pub fn crt_sieve(pps: &PrimePowerSet, n: usize) -> Result<BinaryCode> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let t = pps.sum() as usize;
    let columns = (0..n)
        .map(|j| {
            let mut offset = 0u64;
            pps.entries
                .iter()
                .map(|&m| {
                    let r = offset + (j as u64 % m);
                    offset += m;
                    r as u32
                })
                .collect::<Vec<u32>>()
        })
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    let d = if n == 1 { 0 } else { pps.certified_d(n) };
    let label: Vec<String> = pps.entries.iter().map(u64::to_string).collect();
    let meta = CodeMeta {
        certified_d: Some(d),
        weight: Some(pps.entries.len() as u32),
        max_overlap: None,
        descriptor: format!("crt{{{}}}", label.join(",")),
        provenance: Provenance::Construction,
        separable_1: false,
    };
    BinaryCode::new(t, columns, meta)
}
