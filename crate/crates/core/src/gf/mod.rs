//! Arithmetic in GF(p^k) and Reed–Solomon codes over it.
//!
//! Field elements are integers `0..q`: the polynomial `c_0 + c_1 x + …` is
//! encoded as `c_0 + c_1 p + c_2 p² + …`. All operations go through
//! precomputed `q × q` tables, which is cheap for the small fields used here.

mod rs;

pub use rs::{rs_code, rs_code_extended, CodewordIter, QaryCode, DEFAULT_ENUMERATION_LIMIT};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for Field {}

/// Built-in irreducible moduli, low-degree coefficient first, monic.
fn default_modulus(p: u32, k: u32) -> Option<Vec<u32>> {
    Some(match (p, k) {
        (_, 1) => vec![0, 1],
        (2, 2) => vec![1, 1, 1],
        (2, 3) => vec![1, 1, 0, 1],
        (2, 4) => vec![1, 1, 0, 0, 1],
        (2, 5) => vec![1, 0, 1, 0, 0, 1],
        (2, 6) => vec![1, 1, 0, 0, 0, 0, 1],
        (3, 2) => vec![1, 0, 1],
        (3, 3) => vec![1, 2, 0, 1],
        (5, 2) => vec![2, 0, 1],
        (7, 2) => vec![1, 0, 1],
        _ => return None,
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `q = p^k` with `p` prime, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p as u32, k))
}

impl Field {
    /// GF(p^k) with the built-in modulus.
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::InvalidParams("extension degree k must be at least 1".into()));
        }
        let modulus = default_modulus(p, k).ok_or(Error::NoModulus { p, k })?;
        Self::with_modulus(p, k, modulus)
    }

    /// GF(q) for a prime power `q`.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q)
            .ok_or_else(|| Error::InvalidParams(format!("{q} is not a prime power")))?;
        Self::new(p, k)
    }

    /// GF(p^k) modulo a supplied monic irreducible polynomial of degree `k`,
    /// coefficients low degree first.
    pub fn with_modulus(p: u32, k: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::InvalidParams("extension degree k must be at least 1".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= 1 << 12)
            .ok_or_else(|| Error::InvalidParams(format!("GF({p}^{k}) is too large")))?;
        if k > 1 {
            if modulus.len() != k as usize + 1 || modulus.iter().any(|&c| c >= p) {
                return Err(Error::InvalidModulus(format!(
                    "expected {} coefficients in 0..{p}",
                    k + 1
                )));
            }
            if modulus[k as usize] != 1 {
                return Err(Error::InvalidModulus("modulus is not monic".into()));
            }
            if !is_irreducible(&modulus, p) {
                return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over GF({p})")));
            }
        }
        let qs = q as usize;
        let digits = |mut a: u32| -> Vec<u32> {
            (0..k)
                .map(|_| {
                    let d = a % p;
                    a /= p;
                    d
                })
                .collect()
        };
        let pack = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        let mut add = vec![0u32; qs * qs];
        let mut mul = vec![0u32; qs * qs];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = pack(&s);
                mul[(a * q + b) as usize] = pack(&poly_mulmod(&da, &db, &modulus, p, k));
            }
        }
        let mut neg = vec![0u32; qs];
        let mut inv = vec![0u32; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as u32;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as u32;
                }
            }
        }
        Ok(Self {
            p,
            k,
            q,
            modulus: if k == 1 { Vec::new() } else { modulus },
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Horner evaluation of `Σ coeffs[i] x^i`.
    pub fn eval_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32, k: u32) -> Vec<u32> {
    let k = k as usize;
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    if k > 1 {
        for deg in (k..2 * k).rev() {
            let c = prod[deg];
            if c != 0 {
                for (i, &m) in modulus.iter().enumerate().take(k) {
                    let idx = deg - k + i;
                    prod[idx] = (prod[idx] + (p - c) * m) % p;
                }
                prod[deg] = 0;
            }
        }
    } else {
        // k = 1: only prod[0] is meaningful.
        prod[0] %= p;
    }
    prod.truncate(k);
    prod
}

/// Exhaustive test: no monic factor of degree 1..=deg/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for fd in 1..=deg / 2 {
        let count = (p as u64).pow(fd as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(fd + 1);
            let mut v = idx;
            for _ in 0..fd {
                g.push((v % p as u64) as u32);
                v /= p as u64;
            }
            g.push(1);
            if poly_rem_is_zero(f, &g, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(f: &[u32], g: &[u32], p: u32) -> bool {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    for top in (dg..r.len()).rev() {
        let c = r[top];
        if c != 0 {
            for (i, &gi) in g.iter().enumerate() {
                let idx = top - dg + i;
                r[idx] = (r[idx] + (p - c) * gi % p) % p;
            }
        }
    }
    r.iter().all(|&c| c == 0)
}
