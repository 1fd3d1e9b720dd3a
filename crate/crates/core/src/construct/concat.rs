//! Concatenation of q-ary codes with binary inner codes.

use crate::binmat::{BinaryCode, CodeMeta, Provenance};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

use crate::gf::{is_prime, prime_power, Field, QaryCode, DEFAULT_ENUMERATION_LIMIT};

/// Disjunctness guaranteed by an outer code alone: any two codewords agree
/// in at most `n_q − d_q` positions, so `d` of them leave some position of a
/// third untouched while `d·(n_q − d_q) < n_q`.
pub fn outer_certificate(qcode: &QaryCode, n_cols: usize) -> u32 {
    let agree = qcode.length() - qcode.distance();
    if agree == 0 {
        n_cols.saturating_sub(1) as u32
    } else {
        ((qcode.length() - 1) / agree) as u32
    }
}

fn check_size(qcode: &QaryCode, n: usize) -> Result<()> {
    if n == 0 || n as u128 > qcode.size() {
        return Err(Error::InvalidParams(format!(
            "requested {n} columns from a code with {} codewords",
            qcode.size()
        )));
    }
    Ok(())
}

/// Symbol `v` at position `i` becomes row `i·q + v`. Keeps the first `n`
/// codewords in message-index order.
pub fn concat_identity(qcode: &QaryCode, n: usize) -> Result<BinaryCode> {
    check_size(qcode, n)?;
    let q = qcode.q();
    let n_q = qcode.length();
    let limit = DEFAULT_ENUMERATION_LIMIT.max(n as u128);
    let columns = qcode
        .first_codewords(n as u128, limit)?
        .map(|word| {
            word.iter()
                .enumerate()
                .map(|(i, &v)| (i * q + v as usize) as u32)
                .collect()
        })
        .collect();
    let mu = (n_q - qcode.distance()) as u32;
    let meta = CodeMeta {
        certified_d: Some(outer_certificate(qcode, n)),
        weight: Some(n_q as u32),
        max_overlap: (n >= 2).then_some(mu),
        descriptor: format!("{}^Iq", qcode.label()),
        provenance: Provenance::Construction,
        separable_1: false,
    };
    BinaryCode::new(n_q * q, columns, meta)
}

/// Symbol `v` at position `i` becomes inner column `v` shifted into the
/// `i`-th block of `inner.t()` rows.
pub fn concat_inner(qcode: &QaryCode, inner: &BinaryCode, n: usize) -> Result<BinaryCode> {
    check_size(qcode, n)?;
    let q = qcode.q();
    if inner.n() < q {
        return Err(Error::InvalidParams(format!(
            "inner code has {} columns, needs at least q = {q}",
            inner.n()
        )));
    }
    let inner_d = match inner.meta().certified_d {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::Uncertified),
    };
    let it = inner.t();
    let n_q = qcode.length();
    let limit = DEFAULT_ENUMERATION_LIMIT.max(n as u128);
    let columns = qcode
        .first_codewords(n as u128, limit)?
        .map(|word| {
            let mut col = Vec::new();
            for (i, &v) in word.iter().enumerate() {
                col.extend(inner.column(v as usize).iter().map(|&r| (i * it) as u32 + r));
            }
            col
        })
        .collect();
    let weight = inner
        .columns()
        .iter()
        .take(q)
        .map(Vec::len)
        .try_fold(None, |acc: Option<usize>, w| match acc {
            Some(a) if a != w => Err(()),
            _ => Ok(Some(w)),
        })
        .ok()
        .flatten();
    let meta = CodeMeta {
        certified_d: Some(inner_d.min(outer_certificate(qcode, n))),
        weight: weight.map(|w| (w * n_q) as u32),
        max_overlap: None,
        descriptor: format!("{}^{}", qcode.label(), inner.meta().descriptor),
        provenance: Provenance::Construction,
        separable_1: false,
    };
    BinaryCode::new(n_q * it, columns, meta)
}

/// Lines of the affine plane AG(2, p) as a `p² × (p² + p)` code. Point
/// `(x, y)` is row `x·p + y`; columns list the lines `y = m·x + b` by slope
/// then intercept, followed by the vertical lines `x = c`.
pub fn inner_affine_lines(p: u32) -> Result<BinaryCode> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    let p = p as usize;
    let mut columns = Vec::with_capacity(p * p + p);
    for m in 0..p {
        for b in 0..p {
            let mut col: Vec<u32> = (0..p).map(|x| (x * p + (m * x + b) % p) as u32).collect();
            col.sort_unstable();
            columns.push(col);
        }
    }
    for c in 0..p {
        columns.push((0..p).map(|y| (c * p + y) as u32).collect());
    }
    let meta = CodeMeta {
        certified_d: Some(p as u32 - 1),
        weight: Some(p as u32),
        max_overlap: Some(1),
        descriptor: format!("AG(2,{p})"),
        provenance: Provenance::Overlap,
        separable_1: false,
    };
    BinaryCode::new(p * p, columns, meta)
}

/// Circles of the inversive plane of order `s`: the `s(s²+1)` images of the
/// subline `GF(s) ∪ {∞}` under the Möbius maps of `GF(s²) ∪ {∞}`. Field
/// element `z` is row `z`, the point at infinity is row `s²`. Any three
/// points lie on exactly one circle, so two circles share at most two
/// points and the code is `⌊s/2⌋`-disjunct.
pub fn inner_inversive_plane(s: u32) -> Result<BinaryCode> {
    let (p, e) = prime_power(s as u64)
        .ok_or_else(|| Error::InvalidParams(format!("order {s} is not a prime power")))?;
    let field = Field::new(p, 2 * e)?;
    let q = field.order();
    let inf = q;
    let subline: Vec<u32> = (0..q)
        .filter(|&z| field.pow(z, s as u64) == z)
        .chain(std::iter::once(inf))
        .collect();
    let image = |a: u32, b: u32, c: u32, d: u32, z: u32| -> u32 {
        if z == inf {
            return if c == 0 { inf } else { field.mul(a, field.inv(c).unwrap()) };
        }
        let den = field.add(field.mul(c, z), d);
        if den == 0 {
            inf
        } else {
            field.mul(field.add(field.mul(a, z), b), field.inv(den).unwrap())
        }
    };
    let mut circles = BTreeSet::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    if field.mul(a, d) == field.mul(b, c) {
                        continue;
                    }
                    let mut circle: Vec<u32> = subline.iter().map(|&z| image(a, b, c, d, z)).collect();
                    circle.sort_unstable();
                    circles.insert(circle);
                }
            }
        }
    }
    debug_assert_eq!(circles.len(), (s * (s * s + 1)) as usize);
    let meta = CodeMeta {
        certified_d: Some(s / 2),
        weight: Some(s + 1),
        max_overlap: Some(2),
        descriptor: format!("S(3,{},{})", s + 1, q + 1),
        provenance: Provenance::Overlap,
        separable_1: false,
    };
    BinaryCode::new(q as usize + 1, circles.into_iter().collect(), meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{rs_code, Field};

    fn rs(q: u64, n: usize, k: usize) -> QaryCode {
        rs_code(&Field::of_order(q).unwrap(), n, k).unwrap()
    }

    #[test]
    fn printed_symbol_mapping() {
        // Word (2,0,1,2,1,1,0) over q = 3; one-position code per symbol so
        // each column is one symbol mapped through I_3.
        let word = [2u32, 0, 1, 2, 1, 1, 0];
        let i3 = BinaryCode::identity(3).unwrap();
        let dense: Vec<Vec<u8>> = (0..3)
            .map(|r| word.iter().map(|&v| i3.column(v as usize).contains(&r) as u8).collect())
            .collect();
        assert_eq!(
            dense,
            vec![
                vec![0, 1, 0, 0, 0, 0, 1],
                vec![0, 0, 1, 0, 1, 1, 0],
                vec![1, 0, 0, 1, 0, 0, 0],
            ]
        );
        // The same mapping applied by concat_identity to the (1,1,1)_3 code.
        let c = concat_identity(&rs(3, 1, 1), 3).unwrap();
        for v in 0..3 {
            assert_eq!(c.column(v), &[v as u32]);
        }
    }

    #[test]
    fn ten_four_seven_eleven() {
        let c = concat_identity(&rs(11, 10, 4), 14_400).unwrap();
        assert_eq!((c.t(), c.n()), (110, 14_400));
        assert_eq!(c.meta().certified_d, Some(3));
        assert_eq!(c.max_overlap().unwrap().mu, 3);
        for col in c.columns() {
            assert_eq!(col.len(), 10);
            for block in 0..10u32 {
                assert_eq!(col.iter().filter(|&&r| r / 11 == block).count(), 1);
            }
        }
        let single = concat_identity(&rs(11, 10, 4), 1).unwrap();
        assert_eq!(single.column(0).len(), 10);
        assert!(concat_identity(&rs(11, 10, 4), 14_642).is_err());
    }

    #[test]
    fn inner_identity_matches_identity_concat() {
        let q = rs(7, 5, 2);
        let a = concat_identity(&q, 49).unwrap();
        let b = concat_inner(&q, &BinaryCode::identity(7).unwrap(), 49).unwrap();
        assert_eq!(a.columns(), b.columns());
        assert_eq!(a.meta().certified_d, b.meta().certified_d);
    }

    #[test]
    fn affine_inner_concat() {
        let inner = inner_affine_lines(3).unwrap();
        let c = concat_inner(&rs(11, 7, 4), &inner, 14_400).unwrap();
        assert_eq!((c.t(), c.n()), (63, 14_400));
        assert_eq!(c.meta().certified_d, Some(2));
        assert_eq!(c.meta().weight, Some(21));
        let small = BinaryCode::identity(5).unwrap();
        assert!(concat_inner(&rs(11, 7, 4), &small, 10).is_err());
    }

    #[test]
    fn inversive_planes() {
        for s in [2u32, 3, 4, 5] {
            let c = inner_inversive_plane(s).unwrap();
            let v = (s * s + 1) as usize;
            assert_eq!((c.t(), c.n(), c.uniform_weight()), (v, (s as usize) * v, Some(s as usize + 1)));
            assert_eq!(c.max_overlap().unwrap().mu, 2);
            // Oracle: every 3-subset of points lies in exactly one circle.
            let dense = c.to_dense();
            for x in 0..v {
                for y in x + 1..v {
                    for z in y + 1..v {
                        let k = (0..c.n()).filter(|&j| dense[x][j] & dense[y][j] & dense[z][j] == 1).count();
                        assert_eq!(k, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn fifty_one_rows_via_circles() {
        let inner = inner_inversive_plane(4).unwrap();
        let c = concat_inner(&rs(67, 3, 2), &inner, 3600).unwrap();
        assert_eq!((c.t(), c.n(), c.meta().certified_d), (51, 3600, Some(2)));
    }

    #[test]
    fn affine_lines_shapes() {
        for (p, t, n) in [(2u32, 4usize, 6usize), (3, 9, 12), (5, 25, 30)] {
            let c = inner_affine_lines(p).unwrap();
            assert_eq!((c.t(), c.n(), c.uniform_weight()), (t, n, Some(p as usize)));
            // Oracle: exhaustive pairwise overlap on the dense matrix.
            let dense = c.to_dense();
            let mut mu = 0;
            for i in 0..n {
                for j in i + 1..n {
                    mu = mu.max((0..t).filter(|&r| dense[r][i] & dense[r][j] == 1).count());
                }
            }
            assert_eq!(mu, 1);
            assert_eq!(c.meta().certified_d, Some(p - 1));
        }
        assert!(inner_affine_lines(4).is_err());
    }
}
