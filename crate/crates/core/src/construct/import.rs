//! Loading externally constructed codes.

use crate::binmat::{load, BinaryCode, CodeMeta, Provenance};
use crate::error::{Error, Result};

/// Parameters claimed for an imported code. Every present field is checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Declared {
    pub length: Option<usize>,
    pub weight: Option<usize>,
    /// Minimum Hamming distance between columns.
    pub distance: Option<usize>,
    pub overlap: Option<usize>,
}

/// Parses a GTMX stream or a plain column list (one column per line, 0-based
/// row indices separated by whitespace, `#` comments), checks the
/// declaration and certifies disjunctness from the exact overlaps.
///
/// A column of weight `w_j` whose largest overlap with another column is
/// `μ_j` survives any `⌊(w_j − 1)/μ_j⌋` others, so the certificate is the
/// minimum of that over all columns.
pub fn import_code(text: &str, declared: &Declared, descriptor: &str) -> Result<BinaryCode> {
    let code = if text.trim_start().starts_with("GTMX") {
        load(text)?
    } else {
        parse_plain(text, declared.length)?
    };
    if let Some(t) = declared.length {
        if code.t() != t {
            return Err(Error::Declaration(format!("declared length {t}, code has {} rows", code.t())));
        }
    }
    if let Some(w) = declared.weight {
        for (j, c) in code.columns().iter().enumerate() {
            if c.len() != w {
                return Err(Error::WeightMismatch { column: j, found: c.len(), declared: w });
            }
        }
    }
    let n = code.n();
    let weight = code.uniform_weight();
    let (mu, per_column) = if n >= 2 {
        let report = code.max_overlap()?;
        let (a, b) = report.pair;
        if let Some(m) = declared.overlap {
            if report.mu > m {
                return Err(Error::Declaration(format!(
                    "columns {a} and {b} overlap in {} rows, declared overlap {m}",
                    report.mu
                )));
            }
        }
        if let (Some(dh), Some(w)) = (declared.distance, weight) {
            // Constant weight: distance = 2(w − overlap).
            if 2 * (w - report.mu) < dh {
                return Err(Error::Declaration(format!(
                    "columns {a} and {b} are at distance {}, declared distance {dh}",
                    2 * (w - report.mu)
                )));
            }
        }
        (Some(report.mu), code.per_column_max_overlap()?)
    } else {
        (None, vec![0])
    };
    let certified = code
        .columns()
        .iter()
        .zip(&per_column)
        .map(|(c, &m)| {
            if m == 0 {
                n as u32 - 1
            } else {
                (c.len().saturating_sub(1) / m) as u32
            }
        })
        .min()
        .unwrap_or(0);
    let meta = CodeMeta {
        certified_d: Some(certified),
        weight: weight.map(|w| w as u32),
        max_overlap: mu.map(|m| m as u32),
        descriptor: if descriptor.is_empty() {
            code.meta().descriptor.clone()
        } else {
            descriptor.to_string()
        },
        provenance: Provenance::Overlap,
        separable_1: code.meta().separable_1,
    };
    code.with_meta(meta)
}

fn parse_plain(text: &str, length: Option<usize>) -> Result<BinaryCode> {
    let mut columns = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut col: Vec<u32> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("bad row index {s:?}"),
                })
            })
            .collect::<Result<_>>()?;
        col.sort_unstable();
        if col.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse { line: i + 1, msg: "repeated row index".into() });
        }
        columns.push(col);
    }
    let max_row = columns.iter().filter_map(|c| c.last()).max().map_or(0, |&r| r as usize + 1);
    let t = length.unwrap_or(max_row).max(1);
    BinaryCode::new(t, columns, CodeMeta::default())
}
