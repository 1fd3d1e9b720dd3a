//! The two row-deleting shortenings.

use crate::binmat::{BinaryCode, CodeMeta, Provenance};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct WeightShortening {
    pub code: BinaryCode,
    /// Index of the deleted row in the input code.
    pub row: usize,
    /// Some surviving column lost its only entry.
    pub degenerate: bool,
}

/// Picks the row with most ones (lowest index on ties), keeps the columns
/// through it and deletes the row. Weight and length drop by one.
pub fn shorten_weight(code: &BinaryCode) -> Result<WeightShortening> {
    if code.t() < 2 {
        return Err(Error::Degenerate("cannot shorten a code with one row".into()));
    }
    let counts = code.row_counts();
    let (row, &best) = counts
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, c)| *c)
        .expect("t >= 2");
    if best == 0 {
        return Err(Error::Degenerate("all-zero matrix".into()));
    }
    let row32 = row as u32;
    let columns: Vec<Vec<u32>> = code
        .columns()
        .iter()
        .filter(|c| c.binary_search(&row32).is_ok())
        .map(|c| {
            c.iter()
                .filter(|&&r| r != row32)
                .map(|&r| if r > row32 { r - 1 } else { r })
                .collect()
        })
        .collect();
    let degenerate = columns.iter().any(|c: &Vec<u32>| c.is_empty());
    let w = code.uniform_weight().map(|w| w as u32 - 1);
    let mut meta = CodeMeta {
        weight: w,
        descriptor: format!("{}|sw", code.meta().descriptor),
        ..CodeMeta::default()
    };
    let mut out = BinaryCode::new(code.t() - 1, columns, meta.clone())?;
    if out.n() >= 2 {
        let mu = out.max_overlap()?.mu as u32;
        meta.max_overlap = Some(mu);
        if let Some(w) = w {
            meta.certified_d = Some(if mu == 0 { out.n() as u32 - 1 } else { w.saturating_sub(1) / mu });
            meta.provenance = Provenance::Overlap;
        }
        out = out.with_meta(meta)?;
    }
    Ok(WeightShortening { code: out, row, degenerate })
}

#[derive(Clone, Debug)]
pub struct ZeroShortening {
    pub code: BinaryCode,
    /// Column count after each step.
    pub surviving: Vec<usize>,
    /// Input row index deleted at each step.
    pub rows: Vec<usize>,
}

/// `steps` rounds of: pick the row with most zeros (lowest index on ties),
/// keep the columns with a zero there, delete the row. Column weight and
/// disjunctness are unchanged.
pub fn shorten_zero(code: &BinaryCode, steps: usize) -> Result<ZeroShortening> {
    if steps >= code.t() {
        return Err(Error::InvalidParams(format!(
            "cannot delete {steps} of {} rows",
            code.t()
        )));
    }
    let t = code.t();
    let run = zero_steps(code, steps);
    if let Some(step) = run.exhausted_at {
        return Err(Error::ShortenExhausted { step });
    }
    let ZeroRun { alive, removed, surviving, rows, .. } = run;
    let n_alive = surviving.last().copied().unwrap_or(code.n());
    let mut new_index = vec![u32::MAX; t];
    let mut next = 0;
    for r in 0..t {
        if !removed[r] {
            new_index[r] = next;
            next += 1;
        }
    }
    let columns = code
        .columns()
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(c, _)| c.iter().map(|&r| new_index[r as usize]).collect())
        .collect();
    let mut meta = code.meta().clone();
    if steps > 0 {
        meta.descriptor = append_transform(&meta.descriptor, &format!("s({steps})"));
    }
    if n_alive < 2 {
        meta.max_overlap = None;
    }
    let code = BinaryCode::new(t - steps, columns, meta)?;
    Ok(ZeroShortening { code, surviving, rows })
}

pub(crate) fn append_transform(desc: &str, tr: &str) -> String {
    if desc.is_empty() {
        tr.to_string()
    } else if desc.contains('^') {
        format!("{desc},{tr}")
    } else {
        format!("{desc}^{tr}")
    }
}

struct ZeroRun {
    alive: Vec<bool>,
    removed: Vec<bool>,
    surviving: Vec<usize>,
    rows: Vec<usize>,
    exhausted_at: Option<usize>,
}

fn zero_steps(code: &BinaryCode, steps: usize) -> ZeroRun {
    let t = code.t();
    let mut alive = vec![true; code.n()];
    let mut counts = code.row_counts();
    let mut removed = vec![false; t];
    let rows_of = code.row_lists();
    let mut n_alive = code.n();
    let mut surviving = Vec::with_capacity(steps);
    let mut rows = Vec::with_capacity(steps);
    for step in 0..steps.min(t.saturating_sub(1)) {
        let row = (0..t)
            .filter(|&r| !removed[r])
            .min_by_key(|&r| counts[r])
            .expect("rows remain");
        if counts[row] == n_alive {
            return ZeroRun { alive, removed, surviving, rows, exhausted_at: Some(step) };
        }
        for &j in &rows_of[row] {
            let j = j as usize;
            if alive[j] {
                alive[j] = false;
                n_alive -= 1;
                for &r in code.column(j) {
                    counts[r as usize] -= 1;
                }
            }
        }
        removed[row] = true;
        surviving.push(n_alive);
        rows.push(row);
    }
    ZeroRun { alive, removed, surviving, rows, exhausted_at: None }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShorteningReport {
    /// Steps actually possible before the column count would fall below
    /// the target.
    pub max_steps: usize,
    /// Column count after `max_steps` steps.
    pub surviving: usize,
    /// Steps guaranteed by the bound: a constant-weight code has a row with
    /// at most `⌊w·n/t⌋` ones, so each step keeps at least `n − ⌊w·n/t⌋`.
    pub guaranteed_steps: usize,
}

/// Runs zero-shortening until one more step would leave fewer than
/// `target_n` columns, and compares with the counting guarantee.
pub fn max_zero_steps(code: &BinaryCode, target_n: usize) -> Result<ShorteningReport> {
    let w = code.uniform_weight().ok_or(Error::NonUniformWeight)?;
    let surviving = zero_steps(code, code.t() - 1).surviving;
    let max_steps = surviving.iter().take_while(|&&n| n >= target_n).count();
    let after = if max_steps == 0 { code.n() } else { surviving[max_steps - 1] };
    let (mut n, mut t, mut guaranteed) = (code.n(), code.t(), 0);
    while t > 1 {
        let next = n - w * n / t;
        if next < target_n {
            break;
        }
        n = next;
        t -= 1;
        guaranteed += 1;
    }
    Ok(ShorteningReport {
        max_steps,
        surviving: after,
        guaranteed_steps: guaranteed,
    })
}
