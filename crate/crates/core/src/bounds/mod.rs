//! Numerical evaluation of upper and lower bounds on the number of tests
//! needed for `d`-disjunct codes of size `n`.
//!
//! Threshold decisions are exact: a floating-point screen proposes, big
//! integer arithmetic confirms.

mod exact;
mod rows;
mod search;

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

pub use exact::{binom, r_coverings};
pub use rows::{
    lb_info, lb_private_pairs, lb_ruszinko, lll_dependencies, overlap_count, ub_bern_delete, ub_bernoulli,
    ub_bernoulli_closed_form, ub_cw_group, ub_cw_group_delete, ub_cw_lll, ub_cw_pairwise_delete, ub_hwang_sos,
    ub_sequential,
};
pub use search::{min_feasible, SearchTrace};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Row {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
    N,
    O,
    P,
    Q,
    R,
    S,
    T,
}

impl Row {
    pub const ALL: [Row; 20] = [
        Row::A,
        Row::B,
        Row::C,
        Row::D,
        Row::E,
        Row::F,
        Row::G,
        Row::H,
        Row::I,
        Row::J,
        Row::K,
        Row::L,
        Row::M,
        Row::N,
        Row::O,
        Row::P,
        Row::Q,
        Row::R,
        Row::S,
        Row::T,
    ];
    pub const COMPUTED: [Row; 11] =
        [Row::A, Row::C, Row::D, Row::E, Row::F, Row::G, Row::H, Row::I, Row::P, Row::S, Row::T];

    pub fn id(self) -> char {
        (b'a' + Row::ALL.iter().position(|&r| r == self).unwrap() as u8) as char
    }

    pub fn from_id(c: char) -> Option<Row> {
        let i = (c as u8).checked_sub(b'a')? as usize;
        Row::ALL.get(i).copied()
    }

    pub fn is_lower(self) -> bool {
        self >= Row::O
    }

    pub fn is_computed(self) -> bool {
        Row::COMPUTED.contains(&self)
    }

    /// The class the bound applies to.
    pub fn class(self) -> &'static str {
        match self {
            Row::A | Row::B | Row::C | Row::H | Row::J | Row::L | Row::N | Row::O | Row::P | Row::R => "D_{w,mu}",
            Row::E | Row::F | Row::I | Row::M | Row::Q | Row::S => "D_w",
            Row::D | Row::G | Row::K => "D",
            Row::T => "S",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Row::A => "sequential picking, closed form",
            Row::B => "sequential picking, optimal w (literature)",
            Row::C => "sequential picking, optimal w",
            Row::D => "Bernoulli ensemble, union bound",
            Row::E => "constant weight, groupwise cover, union bound",
            Row::F => "constant weight, local lemma",
            Row::G => "Bernoulli, groupwise cover, deletion",
            Row::H => "constant weight, pairwise overlap, deletion",
            Row::I => "constant weight, groupwise cover, deletion",
            Row::J => "random q-ary construction (literature)",
            Row::K => "identity augmentation (literature)",
            Row::L => "greedy search",
            Row::M => "Chinese remainder sieve",
            Row::N => "error-correction code based",
            Row::O => "constant weight code bound (literature)",
            Row::P => "private (mu+1)-subsets",
            Row::Q => "groupwise cover lower bound (literature)",
            Row::R => "sequential picking lower bound (literature)",
            Row::S => "private w/d-subsets",
            Row::T => "information bound",
        }
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.id())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Optimizer {
    pub w: Option<u64>,
    pub mu: Option<u64>,
    pub m: Option<u64>,
    /// Bernoulli parameter as a fraction.
    pub beta: Option<(u64, u64)>,
}

impl Optimizer {
    pub fn w(w: u64) -> Self {
        Self { w: Some(w), ..Self::default() }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(w) = self.w {
            parts.push(format!("w={w}"));
        }
        if let Some(mu) = self.mu {
            parts.push(format!("mu={mu}"));
        }
        if let Some(m) = self.m {
            parts.push(format!("m={m}"));
        }
        if let Some((a, b)) = self.beta {
            parts.push(format!("beta={a}/{b}"));
        }
        if parts.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Computed,
    /// Published value for a bound whose formula is not evaluated here.
    Literature,
    /// Row count of a supplied construction.
    Construction,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Computed => "computed",
            Status::Literature => "literature",
            Status::Construction => "construction",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub row: Row,
    pub n: u64,
    pub d: u32,
    pub value: u64,
    pub optimizer: Optimizer,
    pub status: Status,
    /// The `m` search stopped at its upper end `32n`.
    pub boundary_hit: bool,
    pub trace: SearchTrace,
    pub note: Option<String>,
}

impl BoundResult {
    fn computed(row: Row, n: u64, d: u32, value: u64, optimizer: Optimizer) -> Self {
        Self {
            row,
            n,
            d,
            value,
            optimizer,
            status: Status::Computed,
            boundary_hit: false,
            trace: SearchTrace::default(),
            note: None,
        }
    }

    fn fixed(row: Row, n: u64, d: u32, value: u64, status: Status, note: Option<String>) -> Self {
        Self { status, note, ..Self::computed(row, n, d, value, Optimizer::default()) }
    }

    /// Exact re-evaluation of the row's condition at the recorded value and
    /// optimizer.
    pub fn reverify(&self) -> Result<bool> {
        rows::holds(self)
    }
}

/// Evaluates one computed row.
pub fn evaluate(row: Row, n: u64, d: u32) -> Result<BoundResult> {
    match row {
        Row::A => ub_hwang_sos(n, d),
        Row::C => ub_sequential(n, d),
        Row::D => ub_bernoulli(n, d),
        Row::E => ub_cw_group(n, d),
        Row::F => ub_cw_lll(n, d),
        Row::G => ub_bern_delete(n, d),
        Row::H => ub_cw_pairwise_delete(n, d),
        Row::I => ub_cw_group_delete(n, d),
        Row::P => lb_private_pairs(n, d),
        Row::S => {
            let mut r = lb_ruszinko(n, d, false)?;
            let floor = lb_ruszinko(n, d, true)?;
            let mut note = format!("floor(w/d) variant: {}", floor.value);
            if let Some(p) = published(Row::S, n, d) {
                note.push_str(&format!("; published: {p}"));
            }
            r.note = Some(note);
            Ok(r)
        }
        Row::T => lb_info(n, d),
        other => Err(Error::Invalid(format!("row {other} has no formula here"))),
    }
}

const PUBLISHED_N: u64 = 3600;

/// Published values at `n = 3600`, `d = 2..=6`.
pub fn published(row: Row, n: u64, d: u32) -> Option<u64> {
    if n != PUBLISHED_N || !(2..=6).contains(&d) {
        return None;
    }
    let v: [u64; 5] = match row {
        Row::A => [436, 982, 1746, 2729, 3929],
        Row::B => [94, 237, 443, 711, 1043],
        Row::C => [90, 222, 412, 660, 966],
        Row::D => [149, 278, 442, 640, 870],
        Row::E => [96, 190, 312, 459, 631],
        Row::F => [76, 163, 279, 422, 590],
        Row::G => [110, 225, 376, 561, 779],
        Row::H => [99, 249, 465, 746, 1094],
        Row::I => [71, 154, 265, 402, 565],
        Row::J => [130, 300, 522, 828, 1178],
        Row::K => [98, 205, 348, 524, 734],
        Row::L => [58, 132, 224, 345, 484],
        Row::M => [82, 155, 237, 333, 445],
        Row::N => [51, 85, 142, 174, 206],
        Row::O => [35, 56, 75, 96, 115],
        Row::P => [35, 55, 74, 93, 113],
        Row::Q => [35, 0, 0, 0, 0],
        Row::R => [32, 48, 62, 75, 88],
        Row::S => [29, 40, 48, 55, 61],
        Row::T => [23, 33, 43, 53, 62],
    };
    Some(v[d as usize - 2]).filter(|&x| x > 0)
}

/// A construction supplied to fill rows (l), (m) or (n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionRow {
    pub row: Row,
    pub d: u32,
    pub t: u64,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct BoundsTable {
    pub n: u64,
    pub ds: Vec<u32>,
    pub results: Vec<BoundResult>,
    /// Computed rows that decrease somewhere along `ds`.
    pub non_monotone: Vec<Row>,
    /// `max(lower) ≤ min(upper)` over computed rows at every `d`.
    pub sandwich: bool,
}

impl BoundsTable {
    pub fn get(&self, row: Row, d: u32) -> Option<&BoundResult> {
        self.results.iter().find(|r| r.row == row && r.d == d)
    }

    /// Long form: `row_id, d, value, optimizer, status, note`.
    pub fn write_long<W: Write>(&self, mut w: W, sep: char) -> Result<()> {
        writeln!(w, "row_id{sep}d{sep}value{sep}optimizer{sep}status{sep}note")?;
        for r in &self.results {
            let mut note = r.note.clone().unwrap_or_default();
            if r.boundary_hit {
                note = if note.is_empty() { "m at 32n".into() } else { format!("{note}; m at 32n") };
            }
            writeln!(
                w,
                "{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}",
                r.row.id(),
                r.d,
                r.value,
                r.optimizer,
                r.status.as_str(),
                if note.is_empty() { "-".into() } else { note }
            )?;
        }
        Ok(())
    }

    /// One line per row with a column per `d`, in table order.
    pub fn write_wide<W: Write>(&self, mut w: W, sep: char) -> Result<()> {
        write!(w, "row{sep}class")?;
        for d in &self.ds {
            write!(w, "{sep}d={d}")?;
        }
        writeln!(w, "{sep}status{sep}description")?;
        for row in Row::ALL {
            let cells: Vec<Option<&BoundResult>> = self.ds.iter().map(|&d| self.get(row, d)).collect();
            let Some(first) = cells.iter().flatten().next() else {
                continue;
            };
            let bound = if row.is_lower() { ">=" } else { "<=" };
            write!(w, "({}){sep}T_{}(n,d) {bound}", row.id(), row.class())?;
            for c in &cells {
                match c {
                    Some(r) => write!(w, "{sep}{}", r.value)?,
                    None => write!(w, "{sep}-")?,
                }
            }
            writeln!(w, "{sep}{}{sep}{}", first.status.as_str(), row.description())?;
        }
        Ok(())
    }
}

/// Evaluates the requested rows for every `d`, adds published values for
/// the literature rows and any supplied constructions, and audits the
/// result.
pub fn bounds_table(n: u64, ds: &[u32], rows: &[Row], constructions: &[ConstructionRow]) -> Result<BoundsTable> {
    if let Some(&d) = ds.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidParams(format!(
            "d = {d} is not tabulated: d = 1 only needs distinct columns and d = 0 is trivial"
        )));
    }
    let cells: Vec<(Row, u32)> =
        rows.iter().filter(|r| r.is_computed()).flat_map(|&r| ds.iter().map(move |&d| (r, d))).collect();
    let mut results: Vec<BoundResult> =
        cells.into_par_iter().map(|(r, d)| evaluate(r, n, d)).collect::<Result<Vec<_>>>()?;
    for &row in rows.iter().filter(|r| !r.is_computed()) {
        for &d in ds {
            if let Some(c) = constructions.iter().find(|c| c.row == row && c.d == d) {
                results.push(BoundResult::fixed(row, n, d, c.t, Status::Construction, Some(c.label.clone())));
            } else if let Some(v) = published(row, n, d).filter(|_| !matches!(row, Row::L | Row::M | Row::N)) {
                results.push(BoundResult::fixed(row, n, d, v, Status::Literature, Some("literature value, not computed".into())));
            }
        }
    }
    results.sort_by_key(|r| (r.row, r.d));

    let mut non_monotone = Vec::new();
    for &row in rows.iter().filter(|r| r.is_computed()) {
        let vals: Vec<u64> = results.iter().filter(|r| r.row == row).map(|r| r.value).collect();
        if vals.windows(2).any(|p| p[1] < p[0]) {
            non_monotone.push(row);
        }
    }
    let sandwich = ds.iter().all(|&d| {
        let of = |lower: bool| {
            results
                .iter()
                .filter(move |r| r.d == d && r.status == Status::Computed && r.row.is_lower() == lower)
                .map(|r| r.value)
        };
        match (of(true).max(), of(false).min()) {
            (Some(lo), Some(hi)) => lo <= hi,
            _ => true,
        }
    });
    Ok(BoundsTable { n, ds: ds.to_vec(), results, non_monotone, sandwich })
}
