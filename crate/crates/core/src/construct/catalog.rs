//! Best-known constructions for square pixel arrays.

/// One cell of the construction table: the shortest known `d`-disjunct code
/// with at least `n` columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub n: usize,
    pub d: u32,
    /// Published number of rows.
    pub t: usize,
    pub descriptor: &'static str,
    pub source: Source,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// Reed–Solomon outer code with the identity or a built-in inner code.
    ReedSolomon,
    /// Length `q + 1` outer code. Built here from the doubly extended
    /// Reed–Solomon code, which has the same parameters as the published
    /// code but need not shorten identically.
    ExtendedReedSolomon,
    /// Standard Table or covering code; load it with `import_code` and
    /// register it by name.
    External,
}

impl CatalogEntry {
    pub fn internal(&self) -> bool {
        self.source != Source::External
    }
}

const fn e(n: usize, d: u32, t: usize, descriptor: &'static str, internal: bool) -> CatalogEntry {
    let source = if internal { Source::ReedSolomon } else { Source::External };
    CatalogEntry { n, d, t, descriptor, source }
}

const fn ext(n: usize, d: u32, t: usize, descriptor: &'static str) -> CatalogEntry {
    CatalogEntry { n, d, t, descriptor, source: Source::ExtendedReedSolomon }
}

pub const CATALOG: &[CatalogEntry] = &[
    e(100, 2, 21, "A(21,8,7)", false),
    e(100, 3, 36, "A(36,10,7)", false),
    e(100, 4, 48, "A(48,8,5)", false),
    e(100, 5, 60, "A(60,10,6)", false),
    e(100, 6, 75, "(7,2,6)_11^Iq,s(2)", true),
    e(400, 2, 31, "A(31,8,7)", false),
    e(400, 3, 51, "A(51,10,7)", false),
    e(400, 4, 64, "C(65,9,3)^s(1)", false),
    e(400, 5, 107, "(11,3,9)_11^Iq,s(14)", true),
    e(400, 6, 144, "(13,3,11)_13^Iq,s(25)", true),
    e(900, 2, 38, "A(38,8,7)", false),
    e(900, 3, 73, "(7,3,5)_11^Iq,s(4)", true),
    e(900, 4, 95, "(9,3,7)_11^Iq,s(4)", true),
    e(900, 5, 117, "(11,3,9)_11^Iq,s(4)", true),
    e(900, 6, 156, "(13,3,11)_13^Iq,s(13)", true),
    e(1600, 2, 44, "A(44,8,7)", false),
    ext(1600, 3, 78, "(10,4,7)_9^Iq,s(12)"),
    e(1600, 4, 113, "(9,3,7)_13^Iq,s(4),x", true),
    e(1600, 5, 140, "(11,3,9)_13^Iq,s(3)", true),
    e(1600, 6, 166, "(13,3,11)_13^Iq,s(3)", true),
    e(3600, 2, 51, "A(51,8,7)", false),
    ext(3600, 3, 85, "(10,4,7)_9^Iq,s(5)"),
    e(3600, 4, 142, "(9,3,7)_16^Iq,s(2)", true),
    e(3600, 5, 174, "(11,3,9)_16^Iq,s(2)", true),
    e(3600, 6, 206, "(13,3,11)_16^Iq,s(2)", true),
    e(14400, 2, 63, "(7,4,4)_11^A(9,4,3)", true),
    e(14400, 3, 110, "(10,4,7)_11^Iq", true),
    e(14400, 4, 161, "(13,4,10)_13^Iq,s(8)", true),
    e(14400, 5, 233, "(16,4,13)_16^Iq,s(23)", true),
    e(14400, 6, 323, "(13,3,11)_25^Iq,s(2)", true),
];

/// Internally buildable stand-ins. At 3,600 columns and `d = 2` the
/// 51-row concatenation with the 17-point inversive plane matches the
/// published row count with weight 15 instead of 7. For the two length-10
/// entries over GF(9) the `(10,4,7)_11` code is shortened as far as the
/// target allows, and `t` is what it achieves, not a published value.
pub const SUBSTITUTES: &[CatalogEntry] = &[
    e(3600, 2, 51, "(3,2,2)_67^S(3,5,17)", true),
    e(1600, 3, 88, "(10,4,7)_11^Iq,s(22)", true),
    e(3600, 3, 96, "(10,4,7)_11^Iq,s(14)", true),
];

/// The `(10,4,7)_9` entry at 1,600 columns shortens one step less with the
/// doubly extended code and lowest-index tie-breaking; this is the recipe
/// that does reach the target.
pub const EXTENDED_FALLBACK: CatalogEntry = ext(1600, 3, 79, "(10,4,7)_9^Iq,s(11)");

pub fn lookup(n: usize, d: u32) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|c| c.n == n && c.d == d)
}

/// Grid sides whose pixel counts appear in the catalog.
pub const GRID_SIDES: [usize; 6] = [10, 20, 30, 40, 60, 120];

/// One line of the cross-strip versus catalog comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignComparison {
    pub side: usize,
    pub n: usize,
    /// `2m` rows: one TDC per pixel row and per pixel column.
    pub cross_strip: usize,
    /// Published catalog rows for `d = 2..=6`.
    pub codes: Vec<(u32, usize)>,
    /// Too small for a meaningful comparison.
    pub degenerate: bool,
}

/// TDC counts of the cross-strip design against the catalog for each grid
/// side; sides missing from the catalog are an error, except `m = 1`.
pub fn compare_designs(sides: &[usize]) -> crate::Result<Vec<DesignComparison>> {
    sides
        .iter()
        .map(|&m| {
            let n = m * m;
            let codes: Vec<(u32, usize)> = (2..=6).filter_map(|d| lookup(n, d).map(|e| (d, e.t))).collect();
            let degenerate = m <= 1;
            if codes.is_empty() && !degenerate {
                return Err(crate::Error::Invalid(format!("no catalog entries for a {m}x{m} grid")));
            }
            Ok(DesignComparison { side: m, n, cross_strip: 2 * m, codes, degenerate })
        })
        .collect()
}

pub fn write_comparison<W: std::io::Write>(mut w: W, rows: &[DesignComparison], sep: char) -> crate::Result<()> {
    writeln!(w, "side{sep}n{sep}cross_strip{sep}d=2{sep}d=3{sep}d=4{sep}d=5{sep}d=6{sep}note")?;
    for r in rows {
        write!(w, "{}{sep}{}{sep}{}", r.side, r.n, r.cross_strip)?;
        for d in 2..=6 {
            match r.codes.iter().find(|c| c.0 == d) {
                Some((_, t)) => write!(w, "{sep}{t}")?,
                None => write!(w, "{sep}-")?,
            }
        }
        writeln!(w, "{sep}{}", if r.degenerate { "degenerate" } else { "-" })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_rows() {
        let rows = compare_designs(&[1, 10, 120]).unwrap();
        assert!(rows[0].degenerate && rows[0].cross_strip == 2);
        assert_eq!(rows[1].cross_strip, 20);
        assert_eq!(rows[1].codes[0], (2, 21));
        assert_eq!(rows[2].cross_strip, 240);
        assert!(rows[2].codes.contains(&(4, 161)));
        assert!(compare_designs(&[7]).is_err());
        let mut out = Vec::new();
        write_comparison(&mut out, &rows, '\t').unwrap();
        assert!(String::from_utf8(out).unwrap().contains("120\t14400\t240\t63\t110\t161\t233\t323\t-"));
    }
}
