//! The three baseline readout schemes for an `m × m` pixel grid.

use super::{BinaryCode, CodeMeta, Provenance};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    /// One TDC per pixel.
    PerPixel,
    /// One TDC per grid row and one per grid column.
    CrossStrip,
    /// One TDC per bit of the (1-based) pixel number.
    BinaryCounting,
}

impl ReferenceKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "per_pixel" | "per-pixel" => ReferenceKind::PerPixel,
            "cross_strip" | "cross-strip" => ReferenceKind::CrossStrip,
            "binary_counting" | "binary-counting" => ReferenceKind::BinaryCounting,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::PerPixel => "per_pixel",
            ReferenceKind::CrossStrip => "cross_strip",
            ReferenceKind::BinaryCounting => "binary_counting",
        }
    }
}

/// Pixel `(r, c)` of the grid is column `r·m + c`.
pub fn reference_design(kind: ReferenceKind, m: usize) -> Result<BinaryCode> {
    if m == 0 {
        return Err(Error::InvalidParams("grid side m must be at least 1".into()));
    }
    let n = m * m;
    match kind {
        ReferenceKind::PerPixel => {
            let code = BinaryCode::identity(n)?;
            Ok(code.with_descriptor(format!("per_pixel m={m}")))
        }
        ReferenceKind::CrossStrip => {
            let columns = (0..n)
                .map(|p| vec![(p / m) as u32, (m + p % m) as u32])
                .collect();
            let meta = CodeMeta {
                certified_d: Some(1),
                weight: Some(2),
                max_overlap: (n >= 2).then_some(if m >= 2 { 1 } else { 0 }),
                descriptor: format!("cross_strip m={m}"),
                provenance: Provenance::Overlap,
                separable_1: false,
            };
            BinaryCode::new(2 * m, columns, meta)
        }
        ReferenceKind::BinaryCounting => {
            let bits = (usize::BITS - n.leading_zeros()) as usize;
            let columns = (1..=n)
                .map(|v| (0..bits).filter(|b| v >> b & 1 == 1).map(|b| b as u32).collect())
                .collect();
            let meta = CodeMeta {
                certified_d: Some(0),
                weight: None,
                max_overlap: None,
                descriptor: format!("binary_counting m={m}"),
                provenance: Provenance::Construction,
                separable_1: true,
            };
            BinaryCode::new(bits, columns, meta)
        }
    }
}
