pub mod binmat;
pub mod bounds;
pub mod bits;
pub mod construct;
pub mod decode;
pub mod error;
pub mod gf;
pub mod sim;
pub mod verify;

pub use binmat::{BinaryCode, CodeMeta, Provenance, TestVector};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    struct Overview;
    #[doc = include_str!("../../../book/src/codes.md")]
    struct Codes;
    #[doc = include_str!("../../../book/src/constructions.md")]
    struct Constructions;
    #[doc = include_str!("../../../book/src/verification.md")]
    struct Verification;
    #[doc = include_str!("../../../book/src/bounds.md")]
    struct Bounds;
    #[doc = include_str!("../../../book/src/decoding.md")]
    struct Decoding;
    #[doc = include_str!("../../../book/src/simulation.md")]
    struct Simulation;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
