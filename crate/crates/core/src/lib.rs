pub mod algebra;
pub mod checks;
pub mod error;
pub mod fieldgrid;
pub mod io;
pub mod ladder;
pub mod modes;
pub mod polarization;
pub mod spectral;
pub mod symmetry;
pub mod zb;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/polarization.md")]
    mod polarization {}
    #[doc = include_str!("../../../book/src/modes.md")]
    mod modes {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/symmetries.md")]
    mod symmetries {}
    #[doc = include_str!("../../../book/src/ladder.md")]
    mod ladder {}
    #[doc = include_str!("../../../book/src/zitterbewegung.md")]
    mod zitterbewegung {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
