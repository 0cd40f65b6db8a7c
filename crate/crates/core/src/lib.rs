//! Third-order schemes for 2D linear advection `phi_t + v . grad phi = 0`
//! on the periodic unit square: jet schemes, WENO3 and P2 discontinuous
//! Galerkin, plus the vortex-in-a-box benchmark harness that compares them.

pub mod analytic;
pub mod bench;
pub mod dg;
pub mod error;
pub mod grid;
pub mod hermite;
pub mod jet;
pub mod velocity;
pub mod weno;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/hermite.md")]
    mod hermite {}
    #[doc = include_str!("../../../book/src/characteristics.md")]
    mod characteristics {}
    #[doc = include_str!("../../../book/src/jet-schemes.md")]
    mod jet_schemes {}
    #[doc = include_str!("../../../book/src/weno.md")]
    mod weno {}
    #[doc = include_str!("../../../book/src/dg.md")]
    mod dg {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/results.md")]
    mod results {}
}
