//! Hyperpolygon spaces and the strongly parabolic Higgs bundles on the
//! projective line they parametrize.
//!
//! The crate builds points of the complex moment-map level set, turns them
//! into rank-two Higgs fields with prescribed nilpotent residues, decides
//! parabolic stability, and checks that the Higgs-side 1-form pulls back to
//! the Liouville form, exactly over `Q(i)` or numerically over `C`.

pub mod cli;
pub mod error;
pub mod higgs;
pub mod hyperpolygon;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod symplectic;

pub use error::{Error, Result};
pub use scalar::{GaussRat, Mode, Scalar};
