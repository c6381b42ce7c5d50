//! Twisted de Rham cohomology and its filtration spectral sequence on finite
//! CDGA models, in exact rational arithmetic.
//!
//! The pipeline: load a [`CdgaModel`], pick a closed odd [`TwistForm`],
//! compute [`twisted_cohomology`] directly, build the [`SpectralSequence`]
//! of the degree filtration, and check its higher differentials against
//! Massey products ([`massey`]) and indeterminacy subgroups ([`indet`]).

pub mod acceptance;
pub mod cdga;
pub mod error;
pub mod expr;
pub mod indet;
pub mod library;
pub mod linalg;
pub mod massey;
pub mod spectral;
pub mod twist;

pub use cdga::{CdgaModel, Form, ModelDocument};
pub use error::{Error, Result};
pub use linalg::{Mat, QuotientSpace, Scalar, SubspaceBasis};
pub use spectral::{SpectralPage, SpectralSequence, ZigZag};
pub use twist::{parse_twist, twisted_cohomology, TwistForm, TwistedCohomology};
