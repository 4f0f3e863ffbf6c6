//! Checkers for time symmetry in finite prepare-and-measure experiments and
//! their ontological models.
//!
//! Probabilities are exact elements of Q(√3) by default, so spin predictions
//! at 30° angles compare with exact equality. A float mode with an explicit
//! tolerance is available for inputs that are not exactly representable.
//!
//! ```
//! use ontosymm::numerics::Tolerance;
//! use ontosymm::ontological::SearchOptions;
//! use ontosymm::quantum::build_maudlin;
//! use ontosymm::theorems::{certify_time_symmetry_violation, CertificateKind};
//!
//! let (_, model) = build_maudlin();
//! let cert = certify_time_symmetry_violation(&model, SearchOptions::default()).unwrap();
//! assert_eq!(cert.kind, CertificateKind::ViolationExhaustive);
//! assert_eq!(cert.scalars["bijections_refuted"], "24");
//! # let _ = Tolerance::DEFAULT;
//! ```

// Mismatch witnesses carry two scalars; they are returned by value on purpose.
#![allow(clippy::large_enum_variant, clippy::result_large_err)]

pub mod check;
pub mod error;
pub mod io;
pub mod numerics;
pub mod ontological;
pub mod operational;
pub mod quantum;
pub mod theorems;

pub use error::{Error, Result};
pub use numerics::{Mode, Scalar, Tolerance};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/ontological-models.md")]
    mod ontological_models {}
    #[doc = include_str!("../../../book/src/qubits.md")]
    mod qubits {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
