//! Exact finite-scale toolkit for probability measures, their integrals and
//! the Giry monad.

// errors carry exact witnesses (subsets and rationals), so they are large
#![allow(clippy::result_large_err)]

pub mod codensity;
pub mod error;
pub mod gen;
pub mod integrate;
pub mod lipmetric;
pub mod lp;
pub mod measure;
pub mod monad;
pub mod rational;
pub mod report;
pub mod represent;
pub mod setalg;
pub mod suite;

pub use error::{Error, FormatError};
pub use rational::Rational;
