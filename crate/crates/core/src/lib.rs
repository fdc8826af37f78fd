//! Pseudoseasonal life tables.
//!
//! Monthly deaths and annual exposures are binned into six-month
//! pseudoseasons (winter: November-April, summer: May-October), from which
//! this crate builds period life tables, winter:summer proportional hazards
//! and Gompertz winter/summer equivalent ages.

pub mod age;
pub mod cli;
pub mod gompertz;
pub mod graduate;
pub mod hazard;
pub mod ingest;
pub mod lifetable;
pub mod season;
pub mod surface;
pub mod synth;

pub use age::{AgeGrid, AgeGroup, N_GROUPS};
pub use season::{complete_span, pseudoseason_of, Pseudoseason, SeasonKind, Sex, YearMonth};
pub use surface::MortalitySurface;
