//! Optimal locally repairable linear codes with (r, δ) all-symbol locality:
//! existence classification, explicit construction over finite fields, and
//! independent verification of locality and minimum distance.

pub mod codefile;
pub mod construct;
pub mod cores;
pub mod covers;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod params;
pub mod table;
pub mod verify;

pub use construct::{construct, LrcCode};
pub use error::{Error, Result};
pub use gf::Field;
pub use params::CodeParams;
