//! Simulator for quantum nondemolition measurements of the (1+1)-dimensional
//! Dirac oscillator: truncated Fock ⊗ spin operator algebra, the analytic
//! spectrum and dressed states, the Foldy–Wouthuysen transform, regime QND
//! quadratures, and continuous-measurement dynamics with optical and spin
//! probes. Natural units ħ = m = ω = 1 everywhere.

pub mod dirac;
pub mod error;
pub mod fw;
pub mod hilbert;
pub mod linalg;
pub mod measurement;
pub mod par;
pub mod qnd;
pub mod scales;
pub mod scenario;

pub use error::{Error, Result};
