//! Space-time block codes with full diversity under partial interference
//! cancellation (PIC) and PIC with successive interference cancellation
//! (PIC-SIC) group decoding.
//!
//! The crate is organised bottom-up:
//!
//! - [`lindesign`]: linear-dispersion designs, the real equivalent channel,
//!   grouping schemes.
//! - [`rotations`]: certified full-diversity rotations of `Z^λ`.
//! - [`constructions`]: the layered diagonal codes and the layered Alamouti
//!   block codes, plus closed-form rate / complexity accounting.
//! - [`diversity`]: rank-criterion falsifiers and structural certificates.
//! - [`channel`]: Rayleigh MIMO link model and Gray-mapped PAM.
//! - [`decoders`]: ML, ZF, PIC and PIC-SIC decoders.
//! - [`sim`]: Monte Carlo harness, diversity-order fitting, result files.
//! - [`plot`]: minimal SVG output.

pub mod channel;
pub mod constructions;
pub mod decoders;
pub mod diversity;
pub mod error;
pub mod lindesign;
pub mod plot;
pub mod rotations;
pub mod sim;

pub use error::{Result, StbcError};

/// Complex matrix type used for codewords, weight matrices and channels.
pub type CMatrix = nalgebra::DMatrix<nalgebra::Complex<f64>>;
/// Real matrix type used for equivalent channels and projectors.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Real column vector.
pub type RVector = nalgebra::DVector<f64>;
/// Complex scalar.
pub type C64 = nalgebra::Complex<f64>;

/// Relative singular-value threshold used for every rank decision.
pub const RANK_EPS: f64 = 1e-9;
