//! Construction and simulation toolkit for quasi-cyclic generalized LDPC codes.
//!
//! The crate builds (J,K)-regular QC-LDPC base graphs lifted from an all-ones
//! base matrix, replaces a fraction of the single parity-check nodes with
//! generalized constraint (GC) nodes enforcing a short component code, and
//! provides the tools to study the result:
//!
//! * [`gf2`] dense GF(2) linear algebra,
//! * [`component`] the component code and its MAP / erasure evaluators,
//! * [`qc`] circulant lifting and shift search, [`cycles`] girth and short-cycle scans,
//! * [`graph`] the GLDPC Tanner graph, GC placement and encoder,
//! * [`channel`] QPSK/AWGN and erasure channels,
//! * [`decoder`] flooding belief propagation for soft and erasure inputs,
//! * [`concat`] the bounded-distance outer code model,
//! * [`density`] erasure density evolution and threshold search,
//! * [`sim`] the Monte-Carlo harness, with [`config`] and [`alist`] file formats.

pub mod alist;
pub mod channel;
pub mod component;
pub mod concat;
pub mod config;
pub mod cycles;
pub mod decoder;
pub mod density;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod qc;
pub mod sim;

pub use component::ComponentCode;
pub use error::{Error, Result};
pub use gf2::BitMatrix;
pub use graph::{CheckKind, GcPlacement, TannerGraph};
pub use qc::QcProfile;
