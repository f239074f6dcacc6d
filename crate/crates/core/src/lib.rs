//! Tunable wavelet filter banks with structural perfect reconstruction.
//!
//! Three families share one [`FilterBank`] type:
//!
//! - [`orth_lattice`]: orthogonal banks from rotation angles,
//! - [`biorth_lattice`]: type-A biorthogonal banks (symmetric low-pass,
//!   antisymmetric high-pass) from lattice coefficients,
//! - [`lifting`]: Haar-based banks with a longer high-pass filter grown by
//!   lifting steps.
//!
//! [`transform`] runs one level of separable 2D analysis into `LL/HL/LH/HH`,
//! [`fusion`] merges the subbands with an attention head into a stride-2
//! pooling replacement, and [`grad_tune`] provides exact parameter
//! gradients and a small gradient-descent tuner.
//!
//! ```
//! use uwu_core::orth_lattice::{synth_orth, OrthLatticeParams};
//! use uwu_core::transform::{analyze_2d, synthesize_2d, Plane};
//!
//! let bank = synth_orth(&OrthLatticeParams::new(vec![0.3, -1.2]).unwrap());
//! let p = Plane::from_fn(8, 8, |r, c| (r * 8 + c) as f64);
//! let bands = analyze_2d(&p, &bank).unwrap();
//! let back = synthesize_2d(&bands, &bank).unwrap();
//! assert!(p.max_abs_diff(&back) < 1e-9);
//! ```

pub mod bank;
pub mod biorth_lattice;
mod cascade;
pub mod error;
pub mod fir_poly;
pub mod fusion;
pub mod grad_tune;
pub mod lifting;
pub mod orth_lattice;
pub mod rng;
pub mod transform;
pub mod wavelets;

pub use bank::{Family, FilterBank, Params};
pub use error::{Error, Result};
pub use fir_poly::{FirFilter, PolyMatrix2x2};
pub use transform::{Plane, SubbandSet};
