//! Ruelle resonances of U(1) and SU(2) skew extensions of expanding circle maps.
//!
//! The base is an expanding map `E(x) = kx + a sin(2πx)/2π mod 1` and the
//! fibre moves by a cocycle `τ: S¹ → G`. The transfer operator
//! `F̂φ = τ̂ · φ∘E` splits into blocks labelled by a frequency `ν` (U(1)) or a
//! spin `j` (SU(2)); each block is assembled as a truncated Fourier matrix
//! and its stable eigenvalues are the resonances.
//!
//! - [`dynamics`]: maps, inverse branches, symbolic words, cocycles.
//! - [`su2`]: spin representations, coherent states, anti-Wick quantization.
//! - [`transfer`]: block matrix assembly and caching.
//! - [`spectral`]: eigenvalues, stability filtering, SRB density.
//! - [`phasespace`]: canonical map, trapped sets, box counting, captivity.
//!
//! ```
//! use skewlab::dynamics::{CocycleU1, ExpandingMap};
//! use skewlab::fourier::TrigSeries;
//! use skewlab::spectral::extract_resonances;
//! use skewlab::transfer::Alpha;
//!
//! let map = ExpandingMap::doubling();
//! let cocycle = CocycleU1::new(TrigSeries::cosine(1.0)).into();
//! let set = extract_resonances(&map, &cocycle, Alpha::Frequency(1), 64, 1e-6)?;
//! assert!((set.spectral_radius() - 0.8235).abs() < 1e-4);
//! # Ok::<(), skewlab::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod fourier;
pub mod phasespace;
pub mod quadrature;
pub mod spectral;
pub mod su2;
pub mod transfer;

pub use error::{Error, Result};
pub use nalgebra;
pub use num_complex;
