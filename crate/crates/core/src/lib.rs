//! Reduced bit median quantization (RBMQ).
//!
//! A middle-process transform for image codecs. Every 8-bit sample is mapped onto
//! one of 32 fixed representatives (the fifth value of its 8-wide intensity bin),
//! which introduces redundancy a downstream PNG or JPEG encoder can exploit. The
//! quantized samples can then be replaced by their 5-bit bin indices for
//! deep-archive storage, and expanded back to the quantized image on decode.
//!
//! This crate is `no_std` and only needs `alloc`. It holds the pure parts of the
//! codec:
//!
//! - [`quant`]: the median table and the sample/buffer mappings.
//! - [`container`]: the bit-packed `.rbmq` serialization of reduced images.
//! - [`metrics`]: compression ratio, quantization efficiency, MSE/PSNR.
//!
//! ```
//! use rbmq_core::{container, quant, Channels, RawImage};
//!
//! let raw = RawImage::new(2, 1, Channels::Gray, vec![7, 8]).unwrap();
//! let quantized = quant::quantize_image(&raw);
//! assert_eq!(quantized.samples(), &[4, 12]);
//!
//! let reduced = quant::reduce_image(&quantized);
//! let bytes = container::pack(&reduced);
//! let back = quant::expand_image(&container::unpack(&bytes).unwrap());
//! assert_eq!(back, quantized);
//! ```

#![no_std]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod container;
mod error;
mod image;
pub mod metrics;
pub mod quant;

pub use error::Error;
pub use image::{Channels, QuantizedImage, RawImage, ReducedImage};
pub use quant::{BinIndex, MedianTable};
