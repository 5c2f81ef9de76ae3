//! The fixed 32-bin median table and the mappings built on it.
//!
//! Bin `k` covers intensities `8k..=8k+7`. Its representative is the fifth value of
//! that range, `8k + 4`, so every sample moves by at most 4 when quantized.
//!
//! ```text
//! raw sample  --quantize-->  median (8k+4)  --reduce-->  bin index k (5 bits)
//!                                  ^                          |
//!                                  +--------- expand ---------+
//! ```

use crate::{Error, QuantizedImage, RawImage, ReducedImage};

/// Number of intensity bins.
pub const BIN_COUNT: usize = 32;
/// Width of each bin in 8-bit intensity units.
pub const BIN_WIDTH: u8 = 8;
/// Largest valid bin index.
pub const MAX_BIN: u8 = 31;
/// Bits needed to store a bin index.
pub const BITS_PER_BIN: u32 = 5;

const MEDIAN_OFFSET: u8 = 4;

/// The 32 bin representatives, in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MedianTable {
    medians: [u8; BIN_COUNT],
}

impl MedianTable {
    /// The only table there is: entry `k` is `8k + 4`.
    pub const STANDARD: MedianTable = MedianTable::build();

    const fn build() -> Self {
        let mut medians = [0u8; BIN_COUNT];
        let mut k = 0;
        while k < BIN_COUNT {
            medians[k] = k as u8 * BIN_WIDTH + MEDIAN_OFFSET;
            k += 1;
        }
        Self { medians }
    }

    /// All 32 medians, lowest bin first.
    pub const fn medians(&self) -> &[u8; BIN_COUNT] {
        &self.medians
    }

    /// The median of `bin`.
    pub const fn median(&self, bin: BinIndex) -> u8 {
        self.medians[bin.0 as usize]
    }
}

impl Default for MedianTable {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// A 5-bit bin index, `0..=31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinIndex(u8);

impl BinIndex {
    /// Fails with [`Error::BinOutOfRange`] above 31.
    pub const fn new(index: u8) -> Result<Self, Error> {
        if index > MAX_BIN {
            Err(Error::BinOutOfRange(index))
        } else {
            Ok(Self(index))
        }
    }

    /// The bin that `value` falls into.
    pub const fn of_sample(value: u8) -> Self {
        Self(value / BIN_WIDTH)
    }

    /// The raw 5-bit code.
    pub const fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for BinIndex {
    type Error = Error;

    fn try_from(index: u8) -> Result<Self, Error> {
        Self::new(index)
    }
}

impl From<BinIndex> for u8 {
    fn from(bin: BinIndex) -> u8 {
        bin.0
    }
}

/// Representative value of `bin`: `8k + 4`.
pub const fn median_of_bin(bin: BinIndex) -> u8 {
    MedianTable::STANDARD.median(bin)
}

/// Maps a sample onto the median of its bin.
pub const fn quantize_sample(value: u8) -> u8 {
    median_of_bin(BinIndex::of_sample(value))
}

/// Replaces a median by its bin index.
///
/// Strict: anything that is not one of the 32 medians is rejected, which catches
/// reduce-before-quantize ordering mistakes.
pub const fn reduce_sample(median: u8) -> Result<BinIndex, Error> {
    if median % BIN_WIDTH != MEDIAN_OFFSET {
        return Err(Error::NotAMedian(median));
    }
    Ok(BinIndex::of_sample(median))
}

/// Inverse of [`reduce_sample`].
pub const fn expand_sample(bin: BinIndex) -> u8 {
    median_of_bin(bin)
}

/// Quantizes every sample of every channel.
pub fn quantize_image(img: &RawImage) -> QuantizedImage {
    QuantizedImage::from_raw_unchecked(img.map_samples(quantize_sample))
}

/// Replaces each median with its 5-bit bin index.
pub fn reduce_image(img: &QuantizedImage) -> ReducedImage {
    ReducedImage::from_raw_unchecked(img.as_raw().map_samples(|m| m / BIN_WIDTH))
}

/// Quantize followed by reduce, for arbitrary 8-bit input.
pub fn quantize_and_reduce(img: &RawImage) -> ReducedImage {
    ReducedImage::from_raw_unchecked(img.map_samples(|v| BinIndex::of_sample(v).get()))
}

/// Expands bin indices back to the quantized image.
pub fn expand_image(img: &ReducedImage) -> QuantizedImage {
    QuantizedImage::from_raw_unchecked(img.as_raw().map_samples(|b| b * BIN_WIDTH + MEDIAN_OFFSET))
}

/// Rebuilds the quantized image from a decoded lossy copy of a reduced image.
///
/// Lossy codecs can push indices above 31; each sample is clamped to 31 before
/// expansion. No attempt is made to undo codec artifacts.
pub fn reconstruct_from_lossy(img: &RawImage) -> QuantizedImage {
    QuantizedImage::from_raw_unchecked(
        img.map_samples(|v| v.min(MAX_BIN) * BIN_WIDTH + MEDIAN_OFFSET),
    )
}
