use alloc::vec::Vec;

use crate::quant::{BIN_COUNT, MAX_BIN};
use crate::Error;

/// Samples per pixel. Alpha is never carried; callers drop it before building an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channels {
    /// One luma sample per pixel.
    Gray = 1,
    /// Interleaved red, green, blue.
    Rgb = 3,
}

impl Channels {
    /// Number of interleaved samples per pixel.
    pub const fn count(self) -> usize {
        self as usize
    }
}

impl TryFrom<u8> for Channels {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self, Error> {
        match value {
            1 => Ok(Channels::Gray),
            3 => Ok(Channels::Rgb),
            other => Err(Error::UnsupportedChannels(other)),
        }
    }
}

/// An 8-bit-per-sample pixel buffer, row-major and channel-interleaved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RawImage {
    width: u32,
    height: u32,
    channels: Channels,
    samples: Vec<u8>,
}

pub(crate) fn sample_count(width: u32, height: u32, channels: Channels) -> Result<usize, Error> {
    usize::try_from(width)
        .ok()
        .and_then(|w| w.checked_mul(usize::try_from(height).ok()?))
        .and_then(|px| px.checked_mul(channels.count()))
        .ok_or(Error::DimensionsTooLarge)
}

impl RawImage {
    /// Wraps `samples`, checking the length against the dimensions.
    pub fn new(
        width: u32,
        height: u32,
        channels: Channels,
        samples: Vec<u8>,
    ) -> Result<Self, Error> {
        let expected = sample_count(width, height, channels)?;
        if samples.len() != expected {
            return Err(Error::SampleCountMismatch {
                expected,
                actual: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    /// An image with every sample set to `value`.
    pub fn filled(width: u32, height: u32, channels: Channels, value: u8) -> Result<Self, Error> {
        let n = sample_count(width, height, channels)?;
        Self::new(width, height, channels, alloc::vec![value; n])
    }

    /// Width in pixels.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Height in pixels.
    pub fn height(&self) -> u32 {
        self.height
    }

    /// Channel layout.
    pub fn channels(&self) -> Channels {
        self.channels
    }

    /// All samples, row-major and interleaved.
    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// Takes the sample buffer.
    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    /// True when `other` has the same width, height and channel layout.
    pub fn same_shape(&self, other: &RawImage) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// Same shape, new samples. Length is preserved by every caller.
    pub(crate) fn map_samples(&self, f: impl Fn(u8) -> u8) -> RawImage {
        RawImage {
            width: self.width,
            height: self.height,
            channels: self.channels,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Number of distinct values seen in each channel.
    pub fn distinct_values_per_channel(&self) -> Vec<usize> {
        let c = self.channels.count();
        (0..c)
            .map(|ch| {
                let mut seen = [false; 256];
                for &v in self.samples.iter().skip(ch).step_by(c) {
                    seen[usize::from(v)] = true;
                }
                seen.iter().filter(|&&s| s).count()
            })
            .collect()
    }
}

/// An image whose samples are all bin medians (`8k + 4`).
///
/// At most 32 distinct values can appear in each channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantizedImage(RawImage);

impl QuantizedImage {
    /// Checks that every sample of `raw` is a bin median.
    pub fn from_raw(raw: RawImage) -> Result<Self, Error> {
        if let Some(&bad) = raw.samples.iter().find(|&&v| v % 8 != 4) {
            return Err(Error::NotAMedian(bad));
        }
        Ok(Self(raw))
    }

    pub(crate) fn from_raw_unchecked(raw: RawImage) -> Self {
        debug_assert!(raw.samples.iter().all(|v| v % 8 == 4));
        Self(raw)
    }

    /// The underlying buffer.
    pub fn as_raw(&self) -> &RawImage {
        &self.0
    }

    /// Unwraps into the underlying buffer.
    pub fn into_raw(self) -> RawImage {
        self.0
    }

    /// Median-valued samples.
    pub fn samples(&self) -> &[u8] {
        &self.0.samples
    }

    /// Width in pixels.
    pub fn width(&self) -> u32 {
        self.0.width
    }

    /// Height in pixels.
    pub fn height(&self) -> u32 {
        self.0.height
    }

    /// Channel layout.
    pub fn channels(&self) -> Channels {
        self.0.channels
    }
}

/// An image whose samples are 5-bit bin indices in `0..=31`.
///
/// Viewed directly as an 8-bit image it looks dark and dim.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedImage(RawImage);

impl ReducedImage {
    /// Checks that every sample of `raw` is a valid bin index.
    pub fn from_raw(raw: RawImage) -> Result<Self, Error> {
        if let Some(&bad) = raw.samples.iter().find(|&&v| v > MAX_BIN) {
            return Err(Error::BinOutOfRange(bad));
        }
        Ok(Self(raw))
    }

    pub(crate) fn from_raw_unchecked(raw: RawImage) -> Self {
        debug_assert!(raw.samples.iter().all(|&v| usize::from(v) < BIN_COUNT));
        Self(raw)
    }

    /// The underlying buffer of bin indices.
    pub fn as_raw(&self) -> &RawImage {
        &self.0
    }

    /// Unwraps into the underlying buffer of bin indices.
    pub fn into_raw(self) -> RawImage {
        self.0
    }

    /// Bin indices.
    pub fn samples(&self) -> &[u8] {
        &self.0.samples
    }

    /// Width in pixels.
    pub fn width(&self) -> u32 {
        self.0.width
    }

    /// Height in pixels.
    pub fn height(&self) -> u32 {
        self.0.height
    }

    /// Channel layout.
    pub fn channels(&self) -> Channels {
        self.0.channels
    }
}
