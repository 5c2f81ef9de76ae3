use core::fmt;

/// Errors raised by the quantizer, the container codec and the metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    /// A bin index outside `0..=31`.
    BinOutOfRange(u8),
    /// A sample that is not one of the 32 bin medians.
    NotAMedian(u8),
    /// Channel count other than 1 or 3.
    UnsupportedChannels(u8),
    /// Buffer length does not match `width * height * channels`.
    SampleCountMismatch {
        /// `width * height * channels`
        expected: usize,
        /// actual buffer length
        actual: usize,
    },
    /// `width * height * channels` does not fit in memory addressing.
    DimensionsTooLarge,
    /// Two images compared with different shapes.
    ShapeMismatch,
    /// A ratio was asked for with a zero denominator.
    ZeroDenominator,
    /// Container does not start with `RBMQ`.
    BadMagic([u8; 4]),
    /// Container version this build cannot read.
    UnsupportedVersion(u8),
    /// Container shorter than its header says it should be.
    Truncated {
        /// bytes required
        expected: usize,
        /// bytes present
        actual: usize,
    },
    /// Bytes after the end of the payload.
    TrailingBytes(usize),
    /// The zero padding in the last payload byte is not zero.
    NonZeroPadding,
}

impl Error {
    /// True for errors that indicate a damaged or foreign `.rbmq` file.
    pub fn is_container_error(&self) -> bool {
        matches!(
            self,
            Error::BadMagic(_)
                | Error::UnsupportedVersion(_)
                | Error::Truncated { .. }
                | Error::TrailingBytes(_)
                | Error::NonZeroPadding
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BinOutOfRange(b) => write!(f, "bin index {b} is outside 0..=31"),
            Error::NotAMedian(v) => write!(f, "sample {v} is not a bin median (8k + 4)"),
            Error::UnsupportedChannels(c) => {
                write!(f, "unsupported channel count {c}, expected 1 or 3")
            }
            Error::SampleCountMismatch { expected, actual } => {
                write!(f, "expected {expected} samples, got {actual}")
            }
            Error::DimensionsTooLarge => f.write_str("image dimensions overflow"),
            Error::ShapeMismatch => f.write_str("images differ in dimensions or channels"),
            Error::ZeroDenominator => f.write_str("ratio denominator is zero"),
            Error::BadMagic(m) => write!(f, "bad container magic {m:02x?}"),
            Error::UnsupportedVersion(v) => write!(f, "unsupported container version {v}"),
            Error::Truncated { expected, actual } => {
                write!(
                    f,
                    "container truncated: need {expected} bytes, have {actual}"
                )
            }
            Error::TrailingBytes(n) => write!(f, "{n} trailing bytes after container payload"),
            Error::NonZeroPadding => f.write_str("container padding bits are not zero"),
        }
    }
}

impl core::error::Error for Error {}
