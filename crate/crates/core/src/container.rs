//! The `.rbmq` container: a reduced image stored at exactly 5 bits per sample.
//!
//! ```text
//! offset  size  field
//!      0     4  magic, ASCII "RBMQ"
//!      4     1  version, 1
//!      5     4  width,  u32 little-endian
//!      9     4  height, u32 little-endian
//!     13     1  channels, 1 or 3
//!     14     n  payload, n = ceil(width * height * channels * 5 / 8)
//! ```
//!
//! Samples are written in buffer order, each as 5 bits, most significant bit
//! first across the whole stream. The low bits of the final byte are zero
//! padding. There is no entropy coding; wrap the file in a general-purpose
//! compressor if wanted.
//!
//! Decoding is strict: trailing bytes and non-zero padding are rejected.

use alloc::vec::Vec;

use crate::image::sample_count;
use crate::quant::{BITS_PER_BIN, MAX_BIN};
use crate::{Channels, Error, RawImage, ReducedImage};

/// File magic.
pub const MAGIC: [u8; 4] = *b"RBMQ";
/// The only version this build reads or writes.
pub const VERSION: u8 = 1;
/// Header size in bytes.
pub const HEADER_LEN: usize = 14;

/// Payload bytes needed for `samples` 5-bit values.
pub const fn payload_len(samples: usize) -> usize {
    // samples * 5 / 8 rounded up, without overflowing on huge counts
    samples / 8 * 5 + (samples % 8 * 5).div_ceil(8)
}

/// Total container size for an image of the given shape.
pub fn container_len(width: u32, height: u32, channels: Channels) -> Result<usize, Error> {
    Ok(HEADER_LEN + payload_len(sample_count(width, height, channels)?))
}

struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    bits: u32,
}

impl BitWriter {
    fn with_capacity(cap: usize) -> Self {
        Self {
            out: Vec::with_capacity(cap),
            acc: 0,
            bits: 0,
        }
    }

    fn push(&mut self, value: u8, width: u32) {
        self.acc = (self.acc << width) | u32::from(value);
        self.bits += width;
        while self.bits >= 8 {
            self.bits -= 8;
            self.out.push((self.acc >> self.bits) as u8);
        }
        self.acc &= (1 << self.bits) - 1;
    }

    fn finish(mut self) -> Vec<u8> {
        if self.bits > 0 {
            self.out.push((self.acc << (8 - self.bits)) as u8);
        }
        self.out
    }
}

struct BitReader<'a> {
    input: &'a [u8],
    acc: u32,
    bits: u32,
}

impl<'a> BitReader<'a> {
    fn new(input: &'a [u8]) -> Self {
        Self {
            input,
            acc: 0,
            bits: 0,
        }
    }

    /// Caller guarantees the input holds enough bits.
    fn read(&mut self, width: u32) -> u8 {
        while self.bits < width {
            let (&byte, rest) = self.input.split_first().expect("payload length checked");
            self.input = rest;
            self.acc = (self.acc << 8) | u32::from(byte);
            self.bits += 8;
        }
        self.bits -= width;
        let value = (self.acc >> self.bits) & ((1 << width) - 1);
        self.acc &= (1 << self.bits) - 1;
        value as u8
    }

    fn leftover(&self) -> u32 {
        self.acc
    }
}

/// Serializes a reduced image.
pub fn pack(img: &ReducedImage) -> Vec<u8> {
    let samples = img.samples();
    let mut w = BitWriter::with_capacity(HEADER_LEN + payload_len(samples.len()));
    w.out.extend_from_slice(&MAGIC);
    w.out.push(VERSION);
    w.out.extend_from_slice(&img.width().to_le_bytes());
    w.out.extend_from_slice(&img.height().to_le_bytes());
    w.out.push(img.channels().count() as u8);
    for &b in samples {
        debug_assert!(b <= MAX_BIN);
        w.push(b, BITS_PER_BIN);
    }
    w.finish()
}

fn le_u32(bytes: &[u8]) -> u32 {
    u32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]])
}

/// Parses a container produced by [`pack`].
pub fn unpack(bytes: &[u8]) -> Result<ReducedImage, Error> {
    if bytes.len() >= MAGIC.len() && bytes[..4] != MAGIC {
        return Err(Error::BadMagic([bytes[0], bytes[1], bytes[2], bytes[3]]));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    if bytes[4] != VERSION {
        return Err(Error::UnsupportedVersion(bytes[4]));
    }
    let width = le_u32(&bytes[5..9]);
    let height = le_u32(&bytes[9..13]);
    let channels = Channels::try_from(bytes[13])?;
    let n = sample_count(width, height, channels)?;

    let payload = &bytes[HEADER_LEN..];
    let expected = payload_len(n);
    if payload.len() < expected {
        return Err(Error::Truncated {
            expected: HEADER_LEN + expected,
            actual: bytes.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::TrailingBytes(payload.len() - expected));
    }

    let mut r = BitReader::new(payload);
    let samples: Vec<u8> = (0..n).map(|_| r.read(BITS_PER_BIN)).collect();
    if r.leftover() != 0 {
        return Err(Error::NonZeroPadding);
    }
    ReducedImage::from_raw(RawImage::new(width, height, channels, samples)?)
}
