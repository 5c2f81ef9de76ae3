//! Size ratios between pipeline stages and sample-level quality measures.

use crate::{Error, RawImage};

/// Peak sample value used for PSNR.
pub const PEAK: f64 = 255.0;

/// `original / compressed`. Larger is better.
pub fn compression_ratio(original: u64, compressed: u64) -> Result<f64, Error> {
    if compressed == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(original as f64 / compressed as f64)
}

/// `quantized / original`: the fraction of the original size left after
/// quantization. Smaller is better.
pub fn quantization_efficiency(quantized: u64, original: u64) -> Result<f64, Error> {
    if original == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(quantized as f64 / original as f64)
}

/// Byte sizes of an original and one later stage, with both ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(missing_docs)]
pub struct SizeMetrics {
    pub original_size: u64,
    pub stage_size: u64,
    pub compression_ratio: f64,
    pub quantization_efficiency: f64,
}

impl SizeMetrics {
    /// Both sizes must be non-zero.
    pub fn new(original_size: u64, stage_size: u64) -> Result<Self, Error> {
        Ok(Self {
            original_size,
            stage_size,
            compression_ratio: compression_ratio(original_size, stage_size)?,
            quantization_efficiency: quantization_efficiency(stage_size, original_size)?,
        })
    }
}

/// Per-sample error between two images of the same shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityMetrics {
    /// Mean squared sample difference.
    pub mse: f64,
    /// `10 log10(255^2 / mse)` in dB; `f64::INFINITY` when the images are identical.
    pub psnr: f64,
    /// Largest absolute sample difference.
    pub max_abs_error: u8,
}

impl QualityMetrics {
    /// True when no sample differs.
    pub fn is_exact(&self) -> bool {
        self.max_abs_error == 0
    }
}

/// PSNR in dB for a given MSE; infinite at zero.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(PEAK * PEAK / mse)
    }
}

/// Compares `a` and `b` sample by sample. An empty pair counts as identical.
pub fn quality_metrics(a: &RawImage, b: &RawImage) -> Result<QualityMetrics, Error> {
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch);
    }
    let mut sum_sq: u64 = 0;
    let mut max_abs_error = 0u8;
    for (&x, &y) in a.samples().iter().zip(b.samples()) {
        let d = x.abs_diff(y);
        sum_sq += u64::from(d) * u64::from(d);
        max_abs_error = max_abs_error.max(d);
    }
    let n = a.samples().len();
    let mse = if n == 0 {
        0.0
    } else {
        sum_sq as f64 / n as f64
    };
    Ok(QualityMetrics {
        mse,
        psnr: psnr_from_mse(mse),
        max_abs_error,
    })
}
