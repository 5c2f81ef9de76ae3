//! Per-image stage sizes and the CSV report built from them.
//!
//! Columns, in order:
//!
//! ```text
//! image_name,category,original_size,converted_jpeg,converted_png,quantized_jpeg,
//! quantized_png,final_jpeg,final_png,rbmq_container,cr,qe,psnr_quantized,psnr_final_jpeg
//! ```
//!
//! Byte counts are decimal integers. `cr` is `original_size / final_jpeg` and
//! `qe` is `quantized_png / original_size`; ratios and PSNR values are rendered
//! with two decimals. Identical images give `psnr = inf`; unknown values are
//! left empty.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rbmq_core::metrics::{compression_ratio, quantization_efficiency};

use crate::error::{Error, Result};

pub const COLUMNS: [&str; 14] = [
    "image_name",
    "category",
    "original_size",
    "converted_jpeg",
    "converted_png",
    "quantized_jpeg",
    "quantized_png",
    "final_jpeg",
    "final_png",
    "rbmq_container",
    "cr",
    "qe",
    "psnr_quantized",
    "psnr_final_jpeg",
];

/// File sizes in bytes for every stage of one image.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub image_name: String,
    pub category: String,
    pub original_size: u64,
    pub converted_jpeg: u64,
    pub converted_png: u64,
    pub quantized_jpeg: u64,
    pub quantized_png: u64,
    pub final_jpeg: u64,
    pub final_png: u64,
    pub rbmq_container: u64,
    /// PSNR of the quantized image against the original, dB.
    pub psnr_quantized: Option<f64>,
    /// PSNR of the decoded final JPEG against the quantized image, dB.
    pub psnr_final_jpeg: Option<f64>,
}

impl StageRecord {
    /// `original_size / final_jpeg`; `None` when the final JPEG is empty.
    pub fn cr(&self) -> Option<f64> {
        compression_ratio(self.original_size, self.final_jpeg).ok()
    }

    /// `quantized_png / original_size`; `None` when the original is empty.
    pub fn qe(&self) -> Option<f64> {
        quantization_efficiency(self.quantized_png, self.original_size).ok()
    }

    fn row(&self) -> [String; 14] {
        [
            self.image_name.clone(),
            self.category.clone(),
            self.original_size.to_string(),
            self.converted_jpeg.to_string(),
            self.converted_png.to_string(),
            self.quantized_jpeg.to_string(),
            self.quantized_png.to_string(),
            self.final_jpeg.to_string(),
            self.final_png.to_string(),
            self.rbmq_container.to_string(),
            fixed2(self.cr()),
            fixed2(self.qe()),
            fixed2(self.psnr_quantized),
            fixed2(self.psnr_final_jpeg),
        ]
    }
}

fn fixed2(value: Option<f64>) -> String {
    match value {
        Some(v) if v.is_infinite() => "inf".to_owned(),
        Some(v) => format!("{v:.2}"),
        None => String::new(),
    }
}

/// Writes the header and one row per record.
pub fn emit_report<W: Write>(records: &[StageRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.row())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// [`emit_report`] into a new file at `path`.
pub fn write_report(records: &[StageRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    emit_report(records, file)
}
