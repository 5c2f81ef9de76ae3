//! PNG/JPEG (and BMP/TIFF input) to and from [`RawImage`] buffers.
//!
//! Loading always yields 8-bit gray or RGB: alpha is dropped, 16-bit and float
//! sources are rejected rather than rescaled.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Cursor, Write};
use std::path::Path;
use std::str::FromStr;

use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageReader};
use rbmq_core::{Channels, RawImage};

use crate::error::{Error, Result};

/// JPEG quality in `1..=100`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JpegQuality(u8);

impl JpegQuality {
    pub const DEFAULT: JpegQuality = JpegQuality(75);

    pub fn new(quality: u8) -> Result<Self> {
        if (1..=100).contains(&quality) {
            Ok(Self(quality))
        } else {
            Err(Error::InvalidQuality(quality))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl Default for JpegQuality {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for JpegQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.get().fmt(f)
    }
}

impl FromStr for JpegQuality {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let q: u8 = s
            .parse()
            .map_err(|_| format!("`{s}` is not an integer in 1..=100"))?;
        Self::new(q).map_err(|e| e.to_string())
    }
}

/// PNG deflate effort. Maps onto the `png` crate's fast / default / best levels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum PngCompression {
    Fast,
    #[default]
    Default,
    Best,
}

impl From<PngCompression> for CompressionType {
    fn from(c: PngCompression) -> Self {
        match c {
            PngCompression::Fast => CompressionType::Fast,
            PngCompression::Default => CompressionType::Default,
            PngCompression::Best => CompressionType::Best,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EncodeSettings {
    pub jpeg_quality: JpegQuality,
    pub png_compression: PngCompression,
}

/// File kinds this crate writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum OutputFormat {
    Png,
    #[value(alias = "jpg")]
    Jpeg,
    Rbmq,
}

impl OutputFormat {
    /// Infers the format from the file extension, case-insensitively.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("png") => Ok(OutputFormat::Png),
            Some("jpg" | "jpeg") => Ok(OutputFormat::Jpeg),
            Some("rbmq") => Ok(OutputFormat::Rbmq),
            _ => Err(Error::UnknownFormat(path.to_path_buf())),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Png => "png",
            OutputFormat::Jpeg => "jpg",
            OutputFormat::Rbmq => "rbmq",
        }
    }
}

/// Decodes a PNG, JPEG, BMP or TIFF file into an 8-bit gray or RGB buffer.
pub fn load_image(path: impl AsRef<Path>) -> Result<RawImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let decode_err = |source| Error::Decode {
        path: path.to_path_buf(),
        source,
    };
    let img = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(decode_err)?;
    let (width, height) = (img.width(), img.height());
    let (channels, samples) = match img {
        DynamicImage::ImageLuma8(buf) => (Channels::Gray, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => (Channels::Rgb, buf.into_raw()),
        DynamicImage::ImageLumaA8(buf) => (
            Channels::Gray,
            buf.into_raw().chunks_exact(2).map(|px| px[0]).collect(),
        ),
        DynamicImage::ImageRgba8(buf) => (
            Channels::Rgb,
            buf.into_raw()
                .chunks_exact(4)
                .flat_map(|px| [px[0], px[1], px[2]])
                .collect(),
        ),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                format: format!("{:?}", other.color()),
            })
        }
    };
    Ok(RawImage::new(width, height, channels, samples)?)
}

fn color_type(img: &RawImage) -> ExtendedColorType {
    match img.channels() {
        Channels::Gray => ExtendedColorType::L8,
        Channels::Rgb => ExtendedColorType::Rgb8,
    }
}

fn write_with<F>(path: &Path, encode: F) -> Result<u64>
where
    F: FnOnce(&mut BufWriter<File>) -> image::ImageResult<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    encode(&mut out).map_err(|source| Error::Encode {
        path: path.to_path_buf(),
        source,
    })?;
    out.flush().map_err(|e| Error::io(path, e))?;
    drop(out);
    file_size(path)
}

/// On-disk size of `path` in bytes.
pub fn file_size(path: impl AsRef<Path>) -> Result<u64> {
    let path = path.as_ref();
    fs::metadata(path)
        .map(|m| m.len())
        .map_err(|e| Error::io(path, e))
}

/// Lossless PNG. Returns the written file size.
pub fn save_png(img: &RawImage, path: impl AsRef<Path>, settings: &EncodeSettings) -> Result<u64> {
    write_with(path.as_ref(), |out| {
        PngEncoder::new_with_quality(out, settings.png_compression.into(), FilterType::Adaptive)
            .write_image(img.samples(), img.width(), img.height(), color_type(img))
    })
}

/// Baseline JPEG at `settings.jpeg_quality`; gray stays single-channel. Returns the written file size.
pub fn save_jpeg(img: &RawImage, path: impl AsRef<Path>, settings: &EncodeSettings) -> Result<u64> {
    write_with(path.as_ref(), |out| {
        JpegEncoder::new_with_quality(out, settings.jpeg_quality.get()).write_image(
            img.samples(),
            img.width(),
            img.height(),
            color_type(img),
        )
    })
}

/// Writes `bytes` and returns the file size.
pub fn save_bytes(bytes: &[u8], path: impl AsRef<Path>) -> Result<u64> {
    let path = path.as_ref();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    file_size(path)
}

/// Saves as PNG or JPEG depending on `format`.
pub fn save_image(
    img: &RawImage,
    path: impl AsRef<Path>,
    format: OutputFormat,
    settings: &EncodeSettings,
) -> Result<u64> {
    match format {
        OutputFormat::Png => save_png(img, path, settings),
        OutputFormat::Jpeg => save_jpeg(img, path, settings),
        OutputFormat::Rbmq => Err(Error::Usage(format!(
            "{}: a plain image cannot be stored as .rbmq; use finalize or pack",
            path.as_ref().display()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{GrayImage, Luma, Rgba, RgbaImage};
    use rbmq_core::quant::quantize_image;

    fn noise(w: u32, h: u32, c: Channels, seed: u32) -> RawImage {
        let mut state = seed.wrapping_mul(2_654_435_761).max(1);
        let n = (w * h) as usize * c.count();
        let samples = (0..n)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 17;
                state ^= state << 5;
                (state >> 24) as u8
            })
            .collect();
        RawImage::new(w, h, c, samples).unwrap()
    }

    fn smooth(w: u32, h: u32) -> RawImage {
        let samples = (0..h)
            .flat_map(|y| {
                (0..w).flat_map(move |x| [(x * 3) as u8, (y * 2) as u8, ((x + y) * 2) as u8])
            })
            .collect();
        RawImage::new(w, h, Channels::Rgb, samples).unwrap()
    }

    #[test]
    fn jpeg_quality_bounds() {
        assert!(JpegQuality::new(0).is_err());
        assert!(JpegQuality::new(101).is_err());
        assert_eq!(JpegQuality::new(1).unwrap().get(), 1);
        assert_eq!(JpegQuality::default().get(), 75);
        assert!("abc".parse::<JpegQuality>().is_err());
        assert_eq!("90".parse::<JpegQuality>().unwrap().get(), 90);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            OutputFormat::from_path(Path::new("a/b.PNG")).unwrap(),
            OutputFormat::Png
        );
        assert_eq!(
            OutputFormat::from_path(Path::new("x.jpeg")).unwrap(),
            OutputFormat::Jpeg
        );
        assert_eq!(
            OutputFormat::from_path(Path::new("x.jpg")).unwrap(),
            OutputFormat::Jpeg
        );
        assert_eq!(
            OutputFormat::from_path(Path::new("x.rbmq")).unwrap(),
            OutputFormat::Rbmq
        );
        assert!(matches!(
            OutputFormat::from_path(Path::new("x.gif")),
            Err(Error::UnknownFormat(_))
        ));
        assert!(OutputFormat::from_path(Path::new("noext")).is_err());
    }

    #[test]
    fn white_pixel_png() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("white.png");
        image::RgbImage::from_pixel(1, 1, image::Rgb([255, 255, 255]))
            .save(&path)
            .unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(
            (img.width(), img.height(), img.channels()),
            (1, 1, Channels::Rgb)
        );
        assert_eq!(img.samples(), &[255, 255, 255]);
    }

    #[test]
    fn alpha_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgba.png");
        RgbaImage::from_pixel(1, 1, Rgba([10, 20, 30, 0]))
            .save(&path)
            .unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.channels(), Channels::Rgb);
        assert_eq!(img.samples(), &[10, 20, 30]);

        let path = dir.path().join("la.png");
        image::GrayAlphaImage::from_pixel(2, 1, image::LumaA([77, 9]))
            .save(&path)
            .unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.channels(), Channels::Gray);
        assert_eq!(img.samples(), &[77, 77]);
    }

    #[test]
    fn sixteen_bit_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        image::ImageBuffer::<Luma<u16>, _>::from_pixel(2, 2, Luma([40_000u16]))
            .save(&path)
            .unwrap();
        assert!(matches!(
            load_image(&path),
            Err(Error::UnsupportedFormat { .. })
        ));
    }

    #[test]
    fn missing_and_garbage_files() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_image(dir.path().join("nope.png")),
            Err(Error::Io { .. })
        ));
        let path = dir.path().join("junk.png");
        fs::write(&path, b"definitely not an image").unwrap();
        assert!(matches!(load_image(&path), Err(Error::Decode { .. })));
    }

    #[test]
    fn bmp_and_tiff_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let gray = GrayImage::from_fn(5, 3, |x, y| Luma([(x * 40 + y) as u8]));
        for name in ["g.bmp", "g.tif"] {
            let path = dir.path().join(name);
            gray.save(&path).unwrap();
            let img = load_image(&path).unwrap();
            // BMP stores gray as an RGB palette
            let luma: Vec<u8> = img
                .samples()
                .iter()
                .step_by(img.channels().count())
                .copied()
                .collect();
            assert_eq!(luma, gray.as_raw().as_slice(), "{name}");
        }
    }

    #[test]
    fn png_round_trip_and_reported_size() {
        let dir = tempfile::tempdir().unwrap();
        let settings = EncodeSettings::default();
        for (i, c) in [Channels::Gray, Channels::Rgb].into_iter().enumerate() {
            let img = noise(17, 9, c, i as u32 + 1);
            let path = dir.path().join(format!("n{i}.png"));
            let written = save_png(&img, &path, &settings).unwrap();
            assert_eq!(written, fs::metadata(&path).unwrap().len());
            assert_eq!(load_image(&path).unwrap(), img);

            let q = quantize_image(&img);
            save_png(q.as_raw(), &path, &settings).unwrap();
            let back = load_image(&path).unwrap();
            assert!(back.distinct_values_per_channel().iter().all(|&n| n <= 32));
            assert_eq!(&back, q.as_raw());
        }
    }

    #[test]
    fn uniform_png_is_smaller_than_noise() {
        let dir = tempfile::tempdir().unwrap();
        let settings = EncodeSettings::default();
        let flat = RawImage::filled(64, 64, Channels::Gray, 128).unwrap();
        let a = save_png(&flat, dir.path().join("flat.png"), &settings).unwrap();
        let b = save_png(
            &noise(64, 64, Channels::Gray, 7),
            dir.path().join("noise.png"),
            &settings,
        )
        .unwrap();
        assert!(a < b, "{a} vs {b}");
    }

    #[test]
    fn jpeg_quality_changes_size() {
        let dir = tempfile::tempdir().unwrap();
        let img = smooth(96, 64);
        let hi = EncodeSettings {
            jpeg_quality: JpegQuality::new(95).unwrap(),
            ..Default::default()
        };
        let lo = EncodeSettings {
            jpeg_quality: JpegQuality::new(50).unwrap(),
            ..Default::default()
        };
        let a = save_jpeg(&img, dir.path().join("hi.jpg"), &hi).unwrap();
        let b = save_jpeg(&img, dir.path().join("lo.jpg"), &lo).unwrap();
        assert!(a > b, "{a} vs {b}");
    }

    #[test]
    fn tiny_jpeg_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for c in [Channels::Gray, Channels::Rgb] {
            let img = RawImage::filled(1, 1, c, 200).unwrap();
            let path = dir.path().join("one.jpg");
            save_jpeg(&img, &path, &EncodeSettings::default()).unwrap();
            let back = load_image(&path).unwrap();
            assert_eq!(back.channels(), c);
            assert!(back.samples().iter().all(|&v| v.abs_diff(200) <= 3));
        }
    }

    #[test]
    fn unwritable_path() {
        let img = RawImage::filled(1, 1, Channels::Gray, 0).unwrap();
        let err = save_png(&img, "/nonexistent-dir/x.png", &EncodeSettings::default()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
