//! Corpus pipeline: convert, quantize, finalize and decode every image under
//! `input_root/<category>/`, writing each stage into its own directory.
//!
//! Stage directories are named from a template (see [`DirectoryTemplate`]).
//! Each stage reads the previous stage's PNG output, so stages can be re-run
//! individually. Images that fail are logged and reported as skipped; the
//! rest of the corpus carries on.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use rbmq_core::metrics::{quality_metrics, QualityMetrics};
use rbmq_core::quant::{expand_image, quantize_image, reconstruct_from_lossy, reduce_image};
use rbmq_core::{container, QuantizedImage, ReducedImage};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::image_io::{file_size, load_image, save_bytes, save_jpeg, save_png, EncodeSettings};
use crate::report::StageRecord;

/// Processing stage, used for directory naming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Converted,
    Quantized,
    Final,
    Decoded,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Converted => "converted",
            Stage::Quantized => "quantized",
            Stage::Final => "final",
            Stage::Decoded => "decoded",
        }
    }
}

/// Storage flavour of a stage's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Png,
    Jpeg,
    Rbmq,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Png => "PNG",
            Flavor::Jpeg => "JPEG",
            Flavor::Rbmq => "RBMQ",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Flavor::Png => "png",
            Flavor::Jpeg => "jpg",
            Flavor::Rbmq => "rbmq",
        }
    }
}

/// Stage directory naming with `{stage}`, `{category}` and `{format}` placeholders.
///
/// The default `{stage}_{category}{format}` yields `final_texturesPNG`,
/// `final_texturesJPEG`, `quantized_texturesPNG` and so on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectoryTemplate(String);

impl DirectoryTemplate {
    pub const DEFAULT: &'static str = "{stage}_{category}{format}";

    /// The template must mention all three placeholders, otherwise stages collide.
    pub fn new(template: impl Into<String>) -> Result<Self> {
        let template = template.into();
        for key in ["{stage}", "{category}", "{format}"] {
            if !template.contains(key) {
                return Err(Error::Usage(format!(
                    "directory template `{template}` is missing {key}"
                )));
            }
        }
        if template.contains('/') || template.contains('\\') {
            return Err(Error::Usage(format!(
                "directory template `{template}` must be a single path component"
            )));
        }
        Ok(Self(template))
    }

    pub fn render(&self, stage: Stage, category: &str, flavor: Flavor) -> String {
        self.0
            .replace("{stage}", stage.name())
            .replace("{category}", category)
            .replace("{format}", flavor.name())
    }
}

impl Default for DirectoryTemplate {
    fn default() -> Self {
        Self(Self::DEFAULT.to_owned())
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub input_root: PathBuf,
    pub output_root: PathBuf,
    pub settings: EncodeSettings,
    pub template: DirectoryTemplate,
}

impl BenchConfig {
    pub fn new(input_root: impl Into<PathBuf>, output_root: impl Into<PathBuf>) -> Self {
        Self {
            input_root: input_root.into(),
            output_root: output_root.into(),
            settings: EncodeSettings::default(),
            template: DirectoryTemplate::default(),
        }
    }

    pub fn stage_dir(&self, stage: Stage, category: &str, flavor: Flavor) -> PathBuf {
        self.output_root
            .join(self.template.render(stage, category, flavor))
    }

    /// Where `source`'s output for `stage`/`flavor` lives.
    ///
    /// Decoded outputs are always PNG, kept apart by the flavor they were decoded from.
    pub fn stage_path(&self, stage: Stage, flavor: Flavor, source: &SourceImage) -> PathBuf {
        let ext = if stage == Stage::Decoded {
            Flavor::Png.extension()
        } else {
            flavor.extension()
        };
        self.stage_dir(stage, &source.category, flavor)
            .join(format!("{}.{ext}", source.name))
    }
}

/// An original image found under the input root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceImage {
    pub category: String,
    /// File stem, used for every derived file name.
    pub name: String,
    pub path: PathBuf,
}

/// A file that a stage could not process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skipped {
    pub path: PathBuf,
    pub reason: String,
}

/// What a stage produced: one `T` per processed image plus everything skipped.
#[derive(Debug, Clone)]
pub struct StageOutcome<T> {
    pub processed: Vec<(SourceImage, T)>,
    pub skipped: Vec<Skipped>,
}

impl<T> StageOutcome<T> {
    pub fn sources(&self) -> impl Iterator<Item = &SourceImage> {
        self.processed.iter().map(|(s, _)| s)
    }
}

/// Finds `input_root/<category>/<file>` entries in sorted order.
///
/// Hidden files, files directly under the root and anything inside the output
/// root are ignored. Two files in one category with the same stem collide;
/// the second is skipped.
pub fn discover(cfg: &BenchConfig) -> Result<(Vec<SourceImage>, Vec<Skipped>)> {
    if !cfg.input_root.is_dir() {
        return Err(Error::MissingInputRoot(cfg.input_root.clone()));
    }
    let output_root = fs::canonicalize(&cfg.output_root).ok();
    let mut sources = Vec::new();
    let mut skipped = Vec::new();
    let mut seen = BTreeSet::new();

    let walker = WalkDir::new(&cfg.input_root)
        .min_depth(2)
        .max_depth(2)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| {
            let hidden = e.file_name().to_string_lossy().starts_with('.');
            let in_output = output_root
                .as_deref()
                .is_some_and(|out| fs::canonicalize(e.path()).is_ok_and(|p| p.starts_with(out)));
            !hidden && !in_output
        });
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e.path().map(Path::to_path_buf).unwrap_or_default();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path().to_path_buf();
        let category = path
            .parent()
            .and_then(Path::file_name)
            .map(|c| c.to_string_lossy().into_owned())
            .unwrap_or_default();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !seen.insert((category.clone(), name.clone())) {
            skipped.push(Skipped {
                reason: format!("another file in `{category}` already uses the name `{name}`"),
                path,
            });
            continue;
        }
        sources.push(SourceImage {
            category,
            name,
            path,
        });
    }
    Ok((sources, skipped))
}

fn create_dirs(
    cfg: &BenchConfig,
    sources: &[SourceImage],
    stage: Stage,
    flavors: &[Flavor],
) -> Result<()> {
    let categories: BTreeSet<&str> = sources.iter().map(|s| s.category.as_str()).collect();
    for category in categories {
        for &flavor in flavors {
            let dir = cfg.stage_dir(stage, category, flavor);
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    Ok(())
}

fn run_each<T, F>(
    stage: Stage,
    sources: Vec<SourceImage>,
    mut skipped: Vec<Skipped>,
    work: F,
) -> StageOutcome<T>
where
    T: Send,
    F: Fn(&SourceImage) -> Result<T> + Sync,
{
    let results: Vec<_> = sources
        .into_par_iter()
        .map(|source| {
            let result = work(&source);
            (source, result)
        })
        .collect();
    let mut processed = Vec::with_capacity(results.len());
    for (source, result) in results {
        match result {
            Ok(value) => {
                info!("{}: {}/{}", stage.name(), source.category, source.name);
                processed.push((source, value));
            }
            Err(e) => {
                warn!("{}: skipping {}: {e}", stage.name(), source.path.display());
                skipped.push(Skipped {
                    path: source.path,
                    reason: e.to_string(),
                });
            }
        }
    }
    StageOutcome { processed, skipped }
}

fn prepare(
    cfg: &BenchConfig,
    stage: Stage,
    flavors: &[Flavor],
) -> Result<(Vec<SourceImage>, Vec<Skipped>)> {
    let (sources, skipped) = discover(cfg)?;
    create_dirs(cfg, &sources, stage, flavors)?;
    Ok((sources, skipped))
}

/// Re-encodes every original as PNG and JPEG. Alpha is dropped on load, so
/// JPEG gets gray or RGB input.
pub fn run_convert_stage(cfg: &BenchConfig) -> Result<StageOutcome<()>> {
    let (sources, skipped) = prepare(cfg, Stage::Converted, &[Flavor::Png, Flavor::Jpeg])?;
    Ok(run_each(Stage::Converted, sources, skipped, |src| {
        let img = load_image(&src.path)?;
        save_png(
            &img,
            cfg.stage_path(Stage::Converted, Flavor::Png, src),
            &cfg.settings,
        )?;
        save_jpeg(
            &img,
            cfg.stage_path(Stage::Converted, Flavor::Jpeg, src),
            &cfg.settings,
        )?;
        Ok(())
    }))
}

/// Median-quantizes the converted PNGs and stores them as PNG and JPEG.
///
/// Yields the error of each quantized image against its original.
pub fn run_quantize_stage(cfg: &BenchConfig) -> Result<StageOutcome<QualityMetrics>> {
    let (sources, skipped) = prepare(cfg, Stage::Quantized, &[Flavor::Png, Flavor::Jpeg])?;
    Ok(run_each(Stage::Quantized, sources, skipped, |src| {
        let original = load_image(cfg.stage_path(Stage::Converted, Flavor::Png, src))?;
        let quantized = quantize_image(&original);
        save_png(
            quantized.as_raw(),
            cfg.stage_path(Stage::Quantized, Flavor::Png, src),
            &cfg.settings,
        )?;
        save_jpeg(
            quantized.as_raw(),
            cfg.stage_path(Stage::Quantized, Flavor::Jpeg, src),
            &cfg.settings,
        )?;
        Ok(quality_metrics(&original, quantized.as_raw())?)
    }))
}

fn load_quantized(path: &Path) -> Result<QuantizedImage> {
    QuantizedImage::from_raw(load_image(path)?).map_err(|e| Error::codec(path, e))
}

/// Reduces the quantized PNGs to bin indices and stores them as final PNG,
/// final JPEG and `.rbmq`.
pub fn run_finalize_stage(cfg: &BenchConfig) -> Result<StageOutcome<()>> {
    let flavors = [Flavor::Png, Flavor::Jpeg, Flavor::Rbmq];
    let (sources, skipped) = prepare(cfg, Stage::Final, &flavors)?;
    Ok(run_each(Stage::Final, sources, skipped, |src| {
        let quantized = load_quantized(&cfg.stage_path(Stage::Quantized, Flavor::Png, src))?;
        let reduced = reduce_image(&quantized);
        save_png(
            reduced.as_raw(),
            cfg.stage_path(Stage::Final, Flavor::Png, src),
            &cfg.settings,
        )?;
        save_jpeg(
            reduced.as_raw(),
            cfg.stage_path(Stage::Final, Flavor::Jpeg, src),
            &cfg.settings,
        )?;
        save_bytes(
            &container::pack(&reduced),
            cfg.stage_path(Stage::Final, Flavor::Rbmq, src),
        )?;
        Ok(())
    }))
}

/// Decode results for one image, each compared with the quantized PNG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeResult {
    pub png: QualityMetrics,
    pub jpeg: QualityMetrics,
    pub rbmq: QualityMetrics,
}

impl DecodeResult {
    /// True when both lossless paths reproduced the quantized image exactly.
    pub fn lossless_paths_exact(&self) -> bool {
        self.png.is_exact() && self.rbmq.is_exact()
    }
}

/// Reads a `.rbmq` file and returns the reduced image.
pub fn read_container(path: &Path) -> Result<ReducedImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    container::unpack(&bytes).map_err(|e| Error::codec(path, e))
}

/// Decodes every final output back to a quantized image.
///
/// Final PNG and `.rbmq` are expanded strictly; final JPEG goes through
/// [`reconstruct_from_lossy`]. The reconstructions are written as PNG.
pub fn run_decode_stage(cfg: &BenchConfig) -> Result<StageOutcome<DecodeResult>> {
    let flavors = [Flavor::Png, Flavor::Jpeg, Flavor::Rbmq];
    let (sources, skipped) = prepare(cfg, Stage::Decoded, &flavors)?;
    Ok(run_each(Stage::Decoded, sources, skipped, |src| {
        let reference = load_quantized(&cfg.stage_path(Stage::Quantized, Flavor::Png, src))?;

        let final_png = cfg.stage_path(Stage::Final, Flavor::Png, src);
        let reduced = ReducedImage::from_raw(load_image(&final_png)?)
            .map_err(|e| Error::codec(&final_png, e))?;
        let from_png = expand_image(&reduced);

        let from_jpeg = reconstruct_from_lossy(&load_image(cfg.stage_path(
            Stage::Final,
            Flavor::Jpeg,
            src,
        ))?);
        let from_rbmq = expand_image(&read_container(&cfg.stage_path(
            Stage::Final,
            Flavor::Rbmq,
            src,
        ))?);

        let mut metrics = [Flavor::Png, Flavor::Jpeg, Flavor::Rbmq]
            .into_iter()
            .zip([&from_png, &from_jpeg, &from_rbmq])
            .map(|(flavor, decoded)| {
                save_png(
                    decoded.as_raw(),
                    cfg.stage_path(Stage::Decoded, flavor, src),
                    &cfg.settings,
                )?;
                Ok(quality_metrics(reference.as_raw(), decoded.as_raw())?)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter();
        let mut next = || metrics.next().expect("three flavors");
        Ok(DecodeResult {
            png: next(),
            jpeg: next(),
            rbmq: next(),
        })
    }))
}

/// Result of a full corpus run.
#[derive(Debug, Clone)]
pub struct BenchReport {
    /// One record per image that made it through every stage, sorted by category then name.
    pub records: Vec<StageRecord>,
    pub decoded: Vec<(SourceImage, DecodeResult)>,
    pub skipped: Vec<Skipped>,
}

/// Gathers the on-disk sizes of every stage output for `source`.
pub fn collect_record(cfg: &BenchConfig, source: &SourceImage) -> Result<StageRecord> {
    let size = |stage, flavor| file_size(cfg.stage_path(stage, flavor, source));
    Ok(StageRecord {
        image_name: source.name.clone(),
        category: source.category.clone(),
        original_size: file_size(&source.path)?,
        converted_jpeg: size(Stage::Converted, Flavor::Jpeg)?,
        converted_png: size(Stage::Converted, Flavor::Png)?,
        quantized_jpeg: size(Stage::Quantized, Flavor::Jpeg)?,
        quantized_png: size(Stage::Quantized, Flavor::Png)?,
        final_jpeg: size(Stage::Final, Flavor::Jpeg)?,
        final_png: size(Stage::Final, Flavor::Png)?,
        rbmq_container: size(Stage::Final, Flavor::Rbmq)?,
        psnr_quantized: None,
        psnr_final_jpeg: None,
    })
}

/// Runs convert, quantize, finalize and decode, then collects the report rows.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    fs::create_dir_all(&cfg.output_root).map_err(|e| Error::io(&cfg.output_root, e))?;
    let convert = run_convert_stage(cfg)?;
    let quantize = run_quantize_stage(cfg)?;
    let finalize = run_finalize_stage(cfg)?;
    let decode = run_decode_stage(cfg)?;

    // Every stage re-discovers the corpus, so a failure shows up in each later stage too.
    let mut skipped: Vec<Skipped> = Vec::new();
    for s in convert
        .skipped
        .into_iter()
        .chain(quantize.skipped.clone())
        .chain(finalize.skipped)
        .chain(decode.skipped.clone())
    {
        if !skipped.iter().any(|k| k.path == s.path) {
            skipped.push(s);
        }
    }

    let mut records = Vec::new();
    for (source, decoded) in &decode.processed {
        let quality = quantize
            .processed
            .iter()
            .find(|(s, _)| s == source)
            .map(|(_, q)| q.psnr);
        match collect_record(cfg, source) {
            Ok(mut record) => {
                record.psnr_quantized = quality;
                record.psnr_final_jpeg = Some(decoded.jpeg.psnr);
                records.push(record);
            }
            Err(e) => skipped.push(Skipped {
                path: source.path.clone(),
                reason: e.to_string(),
            }),
        }
    }
    records.sort_by(|a, b| (&a.category, &a.image_name).cmp(&(&b.category, &b.image_name)));
    Ok(BenchReport {
        records,
        decoded: decode.processed,
        skipped,
    })
}
