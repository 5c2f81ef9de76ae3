//! `rbmq` command line. Every subcommand is a thin wrapper over the library.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rbmq_core::metrics::quality_metrics;
use rbmq_core::quant::{expand_image, quantize_and_reduce, quantize_image, reconstruct_from_lossy};
use rbmq_core::{container, QuantizedImage, ReducedImage};

use crate::error::{Error, Result};
use crate::image_io::{
    load_image, save_bytes, save_image, EncodeSettings, JpegQuality, OutputFormat, PngCompression,
};
use crate::pipeline::{self, BenchConfig, DirectoryTemplate};
use crate::report::write_report;

#[derive(Debug, Parser)]
#[command(
    name = "rbmq",
    version,
    about = "Reduced bit median quantization for PNG/JPEG pipelines"
)]
pub struct Cli {
    #[command(flatten)]
    pub encode: EncodeArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct EncodeArgs {
    /// JPEG quality for every JPEG written (1-100)
    #[arg(long, global = true, env = "RBMQ_JPEG_QUALITY", default_value_t = JpegQuality::DEFAULT, value_parser = parse_quality)]
    pub jpeg_quality: JpegQuality,

    /// PNG deflate effort
    #[arg(long, global = true, value_enum, default_value_t = PngCompression::Default)]
    pub png_compression: PngCompression,
}

fn parse_quality(s: &str) -> std::result::Result<JpegQuality, String> {
    s.parse()
}

impl EncodeArgs {
    pub fn settings(&self) -> EncodeSettings {
        EncodeSettings {
            jpeg_quality: self.jpeg_quality,
            png_compression: self.png_compression,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InOut {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Output format; inferred from the output extension when absent
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl InOut {
    fn format(&self) -> Result<OutputFormat> {
        self.format
            .map_or_else(|| OutputFormat::from_path(&self.output), Ok)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Re-encode an image as PNG or JPEG (alpha dropped)
    Convert(InOut),
    /// Median-quantize an image
    Quantize(InOut),
    /// Quantize and reduce to 5-bit bin indices (.png, .jpg or .rbmq output)
    Finalize(InOut),
    /// Expand a final image or .rbmq container back to the quantized image
    Decode {
        #[command(flatten)]
        io: InOut,
        /// Clamp out-of-range indices instead of rejecting them (default for .jpg/.jpeg input)
        #[arg(long)]
        lossy: bool,
    },
    /// Pack an image of bin indices into an .rbmq container
    Pack(InOut),
    /// Unpack an .rbmq container into an image of bin indices
    Unpack(InOut),
    /// Print MSE, PSNR and max absolute error between two images
    Metrics { a: PathBuf, b: PathBuf },
    /// Run every stage over a corpus and write the size report
    Bench {
        /// Corpus root containing one directory per category
        #[arg(long)]
        input: PathBuf,
        /// Where stage directories are created
        #[arg(long)]
        output: PathBuf,
        /// CSV report path [default: <output>/report.csv]
        #[arg(long)]
        report: Option<PathBuf>,
        /// Stage directory name template
        #[arg(long, default_value = DirectoryTemplate::DEFAULT)]
        template: String,
    },
}

impl Error {
    /// 2 for usage mistakes, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::UnknownFormat(_) | Error::InvalidQuality(_) => 2,
            _ => 1,
        }
    }
}

fn reject_rbmq(format: OutputFormat, what: &str) -> Result<OutputFormat> {
    if format == OutputFormat::Rbmq {
        return Err(Error::Usage(format!(
            "{what} writes images; .rbmq output is only available from finalize and pack"
        )));
    }
    Ok(format)
}

fn is_lossy_input(path: &Path) -> bool {
    matches!(OutputFormat::from_path(path), Ok(OutputFormat::Jpeg))
}

fn load_reduced(path: &Path) -> Result<ReducedImage> {
    ReducedImage::from_raw(load_image(path)?).map_err(|e| Error::codec(path, e))
}

/// Decodes a final image or container at `path` into the quantized image.
pub fn decode_file(path: &Path, lossy: bool) -> Result<QuantizedImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(&container::MAGIC) {
        let reduced = container::unpack(&bytes).map_err(|e| Error::codec(path, e))?;
        return Ok(expand_image(&reduced));
    }
    if lossy || is_lossy_input(path) {
        Ok(reconstruct_from_lossy(&load_image(path)?))
    } else {
        Ok(expand_image(&load_reduced(path)?))
    }
}

/// Executes one parsed invocation, printing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let settings = cli.encode.settings();
    let say = |out: &mut dyn Write, line: String| {
        writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
    };
    match cli.command {
        Command::Convert(io) => {
            let format = reject_rbmq(io.format()?, "convert")?;
            let img = load_image(&io.input)?;
            let n = save_image(&img, &io.output, format, &settings)?;
            say(out, format!("{}: {n} bytes", io.output.display()))
        }
        Command::Quantize(io) => {
            let format = reject_rbmq(io.format()?, "quantize")?;
            let q = quantize_image(&load_image(&io.input)?);
            let n = save_image(q.as_raw(), &io.output, format, &settings)?;
            say(out, format!("{}: {n} bytes", io.output.display()))
        }
        Command::Finalize(io) => {
            let format = io.format()?;
            let reduced = quantize_and_reduce(&load_image(&io.input)?);
            let n = match format {
                OutputFormat::Rbmq => save_bytes(&container::pack(&reduced), &io.output)?,
                other => save_image(reduced.as_raw(), &io.output, other, &settings)?,
            };
            say(out, format!("{}: {n} bytes", io.output.display()))
        }
        Command::Decode { io, lossy } => {
            let format = reject_rbmq(io.format()?, "decode")?;
            let q = decode_file(&io.input, lossy)?;
            let n = save_image(q.as_raw(), &io.output, format, &settings)?;
            say(out, format!("{}: {n} bytes", io.output.display()))
        }
        Command::Pack(io) => {
            if io.format()? != OutputFormat::Rbmq {
                return Err(Error::Usage("pack writes .rbmq containers".into()));
            }
            let reduced = load_reduced(&io.input)?;
            let n = save_bytes(&container::pack(&reduced), &io.output)?;
            say(out, format!("{}: {n} bytes", io.output.display()))
        }
        Command::Unpack(io) => {
            let format = reject_rbmq(io.format()?, "unpack")?;
            let reduced = pipeline::read_container(&io.input)?;
            let n = save_image(reduced.as_raw(), &io.output, format, &settings)?;
            say(out, format!("{}: {n} bytes", io.output.display()))
        }
        Command::Metrics { a, b } => {
            let (a_img, b_img) = (load_image(&a)?, load_image(&b)?);
            let m = quality_metrics(&a_img, &b_img)
                .map_err(|e| Error::Usage(format!("{} vs {}: {e}", a.display(), b.display())))?;
            say(out, format!("mse: {:.4}", m.mse))?;
            say(out, format!("psnr: {:.2} dB", m.psnr))?;
            say(out, format!("max_abs_error: {}", m.max_abs_error))
        }
        Command::Bench {
            input,
            output,
            report,
            template,
        } => {
            let mut cfg = BenchConfig::new(input, &output);
            cfg.settings = settings;
            cfg.template = DirectoryTemplate::new(template)?;
            let bench = pipeline::run_bench(&cfg)?;
            let report_path = report.unwrap_or_else(|| output.join("report.csv"));
            write_report(&bench.records, &report_path)?;
            for s in &bench.skipped {
                log::warn!("skipped {}: {}", s.path.display(), s.reason);
            }
            say(
                out,
                format!(
                    "{} images, {} skipped, report: {}",
                    bench.records.len(),
                    bench.skipped.len(),
                    report_path.display()
                ),
            )
        }
    }
}
