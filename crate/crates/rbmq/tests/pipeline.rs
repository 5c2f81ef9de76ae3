use std::fs;
use std::path::{Path, PathBuf};

use image::{GrayImage, Luma, Rgb, RgbImage, Rgba, RgbaImage};
use rbmq::core::container;
use rbmq::core::quant::quantize_image;
use rbmq::image_io::load_image;
use rbmq::pipeline::{
    discover, run_bench, run_convert_stage, run_decode_stage, run_finalize_stage,
    run_quantize_stage, BenchConfig, DirectoryTemplate, Flavor, Stage,
};
use rbmq::report::{emit_report, COLUMNS};

fn gradient(w: u32, h: u32, phase: u32) -> RgbImage {
    RgbImage::from_fn(w, h, |x, y| {
        let wobble = ((x * 7 + y * 13 + phase) % 11) as u8;
        Rgb([
            (x * 2 + phase) as u8 ^ wobble,
            (y * 3) as u8,
            ((x + y) as u8).wrapping_add(wobble),
        ])
    })
}

/// Ten images in three categories, mixed formats, one with alpha.
fn synthetic_corpus(root: &Path) -> usize {
    let mut n = 0;
    for (cat, count) in [("alpha", 4), ("beta", 3), ("gamma", 3)] {
        let dir = root.join(cat);
        fs::create_dir_all(&dir).unwrap();
        for i in 0..count {
            let img = gradient(48 + i * 8, 40, i * 17 + n);
            let path = match i % 3 {
                0 => dir.join(format!("img{i}.png")),
                1 => dir.join(format!("img{i}.bmp")),
                _ => dir.join(format!("img{i}.tif")),
            };
            img.save(&path).unwrap();
            n += 1;
        }
    }
    let gray = GrayImage::from_fn(33, 21, |x, y| Luma([(x * 7 + y) as u8]));
    gray.save(root.join("gamma/gray.png")).unwrap();
    RgbaImage::from_pixel(9, 9, Rgba([200, 100, 50, 3]))
        .save(root.join("beta/translucent.png"))
        .unwrap();
    n as usize + 2
}

struct Fixture {
    _dir: tempfile::TempDir,
    cfg: BenchConfig,
    images: usize,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus");
    let images = synthetic_corpus(&input);
    let cfg = BenchConfig::new(&input, dir.path().join("out"));
    Fixture {
        _dir: dir,
        cfg,
        images,
    }
}

fn files_in(dir: PathBuf) -> usize {
    fs::read_dir(dir).map(|d| d.count()).unwrap_or(0)
}

#[test]
fn discovery_is_sorted_and_ignores_root_files() {
    let f = fixture();
    fs::write(f.cfg.input_root.join("stray.png"), b"x").unwrap();
    fs::write(f.cfg.input_root.join("alpha/.hidden"), b"x").unwrap();
    let (sources, skipped) = discover(&f.cfg).unwrap();
    assert_eq!(sources.len(), f.images);
    assert!(skipped.is_empty());
    let mut sorted = sources.clone();
    sorted.sort();
    assert_eq!(sources, sorted);
}

#[test]
fn missing_input_root() {
    let cfg = BenchConfig::new("/definitely/not/here", "/tmp/unused");
    assert!(matches!(
        discover(&cfg),
        Err(rbmq::Error::MissingInputRoot(_))
    ));
}

#[test]
fn name_collisions_are_skipped() {
    let f = fixture();
    gradient(4, 4, 0)
        .save(f.cfg.input_root.join("alpha/img0.jpg"))
        .unwrap();
    let (sources, skipped) = discover(&f.cfg).unwrap();
    assert_eq!(sources.len(), f.images);
    assert_eq!(skipped.len(), 1);
    assert!(skipped[0].path.ends_with("alpha/img0.png"));
}

#[test]
fn stages_produce_expected_files() {
    let f = fixture();
    let cfg = &f.cfg;
    let convert = run_convert_stage(cfg).unwrap();
    assert_eq!(convert.processed.len(), f.images);
    let count = |stage, flavor| {
        ["alpha", "beta", "gamma"]
            .iter()
            .map(|c| files_in(cfg.stage_dir(stage, c, flavor)))
            .sum::<usize>()
    };
    assert_eq!(count(Stage::Converted, Flavor::Png), f.images);
    assert_eq!(count(Stage::Converted, Flavor::Jpeg), f.images);

    for source in convert.sources() {
        let original = load_image(&source.path).unwrap();
        let converted = load_image(cfg.stage_path(Stage::Converted, Flavor::Png, source)).unwrap();
        assert_eq!(original, converted, "{}", source.name);
    }

    let quantize = run_quantize_stage(cfg).unwrap();
    for (source, quality) in &quantize.processed {
        assert!(quality.max_abs_error <= 4);
        let q = load_image(cfg.stage_path(Stage::Quantized, Flavor::Png, source)).unwrap();
        assert!(q.distinct_values_per_channel().iter().all(|&n| n <= 32));
        assert!(q.samples().iter().all(|v| v % 8 == 4));
    }

    let finalize = run_finalize_stage(cfg).unwrap();
    assert_eq!(finalize.processed.len(), f.images);
    assert!(cfg.output_root.join("final_alphaPNG").is_dir());
    assert!(cfg.output_root.join("final_alphaJPEG").is_dir());
    for source in finalize.sources() {
        let fin = load_image(cfg.stage_path(Stage::Final, Flavor::Png, source)).unwrap();
        assert!(fin.samples().iter().all(|&b| b <= 31));
        let rbmq = cfg.stage_path(Stage::Final, Flavor::Rbmq, source);
        let expected = container::container_len(fin.width(), fin.height(), fin.channels()).unwrap();
        assert_eq!(fs::metadata(&rbmq).unwrap().len() as usize, expected);
    }

    let decode = run_decode_stage(cfg).unwrap();
    assert_eq!(decode.processed.len(), f.images);
    for (source, result) in &decode.processed {
        assert!(result.lossless_paths_exact(), "{}", source.name);
        assert!(
            result.jpeg.psnr > 15.0,
            "{}: {}",
            source.name,
            result.jpeg.psnr
        );
    }
}

#[test]
fn later_stage_without_earlier_one_skips_everything() {
    let f = fixture();
    let outcome = run_quantize_stage(&f.cfg).unwrap();
    assert!(outcome.processed.is_empty());
    assert_eq!(outcome.skipped.len(), f.images);
}

#[test]
fn bad_files_are_skipped_and_the_rest_continue() {
    let f = fixture();
    fs::write(f.cfg.input_root.join("beta/broken.png"), b"not a png").unwrap();
    image::ImageBuffer::<Luma<u16>, _>::from_pixel(3, 3, Luma([9000u16]))
        .save(f.cfg.input_root.join("beta/deep.png"))
        .unwrap();
    let report = run_bench(&f.cfg).unwrap();
    assert_eq!(report.records.len(), f.images);
    assert_eq!(report.skipped.len(), 2, "{:?}", report.skipped);
    assert!(report
        .skipped
        .iter()
        .any(|s| s.reason.contains("unsupported pixel format")));
}

#[test]
fn corrupt_container_is_reported_on_decode() {
    let f = fixture();
    run_convert_stage(&f.cfg).unwrap();
    run_quantize_stage(&f.cfg).unwrap();
    let finalize = run_finalize_stage(&f.cfg).unwrap();
    let victim = &finalize.processed[0].0;
    let path = f.cfg.stage_path(Stage::Final, Flavor::Rbmq, victim);
    let mut bytes = fs::read(&path).unwrap();
    bytes.pop();
    fs::write(&path, bytes).unwrap();

    let decode = run_decode_stage(&f.cfg).unwrap();
    assert_eq!(decode.processed.len(), f.images - 1);
    assert_eq!(decode.skipped.len(), 1);
    assert!(
        decode.skipped[0].reason.contains("truncated"),
        "{}",
        decode.skipped[0].reason
    );
}

#[test]
fn bench_report_matches_disk_and_is_repeatable() {
    let f = fixture();
    let first = run_bench(&f.cfg).unwrap();
    assert_eq!(first.records.len(), f.images);
    assert!(first.skipped.is_empty());

    let mut csv = Vec::new();
    emit_report(&first.records, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), f.images + 1);
    assert_eq!(
        text.lines().next().unwrap().split(',').count(),
        COLUMNS.len()
    );

    let (sources, _) = discover(&f.cfg).unwrap();
    for (record, source) in first.records.iter().zip(&sources) {
        assert_eq!(record.image_name, source.name);
        assert_eq!(
            record.original_size,
            fs::metadata(&source.path).unwrap().len()
        );
        let disk = |stage, flavor| {
            fs::metadata(f.cfg.stage_path(stage, flavor, source))
                .unwrap()
                .len()
        };
        assert_eq!(record.final_png, disk(Stage::Final, Flavor::Png));
        assert_eq!(record.quantized_jpeg, disk(Stage::Quantized, Flavor::Jpeg));
        assert_eq!(record.rbmq_container, disk(Stage::Final, Flavor::Rbmq));
        assert!(record.psnr_quantized.unwrap() >= 36.08);
    }

    let rbmq_bytes = |src| fs::read(f.cfg.stage_path(Stage::Final, Flavor::Rbmq, src)).unwrap();
    let before: Vec<_> = sources.iter().map(rbmq_bytes).collect();
    let second = run_bench(&f.cfg).unwrap();
    assert_eq!(first.records, second.records);
    let after: Vec<_> = sources.iter().map(rbmq_bytes).collect();
    assert_eq!(before, after);
}

#[test]
fn final_png_chain_is_lossless() {
    let f = fixture();
    run_bench(&f.cfg).unwrap();
    let (sources, _) = discover(&f.cfg).unwrap();
    for source in &sources {
        let expected = quantize_image(&load_image(&source.path).unwrap());
        for flavor in [Flavor::Png, Flavor::Rbmq] {
            let decoded = load_image(f.cfg.stage_path(Stage::Decoded, flavor, source)).unwrap();
            assert_eq!(
                &decoded,
                expected.as_raw(),
                "{} via {flavor:?}",
                source.name
            );
        }
    }
}

#[test]
fn custom_template_and_output_inside_input() {
    let f = fixture();
    let mut cfg = f.cfg.clone();
    cfg.output_root = cfg.input_root.join("zz_out");
    cfg.template = DirectoryTemplate::new("{category}-{stage}-{format}").unwrap();
    let report = run_bench(&cfg).unwrap();
    assert_eq!(report.records.len(), f.images);
    assert!(cfg.output_root.join("alpha-final-RBMQ").is_dir());
    // a second run must not pick up its own outputs as a category
    let again = run_bench(&cfg).unwrap();
    assert_eq!(again.records.len(), f.images);

    assert!(DirectoryTemplate::new("{stage}_{category}").is_err());
    assert!(DirectoryTemplate::new("{stage}/{category}{format}").is_err());
}
