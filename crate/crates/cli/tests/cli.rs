use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scem_cli::commands::MetricsRecord;
use scem_cli::png::load_png;
use scem_cli::Tensor;
use scem_core::diffusion::gaussian_noise;
use scem_core::losses::{loss_chrom, loss_illum, loss_ssim, psnr, ssim_metric};
use scem_core::{NoiseSchedule, RgbImage};
use sha2::{Digest, Sha256};

fn scem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/lowlight")
        .join(name)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn extract_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = scem(&["extract", p(&fixture("scene00.png")), "-o", p(dir.path())]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["t_ref", "r", "s3ch", "phi", "stack"] {
        assert!(dir.path().join(format!("{name}.scem")).is_file());
        assert!(dir.path().join(format!("{name}.png")).is_file());
    }
    let stack = Tensor::load(&dir.path().join("stack.scem")).unwrap();
    assert_eq!((stack.height, stack.width, stack.channels), (48, 64, 13));
    assert_eq!(Tensor::load(&dir.path().join("t_ref.scem")).unwrap().channels, 1);
    let montage = image::open(dir.path().join("stack.png")).unwrap();
    assert_eq!((montage.width(), montage.height()), (64 * 13, 48));
}

#[test]
fn extract_is_bit_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = scem(&["extract", p(&fixture("scene03.png")), "-o", p(d.path())]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["t_ref.scem", "r.scem", "s3ch.scem", "phi.scem", "stack.scem"] {
        assert_eq!(digest(&a.path().join(name)), digest(&b.path().join(name)), "{name}");
    }
}

#[test]
fn missing_input_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    let out = scem(&[
        "extract",
        p(&fixture("scene00.png")),
        "/no/such/file.png",
        "-o",
        p(&target),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("file.png"));
    assert!(!target.exists());
}

#[test]
fn solver_non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "solver_max_iter = 1\nsolver_tol = 1e-14\nlambda = 5.0\n").unwrap();
    let out = scem(&[
        "--config",
        p(&cfg),
        "extract",
        p(&fixture("scene01.png")),
        "-o",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unknown_config_key_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "lambda = 0.2\nlamda_se = 0.1\n").unwrap();
    let out = scem(&[
        "--config",
        p(&cfg),
        "extract",
        p(&fixture("scene00.png")),
        "-o",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("lamda_se"));
}

#[test]
fn batch_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = [fixture("scene00.png"), fixture("scene05.png"), fixture("scene08.png")];
    let mut args = vec!["--jobs", "3", "extract"];
    args.extend(inputs.iter().map(|i| p(i)));
    let batch = dir.path().join("batch");
    args.extend(["-o", p(&batch)]);
    let out = scem(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    for input in &inputs {
        let stem = input.file_stem().unwrap().to_str().unwrap();
        let single = dir.path().join(format!("single_{stem}"));
        assert!(scem(&["extract", p(input), "-o", p(&single)]).status.success());
        assert_eq!(
            digest(&batch.join(stem).join("stack.scem")),
            digest(&single.join("stack.scem"))
        );
    }
}

#[test]
fn replicated_layout_has_15_channels() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "replicate_illumination = true\n").unwrap();
    let out = scem(&[
        "--config",
        p(&cfg),
        "extract",
        p(&fixture("scene02.png")),
        "-o",
        p(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(Tensor::load(&dir.path().join("stack.scem")).unwrap().channels, 15);
    let s = scem(&[
        "sample",
        p(&dir.path().join("stack.scem")),
        "--denoiser",
        "zero",
        "-o",
        p(dir.path()),
    ]);
    assert!(s.status.success(), "{}", stderr(&s));
}

#[test]
fn oracle_sample_reaches_target() {
    let dir = tempfile::tempdir().unwrap();
    let target = fixture("scene04.png");
    assert!(scem(&["extract", p(&target), "-o", p(dir.path())]).status.success());
    let out = scem(&[
        "--seed",
        "11",
        "sample",
        p(&dir.path().join("stack.scem")),
        "--denoiser",
        &format!("oracle:{}", p(&target)),
        "-o",
        p(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let x = Tensor::load(&dir.path().join("out.scem")).unwrap().to_rgb().unwrap();
    let reference = load_png(&target).unwrap();
    assert!(psnr(&x, &reference).unwrap() >= 80.0);
    assert!(dir.path().join("out.png").is_file());
}

#[test]
fn zero_denoiser_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    assert!(scem(&["extract", p(&fixture("scene06.png")), "-o", p(dir.path())])
        .status
        .success());
    let out = scem(&[
        "--seed",
        "5",
        "sample",
        p(&dir.path().join("stack.scem")),
        "--denoiser",
        "zero",
        "-o",
        p(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let x = Tensor::load(&dir.path().join("out.scem")).unwrap().to_rgb().unwrap();
    let scale = 1.0 / NoiseSchedule::default().alpha_bar(1000).sqrt();
    let expected = gaussian_noise(48, 64, 5).map(|v| (v * scale).clamp(0.0, 1.0));
    assert!(x.max_abs_diff(&expected).unwrap() < 1e-6);
}

#[test]
fn sample_is_deterministic_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    assert!(scem(&["extract", p(&fixture("scene07.png")), "-o", p(dir.path())])
        .status
        .success());
    let stack = dir.path().join("stack.scem");
    let run = |seed: &str, sub: &str| {
        let o = dir.path().join(sub);
        let out = scem(&["--seed", seed, "sample", p(&stack), "--denoiser", "blur", "-o", p(&o)]);
        assert!(out.status.success(), "{}", stderr(&out));
        digest(&o.join("out.scem"))
    };
    assert_eq!(run("3", "a"), run("3", "b"));
    assert_ne!(run("3", "a"), run("4", "c"));
}

#[test]
fn sample_rejects_wrong_channel_count() {
    let dir = tempfile::tempdir().unwrap();
    assert!(scem(&["extract", p(&fixture("scene00.png")), "-o", p(dir.path())])
        .status
        .success());
    let out = scem(&[
        "sample",
        p(&dir.path().join("phi.scem")),
        "--denoiser",
        "zero",
        "-o",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let out = scem(&[
        "sample",
        p(&dir.path().join("stack.scem")),
        "--denoiser",
        &format!("oracle:{}", p(&dir.path().join("stack.png"))),
        "-o",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let out = scem(&["sample", p(&dir.path().join("nope.scem")), "--denoiser", "zero"]);
    assert_eq!(out.status.code(), Some(2));
}

fn metrics_stdout(a: &Path, b: &Path) -> String {
    let out = scem(&["metrics", p(a), p(b)]);
    assert!(out.status.success(), "{}", stderr(&out));
    String::from_utf8(out.stdout).unwrap().trim_end().to_string()
}

#[test]
fn metrics_identity_and_offset() {
    let dir = tempfile::tempdir().unwrap();
    let a = RgbImage::filled(16, 16, [0.2, 0.3, 0.4]);
    let b = a.map(|v| v + 0.1);
    let (pa, pb) = (dir.path().join("a.scem"), dir.path().join("b.scem"));
    Tensor::from_rgb(&a).save(&pa).unwrap();
    Tensor::from_rgb(&b).save(&pb).unwrap();
    assert!(metrics_stdout(&pa, &pa).starts_with("psnr=inf ssim=1.000000 "));
    let f = fixture("scene05.png");
    assert_eq!(
        metrics_stdout(&f, &f),
        "psnr=inf ssim=1.000000 l_illum=0.000000 l_chrom=0.000000 l_ssim=0.000000"
    );
    // f32 storage perturbs the offset slightly; six decimals still hold.
    assert!(metrics_stdout(&pb, &pa).starts_with("psnr=20.000000 "));
}

#[test]
fn metrics_match_library() {
    let a = fixture("scene00.png");
    let b = fixture("scene02.png");
    let (x, y) = (load_png(&a).unwrap(), load_png(&b).unwrap());
    let expected = format!(
        "psnr={:.6} ssim={:.6} l_illum={:.6} l_chrom={:.6} l_ssim={:.6}",
        psnr(&x, &y).unwrap(),
        ssim_metric(&x, &y).unwrap(),
        loss_illum(&x, &y).unwrap(),
        loss_chrom(&x, &y).unwrap(),
        loss_ssim(&x, &y).unwrap()
    );
    assert_eq!(metrics_stdout(&a, &b), expected);
    assert_eq!(MetricsRecord::compute(&x, &y).unwrap().to_string(), expected);
}

#[test]
fn metrics_size_mismatch_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("s.scem");
    Tensor::from_rgb(&RgbImage::zeros(20, 20)).save(&small).unwrap();
    let out = scem(&["metrics", p(&fixture("scene00.png")), p(&small)]);
    assert_eq!(out.status.code(), Some(4));
}
