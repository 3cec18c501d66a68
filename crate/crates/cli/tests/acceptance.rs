//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::Instant;

use image::{GrayImage, Luma};
use num_complex::Complex64;
use rand::Rng;
use symconv::detect::{find_endpoints, SymmetryLine, SymmetrySegment};
use symconv::eval::{is_tp_line, is_tp_segment, match_lines, match_segments, GroundTruthSegment};
use symconv::symmetry::{accumulate_centers, accumulate_lines, SweepParams};
use symconv::synth::{disks, mirrored_texture};
use symconv::wavelets::{make_haar, make_morlet};
use symconv::{Image, Point};
use symconv_cli::config::Mode;
use symconv_cli::pipeline::detect_lines;
use symconv_cli::{run, Detections, RunConfig};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn save_gray(img: &Image, path: &Path) {
    GrayImage::from_fn(img.width() as u32, img.height() as u32, |x, y| {
        Luma([(img.get(x as usize, y as usize) * 255.0).round() as u8])
    })
    .save(path)
    .unwrap();
}

fn wavelet_contract() -> Outcome {
    let start = Instant::now();
    let mut worst_mean: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    let mut n = 0;
    for &angle in &[0.0, 0.4, 1.3, 2.9, 4.4] {
        for &wavelength in &[3.0, 6.0, 8.0, 12.0, 20.0] {
            for &(sigma, support) in &[(1.5, 7), (3.0, 13), (4.0, 17), (6.0, 25)] {
                let k = make_morlet(angle, wavelength, sigma, support).map_err(|e| e.to_string())?;
                let sum: Complex64 = k.values().iter().sum();
                let mag: f64 = k.values().iter().map(|v| v.norm()).sum();
                let energy: f64 = k.values().iter().map(|v| v.norm_sqr()).sum();
                worst_mean = worst_mean.max(sum.norm() / mag);
                worst_energy = worst_energy.max((energy - 1.0).abs());
                n += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        n == 100 && worst_mean <= 1e-10 && worst_energy <= 1e-10 && secs < 1.0,
        format!("{n} kernels, max |mean| {worst_mean:.1e}, max energy error {worst_energy:.1e}, {secs:.3} s"),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let img = common::random_image(32, 32, 500 + seed);
        let params = SweepParams {
            n_alpha: 8,
            betas: vec![-PI / 4.0, 0.0, PI / 4.0],
            distances: vec![6.0, 10.0, 14.0],
            ..SweepParams::for_lines(32, 32)
        };
        let acc = accumulate_lines(&img, &params).map_err(|e| e.to_string())?;
        let (dmax, want) = common::naive_accumulate_lines(
            &img,
            params.n_alpha,
            &params.betas,
            &params.distances,
            params.exponent,
            &params.geometry,
            common::mean(&img),
        );
        if dmax != acc.delta_max() {
            return Err(format!("seed {seed}: delta range {} vs {dmax}", acc.delta_max()));
        }
        worst = worst.max(common::max_relative_error(acc.votes(), &want));
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-6 && secs < 60.0,
        format!("20 images, max relative error {worst:.1e}, {secs:.2} s"),
    )
}

/// Chord of the line through `c` with direction `angle` inside `[0, size−1]²`.
fn axis_chord(c: Point, angle: f64, size: f64) -> GroundTruthSegment {
    let (dy, dx) = angle.sin_cos();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, d) in [(c.x, dx), (c.y, dy)] {
        if d.abs() > 1e-12 {
            let (a, b) = ((0.0 - p) / d, (size - 1.0 - p) / d);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    GroundTruthSegment::new(
        Point::new(c.x + lo * dx, c.y + lo * dy),
        Point::new(c.x + hi * dx, c.y + hi * dy),
    )
    .unwrap()
}

fn synthetic_lines() -> Outcome {
    let config = RunConfig::default();
    let sweep = config.sweep_params(64, 64);
    let peaks = config.peak_params();
    let center = Point::new(31.5, 31.5);
    let mut hits = 0;
    let mut misses = Vec::new();
    for seed in 0..20u64 {
        let angle = common::rng(1000 + seed).gen_range(0.0..PI);
        let img = mirrored_texture(64, 64, center, angle, seed).map_err(|e| e.to_string())?;
        let found = detect_lines(&img, &sweep, &peaks, config.refine).map_err(|e| e.to_string())?;
        let gt = axis_chord(center, angle, 64.0);
        match found.lines.first() {
            Some(top) if is_tp_line(top, &gt) => hits += 1,
            _ => misses.push(seed),
        }
    }
    check(hits >= 18, format!("{hits}/20 top-1 lines pass the line criterion, misses {misses:?}"))
}

fn segment_endpoints() -> Outcome {
    let haar = make_haar(20).map_err(|e| e.to_string())?;
    let mut clean = 0;
    let cases = [(100, 30, 70), (120, 10, 95), (80, 25, 50), (200, 60, 170), (64, 20, 41)];
    for &(len, a, b) in &cases {
        let hist: Vec<f64> = (0..len).map(|i| if (a..b).contains(&i) { 1.0 } else { 0.0 }).collect();
        match find_endpoints(&hist, &haar) {
            Ok((fa, fb)) if fa.abs_diff(a) <= 2 && fb.abs_diff(b) <= 2 => clean += 1,
            other => return Err(format!("boxcar [{a},{b}) of {len}: {other:?}")),
        }
    }
    let mut rng = common::rng(2024);
    let mut noisy = 0;
    for _ in 0..20 {
        let hist: Vec<f64> = (0..100)
            .map(|i| if (30..70).contains(&i) { 1.0 } else { 0.0 } + rng.gen_range(-0.05..0.05))
            .collect();
        if let Ok((a, b)) = find_endpoints(&hist, &haar) {
            if a.abs_diff(30) <= 3 && b.abs_diff(70) <= 3 {
                noisy += 1;
            }
        }
    }
    check(
        clean == cases.len() && noisy >= 18,
        format!("{clean}/{} clean boxcars within ±2, {noisy}/20 noisy within ±3", cases.len()),
    )
}

fn ellipse_centers() -> Outcome {
    let truth = Point::new(100.0, 100.0);
    let mut worst: f64 = 0.0;
    for r in [15.0, 20.0, 25.0, 30.0, 35.0, 40.0] {
        let img = disks(200, 200, &[(truth, r)]).map_err(|e| e.to_string())?;
        let params = SweepParams::for_ellipses(vec![2.0 * r - 5.0, 2.0 * r, 2.0 * r + 5.0]);
        let map = accumulate_centers(&img, &params).map_err(|e| e.to_string())?;
        let (x, y) = map.argmax();
        let err = Point::new(x as f64, y as f64).distance(&truth);
        if err > 2.0 {
            return Err(format!("r = {r}: maximum at ({x},{y}), {err:.2} px off"));
        }
        worst = worst.max(err);
    }
    Ok(format!("6 radii, worst center error {worst:.2} px"))
}

fn seg(center: Point, angle: f64, length: f64, score: f64) -> SymmetrySegment {
    let (s, c) = angle.sin_cos();
    let h = length / 2.0;
    let rho = angle.rem_euclid(PI);
    let line = SymmetryLine {
        rho,
        delta: center.x * rho.sin() - center.y * rho.cos(),
        score,
    };
    SymmetrySegment::new(
        line,
        Point::new(center.x - h * c, center.y - h * s),
        Point::new(center.x + h * c, center.y + h * s),
    )
    .unwrap()
}

fn gt(center: Point, angle: f64, length: f64) -> GroundTruthSegment {
    let s = seg(center, angle, length, 0.0);
    GroundTruthSegment::new(s.endpoint_a, s.endpoint_b).unwrap()
}

fn metric_suite() -> Outcome {
    let c = Point::new(60.0, 20.0);
    let g = gt(c, 0.0, 100.0);
    let normal_shift = |k: f64| Point::new(c.x, c.y + k * 100.0);
    let far = gt(Point::new(300.0, 300.0), 1.0, 50.0);
    let examples = [
        ("identical segment", is_tp_segment(&seg(c, 0.0, 100.0, 1.0), &g)),
        ("15° segment", !is_tp_segment(&seg(c, 15f64.to_radians(), 100.0, 1.0), &g)),
        ("center 0.3·L away", !is_tp_segment(&seg(normal_shift(0.3), 0.0, 100.0, 1.0), &g)),
        ("line through center", is_tp_line(&seg(c, 0.0, 10.0, 1.0).line, &g)),
        ("line offset 0.25·L", !is_tp_line(&seg(normal_shift(0.25), 0.0, 100.0, 1.0).line, &g)),
        ("segment TP carrier is line TP", {
            let d = seg(Point::new(62.0, 21.0), 0.05, 90.0, 1.0);
            is_tp_segment(&d, &g) && is_tp_line(&d.line, &g)
        }),
        ("1 of 2 matched", {
            let m = match_segments(&[seg(c, 0.0, 100.0, 1.0)], &[g, far]);
            (m.tp, m.fp, m.fn_) == (1, 0, 1)
        }),
        ("2 detections, 1 truth", {
            let m = match_segments(&[seg(c, 0.0, 100.0, 1.0), seg(c, 0.01, 100.0, 0.5)], &[g]);
            (m.tp, m.fp, m.fn_) == (1, 1, 0)
        }),
        ("no detections", {
            let m = match_segments(&[], &[g, far]);
            (m.tp, m.fp, m.fn_) == (0, 0, 2) && m.precision() == 1.0 && m.recall() == 0.0
        }),
    ];
    let failed: Vec<_> = examples.iter().filter(|e| !e.1).map(|e| e.0).collect();
    if !failed.is_empty() {
        return Err(format!("examples failed: {failed:?}"));
    }

    let mut rng = common::rng(606);
    let mut dominated = 0;
    for _ in 0..50 {
        let gts: Vec<_> = (0..4)
            .map(|_| gt(Point::new(rng.gen_range(0.0..200.0), rng.gen_range(0.0..200.0)), rng.gen_range(0.0..PI), rng.gen_range(10.0..80.0)))
            .collect();
        let segs: Vec<_> = (0..8)
            .map(|i| {
                let g = &gts[i % 4];
                seg(
                    Point::new(g.center().x + rng.gen_range(-10.0..10.0), g.center().y + rng.gen_range(-10.0..10.0)),
                    g.angle() + rng.gen_range(-0.3..0.3),
                    rng.gen_range(10.0..80.0),
                    rng.gen_range(0.0..1.0),
                )
            })
            .collect();
        let lines: Vec<_> = segs.iter().map(|s| s.line).collect();
        if match_lines(&lines, &gts).tp >= match_segments(&segs, &gts).tp {
            dominated += 1;
        }
    }
    check(dominated == 50, format!("9/9 examples, line TP ≥ segment TP on {dominated}/50 sets"))
}

fn ellipse_performance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("disks.png");
    let img = disks(300, 240, &[(Point::new(90.0, 120.0), 45.0), (Point::new(210.0, 110.0), 60.0)])
        .map_err(|e| e.to_string())?;
    save_gray(&img, &input);
    let config = RunConfig {
        mode: Mode::Ellipses,
        inputs: vec![input],
        out: dir.path().to_path_buf(),
        d_min: 50.0,
        d_max: Some(70.0),
        d_step: 10.0,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let report = run(&config).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let scale = report.images[0].detections.scale.0;
    check(
        secs <= 10.0 && (scale - 200.0 / 300.0).abs() < 1e-9,
        format!("300×240 resized to 200×160, 3 distances, n_α = 32: {secs:.2} s"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("texture.png");
    let img = mirrored_texture(120, 100, Point::new(60.0, 50.0), 1.1, 8).map_err(|e| e.to_string())?;
    save_gray(&img, &input);
    let mut checked = 0;
    for mode in ["lines", "segments", "ellipses"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{mode}{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_symconv"))
                .args(["--mode", mode, "--input"])
                .arg(&input)
                .arg("--out")
                .arg(&out)
                .stderr(Stdio::null())
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{mode} run {run} exited with {status}"));
            }
            outputs.push(std::fs::read(out.join("detections.json")).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{mode}: detections.json differs between runs"));
        }
        Detections::read(&dir.path().join(format!("{mode}0")).join("detections.json"))
            .map_err(|e| e.to_string())?;
        checked += 1;
    }
    Ok(format!("{checked} modes byte-identical across two CLI runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("wavelet contract", wavelet_contract),
        ("oracle equivalence", oracle_equivalence),
        ("synthetic symmetry lines", synthetic_lines),
        ("segment endpoints", segment_endpoints),
        ("ellipse mode", ellipse_centers),
        ("metric unit suite", metric_suite),
        ("performance sanity", ellipse_performance),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
