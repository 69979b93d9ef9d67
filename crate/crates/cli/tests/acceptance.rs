//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any of them fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use pxfes::image::save_image;
use pxfes::kernel::{pixel_kr_objective, train_pixel_kr, train_pixel_kr_raw};
use pxfes::linear::{pixel_rr_objective, train_full_rr, train_pixel_rr};
use pxfes::synth::{AffineSynth, SynthData};
use pxfes::{mse, Image, Model, PairedDataset, PixelKrModel, PixelRrModel, PixelSeries, Regressor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn single_pixel_ds(x: &[f64], t: &[f64]) -> PairedDataset {
    let pairs = x
        .iter()
        .zip(t)
        .map(|(&x, &t)| (Image::filled(1, 1, 1, x).unwrap(), Image::filled(1, 1, 1, t).unwrap()))
        .collect();
    PairedDataset::from_pairs(pairs).unwrap()
}

fn gaussian(a: f64, b: f64, sigma: f64) -> f64 {
    (-(a - b).powi(2) / (2.0 * sigma * sigma)).exp()
}

/// Distinct, well-separated values in `[0, 1]`, shuffled.
fn spread_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| (i as f64 + 0.25 + 0.5 * rng.random::<f64>()) / n as f64).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
    v
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

fn single_thread<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn pxfes_bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pxfes"));
    cmd.env_remove("PXFES_THREADS");
    cmd
}

fn inspect_field(path: &Path, key: &str) -> Option<String> {
    let out = pxfes_bin().arg("inspect").arg(path).output().ok()?;
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    text.split_whitespace().find_map(|kv| Some(kv.strip_prefix(key)?.strip_prefix('=')?.to_string()))
}

fn parameter_counts() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (rr_path, kr_path) = (dir.path().join("rr.pxf"), dir.path().join("kr.pxf"));
    let dims = (128, 128, 1);
    let rr: Model = PixelRrModel::identity(dims).into();
    pxfes::save_model(&rr, &rr_path).unwrap();
    let len = 128 * 128 * 400;
    let kr: Model = PixelKrModel::new(dims, 400, 3.0, 0.4, vec![0.0; len], vec![0.0; len]).unwrap().into();
    pxfes::save_model(&kr, &kr_path).unwrap();

    let ((rr_params, kr_params, kr_stored), elapsed) = timed(|| {
        (
            inspect_field(&rr_path, "params"),
            inspect_field(&kr_path, "params"),
            inspect_field(&kr_path, "stored_values"),
        )
    });
    let detail = format!(
        "pixel-rr params={rr_params:?}, pixel-kr params={kr_params:?} stored_values={kr_stored:?}, inspect {elapsed:.2?}"
    );
    check(
        rr_params.as_deref() == Some("32768")
            && kr_params.as_deref() == Some("6553600")
            && kr_stored.as_deref() == Some("13107200")
            && elapsed < Duration::from_secs(1),
        detail,
    )
}

/// Fixed-step gradient descent on `½‖wx + b − t‖² + (λ/2)(w² + b²)`.
fn rr_gradient_descent(x: &[f64], t: &[f64], lambda: f64) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let step = 1.0 / ((sxx + lambda).max(n + lambda) + sx.abs());
    let (mut w, mut b) = (0.0, 0.0);
    for _ in 0..2_000_000 {
        let (mut gw, mut gb) = (lambda * w, lambda * b);
        for (&xi, &ti) in x.iter().zip(t) {
            let r = w * xi + b - ti;
            gw += r * xi;
            gb += r;
        }
        if gw.hypot(gb) < 1e-14 {
            break;
        }
        w -= step * gw;
        b -= step * gb;
    }
    (w, b)
}

fn pixel_rr_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut objective_ok = true;
    for _ in 0..50 {
        let n = rng.random_range(1..=10);
        let x: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let t: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let lambda = rng.random_range(0.01..2.0);
        let m = train_pixel_rr(&single_pixel_ds(&x, &t), lambda).unwrap();
        let (w, b) = rr_gradient_descent(&x, &t, lambda);
        worst = worst.max((m.weights()[0] - w).abs() + (m.biases()[0] - b).abs());
        let series = PixelSeries::new(0, x, t);
        let closed = pixel_rr_objective(m.weights()[0], m.biases()[0], &series, lambda);
        objective_ok &= closed <= pixel_rr_objective(w, b, &series, lambda) + 1e-12;
    }
    check(worst <= 1e-6 && objective_ok, format!("max |Δw|+|Δb| = {worst:.2e} over 50 datasets"))
}

/// Conjugate gradient on `E(c) = ½‖cK − t‖² + (λ/2) c K cᵀ`, i.e. on the
/// quadratic with Hessian `K² + λK` and linear term `tK`.
fn kr_conjugate_gradient(x: &[f64], t: &[f64], lambda: f64, sigma: f64) -> Vec<f64> {
    let n = x.len();
    let k: Vec<Vec<f64>> = x.iter().map(|&a| x.iter().map(|&b| gaussian(a, b, sigma)).collect()).collect();
    let h: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|m| k[i][m] * k[m][j]).sum::<f64>() + lambda * k[i][j]).collect())
        .collect();
    let rhs: Vec<f64> = (0..n).map(|j| (0..n).map(|i| t[i] * k[i][j]).sum()).collect();
    let matvec = |v: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| h[i][j] * v[j]).sum()).collect() };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut c = vec![0.0; n];
    for _restart in 0..50 {
        let hc = matvec(&c);
        let mut r: Vec<f64> = rhs.iter().zip(&hc).map(|(b, a)| b - a).collect();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        for _ in 0..n {
            if rr.sqrt() < 1e-16 {
                return c;
            }
            let hp = matvec(&p);
            let alpha = rr / dot(&p, &hp);
            c.iter_mut().zip(&p).for_each(|(ci, pi)| *ci += alpha * pi);
            r.iter_mut().zip(&hp).for_each(|(ri, hpi)| *ri -= alpha * hpi);
            let rr_next = dot(&r, &r);
            p = r.iter().zip(&p).map(|(ri, pi)| ri + (rr_next / rr) * pi).collect();
            rr = rr_next;
        }
    }
    c
}

fn pixel_kr_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let (mut worst_dc, mut worst_grad) = (0.0f64, 0.0f64);
    let mut objective_ok = true;
    for _ in 0..20 {
        let n = rng.random_range(1..=8);
        let x = spread_values(&mut rng, n);
        let t: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let lambda = rng.random_range(0.1..1.0);
        let sigma = rng.random_range(0.1..0.3);
        let m = train_pixel_kr(&single_pixel_ds(&x, &t), lambda, sigma).unwrap();
        let c = m.coeffs(0);
        let oracle = kr_conjugate_gradient(&x, &t, lambda, sigma);
        worst_dc = worst_dc.max(norm(c.iter().zip(&oracle).map(|(a, b)| a - b)));

        let k = |i: usize, j: usize| gaussian(x[i], x[j], sigma);
        let ck: Vec<f64> = (0..n).map(|j| (0..n).map(|i| c[i] * k(i, j)).sum()).collect();
        let grad = (0..n).map(|j| (0..n).map(|i| (ck[i] - t[i]) * k(i, j)).sum::<f64>() + lambda * ck[j]);
        worst_grad = worst_grad.max(norm(grad));

        let series = PixelSeries::new(0, x, t);
        let closed = pixel_kr_objective(c, &series, lambda, sigma).unwrap();
        objective_ok &= closed <= pixel_kr_objective(&oracle, &series, lambda, sigma).unwrap() + 1e-12;
    }
    check(
        worst_dc <= 1e-5 && worst_grad <= 1e-6 && objective_ok,
        format!("max ‖Δc‖ = {worst_dc:.2e}, max stationarity residual = {worst_grad:.2e} over 20 instances"),
    )
}

fn full_rr_oracle() -> Outcome {
    let x_rows = [[0.9, 0.1, 0.2, 0.0], [0.1, 0.8, 0.0, 0.3], [0.2, 0.0, 0.7, 0.1], [0.0, 0.3, 0.1, 0.95]];
    let pairs: Vec<_> = x_rows
        .iter()
        .map(|r| {
            let img = Image::new(2, 2, 1, r.to_vec()).unwrap();
            (img.clone(), img)
        })
        .collect();
    let ident = train_full_rr(&PairedDataset::from_pairs(pairs).unwrap(), 0.0).unwrap();
    let ident_err = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| (ident.weight(i, j) - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let pairs: Vec<_> = (0..6)
        .map(|_| {
            let a = Image::new(2, 2, 1, (0..4).map(|_| rng.random()).collect()).unwrap();
            let b = Image::new(2, 2, 1, (0..4).map(|_| rng.random()).collect()).unwrap();
            (a, b)
        })
        .collect();
    let ds = PairedDataset::from_pairs(pairs).unwrap();
    let lambda = 0.4;
    let m = train_full_rr(&ds, lambda).unwrap();

    // Gradient descent on ½‖W Xᵀ − Tᵀ‖²_F + (λ/2)‖W‖²_F.
    let xs: Vec<&[f64]> = ds.inputs().map(|i| i.data()).collect();
    let ts: Vec<&[f64]> = ds.targets().map(|i| i.data()).collect();
    let trace: f64 = xs.iter().flat_map(|x| x.iter()).map(|v| v * v).sum();
    let step = 1.0 / (trace + lambda);
    let mut w = [[0.0f64; 4]; 4];
    for _ in 0..500_000 {
        let mut grad = [[0.0f64; 4]; 4];
        for (x, t) in xs.iter().zip(&ts) {
            for k in 0..4 {
                let r: f64 = (0..4).map(|d| w[k][d] * x[d]).sum::<f64>() - t[k];
                for d in 0..4 {
                    grad[k][d] += r * x[d];
                }
            }
        }
        let mut change = 0.0f64;
        for k in 0..4 {
            for d in 0..4 {
                let g = grad[k][d] + lambda * w[k][d];
                w[k][d] -= step * g;
                change = change.max(g.abs());
            }
        }
        if change < 1e-14 {
            break;
        }
    }
    let dw = norm((0..4).flat_map(|k| (0..4).map(move |d| (k, d))).map(|(k, d)| m.weight(k, d) - w[k][d]));
    check(
        dw <= 1e-6 && ident_err <= 1e-8,
        format!("‖ΔW‖_F = {dw:.2e} vs gradient descent, max |W − I| = {ident_err:.2e}"),
    )
}

fn random_image(rng: &mut ChaCha8Rng, h: usize, w: usize, c: usize) -> Image {
    Image::new(h, w, c, (0..h * w * c).map(|_| rng.random()).collect()).unwrap()
}

fn unperturbed_identical(a: &Image, b: &Image, skip: usize) -> bool {
    a.data().iter().zip(b.data()).enumerate().all(|(i, (x, y))| i == skip || x.to_bits() == y.to_bits())
}

fn locality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut failures = 0;
    for _ in 0..1000 {
        let (h, w) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let c = if rng.random_bool(0.3) { 3 } else { 1 };
        let n = rng.random_range(2..=6);
        let pairs = (0..n).map(|_| (random_image(&mut rng, h, w, c), random_image(&mut rng, h, w, c))).collect();
        let ds = PairedDataset::from_pairs(pairs).unwrap();
        let rr = train_pixel_rr(&ds, rng.random_range(0.01..1.0)).unwrap();
        let kr = train_pixel_kr(&ds, rng.random_range(0.01..1.0), rng.random_range(0.1..5.0)).unwrap();

        let img = random_image(&mut rng, h, w, c);
        let p = rng.random_range(0..h * w * c);
        let moved = img.with_value(p, rng.random()).unwrap();
        if !unperturbed_identical(&rr.apply(&img).unwrap(), &rr.apply(&moved).unwrap(), p) {
            failures += 1;
        }
        if !unperturbed_identical(&kr.apply(&img).unwrap(), &kr.apply(&moved).unwrap(), p) {
            failures += 1;
        }
    }
    check(failures == 0, format!("{failures} non-local outputs over 1000 triples (pixel-rr and pixel-kr)"))
}

fn interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(2..=10);
        let x = spread_values(&mut rng, n);
        let t: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let m = train_pixel_kr_raw(&single_pixel_ds(&x, &t), 0.0, 0.05).unwrap();
        for (&xi, &ti) in x.iter().zip(&t) {
            worst = worst.max((m.predict(0, xi).unwrap() - ti).abs());
        }
    }
    check(worst <= 1e-8, format!("max |y − t| at training points = {worst:.2e}"))
}

fn mean_test_mse(model: &impl Regressor<f64>, test: &PairedDataset) -> f64 {
    test.pairs().iter().map(|(x, t)| mse(&model.apply(x).unwrap(), t).unwrap()).sum::<f64>() / test.len() as f64
}

const NOISE: f64 = 0.01;

fn synthetic_learning(data: &SynthData<f64>) -> Outcome {
    let (model, elapsed) = timed(|| train_pixel_rr(&data.train, 0.01).unwrap());
    let learned = mean_test_mse(&model, &data.test);
    let identity = mean_test_mse(&PixelRrModel::identity(data.test.dims()), &data.test);
    check(
        learned <= 2.0 * NOISE * NOISE && learned * 5.0 <= identity && elapsed < Duration::from_secs(30),
        format!(
            "held-out mse {learned:.3e} (bound {:.1e}), identity baseline {identity:.3e} ({:.1}x), training {elapsed:.2?}",
            2.0 * NOISE * NOISE,
            identity / learned
        ),
    )
}

fn sigma_sensitivity(data: &SynthData<f64>) -> Outcome {
    let lambda = 0.4;
    let sweep = [0.1, 0.5, 1.0, 3.0, 5.0];
    let scores: Vec<f64> = sweep
        .iter()
        .map(|&sigma| mean_test_mse(&train_pixel_kr(&data.train, lambda, sigma).unwrap(), &data.test))
        .collect();
    let (best, min) = scores.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let strict = scores.iter().enumerate().all(|(i, &s)| i == best || s > min);
    let listing: Vec<String> = sweep.iter().zip(&scores).map(|(s, m)| format!("σ={s}:{m:.3e}")).collect();
    check(
        strict && max - min > 10.0 * min,
        format!(
            "λ={lambda}, {}; minimizer σ={}, range/min = {:.1}",
            listing.join(" "),
            sweep[best],
            (max - min) / min
        ),
    )
}

fn determinism(data: &SynthData<f64>) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("train");
    fs::create_dir_all(root.join("input")).unwrap();
    fs::create_dir_all(root.join("target")).unwrap();
    for (i, (x, t)) in data.train.pairs().iter().enumerate() {
        save_image(x, root.join("input").join(format!("{i:04}.pgm"))).unwrap();
        save_image(t, root.join("target").join(format!("{i:04}.pgm"))).unwrap();
    }
    let mut files = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.path().join(format!("model-{threads}.pxf"));
        let status = pxfes_bin()
            .args(["train", "--method", "pixel-rr", "--lambda", "0.01", "--geometry", "64x64", "--data"])
            .arg(&root)
            .arg("--out")
            .arg(&out)
            .env("PXFES_THREADS", threads)
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return Err(format!("train with PXFES_THREADS={threads} exited with {status}"));
        }
        files.push(fs::read(&out).unwrap());
    }
    check(files[0] == files[1], format!("model files of {} bytes, identical = {}", files[0].len(), files[0] == files[1]))
}

fn performance() -> Outcome {
    let big: SynthData<f64> = AffineSynth::new(128, 128, NOISE, 606).generate(400, 1).unwrap();
    let (_, rr_time) = single_thread(|| timed(|| train_pixel_rr(&big.train, 0.4).unwrap()));
    drop(big);
    let small: SynthData<f64> = AffineSynth::new(64, 64, NOISE, 607).generate(100, 1).unwrap();
    let (_, kr_time) = timed(|| train_pixel_kr(&small.train, 0.4, 3.0).unwrap());
    check(
        rr_time < Duration::from_secs(10) && kr_time < Duration::from_secs(120),
        format!("pixel-rr 400×128×128 single-threaded {rr_time:.2?} (< 10 s), pixel-kr 64×64 N=100 {kr_time:.2?} (< 120 s)"),
    )
}

fn main() {
    let data: SynthData<f64> = AffineSynth::new(64, 64, NOISE, 7).generate(400, 40).unwrap();
    let criteria: Vec<Criterion> = vec![
        ("parameter counts", Box::new(parameter_counts)),
        ("pixel-rr closed form vs gradient descent", Box::new(pixel_rr_oracle)),
        ("pixel-kr solve vs conjugate gradient", Box::new(pixel_kr_oracle)),
        ("full-rr vs gradient descent", Box::new(full_rr_oracle)),
        ("locality", Box::new(locality)),
        ("pixel-kr interpolation", Box::new(interpolation)),
        ("synthetic affine learning", Box::new(|| synthetic_learning(&data))),
        ("bandwidth sensitivity", Box::new(|| sigma_sensitivity(&data))),
        ("thread-count determinism", Box::new(|| determinism(&data))),
        ("performance envelope", Box::new(performance)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (outcome, elapsed) = timed(|| {
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
                .unwrap_or_else(|_| Err("panicked".to_string()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{detail}] ({elapsed:.1?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} [{detail}] ({elapsed:.1?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
