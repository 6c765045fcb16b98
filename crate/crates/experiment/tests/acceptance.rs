//! End-to-end acceptance checks. Prints one `[PASS]`/`[FAIL]` line per criterion
//! and exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quann_core::entropy::von_neumann_entropy;
use quann_core::field::{
    firing_probabilities, heisenberg_evolve, neural_activity_operator, quantum_average,
};
use quann_core::model::{build_qrnn_map, QrnnParams};
use quann_core::rqa::{diagonal_profile, RecurrenceConfig};
use quann_core::spectral::{loglog_slope, Periodogram};
use quann_core::trajectory::{iterate, Trajectory};
use quann_core::{Complex64, DenseOperator, DensityMatrix, StateVector};
use quann_experiment::config::SeriesKind;
use quann_experiment::{preset, run_experiment, RunReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// `(radius, recurrence probability, (strength, P[full | recurrent]))`.
type Table2Row = (f64, f64, Option<(f64, f64)>);

fn run_preset(name: &str) -> Result<(RunReport, Duration), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = preset(name).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = run_experiment(&cfg, dir.path()).map_err(|e| format!("{name}: {e}"))?;
    Ok((report, start.elapsed()))
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn fixed_point() -> Outcome {
    let start = Instant::now();
    let f = build_qrnn_map(QrnnParams::new(0.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut state_dev, mut field_dev) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let v0 = random_state(&mut rng, 4);
        let n0 = firing_probabilities(&v0, 2).unwrap();
        let mut v = v0.clone();
        for _ in 0..1000 {
            v = f.apply(&v).unwrap();
            state_dev = state_dev.max(v.max_abs_diff(&v0).unwrap());
            field_dev = field_dev.max(max_dev(&firing_probabilities(&v, 2).unwrap(), &n0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        state_dev < 1e-10 && field_dev < 1e-10 && secs < 1.0,
        format!("max state deviation {state_dev:e}, mean-field deviation {field_dev:e}, {secs:.3} s"),
    )
}

fn three_cycle() -> Outcome {
    let start = Instant::now();
    let f = build_qrnn_map(QrnnParams::new(1.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut state_dev, mut field_dev) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let mut states = vec![random_state(&mut rng, 4)];
        for t in 0..1003 {
            let next = f.apply(&states[t]).unwrap();
            states.push(next);
        }
        for t in 0..=1000 {
            state_dev = state_dev.max(states[t].distance(&states[t + 3]).unwrap());
            let a = firing_probabilities(&states[t], 2).unwrap();
            let b = firing_probabilities(&states[t + 3], 2).unwrap();
            field_dev = field_dev.max(max_dev(&a, &b));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        state_dev < 1e-9 && field_dev < 1e-10 && secs < 1.0,
        format!("max |psi(t+3) - psi(t)| {state_dev:e}, mean-field {field_dev:e}, {secs:.3} s"),
    )
}

fn correlation_of(name: &str, want: f64, tol: f64) -> Result<(bool, String), String> {
    let (report, elapsed) = run_preset(name)?;
    let got = report
        .correlation(SeriesKind::MeanField, 0, 1)
        .ok_or_else(|| format!("{name}: correlation absent"))?;
    let ok = within(got, want, tol);
    Ok((
        ok,
        format!(
            "{name}: {got:.8} vs {want} (diff {:.2e}, tol {tol:e}, {:.2} s)",
            (got - want).abs(),
            elapsed.as_secs_f64()
        ),
    ))
}

fn figure1() -> Outcome {
    let (report, elapsed) = run_preset("figure1")?;
    let got = report.correlation(SeriesKind::MeanField, 0, 1).ok_or("correlation absent")?;
    let want = 0.99999977;
    verdict(
        within(got, want, 1e-6) && elapsed.as_secs_f64() < 5.0,
        format!(
            "{got:.8} vs {want} (diff {:.2e}, tol 1e-6, {:.2} s)",
            (got - want).abs(),
            elapsed.as_secs_f64()
        ),
    )
}

fn correlations(cases: &[(&str, f64, f64)]) -> Outcome {
    let mut all = true;
    let mut parts = Vec::new();
    for &(name, want, tol) in cases {
        let (ok, detail) = correlation_of(name, want, tol)?;
        all &= ok;
        parts.push(detail);
    }
    verdict(all, parts.join("; "))
}

fn entropy_table(name: &str, want: (f64, f64, f64), tol: (f64, f64, f64)) -> Result<(bool, String), String> {
    let (report, _) = run_preset(name)?;
    let stats = report.entropy_stats.ok_or("no entropy statistics")?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, s) in stats.neurons.iter().enumerate() {
        ok &= within(s.min, want.0, tol.0) && within(s.max, want.1, tol.1) && within(s.mean, want.2, tol.2);
        parts.push(format!("n{k} ({:.4e}, {:.7}, {:.7})", s.min, s.max, s.mean));
    }
    Ok((ok, format!("{name}: {}", parts.join(", "))))
}

fn table1() -> Outcome {
    let (ok, detail) = entropy_table("table1", (8.028e-9, 0.9999998, 0.6347909), (5e-8, 5e-8, 1e-6))?;
    verdict(ok, detail)
}

fn table2() -> Outcome {
    #[rustfmt::skip]
    let rows: [Table2Row; 12] = [
        (0.0, 0.0, None),
        (0.001, 0.006750, Some((0.116914, 0.081481))),
        (0.01, 0.069303, Some((0.126819, 0.086580))),
        (0.02, 0.140057, Some((0.129167, 0.085684))),
        (0.03, 0.211161, Some((0.132081, 0.085721))),
        (0.04, 0.284464, Some((0.134353, 0.084725))),
        (0.05, 0.360418, Some((0.136247, 0.083657))),
        (0.06, 0.439772, Some((0.137854, 0.082661))),
        (0.07, 0.525426, Some((0.138656, 0.080415))),
        (0.08, 0.621031, Some((0.138282, 0.077939))),
        (0.09, 0.737737, Some((0.135577, 0.073946))),
        (0.1, 0.941097, Some((0.123607, 0.064502))),
    ];
    let (report, elapsed) = run_preset("table2")?;
    if report.rqa.len() != rows.len() {
        return Err(format!("{} rows computed", report.rqa.len()));
    }
    let mut worst = 0.0f64;
    let mut ok = true;
    for ((radius, stats), (want_r, want_p, want_rest)) in report.rqa.iter().zip(rows) {
        ok &= *radius == want_r;
        worst = worst.max((stats.recurrence_probability - want_p).abs());
        match (want_rest, stats.mean_recurrence_strength, stats.conditional_full_recurrence_probability) {
            (None, None, None) => {}
            (Some((s, c)), Some(gs), Some(gc)) => worst = worst.max((gs - s).abs()).max((gc - c).abs()),
            _ => ok = false,
        }
    }
    let zero_row = report.rqa[0].1.recurrence_probability == 0.0;
    let secs = elapsed.as_secs_f64();
    verdict(
        ok && zero_row && worst <= 1e-3 && secs < 120.0,
        format!("worst deviation {worst:.2e} (tol 1e-3), radius-0 probability exact zero: {zero_row}, {secs:.2} s"),
    )
}

fn line_gaps(name: &str, want: &[(usize, usize)]) -> Outcome {
    let (report, _) = run_preset(name)?;
    let hist = report.line_gaps.ok_or("no histogram")?;
    let got: BTreeMap<usize, usize> = hist.bins.iter().map(|b| (b.gap, b.frequency)).collect();
    let want: BTreeMap<usize, usize> = want.iter().copied().collect();
    verdict(got == want, format!("got {got:?}, want {want:?}"))
}

fn tables5_6() -> Outcome {
    let (ok5, d5) = entropy_table("table5", (2.30e-8, 0.8191482, 0.4976293), (5e-8, 1e-6, 1e-6))?;
    let (ok6, d6) = entropy_table("table6", (9.52e-9, 0.8427277, 0.2608883), (5e-8, 1e-6, 1e-6))?;
    verdict(ok5 && ok6, format!("{d5}; {d6}"))
}

fn picture_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r = rng.gen_range(0.0..=1.0);
        let f = build_qrnn_map(QrnnParams::new(r).unwrap()).unwrap();
        let v0 = random_state(&mut rng, 4);
        let k = rng.gen_range(0..2);
        let t = rng.gen_range(0..=50);
        let n = neural_activity_operator(k, 2).unwrap();
        let heis = quantum_average(&heisenberg_evolve(&n, &f, t).unwrap(), &v0).unwrap();
        let schr = quantum_average(&n, &iterate(&f, &v0, t).unwrap()).unwrap();
        worst = worst.max((heis - schr).abs());
    }
    verdict(worst < 1e-9, format!("100 cases, worst difference {worst:e}"))
}

fn rqa_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut mismatches = 0;
    let mut pairs = 0usize;
    for _ in 0..50 {
        let len = rng.gen_range(2..=200);
        // coarse grid so that distances land exactly on the radius now and then
        let pts: Vec<[f64; 2]> = (0..len)
            .map(|_| [rng.gen_range(0..10) as f64 * 0.05, rng.gen_range(0..10) as f64 * 0.05])
            .collect();
        let traj = Trajectory::from_points(2, &pts).unwrap();
        let radius = rng.gen_range(0.0..0.3);
        let profile = diagonal_profile(&traj, &RecurrenceConfig::new(radius).unwrap()).unwrap();
        for d in 1..len {
            let brute = (0..len - d)
                .filter(|&i| {
                    let (a, b) = (pts[i], pts[i + d]);
                    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() <= radius
                })
                .count();
            pairs += len - d;
            if brute != profile.count(d) {
                mismatches += 1;
            }
        }
    }
    verdict(mismatches == 0, format!("50 trajectories, {pairs} pairs, {mismatches} mismatched diagonals"))
}

fn entropy_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = |p: f64| -> f64 {
        [p, 1.0 - p].iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
    };
    let mut worst = 0.0f64;
    let mut worst_pure = 0.0f64;
    for _ in 0..1000 {
        // uniform point in the Bloch ball
        let b = loop {
            let b: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            if b.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                break b;
            }
        };
        let rho = DenseOperator::from_rows(&[
            vec![Complex64::new(0.5 * (1.0 + b[2]), 0.0), Complex64::new(0.5 * b[0], -0.5 * b[1])],
            vec![Complex64::new(0.5 * b[0], 0.5 * b[1]), Complex64::new(0.5 * (1.0 - b[2]), 0.0)],
        ])
        .unwrap();
        let d = rho[(0, 0)].re - rho[(1, 1)].re;
        let lambda = 0.5 * (1.0 + (d * d + 4.0 * rho[(0, 1)].norm_sqr()).sqrt());
        let s = von_neumann_entropy(&DensityMatrix::new(rho).unwrap()).unwrap();
        worst = worst.max((s - h(lambda.min(1.0))).abs());

        let pure = DensityMatrix::from_pure(&random_state(&mut rng, 2)).unwrap();
        worst_pure = worst_pure.max(von_neumann_entropy(&pure).unwrap());
    }
    verdict(
        worst < 1e-10 && worst_pure < 1e-12,
        format!("worst closed-form difference {worst:e}, worst pure entropy {worst_pure:e}"),
    )
}

fn spectral() -> Outcome {
    let freqs: Vec<f64> = (1..=5000).map(|j| j as f64 / 10_000.0).collect();
    let power = freqs.iter().map(|f| f.powi(-2)).collect();
    let synthetic = loglog_slope(&Periodogram::new(freqs, power).unwrap(), 0.001, 0.05).unwrap();

    let (report, _) = run_preset("figure7")?;
    let mut ok = within(synthetic, -2.0, 0.05);
    let mut parts = vec![format!("synthetic slope {synthetic:.4}")];
    for s in &report.spectra {
        let top = s.high_frequency_peaks.iter().map(|p| p.1).fold(0.0, f64::max);
        ok &= s.slope < -0.5 && top > 10.0;
        parts.push(format!(
            "S{} slope {:.3}, {} high-frequency peaks, strongest {:.3e}x median",
            s.neuron,
            s.slope,
            s.high_frequency_peaks.len(),
            top
        ));
    }
    ok &= report.spectra.len() == 2;
    verdict(ok, parts.join("; "))
}

fn read_outputs(dir: &Path, report: &RunReport) -> BTreeMap<String, Vec<u8>> {
    report
        .manifest
        .files
        .iter()
        .map(|f| (f.name.clone(), fs::read(dir.join(&f.name)).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let cfg = preset("figure1").map_err(|e| e.to_string())?;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_experiment(&cfg, a.path()).map_err(|e| e.to_string())?;
    let rb = run_experiment(&cfg, b.path()).map_err(|e| e.to_string())?;
    let same_bytes = read_outputs(a.path(), &ra) == read_outputs(b.path(), &rb);
    let same_sums = ra.manifest.files == rb.manifest.files && ra.manifest.config == rb.manifest.config;
    let complete = ra.manifest.verify(a.path()).is_empty() && rb.manifest.verify(b.path()).is_empty();
    verdict(
        same_bytes && same_sums && complete,
        format!(
            "{} files, identical bytes: {same_bytes}, identical checksums: {same_sums}, manifest verified: {complete}",
            ra.manifest.files.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("fixed point at r = 0", fixed_point),
        ("three-cycle at r = 1", three_cycle),
        ("figure 1 correlation", figure1),
        ("figure 2 correlations", || {
            correlations(&[
                ("figure2a", -0.87907088, 1e-5),
                ("figure2b", -0.87906459, 1e-5),
                ("figure2c", 0.99999955, 1e-5),
            ])
        }),
        ("table 1 entropy statistics", table1),
        ("table 2 recurrence sweep", table2),
        ("table 3 mean-field line gaps", || line_gaps("table3", &[(5, 352), (21, 836), (26, 25)])),
        ("table 4 entropy line gaps", || line_gaps("table4", &[(47, 248), (68, 88), (115, 20)])),
        ("tables 5 and 6 entropy statistics", tables5_6),
        ("figure 4 correlations", || {
            correlations(&[("figure4a", 1.85638176e-5, 1e-5), ("figure4b", -0.49961075, 1e-4)])
        }),
        ("picture equivalence", picture_equivalence),
        ("recurrence oracle", rqa_oracle),
        ("entropy oracle", entropy_oracle),
        ("spectral shape", spectral),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] criterion {:>2} {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
