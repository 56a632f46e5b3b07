//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::cell::Cell;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;

use posmap_core::linalg::{self, c, re, ComplexMatrix, ComplexVector};
use posmap_core::poscert::{block_positivity_traced, product_value};
use posmap_core::purify::projector;
use posmap_core::statezoo::{self, StateFamilyKind, StateFamilySpec};
use posmap_core::{
    classify_channel, detect, lemma21_build, map_positivity, thm31_build, thm41_build, BlockMatrix,
    CertifierConfig, ChannelClass, Error, LinearMapRep, MapFamily, PptTag,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const RECONSTRUCTION_TOL: f64 = 1e-8;
const CHANNEL_TOL: f64 = 1e-9;
const CLOSED_FORM_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;
const EIG_TOL: f64 = 1e-10;
const GUARD_BAND: f64 = 1e-3;
const CALIBRATION_TOL: f64 = 1e-7;

type Outcome = Result<String, String>;

/// Collects named sub-checks; the criterion passes when all of them do.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    total: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failed.push(what());
        }
    }

    fn finish(self) -> Outcome {
        if self.failed.is_empty() {
            Ok(format!("{} checks", self.total))
        } else {
            Err(format!(
                "{}/{} checks failed: {}",
                self.failed.len(),
                self.total,
                self.failed.join("; ")
            ))
        }
    }
}

fn cfg() -> CertifierConfig {
    CertifierConfig::default()
}

fn build(f: MapFamily) -> LinearMapRep {
    f.build().expect("family builds")
}

/// A PSD block matrix `G G^dag` whose rows outside the first `support` input
/// indices vanish, so the reduced matrix can be rank deficient.
fn psd_from_entries(m: usize, n: usize, support: usize, cols: usize, entries: &[f64]) -> BlockMatrix {
    let d = m * n;
    let g = ComplexMatrix::from_fn(d, cols, |r, s| {
        if r / n >= support {
            return re(0.0);
        }
        let k = 2 * (r * cols + s);
        c(entries[k], entries[k + 1])
    });
    BlockMatrix::new(m, n, &g * g.adjoint()).expect("square")
}

fn criterion_1() -> Outcome {
    let strategy = (2usize..=4, 2usize..=4, 1usize..=4, 1usize..=16).prop_flat_map(|(m, n, s, cols)| {
        let support = s.min(m);
        let cols = cols.min(m * n);
        let len = 2 * m * n * cols;
        (
            Just((m, n, support, cols)),
            proptest::collection::vec(-1.0f64..1.0, len),
        )
    });
    let config = Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let deficient = Cell::new(0usize);
    let cases = Cell::new(0usize);
    let result = runner.run(&strategy, |((m, n, support, cols), entries)| {
        let a = psd_from_entries(m, n, support, cols, &entries);
        let r = lemma21_build(&a, None, PSD_TOL).map_err(|e| TestCaseError::fail(format!("{e}")))?;
        prop_assert!(r.map.is_completely_positive(CHANNEL_TOL), "not CP");
        prop_assert!(r.map.is_trace_preserving(CHANNEL_TOL), "not TP");
        prop_assert!(
            r.reconstruction_error <= RECONSTRUCTION_TOL * a.tol_scale(),
            "reconstruction error {}",
            r.reconstruction_error
        );
        cases.set(cases.get() + 1);
        if !r.completion_indices.is_empty() {
            deficient.set(deficient.get() + 1);
        }
        Ok(())
    });
    let (cases, deficient) = (cases.get(), deficient.get());
    match result {
        Ok(()) if deficient > 0 => Ok(format!("{cases} random matrices, {deficient} with rank-deficient reduced matrix")),
        Ok(()) => Err("no rank-deficient reduced matrix was exercised".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_2() -> Outcome {
    let mut checks = Checks::default();
    let mut worst: f64 = 0.0;
    let mut compare = |label: String, state: BlockMatrix, expected: LinearMapRep, checks: &mut Checks| {
        match thm31_build(&state, PSD_TOL) {
            Ok(r) => {
                let d = r.map.distance(&expected).unwrap_or(f64::INFINITY);
                worst = worst.max(d);
                checks.check(d <= CLOSED_FORM_TOL, || format!("{label}: distance {d:e}"));
            }
            Err(e) => checks.check(false, || format!("{label}: {e}")),
        }
    };
    for x in [-1.0, -0.5] {
        compare(format!("werner x={x}"), statezoo::werner(3, x), build(MapFamily::Phi3 { m: 3, x }).scale(1.0 / 8.0), &mut checks);
    }
    for y in [0.3, 1.0] {
        compare(format!("isotropic y={y}"), statezoo::isotropic(3, y), build(MapFamily::Phi4 { m: 3, y }).scale(1.0 / 3.0), &mut checks);
    }
    for a in [0.5, 4.5] {
        compare(format!("horodecki a={a}"), statezoo::horodecki(a), build(MapFamily::Phi1 { a }).scale(1.0 / 7.0), &mut checks);
    }
    checks.finish().map(|s| format!("{s}, worst distance {worst:.1e}"))
}

fn threshold_suite(checks: &mut Checks, label: &str, family: impl Fn(f64) -> MapFamily, cp: (&[f64], &[f64]), pos: (&[f64], &[f64])) {
    for &p in cp.0 {
        let phi = build(family(p));
        checks.check(phi.is_completely_positive(PSD_TOL), || {
            format!("{label}({p}) expected CP, λ_min(choi) = {:.4}", phi.choi_min_eig().unwrap())
        });
    }
    for &p in cp.1 {
        let phi = build(family(p));
        checks.check(!phi.is_completely_positive(PSD_TOL), || {
            format!("{label}({p}) expected not CP, λ_min(choi) = {:.4}", phi.choi_min_eig().unwrap())
        });
    }
    for &p in pos.0 {
        let report = map_positivity(&build(family(p)), &cfg()).expect("Hermiticity preserving");
        checks.check(report.verdict.is_violation(), || {
            format!("{label}({p}) expected violation, min {:.3e}", report.verdict.min_value)
        });
    }
    for &p in pos.1 {
        let report = map_positivity(&build(family(p)), &cfg()).expect("Hermiticity preserving");
        checks.check(!report.verdict.is_violation(), || {
            format!("{label}({p}) expected no violation, min {:.3e}", report.verdict.min_value)
        });
    }
}

fn criterion_3() -> Outcome {
    let mut checks = Checks::default();
    let cp = (&[2.1, 3.9][..], &[1.9, 4.1][..]);
    let pos = (&[-0.2, 5.2][..], &[0.5, 4.5][..]);
    threshold_suite(&mut checks, "phi1", |a| MapFamily::Phi1 { a }, cp, pos);
    threshold_suite(&mut checks, "phi2", |a| MapFamily::Phi2 { a }, cp, pos);
    checks.finish()
}

fn criterion_4() -> Outcome {
    let mut checks = Checks::default();
    threshold_suite(
        &mut checks,
        "phi3",
        |x| MapFamily::Phi3 { m: 3, x },
        (&[0.1, 2.9], &[-0.1, 3.1]),
        (&[-1.2, 3.2], &[-0.9, 2.9]),
    );
    checks.finish()
}

fn criterion_5() -> Outcome {
    let mut checks = Checks::default();
    for m in [2usize, 3] {
        let mf = m as f64;
        let upper = 1.0 / (mf + 1.0);
        let lower = -1.0 / (mf - 1.0);
        threshold_suite(
            &mut checks,
            &format!("phi4[m={m}]"),
            |y| MapFamily::Phi4 { m, y },
            (&[upper - 0.05, lower + 0.05], &[upper + 0.05, lower - 0.05]),
            (&[1.1], &[0.9]),
        );
        for y in [-0.6, -0.2, 0.1, 0.5, 0.9, 1.1] {
            let eig = build(MapFamily::Phi4 { m, y }).choi().eig().unwrap();
            let sym = 1.0 + (mf - 1.0) * y;
            let anti = 1.0 - (mf + 1.0) * y;
            let mut expected: Vec<f64> = std::iter::repeat_n(sym, m * (m + 1) / 2)
                .chain(std::iter::repeat_n(anti, m * (m - 1) / 2))
                .collect();
            expected.sort_by(|a, b| b.total_cmp(a));
            let err = eig
                .eigenvalues
                .iter()
                .zip(&expected)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            checks.check(err <= EIG_TOL, || format!("phi4[m={m}]({y}) spectrum error {err:e}"));
        }
    }
    checks.finish()
}

fn criterion_6() -> Outcome {
    let mut checks = Checks::default();
    let nppt = |rho: &BlockMatrix| rho.ppt_classify(PSD_TOL).unwrap().tag == PptTag::PositiveNppt;
    let near = |p: f64, edges: &[f64]| edges.iter().any(|e| (p - e).abs() < GUARD_BAND);
    let mut points = 0;
    for k in 0..=20 {
        let a = 0.25 * k as f64;
        if near(a, &[1.0, 4.0]) {
            continue;
        }
        points += 1;
        let expected = a < 1.0 || a > 4.0;
        let got = nppt(&statezoo::horodecki(a));
        checks.check(got == expected, || format!("horodecki({a}) NPPT = {got}"));
    }
    for m in [2usize, 3] {
        for k in 0..=40 {
            let x = -1.0 + 2.0 * k as f64 / 40.0;
            if near(x, &[0.0]) {
                continue;
            }
            points += 1;
            let got = nppt(&statezoo::werner(m, x));
            checks.check(got == (x < 0.0), || format!("werner({m}, {x}) NPPT = {got}"));
        }
        let mf = m as f64;
        let lower = -1.0 / (mf * mf - 1.0);
        let edge = 1.0 / (mf + 1.0);
        for k in 0..=40 {
            let y = lower + (1.0 - lower) * k as f64 / 40.0;
            if near(y, &[edge]) {
                continue;
            }
            points += 1;
            let got = nppt(&statezoo::isotropic(m, y));
            checks.check(got == (y > edge), || format!("isotropic({m}, {y}) NPPT = {got}"));
        }
    }
    checks.finish().map(|s| format!("{s} over {points} grid points"))
}

fn criterion_7() -> Outcome {
    let mut checks = Checks::default();
    let transpose = build(MapFamily::Transpose { m: 3 });
    let at = |y| detect(&transpose, &statezoo::isotropic(3, y), PSD_TOL).unwrap();
    let r = at(0.3);
    checks.check(r.detected, || format!("transpose misses isotropic(3,0.3), λ_min {:.3e}", r.min_eig));
    let r = at(0.2);
    checks.check(!r.detected, || format!("transpose flags isotropic(3,0.2), λ_min {:.3e}", r.min_eig));
    match thm31_build(&statezoo::werner(3, -1.0), PSD_TOL) {
        Ok(built) => {
            let r = detect(&built.map, &statezoo::werner(3, -0.5), PSD_TOL).unwrap();
            checks.check(r.detected, || {
                format!("thm31 map from werner(3,-1) misses werner(3,-0.5), λ_min {:.4}", r.min_eig)
            });
        }
        Err(e) => checks.check(false, || format!("thm31 on werner(3,-1): {e}")),
    }
    checks.finish()
}

fn criterion_8() -> Outcome {
    let mut checks = Checks::default();
    let flip = statezoo::flip(3);
    match thm41_build(&flip, &cfg()) {
        Ok(r) => {
            let d = r.map.distance(&build(MapFamily::Transpose { m: 3 })).unwrap();
            checks.check(d == 0.0, || format!("flip: distance to transpose {d:e}"));
            checks.check(!r.condition_report.is_violation(), || "flip: condition violated".into());
        }
        Err(e) => checks.check(false, || format!("flip: {e}")),
    }
    let mut full = linalg::identity(4);
    full[(1, 1)] = re(-1.0);
    let bad = BlockMatrix::new(2, 2, full).unwrap();
    let got = thm41_build(&bad, &cfg());
    checks.check(matches!(got, Err(Error::DiagBlockNotPsd { .. })), || format!("bad diagonal block: {got:?}"));
    let phi3 = build(MapFamily::Phi3 { m: 3, x: -0.5 });
    match thm41_build(phi3.choi(), &cfg()) {
        Ok(r) => {
            let d = r.map.distance(&phi3).unwrap();
            checks.check(d == 0.0, || format!("phi3: distance {d:e}"));
        }
        Err(e) => checks.check(false, || format!("phi3(-0.5): {e}")),
    }
    checks.finish()
}

fn criterion_9() -> Outcome {
    let mut checks = Checks::default();
    let classify = |label: &str, a: BlockMatrix, expected: ChannelClass, checks: &mut Checks| {
        match lemma21_build(&a, None, PSD_TOL).and_then(|r| classify_channel(&r.map, CHANNEL_TOL).map(|c| (r, c))) {
            Ok((r, class)) => {
                checks.check(class == expected, || format!("{label}: {}", class.as_str()));
                if expected == ChannelClass::Unitary {
                    let eig = r.map.choi().eig().unwrap();
                    let rank = eig.eigenvalues.iter().filter(|&&l| l > CHANNEL_TOL).count();
                    checks.check(rank == 1, || format!("{label}: Choi rank {rank}"));
                }
            }
            Err(e) => checks.check(false, || format!("{label}: {e}")),
        }
    };
    let rho1 = ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => re(0.5),
        (1, 1) => re(0.3),
        (2, 2) => re(0.2),
        (0, 1) => c(0.1, 0.05),
        (1, 0) => c(0.1, -0.05),
        _ => re(0.0),
    });
    let rho2 = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => re(0.7),
        (1, 1) => re(0.3),
        (0, 1) => c(0.2, -0.1),
        _ => c(0.2, 0.1),
    });
    classify("product", BlockMatrix::product(&rho1, &rho2).unwrap(), ChannelClass::CompletelyContractive, &mut checks);
    // full Schmidt rank pure state
    let y = ComplexVector::from_vec(vec![re(0.6), re(0.0), c(0.0, 0.1), re(0.0), re(0.5), re(0.0), re(0.2), re(0.0), re(0.3)]);
    let y = y.normalize();
    classify("pure", projector(&y, 3, 3).unwrap(), ChannelClass::Unitary, &mut checks);
    let sigma0 = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { re([0.8, 0.2][i]) } else { re(0.0) });
    let sigma1 = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { re(0.5) } else { c(0.3, if i == 0 { 0.2 } else { -0.2 }) });
    let spec = StateFamilySpec::new(StateFamilyKind::ClassicalQuantum, 2).with_components(vec![(0.4, sigma0), (0.6, sigma1)]);
    classify("classical-quantum", statezoo::make_state(&spec).unwrap(), ChannelClass::Eb, &mut checks);
    checks.finish()
}

fn run_cli(args: &[&str], threads: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_posmap"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    let out = cmd.output().expect("binary runs");
    assert!(out.status.success(), "{:?} failed: {}", args, String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn criterion_10() -> Outcome {
    let mut checks = Checks::default();
    let mut runs = 0;
    let families = [
        MapFamily::Phi1 { a: 4.5 },
        MapFamily::Phi1 { a: 5.2 },
        MapFamily::Phi2 { a: 0.5 },
        MapFamily::Phi3 { m: 3, x: -1.2 },
        MapFamily::Phi3 { m: 3, x: -0.5 },
        MapFamily::Phi4 { m: 2, y: 1.1 },
        MapFamily::Phi4 { m: 3, y: 0.8 },
        MapFamily::Transpose { m: 3 },
    ];
    for f in families {
        let phi = build(f.clone());
        let (verdict, traces) = block_positivity_traced(phi.choi(), &cfg()).unwrap();
        let slack = 1e-12 * phi.choi().tol_scale();
        runs += traces.len();
        checks.check(verdict.monotone && traces.iter().all(|t| t.is_monotone(slack)), || format!("{f:?}: non-monotone trace"));
        if let (Some(u), Some(v)) = (&verdict.witness_u, &verdict.witness_v) {
            let again = product_value(phi.choi(), u, v);
            checks.check((again - verdict.min_value).abs() < 1e-10, || format!("{f:?}: witness re-evaluation"));
        }
    }
    for m in [2usize, 3] {
        for y in [-0.6, 0.5, 1.1] {
            let phi = build(MapFamily::Phi4 { m, y });
            let (verdict, _) = block_positivity_traced(phi.choi(), &cfg()).unwrap();
            let mf = m as f64;
            let analytic = (1.0 - y).min(1.0 + (mf - 1.0) * y);
            let err = (verdict.min_value - analytic).abs();
            checks.check(err <= CALIBRATION_TOL, || format!("phi4[m={m}]({y}): found {:.10}, analytic {analytic}", verdict.min_value));
        }
    }

    let dir = std::env::temp_dir().join(format!("posmap-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let map = dir.join("phi1.json");
    let map_s = map.to_str().unwrap();
    run_cli(&["gen", "--family", "phi1", "--param", "a=5.2", "-o", map_s], None);
    let check = ["check", "--input", map_s, "--cp", "--positive", "--seed", "0"];
    let first = run_cli(&check, None);
    let second = run_cli(&check, None);
    let single = run_cli(&check, Some("1"));
    checks.check(first == second && first == single, || "check output differs between runs".into());
    let sweep = ["sweep", "--family", "phi4", "--param", "y", "--from", "-0.6", "--to", "1.1", "--step", "0.1", "--check", "cp,positive,ppt"];
    let s1 = run_cli(&sweep, None);
    let s2 = run_cli(&sweep, Some("2"));
    checks.check(s1 == s2, || "sweep output differs between runs".into());
    let _ = std::fs::remove_dir_all(&dir);
    checks.check(first.ends_with(b"\n") && first.iter().filter(|&&b| b == b'\n').count() == 1, || "check output is not one line".into());
    checks.finish().map(|s| format!("{s}, {runs} logged restarts"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("lemma21 reconstruction over random PSD inputs", criterion_1),
        ("thm31 closed forms", criterion_2),
        ("phi1/phi2 thresholds", criterion_3),
        ("phi3 thresholds", criterion_4),
        ("phi4 thresholds and Choi spectrum", criterion_5),
        ("PPT classification ranges", criterion_6),
        ("detection", criterion_7),
        ("thm41 sanity", criterion_8),
        ("channel classification", criterion_9),
        ("certifier calibration and determinism", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion_{:02}", k + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str())) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("{id} PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("{id} FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
