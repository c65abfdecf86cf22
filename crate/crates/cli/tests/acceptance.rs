//! Acceptance gate: every criterion runs at its stated size and tolerance
//! and prints one PASS/FAIL line. The process exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bohr_core::catalog::{
    check_vasic_keckic_scalar, compile_template, residual_identity, vasic_keckic_sides, Direction, Identity,
    SignPattern, Template,
};
use bohr_core::instance::{InequalityId, Instance};
use bohr_core::jensen::{
    check_jensen_bohr, check_spectra_jensen, generate_jensen_instance, generate_spectra_instance, jensen_bohr_sides,
    JensenInstance, PositiveLinearMap,
};
use bohr_core::majorization::{check_eigen_bohr, EigenBohrInstance};
use bohr_core::matkernel::{lambda_min, spectral_norm};
use bohr_core::order::{
    certify, coefficient_matrix, expression_scale, operator_expression, principal_minors_nonneg, psd_check,
    scalar_witness_value, CertificateStatus, QuadraticCertificateProblem,
};
use bohr_core::random::{
    log_uniform, rng_from_seed, sample_complex, sample_general, sample_simplex, trial_seed, ChaCha8Rng,
};
use bohr_core::search::{falsify, fuzz, generate_eigen_bohr, nonzero_t, random_problem, thm22_problem, FuzzConfig};
use bohr_core::{CMatrix, Complex, Tol, C64};
use rand::Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn tol() -> Tol {
    Tol::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rng(master: u64, i: usize) -> ChaCha8Rng {
    rng_from_seed(trial_seed(master, i as u64))
}

fn general(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    sample_general(rng, dim, dim, 1.0)
}

fn norm2(m: &CMatrix) -> Result<f64, String> {
    spectral_norm(m, &tol()).map_err(e2s)
}

fn status(p: &QuadraticCertificateProblem<f64>) -> Result<CertificateStatus, String> {
    Ok(certify(p, &tol()).map_err(e2s)?.status)
}

// 1. exact identities on random complex pairs, dims 1..=8
fn identity_suites() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (label, master) in [("zhang", 101u64), ("parallelogram", 102)] {
        for i in 0..1000 {
            let mut rng = rng(master, i);
            let dim = 1 + i % 8;
            let id = if label == "zhang" {
                let p = 1.0 + log_uniform::<f64, _>(&mut rng, 1e-2, 1e2);
                Identity::Zhang { p, q: p / (p - 1.0) }
            } else {
                Identity::Parallelogram { t: nonzero_t(&mut rng) }
            };
            let (a, b) = (general(&mut rng, dim), general(&mut rng, dim));
            let (lhs, rhs) = id.sides(&a, &b).map_err(e2s)?;
            let scale = norm2(&lhs)?.max(norm2(&rhs)?).max(1.0);
            let residual = residual_identity(&id, &a, &b, &tol()).map_err(e2s)?.residual.expect("identity residual");
            worst = worst.max(residual / scale);
            ensure(residual <= 1e-9 * scale, || format!("{label} trial {i}: residual {residual:e}, scale {scale:e}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(20), || format!("took {elapsed:?} (limit 20 s)"))?;
    Ok(format!("2x1000 pairs, worst residual/scale {worst:.1e}"))
}

// 2. certified problems hold on random operator tuples
fn certificate_soundness() -> Verdict {
    let mut worst = f64::INFINITY;
    for i in 0..500 {
        let mut rng = rng(201, i);
        let n = rng.random_range(1..=6);
        let p = random_problem(&mut rng, n, true).map_err(e2s)?;
        ensure(status(&p)? == CertificateStatus::Certified, || format!("problem {i} was not certified"))?;
        for j in 0..50 {
            let dim = 1 + (i + j) % 6;
            let ops: Vec<CMatrix> = (0..n).map(|_| general(&mut rng, dim)).collect();
            let expr = operator_expression(&p, &ops).map_err(e2s)?;
            let scale = expression_scale(&p, &ops).map_err(e2s)?.max(1.0);
            let lmin = lambda_min(&expr, &tol()).map_err(e2s)?;
            worst = worst.min(lmin / scale);
            ensure(lmin >= -1e-8 * scale, || format!("problem {i}, tuple {j}: lambda_min {lmin:e}, scale {scale:e}"))?;
        }
    }
    Ok(format!("500 problems x 50 tuples, worst lambda_min/scale {worst:.1e}"))
}

// 3. refuted problems: witness value matches lambda_min, falsify succeeds
fn constructive_completeness() -> Verdict {
    let mut found = 0;
    let mut draws = 0;
    let mut worst = 0.0f64;
    while found < 500 {
        let mut rng = rng(301, draws);
        draws += 1;
        let n = rng.random_range(1..=6);
        let p = random_problem(&mut rng, n, false).map_err(e2s)?;
        let cert = certify(&p, &tol()).map_err(e2s)?;
        if cert.status != CertificateStatus::Refuted {
            continue;
        }
        let v = cert.witness.as_ref().ok_or("refuted without witness")?;
        let value = scalar_witness_value(&p, v.as_slice()).map_err(e2s)?;
        let m_norm = norm2(&coefficient_matrix(&p).to_matrix())?;
        let gap = (value - cert.lambda_min).abs();
        worst = worst.max(gap / m_norm);
        ensure(gap <= 1e-9 * m_norm, || format!("problem {found}: v'Mv = {value}, lambda_min = {}", cert.lambda_min))?;
        let violation = falsify(&p, 2, 20, draws as u64, &tol()).map_err(e2s)?;
        ensure(violation.is_some(), || format!("falsify found nothing for refuted problem {found}"))?;
        found += 1;
    }
    Ok(format!("500 refuted problems ({draws} draws), worst |v'Mv - lambda_min|/||M|| {worst:.1e}, falsify 500/500"))
}

// 4. t-grid dichotomy for both sign patterns, reverse direction flips
fn thm22_dichotomy() -> Verdict {
    let certified_grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
    let refuted_grid = [1.5, 2.0, 10.0, -0.5, -1.0];
    let mut cases = 0;
    for sign in [SignPattern::MinusPlus, SignPattern::PlusMinus] {
        for (&t, expect) in certified_grid
            .iter()
            .map(|t| (t, CertificateStatus::Certified))
            .chain(refuted_grid.iter().map(|t| (t, CertificateStatus::Refuted)))
        {
            let std = status(&thm22_problem(t, Direction::Standard, sign).map_err(e2s)?)?;
            let rev = status(&thm22_problem(t, Direction::Reverse, sign).map_err(e2s)?)?;
            ensure(std == expect, || format!("t={t} {sign:?}: standard is {std:?}, expected {expect:?}"))?;
            if t == 1.0 {
                // M = 0: equality, so both orders hold
                let m = coefficient_matrix(&thm22_problem(t, Direction::Standard, sign).map_err(e2s)?);
                let zero = m.rows().iter().flatten().all(|x| x.abs() < 1e-14);
                ensure(zero && rev == CertificateStatus::Certified, || {
                    format!("t=1 {sign:?}: M != 0 or reverse {rev:?}")
                })?;
            } else {
                ensure(rev != std, || format!("t={t} {sign:?}: reverse did not flip ({rev:?})"))?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} (t, sign) cases; reverse flips for t != 1, both hold at t = 1 where M = 0"))
}

// 5. Hirzallah operator and Ky Fan forms under fuzzing
fn hirzallah() -> Verdict {
    let mut trials = 0;
    let mut worst = f64::INFINITY;
    for dim in 1..=8 {
        let r = fuzz(InequalityId::Hirzallah11, &FuzzConfig::new(dim, 125, 500 + dim as u64), &tol()).map_err(e2s)?;
        ensure(r.violation_count == 0 && r.hypothesis_failures == 0, || format!("hirzallah11 dim {dim}: {r:?}"))?;
        trials += r.trials;
        worst = worst.min(r.worst_margin);
    }
    let mut norm_trials = 0;
    for dim in 1..=8 {
        let r = fuzz(InequalityId::HirzallahNorm, &FuzzConfig::new(dim, 25, 600 + dim as u64), &tol()).map_err(e2s)?;
        ensure(r.violation_count == 0 && r.hypothesis_failures == 0, || format!("hirzallah_norm dim {dim}: {r:?}"))?;
        norm_trials += r.trials;
    }
    Ok(format!(
        "operator form {trials} trials, worst margin {worst:.2e}; Ky Fan form {norm_trials} trials, no violation"
    ))
}

// 6. weight templates certify; minor and eigenvalue routes agree
fn weight_templates() -> Verdict {
    let mut matrices = Vec::new();
    for i in 0..200 {
        let mut rng = rng(601, i);
        let n = rng.random_range(1..=6);
        let c: Vec<f64> = sample_simplex(&mut rng, n);
        let template = if i % 2 == 0 {
            Template::ZhangConvex { t: c }
        } else {
            Template::JensenSquares { r: c.iter().map(|x| 1.0 / x).collect() }
        };
        let p = compile_template(&template).map_err(e2s)?;
        ensure(status(&p)? == CertificateStatus::Certified, || format!("{template:?} not certified"))?;
        matrices.push(coefficient_matrix(&p));
    }
    for i in 0..200 {
        let mut rng = rng(602, i);
        let n = rng.random_range(1..=8);
        let c: Vec<f64> = sample_simplex(&mut rng, n);
        let template = if i % 2 == 0 {
            Template::ZhangConvex { t: c }
        } else {
            Template::JensenSquares { r: c.iter().map(|x| 1.0 / x).collect() }
        };
        matrices.push(coefficient_matrix(&compile_template(&template).map_err(e2s)?));
        matrices.push(coefficient_matrix(&random_problem(&mut rng, n, i % 3 == 0).map_err(e2s)?));
    }
    let mut psd = 0;
    for (k, m) in matrices.iter().enumerate() {
        let by_eig = psd_check(m, &tol()).map_err(e2s)?.is_psd();
        let by_minor = principal_minors_nonneg(m, &tol()).map_err(e2s)?;
        ensure(by_eig == by_minor, || format!("matrix {k}: eigenvalue route {by_eig}, minor route {by_minor}"))?;
        psd += by_eig as usize;
    }
    Ok(format!("100 + 100 templates certified; routes agree on {} matrices (n <= 8, {psd} PSD)", matrices.len()))
}

// 7. discrete Jensen-Bohr and its constant-k form
fn jensen_bohr() -> Verdict {
    let mut worst = f64::INFINITY;
    for (ri, r) in [1.1, 1.5, 2.0].into_iter().enumerate() {
        for i in 0..200 {
            let mut rng = rng(700 + ri as u64, i);
            let (dim, n) = (1 + i % 6, 1 + i % 4);
            let inst = generate_jensen_instance(&mut rng, dim, n, r, None).map_err(e2s)?;
            let out = check_jensen_bohr(&inst, &tol()).map_err(|e| format!("r={r} instance {i}: {e}"))?;
            worst = worst.min(out.margin);
            ensure(out.holds, || format!("r={r} instance {i}: margin {:e}", out.margin))?;
        }
    }
    let mut pairs = 0;
    let mut draw = 0;
    while pairs < 50 {
        let mut rng = rng(710, draw);
        draw += 1;
        let r = [1.1, 1.5, 2.0][pairs % 3];
        let base = generate_jensen_instance(&mut rng, 1 + pairs % 4, 1 + pairs % 3, r, None).map_err(e2s)?;
        if base.maps.iter().any(|m| matches!(m, PositiveLinearMap::Pinch { .. })) {
            continue;
        }
        let k = log_uniform::<f64, _>(&mut rng, 0.2, 5.0);
        let scaled = JensenInstance { k_constant: Some(k), ..base.with_scaled_maps(k).map_err(e2s)? };
        let out = check_jensen_bohr(&scaled, &tol()).map_err(|e| format!("pair {pairs}: {e}"))?;
        ensure(out.holds, || format!("pair {pairs}: k={k} instance fails, margin {:e}", out.margin))?;
        // LHS scales by k^r; the k^{r-1} constant must make RHS scale the same way
        let (l1, r1) = jensen_bohr_sides(&base, 1.0, &tol()).map_err(e2s)?;
        let (lk, rk) = jensen_bohr_sides(&scaled, k, &tol()).map_err(e2s)?;
        let f = k.powf(r);
        for (one, with_k, side) in [(&l1, &lk, "lhs"), (&r1, &rk, "rhs")] {
            let target = one.scale_real(f);
            let err = norm2(&(with_k - &target))?;
            let scale = norm2(&target)?.max(1.0);
            ensure(err <= 1e-9 * scale, || format!("pair {pairs}: {side} off by {err:e} from k^r scaling"))?;
        }
        pairs += 1;
    }
    Ok(format!("600 instances hold (worst margin {worst:.2e}); 50 k-pairs scale by k^r on both sides"))
}

// 8. spectra-condition Jensen for r outside [0, 1]
fn spectra_jensen() -> Verdict {
    let mut attempts = 0;
    let mut accepted = 0;
    for (ri, r) in [3.0, -1.0].into_iter().enumerate() {
        for i in 0..50 {
            let seed = trial_seed(800 + ri as u64, i as u64);
            let gen = generate_spectra_instance(1 + i % 4, 1 + i % 4, r, seed, &tol()).map_err(e2s)?;
            attempts += gen.attempts;
            accepted += 1;
            let out = check_spectra_jensen(&gen.instance, &tol()).map_err(|e| format!("r={r} instance {i}: {e}"))?;
            ensure(out.holds, || format!("r={r} instance {i}: margin {:e}", out.margin))?;
        }
    }
    Ok(format!(
        "100 instances hold; generator acceptance rate {accepted}/{attempts} = {:.3}",
        accepted as f64 / attempts as f64
    ))
}

// 9. eigenvalue Bohr via partial sums; scalar case matches the scalar form
fn eigen_bohr() -> Verdict {
    let mut worst = f64::INFINITY;
    for (ri, r) in [1.5, 2.0, 3.0].into_iter().enumerate() {
        for i in 0..200 {
            let mut rng = rng(900 + ri as u64, i);
            let inst = generate_eigen_bohr(&mut rng, 1 + i % 6, 1 + i % 3, r).map_err(e2s)?;
            let out = check_eigen_bohr(&inst, &tol()).map_err(|e| format!("r={r} instance {i}: {e}"))?;
            worst = worst.min(out.margin);
            ensure(out.holds, || format!("r={r} instance {i}: margin {:e}", out.margin))?;
        }
    }
    let mut max_gap = 0.0f64;
    for i in 0..1000 {
        let mut rng = rng(910, i);
        let n = rng.random_range(1..=6);
        let r = [1.5, 2.0, 3.0][i % 3];
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect();
        let inst = EigenBohrInstance {
            operators: z.iter().map(|&v| CMatrix::diag_real(&[v])).collect(),
            x: vec![CMatrix::identity(1); n],
            weights: p.clone(),
            r,
        };
        let eb = check_eigen_bohr(&inst, &tol()).map_err(e2s)?;
        let zc: Vec<C64> = z.iter().map(|&v| Complex::new(v, 0.0)).collect();
        let vk = check_vasic_keckic_scalar(&zc, &p, r, &tol()).map_err(e2s)?;
        let gap = (eb.margin - vk.margin).abs();
        max_gap = max_gap.max(gap);
        ensure(gap <= 1e-10, || format!("scalar instance {i}: eigen {} vs scalar {}", eb.margin, vk.margin))?;
        ensure(eb.holds == vk.holds, || format!("scalar instance {i}: verdicts differ"))?;
    }
    Ok(format!("600 instances hold (worst margin {worst:.2e}); 1000 scalar cases agree, max gap {max_gap:.1e}"))
}

/// Holder bound for `|sum z_i|` via `u_i = a_i^{-1/r}`, `w_i = z_i / u_i`:
/// `|sum u_i w_i| <= (sum u_i^q)^{1/q} (sum |w_i|^r)^{1/r}`, `1/q = 1 - 1/r`.
fn holder_oracle(z: &[C64], a: &[f64], r: f64) -> (f64, f64) {
    let q = r / (r - 1.0);
    let u: Vec<f64> = a.iter().map(|&x| x.powf(-1.0 / r)).collect();
    let w: Vec<f64> = z.iter().zip(&u).map(|(z, u)| z.norm() / u).collect();
    let sum: C64 = z.iter().sum();
    let bound =
        u.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q) * w.iter().map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r);
    (sum.norm(), bound)
}

// 10. scalar form against the Holder oracle, including equality tuples
fn vasic_keckic_oracle() -> Verdict {
    let mut max_rel = 0.0f64;
    let mut tuples = 0;
    for (ri, r) in [1.5, 2.0, 3.0].into_iter().enumerate() {
        for i in 0..10_000 {
            let mut rng = rng(1000 + ri as u64, i);
            let n = rng.random_range(1..=8);
            let a: Vec<f64> = (0..n).map(|_| log_uniform(&mut rng, 0.05, 20.0)).collect();
            let z: Vec<C64> = if i % 10 == 0 {
                // Holder equality: |z_i| proportional to a_i^{1/(1-r)}, common phase
                let phase = sample_complex::<f64, _>(&mut rng, 1.0);
                let phase = phase / phase.norm().max(1e-300);
                a.iter().map(|&x| phase * x.powf(1.0 / (1.0 - r))).collect()
            } else {
                (0..n).map(|_| sample_complex(&mut rng, 2.0)).collect()
            };
            let (lhs, rhs) = vasic_keckic_sides(&z, &a, r).map_err(e2s)?;
            let (abs_sum, bound) = holder_oracle(&z, &a, r);
            let (olhs, orhs) = (abs_sum.powf(r), bound.powf(r));
            let rel = ((lhs - olhs).abs() + (rhs - orhs).abs()) / orhs.max(1e-300);
            max_rel = max_rel.max(rel);
            ensure(rel <= 1e-10, || format!("r={r} tuple {i}: sides ({lhs}, {rhs}) vs oracle ({olhs}, {orhs})"))?;
            let out = check_vasic_keckic_scalar(&z, &a, r, &tol()).map_err(e2s)?;
            ensure(out.holds, || format!("r={r} tuple {i}: margin {:e}", out.margin))?;
            ensure(abs_sum <= bound * (1.0 + 1e-12), || format!("r={r} tuple {i}: oracle bound broken"))?;
            tuples += 1;
        }
    }
    Ok(format!("{tuples} tuples agree with the Holder oracle, max relative gap {max_rel:.1e}"))
}

fn bohr(args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bohr"))
        .args(args)
        .env_remove("BOHR_TOL_ATOL")
        .env_remove("BOHR_TOL_RTOL")
        .output()
        .map_err(e2s)?;
    out.status.code().ok_or_else(|| "bohr killed by signal".to_string())
}

// 11. same command and seed, same bytes
fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(e2s)?;
    let write = |name: &str, body: String| -> Result<String, String> {
        let path = dir.path().join(name);
        std::fs::write(&path, body).map_err(e2s)?;
        Ok(path.to_str().unwrap().to_string())
    };
    let thm = write("thm22.json", r#"{"id":"thm22","t":10,"direction":"standard","sign":"plus_minus"}"#.into())?;
    let eb = generate_eigen_bohr(&mut rng(1100, 0), 3, 2, 2.0).map_err(e2s)?;
    let major = write("eigen.json", serde_json::to_string(&Instance::EigenBohr(eb)).map_err(e2s)?)?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["certify", "--instance", &thm],
        vec!["check", "--inequality", "hirzallah_norm", "--dim", "4", "--seed", "7"],
        vec!["fuzz", "--inequality", "spectra_jensen", "--dim", "3", "--trials", "10", "--seed", "99"],
        vec!["fuzz", "--inequality", "jensen_bohr", "--dim", "4", "--trials", "40", "--seed", "1"],
        vec!["falsify", "--instance", &thm, "--dim", "3", "--iters", "300", "--seed", "4"],
        vec!["majorize", "--instance", &major, "--pretty"],
    ];
    for (k, cmd) in commands.iter().enumerate() {
        let mut reports = Vec::new();
        let mut codes = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("report-{k}-{run}.json"));
            let mut args = cmd.clone();
            args.extend(["--out", out.to_str().unwrap()]);
            codes.push(bohr(&args)?);
            reports.push(std::fs::read(Path::new(&out)).map_err(e2s)?);
        }
        ensure(codes[0] != 1, || format!("{cmd:?} failed with exit 1"))?;
        ensure(codes[0] == codes[1] && reports[0] == reports[1], || format!("{cmd:?}: runs differ"))?;
    }
    Ok(format!("{} commands, byte-identical reports across two runs", commands.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("identity suites", identity_suites),
        ("certificate soundness", certificate_soundness),
        ("constructive completeness", constructive_completeness),
        ("two-operator t dichotomy", thm22_dichotomy),
        ("Hirzallah operator and norm forms", hirzallah),
        ("weight templates and minor route", weight_templates),
        ("discrete Jensen-Bohr", jensen_bohr),
        ("spectra-condition Jensen", spectra_jensen),
        ("eigenvalue Bohr", eigen_bohr),
        ("scalar form vs Holder oracle", vasic_keckic_oracle),
        ("determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = t0.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", i + 1)
            }
        }
    }
    let total = start.elapsed();
    let limit = Duration::from_secs(120);
    let status = if total <= limit { "PASS" } else { "FAIL" };
    if total > limit {
        failed += 1;
    }
    println!("criterion 12 {status}  runtime: criteria 1-11 took {:.2}s (limit 120 s, dims <= 8)", total.as_secs_f64());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 12 acceptance criteria passed");
}
