//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symcov::covariance::{covariance_matrix, test_entanglement, DEFAULT_TOL};
use symcov::linalg::{min_sym_eigenvalue, RMatrix};
use symcov::oracle::{
    brute_force_covariance, brute_force_tensor, derive_seed, embed_full, ppt_min_eigenvalue,
    random_su2, random_symmetric_state, rotation_from_su2, sample_separable,
};
use symcov::reproduce::{Precision, Status};
use symcov::scanner::{analytic_thresholds, ghz_witness_index, scan_threshold, Detector};
use symcov::symstate::{reduced_noisy_w, reduced_state, SymmetricState};
use symcov::{correlation_tensor, ghz_state, noisy_mixture, w_state, Axis, MultiIndex};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 0x5EED_C0DE;
const SCAN_TOL: f64 = 1e-7;
const GRID: usize = 64;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs_diff(a: &RMatrix, b: &RMatrix) -> f64 {
    (a - b).amax()
}

fn noisy_family(base: SymmetricState) -> impl Fn(f64) -> symcov::Result<SymmetricState> {
    move |x| noisy_mixture(&base, x)
}

/// Random symmetric states of mixed rank, N drawn from `ns`.
fn random_states(count: usize, ns: &[usize], seed: u64) -> Vec<SymmetricState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = ns[rng.random_range(0..ns.len())];
            let rank = rng.random_range(1..=n + 1);
            random_symmetric_state(n, rank, &mut rng)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut seen = Vec::new();
    for n in [2usize, 4, 6, 8] {
        let expected = -(2f64.powi(n as i32 / 2 - 1));
        let rho = ghz_state(n).map_err(|e| e.to_string())?;
        let got = covariance_matrix(&rho, n / 2)
            .map_err(|e| e.to_string())?
            .min_eigenvalue();
        let (c_oracle, _) = brute_force_covariance(&embed_full(&rho).unwrap(), n / 2).unwrap();
        let oracle = min_sym_eigenvalue(&c_oracle);
        ensure((got - expected).abs() <= 1e-9, || {
            format!("N={n}: λ = {got}, expected {expected}")
        })?;
        ensure((oracle - expected).abs() <= 1e-9, || {
            format!("N={n}: oracle λ = {oracle}")
        })?;
        seen.push(format!("N={n}: {got:.12}"));
    }
    Ok(seen.join(", "))
}

fn criterion_2() -> Outcome {
    let mut worst = f64::INFINITY;
    for n in [4usize, 6, 8] {
        let rho = ghz_state(n).unwrap();
        for k in 1..n / 2 {
            let low = covariance_matrix(&rho, k).unwrap().min_eigenvalue();
            worst = worst.min(low);
            ensure(low >= -1e-9, || format!("N={n} k={k}: λ_min = {low}"))?;
        }
    }
    Ok(format!(
        "all lower-order blocks PSD, smallest eigenvalue {worst:.3e}"
    ))
}

fn criterion_3() -> Outcome {
    let mut flagged = Vec::new();
    for n in [4usize, 6, 8] {
        let rho = w_state(n).unwrap();
        let fs = embed_full(&rho).unwrap();
        for k in 1..=n / 2 {
            let rep = test_entanglement(&rho, k, DEFAULT_TOL).unwrap();
            ensure(rep.entangled, || {
                format!("W_{n} k={k} not detected (λ = {})", rep.min_eigenvalue)
            })?;
            let idx = MultiIndex::uniform(Axis::Z, k);
            let diag = covariance_matrix(&rho, k).unwrap().diagonal(&idx).unwrap();
            let (c_oracle, _) = brute_force_covariance(&fs, k).unwrap();
            let oracle = c_oracle[(idx.encode(), idx.encode())];
            ensure((diag - oracle).abs() <= 1e-9, || {
                format!("W_{n} k={k}: diag {diag} vs oracle {oracle}")
            })?;
            if 2 * k == n {
                ensure((diag + 1.0).abs() <= 1e-9, || {
                    format!("W_{n}: C_zz..z = {diag}, expected -1")
                })?;
            } else {
                let derived = -4.0 * (k * k) as f64 / (n * n) as f64;
                ensure((diag - derived).abs() <= 1e-9, || {
                    format!("W_{n} k={k}: diag {diag} vs -4k²/N² {derived}")
                })?;
            }
            let formula = -2.0 * (k * (k - 1)) as f64 / (n * n) as f64;
            if (formula - rep.min_eigenvalue).abs() > 1e-9 {
                flagged.push(format!(
                    "N={n},k={k}: formula {formula:.4} vs λ {:.4}",
                    rep.min_eigenvalue
                ));
            }
        }
    }
    Ok(format!(
        "entangled at every k; λ(−) formula flagged in {} cases [{}]",
        flagged.len(),
        flagged.join("; ")
    ))
}

fn threshold(base: SymmetricState, d: &Detector) -> Result<f64, String> {
    scan_threshold(noisy_family(base), d, SCAN_TOL, GRID)
        .map_err(|e| e.to_string())?
        .threshold
        .ok_or_else(|| "no negative grid point".to_string())
}

fn check_thresholds(
    build: fn(usize) -> symcov::Result<SymmetricState>,
    table: &[(usize, f64, Precision)],
) -> Outcome {
    let mut seen = Vec::new();
    for &(n, reference, precision) in table {
        let t = threshold(build(n).unwrap(), &Detector::MinEig { k: n / 2 })?;
        ensure(precision.agrees(reference, t), || {
            format!("N={n}: {t} vs {reference} ({precision})")
        })?;
        seen.push(format!("N={n}: {t:.6}"));
    }
    Ok(seen.join(", "))
}

fn criterion_4() -> Outcome {
    check_thresholds(
        ghz_state,
        &[
            (2, 0.25, Precision::Absolute(1e-4)),
            (4, 0.0625, Precision::Absolute(1e-4)),
            (6, 0.014, Precision::SignificantFigures(2)),
        ],
    )
}

fn criterion_5() -> Outcome {
    check_thresholds(
        w_state,
        &[
            (2, 0.25, Precision::Absolute(1e-4)),
            (4, 0.0899, Precision::Absolute(5e-4)),
            (6, 0.042, Precision::SignificantFigures(2)),
        ],
    )
}

fn criterion_6_diagonal() -> Outcome {
    let mut worst = 0.0_f64;
    for n in [2usize, 4, 6, 8] {
        let t = analytic_thresholds(n).unwrap();
        let ghz = threshold(
            ghz_state(n).unwrap(),
            &Detector::Diag {
                k: n / 2,
                index: ghz_witness_index(n / 2),
            },
        )?;
        ensure((ghz - t.ghz_diag).abs() <= 1e-6, || {
            format!("GHZ N={n}: {ghz} vs 1/N² {}", t.ghz_diag)
        })?;
        let w = threshold(
            w_state(n).unwrap(),
            &Detector::Moment {
                k: n / 2,
                index: MultiIndex::uniform(Axis::Z, n / 2),
            },
        )?;
        ensure((w - t.w_diag).abs() <= 1e-6, || {
            format!("W N={n}: {w} vs 1/(N+2) {}", t.w_diag)
        })?;
        worst = worst
            .max((ghz - t.ghz_diag).abs())
            .max((w - t.w_diag).abs());
    }
    Ok(format!(
        "1/N² and 1/(N+2) reproduced, max |Δ| = {worst:.2e}"
    ))
}

fn criterion_6_pair() -> Outcome {
    let mut seen = Vec::new();
    let mut failures = Vec::new();
    for n in [4usize, 6, 8] {
        let closed = analytic_thresholds(n).unwrap().w_pair;
        let t = threshold(w_state(n).unwrap(), &Detector::MinEig { k: 1 })?;
        // PPT on the two-qubit marginal is exact for two qubits; it brackets the same crossing
        let ppt = |x: f64| {
            let fs = embed_full(&noisy_mixture(&w_state(n).unwrap(), x).unwrap()).unwrap();
            ppt_min_eigenvalue(&fs.partial_trace_keep(2).unwrap()).unwrap()
        };
        let ppt_consistent = ppt(t - 1e-5) >= -1e-12 && ppt(t + 1e-5) < 0.0;
        seen.push(format!(
            "N={n}: scanned {t:.7} (PPT agrees: {ppt_consistent}), closed form {closed:.7}"
        ));
        if (t - closed).abs() > 1e-6 {
            failures.push(format!("N={n}: |Δ| = {:.4}", (t - closed).abs()));
        }
    }
    if failures.is_empty() {
        Ok(seen.join("; "))
    } else {
        Err(format!(
            "N²/(N²+12) not reproduced [{}]; {}",
            failures.join(", "),
            seen.join("; ")
        ))
    }
}

fn criterion_7() -> Outcome {
    let ns = [2usize, 4, 6, 8];
    let mut checked = 0;
    let mut worst = f64::INFINITY;
    for i in 0..1000u64 {
        let n = ns[(i % 4) as usize];
        let terms = 1 + (i as usize / 4) % 6;
        let (_, rho) = sample_separable(n, terms, derive_seed(SEED, i)).unwrap();
        for k in 1..=n / 2 {
            let low = covariance_matrix(&rho, k).unwrap().min_eigenvalue();
            worst = worst.min(low);
            checked += 1;
            ensure(low >= -1e-9, || {
                format!("sample {i} (N={n}, k={k}): λ_min = {low}")
            })?;
        }
    }
    Ok(format!(
        "1000 samples, {checked} blocks, 0 violations, min λ = {worst:.3e}"
    ))
}

fn criterion_8() -> Outcome {
    let states = random_states(200, &[2, 3, 4, 5, 6, 7, 8], SEED ^ 8);
    let mut worst = 0.0_f64;
    for (s, rho) in states.iter().enumerate() {
        let n = rho.n_qubits();
        let fs = embed_full(rho).unwrap();
        for l in 1..=n {
            let t = correlation_tensor(rho, l).unwrap();
            let oracle = brute_force_tensor(&fs, l).unwrap();
            for (a, b) in t.values().iter().zip(&oracle) {
                worst = worst.max((a - b).abs());
            }
        }
        for k in 1..=n / 2 {
            let cm = covariance_matrix(rho, k).unwrap();
            let (c, a) = brute_force_covariance(&fs, k).unwrap();
            worst = worst
                .max(max_abs_diff(cm.c_block(), &c))
                .max(max_abs_diff(cm.a_block(), &a));
        }
        ensure(worst <= 1e-10, || {
            format!("state {s} (N={n}): deviation {worst:.3e}")
        })?;
    }
    Ok(format!("200 states, max entrywise deviation {worst:.2e}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let mut states = random_states(100, &[2, 3, 4, 5, 6, 7, 8], SEED ^ 99);
    for n in [2usize, 4, 6, 8] {
        states.push(ghz_state(n).unwrap());
        states.push(w_state(n).unwrap());
    }
    let (mut v_low, mut rot_dev, mut spec_dev) = (f64::INFINITY, 0.0_f64, 0.0_f64);
    for rho in &states {
        let n = rho.n_qubits();
        let u = random_su2(&mut rng);
        let r: Matrix3<f64> = rotation_from_su2(&u);
        let rotated = embed_full(rho)
            .unwrap()
            .conjugate_local(&u)
            .restrict_symmetric()
            .unwrap();
        for k in 1..=n / 2 {
            let cm = covariance_matrix(rho, k).unwrap();
            let v = min_sym_eigenvalue(&cm.full_variance());
            v_low = v_low.min(v);
            ensure(v >= -1e-9, || {
                format!("V^(2k) not PSD: N={n} k={k} λ = {v}")
            })?;

            let by_formula = cm.rotate(&r).unwrap();
            let by_state = covariance_matrix(&rotated, k).unwrap();
            rot_dev = rot_dev
                .max(max_abs_diff(by_formula.c_block(), by_state.c_block()))
                .max(max_abs_diff(by_formula.a_block(), by_state.a_block()));

            let (before, _) = symcov::linalg::sym_eigen(cm.c_block());
            let (after, _) = symcov::linalg::sym_eigen(by_formula.c_block());
            spec_dev = spec_dev.max((before - after).amax());
        }
    }
    ensure(rot_dev <= 1e-9, || {
        format!("rotation covariance deviation {rot_dev:.3e}")
    })?;
    ensure(spec_dev <= 1e-9, || {
        format!("spectrum deviation {spec_dev:.3e}")
    })?;

    let mut closed_dev = 0.0_f64;
    for n_total in 2..=8usize {
        for n_traced in 0..n_total {
            for x in [0.0, 0.1, 0.37, 0.8, 1.0] {
                let rho = noisy_mixture(&w_state(n_total).unwrap(), x).unwrap();
                let generic = reduced_state(&rho, n_total - n_traced).unwrap();
                let closed = reduced_noisy_w(n_total, n_traced, x).unwrap();
                closed_dev = closed_dev.max(symcov::linalg::cmax_abs(
                    &(generic.matrix() - closed.matrix()),
                ));
            }
        }
    }
    ensure(closed_dev <= 1e-10, || {
        format!("reduced noisy-W closed form deviation {closed_dev:.3e}")
    })?;
    Ok(format!(
        "{} states: min λ(V) = {v_low:.2e}, rotation Δ = {rot_dev:.2e}, spectrum Δ = {spec_dev:.2e}, reduced noisy-W Δ = {closed_dev:.2e}",
        states.len()
    ))
}

fn criterion_10() -> Outcome {
    let states = random_states(600, &[2, 3, 4, 5, 6], SEED ^ 10);
    let (mut agree, mut marginal, mut entangled) = (0, 0, 0);
    for (s, rho) in states.iter().enumerate() {
        let rep = test_entanglement(rho, 1, 1e-9).unwrap();
        let pair = embed_full(rho).unwrap().partial_trace_keep(2).unwrap();
        let ppt = ppt_min_eigenvalue(&pair).unwrap();
        let ppt_entangled = ppt < -1e-9;
        if rep.entangled == ppt_entangled {
            agree += 1;
            entangled += usize::from(rep.entangled);
        } else if rep.min_eigenvalue.abs() <= 1e-7 && ppt.abs() <= 1e-7 {
            marginal += 1;
        } else {
            return Err(format!(
                "state {s} (N={}): C^(2) λ = {:.3e} but PPT λ = {ppt:.3e}",
                rho.n_qubits(),
                rep.min_eigenvalue
            ));
        }
    }
    ensure(agree >= 500, || format!("only {agree} agreeing verdicts"))?;
    Ok(format!(
        "{} states: {agree} agree ({entangled} entangled), {marginal} marginal",
        states.len()
    ))
}

fn criterion_11() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = symcov::cli::run(
        ["symcov", "reproduce", "--format", "json"],
        &mut out,
        &mut err,
    );
    let rows: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
    let rows = rows
        .as_array()
        .ok_or("reproduce did not emit a JSON array")?;
    let status_of = |needle: &str| -> Vec<String> {
        rows.iter()
            .filter(|r| r["quantity"].as_str().unwrap_or("").contains(needle))
            .map(|r| r["status"].as_str().unwrap_or("").to_string())
            .collect()
    };
    let odd_rows = [
        status_of("GHZ_2 C^(2) diagonal"),
        status_of("GHZ_6 C^(6) diagonal"),
    ]
    .concat();
    ensure(
        odd_rows.len() == 2 && odd_rows.iter().all(|s| s == "known-discrepancy"),
        || format!("N/2-odd GHZ rows: {odd_rows:?}"),
    )?;
    let lambda = status_of("vs -2k(k-1)/N^2");
    ensure(
        !lambda.is_empty() && lambda.iter().all(|s| s != "pass"),
        || format!("W λ formula rows: {lambda:?}"),
    )?;
    for r in rows {
        if r["status"] == "known-discrepancy" {
            ensure(r["computed"].is_number() && r["note"].is_string(), || {
                format!("row lacks value/note: {r}")
            })?;
        }
    }
    let unexpected = rows
        .iter()
        .filter(|r| r["status"] == Status::Fail.to_string().as_str())
        .count();
    ensure(unexpected == 0, || {
        format!("{unexpected} unexpected failures")
    })?;
    ensure(code != 0, || {
        "reproduce exited 0 despite flagged rows".to_string()
    })?;
    Ok(format!(
        "{} rows, {} flagged as known discrepancies, exit status {code}",
        rows.len(),
        rows.iter()
            .filter(|r| r["status"] == "known-discrepancy")
            .count()
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1  GHZ eigenvalue law", criterion_1),
        ("2  GHZ fragility", criterion_2),
        ("3  W robustness", criterion_3),
        ("4  noisy-GHZ thresholds", criterion_4),
        ("5  noisy-W thresholds", criterion_5),
        ("6a analytic diagonal thresholds", criterion_6_diagonal),
        ("6b noisy-W two-qubit closed form", criterion_6_pair),
        ("7  separable samples never negative", criterion_7),
        ("8  oracle equivalence", criterion_8),
        ("9  structural invariants", criterion_9),
        ("10 k=1 agreement with PPT", criterion_10),
        ("11 known-discrepancy ledger", criterion_11),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let start = Instant::now();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.1}s): {why}");
            }
        }
    }
    println!(
        "acceptance: {failed} failing criteria, {:.1}s total",
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
