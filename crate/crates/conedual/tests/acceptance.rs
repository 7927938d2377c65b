//! Acceptance gate: one test per criterion, each printing a PASS line with
//! the measured quantities. Tolerances and runtime budgets are pinned here;
//! loosening them is a contract change, not a tuning knob.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use conedual::cones::{decompose_dual, is_positive_definite, PdMethod};
use conedual::oracle::{sweep_optimize, toeplitz_necessary_check, SweepOutcome, SweepSpec};
use conedual::revesz::{run_bracket, ReveszProblem};
use conedual::runner::random_parseval_pair;
use conedual::seqcore::{MultiIndex, SymmetricSequence};
use conedual::trig::{fourier_eval, parseval_check, TorusGrid, DEFAULT_EPS_PD};
use conedual::wiener::{
    autocorrelation_candidate, run_wiener_bracket, solve_k_upper, witness_w, WienerProblem,
};

fn seq_1d(half: &[f64]) -> SymmetricSequence {
    SymmetricSequence::from_half_values(half)
}

fn idx(k: i64) -> MultiIndex {
    MultiIndex::new(vec![k])
}

#[test]
fn criterion_1_weak_duality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let schedule = [64usize, 128];
    for trial in 0..100 {
        let mut pool: Vec<i64> = (1..=6).collect();
        pool.shuffle(&mut rng);
        let m_size = rng.gen_range(0..=4usize);
        let m: Vec<Vec<i64>> = pool[..m_size].iter().map(|&k| vec![k]).collect();
        pool.shuffle(&mut rng);
        let l_size = rng.gen_range(0..=4usize);
        let l: Vec<Vec<i64>> = pool[..l_size].iter().map(|&k| vec![k]).collect();
        let mut r = SymmetricSequence::zero(1);
        r.set(idx(0), 1.0);
        for k in 1..=6i64 {
            if rng.gen_bool(0.7) {
                r.set(idx(k), rng.gen_range(-1.0..1.0));
            }
        }
        let p = ReveszProblem::new(1, m, l, r, TorusGrid::new(1, schedule[0]).unwrap())
            .unwrap();
        let bracket = run_bracket(&p, &schedule)
            .unwrap_or_else(|e| panic!("trial {trial} failed: {e}"));
        for level in &bracket.trace {
            assert!(
                level.omega_certified <= level.alpha_certified + 1e-6,
                "trial {trial}, G = {}: ω_cert {} > α_cert {}",
                level.grid_points,
                level.omega_certified,
                level.alpha_certified
            );
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "runtime {secs:.1}s exceeds 60s budget");
    println!("criterion 1 (weak duality, 100 random instances): PASS in {secs:.1}s");
}

#[test]
fn criterion_2_duality_gap_convergence() {
    let start = Instant::now();
    let mut p = ReveszProblem::new(
        1,
        vec![vec![1]],
        vec![vec![1]],
        seq_1d(&[1.0, 1.0]),
        TorusGrid::new(1, 1024).unwrap(),
    )
    .unwrap();
    // The dual witness needs a long tail to approach ω = α = 0; over window
    // half-width K the exact optimum is 1 - sec(π/(K+2)) = O(K⁻²).
    p.window_half_width = 96;
    let bracket = run_bracket(&p, &[1024, 4096]).unwrap();
    let last = bracket.trace.last().unwrap();
    assert_eq!(last.grid_points, 1 << 12);

    // Oracle: sweep f(1); the instance reduces to min 1 + 2·f(1) over
    // |f(1)| ≤ 1/2 (the exact transform minimum is 1 - 2|f(1)|).
    let spec = SweepSpec::new(vec![(-1.0, 1.0, 0.01)]);
    let oracle = match sweep_optimize(
        &spec,
        |x| 1.0 - 2.0 * x[0].abs() >= 0.0,
        |x| 1.0 + 2.0 * x[0],
    )
    .unwrap()
    {
        SweepOutcome::Best { value, .. } => value,
        SweepOutcome::NoneFeasible => panic!("sweep found no feasible point"),
    };
    assert!(oracle.abs() < 1e-12, "oracle value {oracle}");

    assert!(
        last.gap <= 1e-3,
        "gap {} exceeds 1e-3 at G = 4096",
        last.gap
    );
    assert!(
        (last.alpha_certified - oracle).abs() <= 1e-3,
        "α_cert {} vs oracle {oracle}",
        last.alpha_certified
    );
    assert!(
        (last.omega_certified - oracle).abs() <= 1e-3,
        "ω_cert {} vs oracle {oracle}",
        last.omega_certified
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 5.0, "runtime {secs:.1}s exceeds 5s budget");
    println!(
        "criterion 2 (gap convergence, gap {:.2e} at G = 4096): PASS in {secs:.1}s",
        last.gap
    );
}

#[test]
fn criterion_3_trivial_exactness() {
    let p = ReveszProblem::new(
        1,
        Vec::new(),
        Vec::new(),
        seq_1d(&[1.0]),
        TorusGrid::new(1, 64).unwrap(),
    )
    .unwrap();
    let bracket = run_bracket(&p, &[64, 128, 256]).unwrap();
    assert_eq!(bracket.alpha_certified, 1.0);
    assert_eq!(bracket.omega_certified, 1.0);
    assert_eq!(bracket.gap, 0.0);
    for level in &bracket.trace {
        assert_eq!(level.alpha_certified, 1.0);
        assert_eq!(level.omega_certified, 1.0);
        assert_eq!(level.gap, 0.0);
    }
    println!("criterion 3 (empty pattern exact, alpha = omega = 1): PASS");
}

#[test]
fn criterion_4_wiener_witness() {
    let start = Instant::now();
    for l in 2..=4usize {
        for n in 1..=3usize {
            let w = witness_w(l, n);
            let grid = TorusGrid::new(1, 512).unwrap();
            let status = is_positive_definite(&w, &grid, DEFAULT_EPS_PD);
            assert!(
                status.is_certified() && status.method == PdMethod::L1Bound,
                "w_{{{l},{n}}} must certify via the l1 bound"
            );
            let p = WienerProblem::new(l, n, l * n, grid).unwrap();
            let k = solve_k_upper(&p).unwrap();
            let baseline = (2 * (l - 1) * n) as f64;
            assert!(
                k.value <= baseline + 1e-9,
                "K_upper({l},{n}) = {} exceeds witness value {baseline}",
                k.value
            );
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 10.0, "runtime {secs:.1}s exceeds 10s budget");
    println!("criterion 4 (witness PD + K_upper ≤ 2(L-1)N for 9 cases): PASS in {secs:.1}s");
}

#[test]
fn criterion_5_k21_bracket() {
    let start = Instant::now();
    let p = WienerProblem::new(2, 1, 2, TorusGrid::new(1, 1024).unwrap()).unwrap();
    let k = solve_k_upper(&p).unwrap();
    assert!(
        (k.value - 2.0).abs() <= 1e-6,
        "K_upper(2,1) = {} at R = 2",
        k.value
    );

    // Oracle over (h(1), h(2)) with h(2) ≤ -1: the least feasible h(0) is
    // max_x -2(h(1)cos x + h(2)cos 2x); minimize that over the sweep.
    let xs: Vec<f64> = (0..512)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / 512.0)
        .collect();
    let spec = SweepSpec::new(vec![(-2.0, 2.0, 0.05), (-3.0, -1.0, 0.05)]);
    let oracle = match sweep_optimize(
        &spec,
        |_| true,
        |h| {
            xs.iter()
                .map(|&x| -2.0 * (h[0] * x.cos() + h[1] * (2.0 * x).cos()))
                .fold(f64::NEG_INFINITY, f64::max)
        },
    )
    .unwrap()
    {
        SweepOutcome::Best { value, .. } => value,
        SweepOutcome::NoneFeasible => unreachable!(),
    };
    assert!(
        (oracle - 2.0).abs() <= 0.05,
        "2-D sweep oracle {oracle} disagrees with 2.0"
    );

    let bracket = run_wiener_bracket(2, 1, &[(2, 1024)], 1000, 0, DEFAULT_EPS_PD).unwrap();
    assert!(bracket.lower >= 1.0, "C lower bound {} < 1", bracket.lower);
    assert!(
        1.0 <= bracket.lower && bracket.lower <= bracket.upper && bracket.upper <= 2.0 + 1e-9,
        "sandwich violated: [{}, {}]",
        bracket.lower,
        bracket.upper
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 10.0, "runtime {secs:.1}s exceeds 10s budget");
    println!(
        "criterion 5 (K(2,1) bracket [{:.6}, {:.6}]): PASS in {secs:.1}s",
        bracket.lower, bracket.upper
    );
}

#[test]
fn criterion_6_parseval() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (f, nu) = random_parseval_pair(&mut rng, 5, 4);
        let (lhs, rhs) = parseval_check(&f, &nu).unwrap();
        let bound = 1e-10 * (1.0 + lhs.abs());
        assert!(
            (lhs - rhs).abs() <= bound,
            "Parseval mismatch: lhs {lhs}, rhs {rhs}"
        );
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 2.0, "runtime {secs:.1}s exceeds 2s budget");
    println!("criterion 6 (Parseval, worst relative {worst:.2e}): PASS in {secs:.1}s");
}

#[test]
fn criterion_7_dual_decomposition() {
    let grid = TorusGrid::new(1, 1024).unwrap();
    let p = WienerProblem::new(2, 1, 2, grid).unwrap();
    let k_upper = solve_k_upper(&p).unwrap().value;

    // φ = (K_upper + 1 + ε)·χ_{[-1,1]} - χ_{[-2,2]} with ε = 0.01.
    let c = k_upper + 1.0 + 0.01;
    let mut phi = SymmetricSequence::zero(1);
    phi.set(idx(0), c - 1.0);
    phi.set(idx(1), c - 1.0);
    phi.set(idx(2), -1.0);

    let dec = decompose_dual(&phi, 2, &grid, DEFAULT_EPS_PD)
        .unwrap()
        .expect("φ lies in the dual cone, decomposition must succeed");
    for (n, v) in dec.g.entries() {
        assert!(v >= 0.0, "g({n:?}) = {v} negative");
    }
    assert!(dec.h_certificate.is_certified());
    let sum = dec.g.add(&dec.h).unwrap();
    for k in 0..=2i64 {
        assert_eq!(
            sum.value_at(&idx(k)).to_bits(),
            phi.value_at(&idx(k)).to_bits(),
            "reconstruction differs at index {k}"
        );
    }
    assert_eq!(sum, phi);
    println!("criterion 7 (dual-cone decomposition of φ, bitwise sum): PASS");
}

#[test]
fn criterion_8_certifier_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let grid = TorusGrid::new(1, 256).unwrap();
    let (mut refuted, mut certified, mut inconclusive) = (0usize, 0usize, 0usize);
    for trial in 0..1000 {
        // Half the trials are exact autocorrelations (genuinely PD), half
        // raw random sequences (mostly refutable).
        let h = if trial % 2 == 0 {
            let len = rng.gen_range(1..=6usize);
            let u: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0) + 1e-3).collect();
            autocorrelation_candidate(&u).unwrap()
        } else {
            let radius = rng.gen_range(0..=6usize);
            let mut h = SymmetricSequence::zero(1);
            h.set(idx(0), rng.gen_range(0.0..2.0));
            for k in 1..=radius as i64 {
                h.set(idx(k), rng.gen_range(-1.0..1.0));
            }
            h
        };
        let status = is_positive_definite(&h, &grid, DEFAULT_EPS_PD);
        if status.is_refuted() {
            refuted += 1;
            let witness = fourier_eval(&h, &status.certified.argmin);
            assert!(
                witness < 0.0,
                "trial {trial}: REFUTED but ĥ(witness) = {witness} ≥ 0"
            );
        } else if status.is_certified() {
            certified += 1;
            let order = 2 * h.support_radius() as usize;
            assert!(
                toeplitz_necessary_check(&h, order),
                "trial {trial}: CERTIFIED but Toeplitz section of order {order} fails"
            );
        } else {
            inconclusive += 1;
        }
    }
    assert!(refuted > 0 && certified > 0, "both outcomes must occur");
    println!(
        "criterion 8 (certifier soundness: {refuted} refuted, {certified} certified, \
         {inconclusive} inconclusive): PASS"
    );
}

#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(
        &config_path,
        r#"{
  "command": "revesz",
  "M": [[1]],
  "L": [[1]],
  "r": { "dim": 1, "entries": { "0": 1.0, "1": 1.0 } },
  "window_half_width": 96,
  "G": [1024, 4096],
  "seed": 5
}"#,
    )
    .unwrap();

    let mut reports = Vec::new();
    for run in 0..2 {
        let out_dir = dir.path().join(format!("out{run}"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_conedual"))
            .args(["--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(&out_dir)
            .args(["--seed", "5"])
            .status()
            .unwrap();
        assert!(status.success(), "run {run} exited with {status}");
        let text = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
        let mut report: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(report.get("timing").is_some(), "report lacks timing field");
        report.as_object_mut().unwrap().remove("timing");
        reports.push(serde_json::to_string_pretty(&report).unwrap());

        let csv = std::fs::read_to_string(out_dir.join("bracket.csv")).unwrap();
        reports.push(csv);
    }
    assert_eq!(
        reports[0], reports[2],
        "reports differ outside the timing field"
    );
    assert_eq!(reports[1], reports[3], "CSV tables differ");
    println!("criterion 9 (byte-identical reports modulo timing): PASS");
}
