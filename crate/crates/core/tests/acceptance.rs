//! Acceptance harness: one PASS/FAIL line per primary criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use reachtube::model::{builtin_benchmarks, find_benchmark, Benchmark, InitialSet};
use reachtube::par::Parallelism;
use reachtube::parse_model;
use reachtube::reachtube::{run, validate, RunConfig, RunSummary};

const SAMPLES: usize = 1000;
const BOUNDARY_SAMPLES: usize = 200;
const CENTER_SLACK: f64 = 1e-6;

#[derive(Default)]
struct Ledger {
    failed: usize,
}

impl Ledger {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

struct TableRun {
    bench: Benchmark,
    summary: RunSummary,
    tolerance: f64,
}

fn table_runs() -> Vec<TableRun> {
    [("B", 5.0), ("V", 5.0), ("R", 10.0), ("M", 5.0)]
        .into_iter()
        .map(|(label, tolerance)| {
            let bench = find_benchmark(label).expect("built-in benchmark");
            let summary = run(&bench.system, &bench.run_config(1));
            TableRun { bench, summary, tolerance }
        })
        .collect()
}

fn soundness(ledger: &mut Ledger, runs: &[TableRun]) {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, r) in runs.iter().enumerate() {
        let mut rng = common::rng(1000 + k as u64);
        let pts = validate::sample_initial_set(&r.bench.initial, SAMPLES, BOUNDARY_SAMPLES, &mut rng);
        let rep = validate::check_containment(&r.bench.system, &r.summary, &pts, r.bench.dt / 100.0, Parallelism::Parallel);
        ok &= rep.is_sound() && rep.diverged == 0 && r.summary.completed;
        parts.push(format!("{} {} samples x {} steps, {} violations", r.bench.label, rep.samples, r.summary.steps.len(), rep.violations));
        if let Some(v) = rep.first {
            parts.push(format!("first: sample {} x{} = {} outside [{}, {}] at t = {}", v.sample, v.component + 1, v.value, v.lo, v.hi, v.t));
        }
    }
    parts.push(format!("{:.0?}", start.elapsed()));
    ledger.record("soundness", ok, parts.join("; "));
}

fn center_error(ledger: &mut Ledger, runs: &[TableRun]) {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in runs {
        let ratio = validate::center_error_ratio(&r.bench.system, &r.summary, r.bench.initial.center(), r.bench.dt / 100.0);
        ok &= ratio <= 1.0 + CENTER_SLACK;
        parts.push(format!("{} max ratio {ratio:.4}", r.bench.label));
    }
    ledger.record("center error", ok, parts.join("; "));
}

fn table_volumes(ledger: &mut Ledger, runs: &[TableRun]) {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in runs {
        let reference = r.bench.reference.as_ref().expect("table reference").order1;
        let av = r.summary.average_volume;
        let factor = (av / reference).max(reference / av);
        ok &= r.summary.completed && factor <= r.tolerance;
        parts.push(format!(
            "{} AV {av:.3e} vs {reference:.1e} ({factor:.2}x, limit {}x, completed {})",
            r.bench.label, r.tolerance, r.summary.completed
        ));
    }
    ledger.record("table volumes", ok, parts.join("; "));
}

fn optimality(ledger: &mut Ledger) {
    let r = common::optimality_experiment(50, 50, 23);
    let (lo, hi) = r.lambda_range;
    let ok = r.worst_ratio <= 1.0 + 1e-9 && lo >= 1.0 - 1e-12 && hi <= 1.0 + 1e-6;
    ledger.record(
        "optimal metric",
        ok,
        format!("2500 pairs, worst volume ratio {:.12}, Λ in [{lo:.12}, {hi:.12}]", r.worst_ratio),
    );
}

fn intersection_benefit(ledger: &mut Ledger) {
    let b = find_benchmark("V").expect("built-in benchmark");
    let cfg = b.run_config(1).with_horizon(5.0);
    let on = run(&b.system, &cfg);
    let off = run(&b.system, &cfg.clone().with_intersection(false));
    let window = |s: &RunSummary| {
        let v: Vec<f64> = s.steps.iter().filter(|st| (3.4..=5.0).contains(&st.t)).map(|st| st.vol_box).collect();
        (v.iter().sum::<f64>() / v.len().max(1) as f64, v.len())
    };
    let ((m_on, n_on), (m_off, n_off)) = (window(&on), window(&off));
    let ratio = m_on / m_off;
    let ok = on.completed && off.completed && n_on == n_off && n_on > 0 && ratio < 0.95;
    ledger.record(
        "intersection benefit",
        ok,
        format!("Van der Pol t in [3.4, 5]: mean box {m_on:.3e} vs {m_off:.3e} without intersection, ratio {ratio:.3}"),
    );
}

fn order_monotonicity(ledger: &mut Ledger, runs: &[TableRun]) {
    let b = &runs[0].bench;
    let av1 = runs[0].summary.average_volume;
    let s4 = run(&b.system, &b.run_config(4));
    let av4 = s4.average_volume;
    ledger.record(
        "order monotonicity",
        s4.completed && av4 <= av1 * 1.05,
        format!("Brusselator AV order 4 {av4:.4e} vs order 1 {av1:.4e}"),
    );
}

fn oracles(ledger: &mut Ledger) {
    let rational = common::rational_oracle_violations(10_000, 11);
    let jac = builtin_benchmarks()
        .iter()
        .map(|b| common::jacobian_fd_error(b, 8, 3))
        .fold(0.0f64, f64::max);
    let eigen = common::eigen_bound_violations(10_000, 17);
    let linear = common::linear_analytic_checks();
    let ok = rational == 0 && jac <= 1e-6 && eigen == 0 && linear.is_ok();
    ledger.record(
        "oracle suites",
        ok,
        format!(
            "rational 10000 ops, {rational} violations; Jacobian max rel. error {jac:.2e}; eigen bounds 10000 matrices, {eigen} violations; linear {}",
            match &linear {
                Ok(()) => "ok".to_string(),
                Err(e) => e.clone(),
            }
        ),
    );
}

fn fixed_point(ledger: &mut Ledger) {
    let sys = parse_model("x1' = 0; x2' = 0").expect("zero model");
    let init = InitialSet::new(vec![0.3, -1.2], &[0.05, 0.2]).expect("initial set");
    let s = run(&sys, &RunConfig::new(init, 0.01, 10.0));
    let x0 = &s.steps[0].enclosure;
    let mut worst_delta = 0.0f64;
    let mut drift_ok = true;
    for (i, st) in s.steps.iter().enumerate() {
        worst_delta = worst_delta.max(st.delta);
        for (a, b) in st.enclosure.iter().zip(x0.iter()) {
            let tol = i as f64 * f64::EPSILON * b.mag();
            drift_ok &= (a.lo() - b.lo()).abs() <= tol && (a.hi() - b.hi()).abs() <= tol;
        }
    }
    let ok = s.completed && s.steps_computed == 1001 && worst_delta <= 1.0 + 1e-9 && drift_ok;
    ledger.record(
        "zero field fixed point",
        ok,
        format!("{} steps, max delta {worst_delta}, box drift within one ulp per step: {drift_ok}", s.steps_computed - 1),
    );
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut ledger = Ledger::default();
    let runs = table_runs();
    soundness(&mut ledger, &runs);
    center_error(&mut ledger, &runs);
    table_volumes(&mut ledger, &runs);
    optimality(&mut ledger);
    intersection_benefit(&mut ledger);
    order_monotonicity(&mut ledger, &runs);
    oracles(&mut ledger);
    fixed_point(&mut ledger);
    println!("{} failed, total {:.0?}", ledger.failed, start.elapsed());
    if ledger.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
