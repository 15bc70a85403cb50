//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::Instant;

use common::*;
use fppchaos::experiments::{oracle_checks, run, ExperimentConfig, ExperimentOutput};
use fppchaos::geodesy::{enumerate_all_geodesics, geodesic_intersection, replacement_values, shortest_path};
use fppchaos::influence::edge_profile;
use fppchaos::rng::CounterStream;
use fppchaos::ReplacementEngine;

type Outcome = Result<String, String>;

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text, None).expect("acceptance config")
}

fn execute(text: &str) -> Result<ExperimentOutput, String> {
    run(&config(text)).map_err(|e| e.to_string())
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_check(name: &str, seed: u64) -> Outcome {
    let cfg = config(&format!("experiment = oracle\nseed = {seed}"));
    let checks = oracle_checks(&cfg).map_err(|e| e.to_string())?;
    let c = checks.checks.iter().find(|c| c.check == name).ok_or(format!("no {name} check"))?;
    ensure(c.passed, format!("{} cases, {} failures, worst {:.3e}; {}", c.cases, c.failures, c.worst, c.scope))
}

fn covariance_formula() -> Outcome {
    oracle_check("cov_formula", 1)
}

fn replacement_identity() -> Outcome {
    let mut stream = CounterStream::new(1001, 0);
    let laws = [two_point(), three_point(), uniform(), exponential()];
    let (mut cases, mut failures) = (0, 0);
    while cases < 1000 {
        let law = &laws[cases % laws.len()];
        let side = 3 + (cases / laws.len()) as i64 % 4;
        let region = box_region(side, side + 1);
        let config = random_config(&region, law, &mut stream);
        let (u, v) = (region.origin().clone(), region.target().clone());
        let mut engine = ReplacementEngine::new(&config, &u, &v).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let id = region.edge_ids().nth((stream.next_unit() * region.n_edges() as f64) as usize % region.n_edges()).unwrap();
            let x = law.sample(stream.next_unit());
            let rv = replacement_values(&config, &region.edge_at(id), &u, &v).map_err(|e| e.to_string())?;
            let direct = shortest_path(&config.with_weight(id, x), &u, &v).map_err(|e| e.to_string())?.time;
            let ok = engine.values(id) == rv && ties(direct, rv.passage_time_with(x), config.is_exact());
            failures += usize::from(!ok);
            cases += 1;
        }
    }
    ensure(failures == 0, format!("{cases} (config, edge, x) triples, {failures} mismatches"))
}

fn derivative_profiles() -> Outcome {
    let mut stream = CounterStream::new(1002, 0);
    let laws = [two_point(), three_point(), uniform(), exponential()];
    let (mut profiles, mut points, mut worst, mut worst_balance, mut bound_failures) = (0, 0, 0.0f64, 0.0f64, 0);
    while profiles < 1000 {
        let law = &laws[profiles % laws.len()];
        let region = box_region(4, 4);
        let (u, v) = (region.origin().clone(), region.target().clone());
        let config = random_config(&region, law, &mut stream);
        let mu = law.mean();
        for id in region.edge_ids().take(10) {
            let p = edge_profile(&config, &region.edge_at(id), law).map_err(|e| e.to_string())?;
            let mean = mean_replaced_time(p.a, p.b, law);
            for _ in 0..20 {
                let x = law.sample(stream.next_unit());
                let direct = shortest_path(&config.with_weight(id, x), &u, &v).map_err(|e| e.to_string())?.time - mean;
                let closed = p.derivative(x);
                worst = worst.max((closed - direct).abs());
                let cap = if p.z > law.r() { mu + x } else { 0.0 };
                bound_failures += usize::from(closed < -mu - 1e-12 || closed.abs() > cap + 1e-12);
                points += 1;
            }
            if let Some(atoms) = law.atoms() {
                let balance: f64 = atoms
                    .iter()
                    .map(|(x, q)| q * (shortest_path(&config.with_weight(id, *x), &u, &v).unwrap().time - mean))
                    .sum();
                worst_balance = worst_balance.max(balance.abs());
            } else {
                worst_balance = worst_balance.max((p.h - integrated_cdf(law, law.r(), p.z)).abs());
            }
            profiles += 1;
        }
    }
    ensure(
        worst <= 1e-9 && worst_balance <= 1e-9 && bound_failures == 0,
        format!("{profiles} profiles, {points} points, max |D - recomputed| {worst:.1e}, max |mean| {worst_balance:.1e}, {bound_failures} bound violations"),
    )
}

/// `∫_a^b F(x) dx` by composite Simpson, split where the CDF has a kink.
/// The mean of `H - (Z - x)_+` under a continuous law is `H - ∫_r^Z F`.
fn integrated_cdf(law: &fppchaos::WeightDistribution, a: f64, b: f64) -> f64 {
    let top = law.support_max();
    if top.is_finite() && b > top {
        return integrated_cdf(law, a, top) + (b - top.max(a));
    }
    let n = 2000;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| law.cdf(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (law.cdf(a) + inner + law.cdf(b)) * h / 3.0
}

fn geodesic_intersections() -> Outcome {
    let mut stream = CounterStream::new(1004, 0);
    let boxes = [(3, 3), (3, 4), (4, 4), (4, 5), (5, 5)];
    let laws = [two_point(), three_point(), fppchaos::WeightDistribution::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap(), uniform()];
    let mut mismatches = 0;
    for i in 0..200 {
        let (nx, ny) = boxes[i % boxes.len()];
        let region = box_region(nx, ny);
        assert!(region.n_edges() <= 40);
        let config = random_config(&region, &laws[(i / boxes.len()) % laws.len()], &mut stream);
        let (u, v) = (region.origin().clone(), region.target().clone());
        let all = enumerate_all_geodesics(&config, &u, &v).map_err(|e| e.to_string())?;
        let mut common: Vec<_> = all[0].clone();
        common.sort();
        for g in &all[1..] {
            common.retain(|e| g.contains(e));
        }
        let (_, brute_all, brute_common) = brute_geodesics(&config);
        let pi = geodesic_intersection(&config, &u, &v).map_err(|e| e.to_string())?;
        mismatches += usize::from(pi != common || pi != brute_common || all != brute_all);
    }
    ensure(mismatches == 0, format!("200 instances with at most 40 edges, {mismatches} mismatches"))
}

fn integer_influence_bounds() -> Outcome {
    oracle_check("int_inf", 1)
}

fn lemma_suite() -> Outcome {
    let out = execute("experiment = lemmas\nn_samples = 10000\ndist = uniform:0,1")?;
    let checks = out.summary["checks"].as_array().ok_or("no checks")?;
    let lemma: Vec<_> = checks
        .iter()
        .filter(|c| matches!(c["check"].as_str(), Some("positive_part" | "delta_bd" | "lemma_h")))
        .collect();
    let failures: u64 = lemma.iter().map(|c| c["failures"].as_u64().unwrap_or(u64::MAX)).sum();
    let cases: u64 = lemma.iter().map(|c| c["cases"].as_u64().unwrap_or(0)).sum();
    let laws = lemma.iter().filter(|c| c["check"] == "positive_part").count();
    ensure(
        failures == 0 && laws >= 2 && out.summary["negative_controls_ok"] == true,
        format!("{laws} laws, {cases} checks, {failures} failures, negative controls detected"),
    )
}

fn monotonicity() -> Outcome {
    let q = oracle_check("q_monotone", 1)?;
    let inf = oracle_check("influence_monotone", 1)?;
    let out = execute("experiment = scan\nsizes = 32\nt_grid = 0:1:5\nn_samples = 2000\ncoinfluence = false")?;
    let overlap = out.table.numbers("overlap_per_v").ok_or("no overlap column")?;
    let se = out.table.numbers("overlap_per_v_stderr").ok_or("no stderr column")?;
    let rises = (1..overlap.len())
        .filter(|&k| overlap[k] - overlap[k - 1] > 3.0 * (se[k] * se[k] + se[k - 1] * se[k - 1]).sqrt())
        .count();
    let series: Vec<String> = overlap.iter().zip(&se).map(|(o, s)| format!("{o:.3}±{s:.3}")).collect();
    ensure(rises == 0, format!("Q: {q}; Inf: {inf}; overlap/|v| at |v| = 32: [{}]", series.join(", ")))
}

fn coupling() -> Outcome {
    oracle_check("coupling", 1)
}

fn chaos_trend() -> Outcome {
    let out = execute("experiment = scan\nsizes = 16,32,64\nt_grid = 0.5\nn_samples = 2000\ncoinfluence = false")?;
    let trend = &out.summary["overlap_trends"][0];
    let series: Vec<String> = trend["overlap_per_v"]
        .as_array()
        .ok_or("no trend")?
        .iter()
        .map(|e| format!("{:.4}±{:.4}", e["estimate"].as_f64().unwrap_or(f64::NAN), e["stderr"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    ensure(
        trend["strictly_decreasing"] == true && trend["separated_3se"] == true,
        format!("overlap/|v| at t = 0.5 for |v| = 16, 32, 64: [{}]", series.join(", ")),
    )
}

fn transition() -> Outcome {
    let out = execute("experiment = transition\nsizes = 64\nn_samples = 500")?;
    let s = &out.summary["sizes"][0];
    let corr = s["corr_at_smallest_alpha"].as_f64().unwrap_or(f64::NAN);
    let spread = s["overlap_spread_large_alpha"].as_f64().unwrap_or(f64::INFINITY);
    ensure(
        s["corr_nonincreasing_3se"] == true && corr >= 0.9 && spread <= 4.0,
        format!(
            "|v| = 64: corr nonincreasing {}, corr at alpha = 1/8 {corr:.3}, overlap*alpha/|v| spread over alpha in 2..8 {spread:.2}",
            s["corr_nonincreasing_3se"]
        ),
    )
}

fn valleys() -> Outcome {
    let out = execute("experiment = valleys\nk = 4\nt_grid = 0.3\nsizes = 16,32,64,128\nn_samples = 500")?;
    let s = &out.summary;
    let fmt = |key: &str| -> String {
        s[key]
            .as_array()
            .map(|a| a.iter().map(|e| format!("{:.3}", e["estimate"].as_f64().unwrap_or(f64::NAN))).collect::<Vec<_>>().join(", "))
            .unwrap_or_default()
    };
    let ok = s["O_k_strictly_decreasing"] == true
        && s["O_k_separated_3se"] == true
        && s["dT_k_strictly_decreasing"] == true
        && s["dT_k_separated_3se"] == true;
    ensure(ok, format!("O_k/|v| [{}], dT_k/|v| [{}]", fmt("O_k_per_v"), fmt("dT_k_per_v")))
}

fn reproducibility() -> Outcome {
    let mut outputs = Vec::new();
    for (kind, extra) in [("scan", "sizes = 16\nt_grid = 0,0.5\nn_samples = 200"), ("valleys", "sizes = 16\nk = 2\nn_samples = 100")] {
        let mut per_kind = Vec::new();
        for workers in [1, 4, 8] {
            let out = execute(&format!("experiment = {kind}\n{extra}\nworkers = {workers}"))?;
            per_kind.push((out.table.to_csv_string().map_err(|e| e.to_string())?, out.summary_string()));
        }
        outputs.push((kind, per_kind.windows(2).all(|w| w[0] == w[1])));
    }
    let bad: Vec<&str> = outputs.iter().filter(|(_, same)| !same).map(|(k, _)| *k).collect();
    ensure(bad.is_empty(), format!("scan and valleys CSV and JSON at 1, 4, 8 workers; differing: {bad:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("covariance formula", covariance_formula),
        ("replacement identity", replacement_identity),
        ("derivative profile identity", derivative_profiles),
        ("geodesic intersection", geodesic_intersections),
        ("integer-weight influence bounds", integer_influence_bounds),
        ("lemma suite", lemma_suite),
        ("monotonicity", monotonicity),
        ("coupling identities", coupling),
        ("chaos trend", chaos_trend),
        ("transition scan", transition),
        ("multiple valleys", valleys),
        ("reproducibility", reproducibility),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = format!("AC{:02}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id} {name} PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id} {name} FAIL ({secs:.1}s) {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
