//! Monte Carlo experiments: chaos scans, the transition sweep, multiple
//! valleys and variance scaling.

use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::experiments::config::ExperimentConfig;
use crate::experiments::output::{est, num, ExperimentOutput, Table};
use crate::field::{DynamicalField, Stream};
use crate::geodesy::{geodesic_between, shortest_path_between};
use crate::influence::{default_eps, estimate, uncensored, FieldBatch, Quantity};
use crate::lattice::{EdgeId, Vertex};
use crate::rng::derive_seed;
use crate::stats::{mean_estimate, variance_estimate, Estimate};

fn batch_for(cfg: &ExperimentConfig, target: &Vertex) -> FieldBatch {
    let mut batch = FieldBatch::new(
        cfg.dist.clone(),
        target.clone(),
        derive_seed(cfg.seed, target.l1_norm() as u64),
        cfg.n_samples,
    );
    batch.padding = cfg.padding;
    batch.workers = cfg.workers;
    batch
}

fn scaled(e: Estimate, c: f64) -> Estimate {
    Estimate {
        estimate: e.estimate * c,
        stderr: e.stderr * c.abs(),
    }
}

fn sorted_grid(grid: &[f64]) -> Vec<f64> {
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Strictly decreasing point estimates, plus a `k`-SE gap between the ends.
fn decreasing(series: &[Estimate], k: f64) -> (bool, bool) {
    let strict = series.windows(2).all(|w| w[1].estimate < w[0].estimate);
    let separated = match (series.first(), series.last()) {
        (Some(a), Some(b)) if series.len() > 1 => a.above(b, k),
        _ => false,
    };
    (strict, separated)
}

/// No step up by more than `k` standard errors.
fn nonincreasing_within(series: &[Estimate], k: f64) -> bool {
    series.windows(2).all(|w| w[1].not_above(&w[0], k))
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::MIN, f64::max);
    let min = xs.iter().cloned().fold(f64::MAX, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Correlation, overlap per unit distance and co-influence across sizes and times.
pub fn run_scan(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = sorted_grid(&cfg.t_grid);
    let mut quantities = vec![Quantity::Variance, Quantity::Covariance, Quantity::Correlation, Quantity::Overlap];
    if cfg.coinfluence {
        quantities.push(Quantity::CoInfluence);
    }
    let mut table = Table::new(&[
        "size",
        "t",
        "corr",
        "corr_stderr",
        "overlap_per_v",
        "overlap_per_v_stderr",
        "cov",
        "cov_stderr",
        "coinfluence_sum",
        "coinfluence_sum_stderr",
        "var_T",
        "var_T_stderr",
        "seed",
        "n_samples",
        "censored",
    ]);
    let mut sizes = Vec::new();
    let mut overlap_series: Vec<Vec<Estimate>> = vec![Vec::new(); grid.len()];
    let mut near_one = Vec::new();
    let mut reports = Vec::new();
    for target in cfg.targets() {
        let size = target.l1_norm();
        let batch = batch_for(cfg, &target);
        let report = estimate(&batch, &grid, &quantities)?;
        log::info!("scan |v| = {size}: {} samples, {} censored", report.n_samples, report.censored);
        let scale = report.variance.estimate / size as f64;
        for (k, p) in report.points.iter().enumerate() {
            let overlap = scaled(p.overlap, 1.0 / size as f64);
            overlap_series[k].push(overlap);
            let coinf = p.coinfluence_sum.map(est).unwrap_or_else(|| [String::new(), String::new()]);
            let mut row = vec![size.to_string(), num(p.t)];
            row.extend(est(p.correlation.as_estimate()));
            row.extend(est(overlap));
            row.extend(est(p.covariance));
            row.extend(coinf);
            row.extend(est(report.variance));
            row.extend([batch.seed.to_string(), report.n_samples.to_string(), report.censored.to_string()]);
            table.push(row);
        }
        let below: Vec<&crate::influence::TimePoint> =
            report.points.iter().filter(|p| p.t > 0.0 && p.t < scale).collect();
        near_one.push(json!({
            "size": size,
            "transition_scale": scale,
            "times_below": below.iter().map(|p| p.t).collect::<Vec<_>>(),
            "corr_near_one": below.iter().all(|p| p.correlation.estimate >= 0.9),
        }));
        sizes.push(size);
        reports.push(report.to_json());
    }
    let trends: Vec<Value> = grid
        .iter()
        .zip(&overlap_series)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, series)| {
            let (strict, separated) = decreasing(series, 3.0);
            json!({
                "t": t,
                "overlap_per_v": series,
                "strictly_decreasing": strict,
                "separated_3se": separated,
            })
        })
        .collect();
    let summary = json!({
        "experiment": "scan",
        "config": config_json(cfg),
        "sizes": sizes,
        "overlap_trends": trends,
        "stability_below_transition": near_one,
        "reports": reports,
    });
    Ok(ExperimentOutput {
        table,
        summary,
        failed: false,
        plot: Some(("t".into(), "corr".into(), "corr_stderr".into())),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionSize {
    pub size: i64,
    pub var_t: Estimate,
    pub alphas: Vec<f64>,
    pub times: Vec<f64>,
    pub corr: Vec<Estimate>,
    pub overlap_alpha_per_v: Vec<Estimate>,
    /// `max_alpha (1 - corr) / alpha`.
    pub fitted_c_corr: f64,
    /// `max_alpha overlap * alpha / |v|`.
    pub fitted_c_overlap: f64,
    pub corr_nonincreasing_3se: bool,
    pub corr_at_smallest_alpha: f64,
    /// `max / min` of `overlap * alpha / |v|` over `alpha >= 2`.
    pub overlap_spread_large_alpha: f64,
}

/// Correlation and overlap at `t = alpha * Var(T) / |v|`.
pub fn run_transition(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    if alphas.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::Config("alphas must be positive".into()));
    }
    let mut table = Table::new(&[
        "size",
        "alpha",
        "t",
        "corr",
        "corr_stderr",
        "overlap_per_v",
        "overlap_per_v_stderr",
        "overlap_alpha_per_v",
        "overlap_alpha_per_v_stderr",
        "seed",
        "n_samples",
        "censored",
    ]);
    let mut per_size = Vec::new();
    for target in cfg.targets() {
        let size = target.l1_norm();
        let batch = batch_for(cfg, &target);
        let first = estimate(&batch, &[0.0], &[Quantity::Variance])?;
        let var = first.variance;
        let times: Vec<f64> = alphas.iter().map(|a| (a * var.estimate / size as f64).min(1.0)).collect();
        let mut grid = vec![0.0];
        grid.extend(&times);
        let report = estimate(&batch, &grid, &[Quantity::Covariance, Quantity::Correlation, Quantity::Overlap])?;
        let mut corr = Vec::new();
        let mut overlap_alpha = Vec::new();
        for (k, p) in report.points.iter().enumerate() {
            let alpha = if k == 0 { 0.0 } else { alphas[k - 1] };
            let overlap = scaled(p.overlap, 1.0 / size as f64);
            let weighted = scaled(overlap, alpha);
            if k > 0 {
                corr.push(p.correlation.as_estimate());
                overlap_alpha.push(weighted);
            }
            let mut row = vec![size.to_string(), num(alpha), num(p.t)];
            row.extend(est(p.correlation.as_estimate()));
            row.extend(est(overlap));
            row.extend(est(weighted));
            row.extend([batch.seed.to_string(), report.n_samples.to_string(), report.censored.to_string()]);
            table.push(row);
        }
        let large: Vec<f64> = alphas
            .iter()
            .zip(&overlap_alpha)
            .filter(|(a, _)| **a >= 2.0)
            .map(|(_, e)| e.estimate)
            .collect();
        per_size.push(TransitionSize {
            size,
            var_t: var,
            fitted_c_corr: alphas.iter().zip(&corr).map(|(a, c)| (1.0 - c.estimate) / a).fold(f64::MIN, f64::max),
            fitted_c_overlap: overlap_alpha.iter().map(|e| e.estimate).fold(f64::MIN, f64::max),
            corr_nonincreasing_3se: nonincreasing_within(&corr, 3.0),
            corr_at_smallest_alpha: corr.first().map_or(f64::NAN, |c| c.estimate),
            overlap_spread_large_alpha: spread(&large),
            alphas: alphas.clone(),
            times,
            corr,
            overlap_alpha_per_v: overlap_alpha,
        });
    }
    let ca: Vec<f64> = per_size.iter().map(|s| s.fitted_c_corr).collect();
    let cb: Vec<f64> = per_size.iter().map(|s| s.fitted_c_overlap).collect();
    let summary = json!({
        "experiment": "transition",
        "config": config_json(cfg),
        "sizes": per_size,
        "fitted_c_corr_stable_factor_2": spread(&ca) <= 2.0,
        "fitted_c_overlap_stable_factor_2": spread(&cb) <= 2.0,
    });
    Ok(ExperimentOutput {
        table,
        summary,
        failed: false,
        plot: Some(("alpha".into(), "corr".into(), "corr_stderr".into())),
    })
}

/// One replicate of the valley experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ValleySample {
    pub max_overlap: usize,
    pub max_excess: f64,
    /// Edge overlaps among the original geodesic (index 0) and the `k` replica geodesics.
    pub overlaps: Vec<Vec<usize>>,
}

fn sorted(mut path: Vec<EdgeId>) -> Vec<EdgeId> {
    path.sort_unstable();
    path
}

/// Geodesics of `k` independent replicas at time `t`, compared with the
/// original geodesic: pairwise overlaps and excess original-weight times.
pub fn valley_replicate(field: &DynamicalField, k: usize, t: f64, censor: bool) -> Result<Option<ValleySample>> {
    if k > field.replica_count() {
        return Err(Error::ReplicaOutOfRange {
            index: k,
            count: field.replica_count(),
        });
    }
    let region = field.region();
    let (s, v) = (region.origin_index(), region.target_index());
    let tracks: Vec<(Stream, Stream)> = (1..=k).map(|i| (Stream::ReplicaOmega(i), Stream::ReplicaClock(i))).collect();
    let real = field.realize(&tracks);
    let base_config = real.slice(0, 0.0);
    let base = shortest_path_between(&base_config, s, v)?;
    if censor && base.touched_boundary {
        return Ok(None);
    }
    let mut paths = vec![sorted(base.path.clone())];
    let mut max_excess: f64 = 0.0;
    for i in 0..k {
        let sp = shortest_path_between(&real.slice(i, t), s, v)?;
        if censor && sp.touched_boundary {
            return Ok(None);
        }
        // The original weights of any path are at least T; clamp summation-order rounding.
        max_excess = max_excess.max(base_config.path_weight(&sp.path) - base.time);
        paths.push(sorted(sp.path));
    }
    let n = paths.len();
    let mut overlaps = vec![vec![0; n]; n];
    let mut max_overlap = 0;
    for i in 0..n {
        for j in 0..n {
            overlaps[i][j] = crate::influence::sorted_overlap(&paths[i], &paths[j]);
            if i < j {
                max_overlap = max_overlap.max(overlaps[i][j]);
            }
        }
    }
    Ok(Some(ValleySample {
        max_overlap,
        max_excess,
        overlaps,
    }))
}

/// The valley schedule with proxy constants `c`, `c'` in place of the unknown ones.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValleySchedule {
    pub size: i64,
    pub eps: f64,
    pub t: f64,
    pub psi: f64,
    pub k_star: f64,
    pub k: i64,
    pub alpha: f64,
    pub beta: f64,
}

/// `eps` is the smallest value with `F(r+eps)^(1/2d) * c * sqrt(log|v|) >= 1`;
/// then `t = F(r+eps)^(1/2d)`, `psi = |v|/(c t log|v|) + c' |v| F(r+eps)^(1/d) / t`,
/// `k* = (|v|/psi)^(1/4) - 1`, `k = floor(min(t^(-1/2), k*))`,
/// `alpha = |v|^(3/4) psi^(1/4)` and `beta = t^(1/4) |v|`.
pub fn valley_schedule(dist: &WeightDistribution, d: usize, size: i64, c: f64, c_prime: f64) -> Option<ValleySchedule> {
    let n = size as f64;
    let log = n.ln();
    if !(log > 0.0) || !(c > 0.0) {
        return None;
    }
    let level = (c * log.sqrt()).powi(-2 * d as i32).min(1.0 - 1e-12);
    let eps = dist.sample(level) - dist.r();
    let f = dist.cdf(dist.r() + eps);
    let t = f.powf(1.0 / (2 * d) as f64);
    let psi = n / (c * t * log) + c_prime * n * f.powf(1.0 / d as f64) / t;
    let k_star = (n / psi).powf(0.25) - 1.0;
    Some(ValleySchedule {
        size,
        eps,
        t,
        psi,
        k_star,
        k: t.powf(-0.5).min(k_star).floor().max(0.0) as i64,
        alpha: n.powf(0.75) * psi.powf(0.25),
        beta: t.powf(0.25) * n,
    })
}

/// Overlap and time excess of `k` replica geodesics at time `t`.
pub fn run_valleys(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let k = cfg.k;
    if k == 0 {
        return Err(Error::Config("valleys needs k >= 1".into()));
    }
    let &[t] = cfg.t_grid.as_slice() else {
        return Err(Error::Config(format!("valleys takes a single time, got {:?}", cfg.t_grid)));
    };
    let mut table = Table::new(&[
        "size",
        "k",
        "t",
        "O_k",
        "O_k_stderr",
        "O_k_per_v",
        "O_k_per_v_stderr",
        "dT_k",
        "dT_k_stderr",
        "dT_k_per_v",
        "dT_k_per_v_stderr",
        "seed",
        "n_samples",
        "censored",
    ]);
    let mut o_series = Vec::new();
    let mut dt_series = Vec::new();
    let mut matrices = Vec::new();
    let mut schedule = Vec::new();
    for target in cfg.targets() {
        let size = target.l1_norm();
        let batch = batch_for(cfg, &target);
        let results: Vec<Option<ValleySample>> = batch
            .map_replicates(|j| batch.with_retries(j, k, |field| valley_replicate(field, k, t, batch.censors())))?
            .into_iter()
            .collect::<Result<_>>()?;
        let (samples, censored) = uncensored(results)?;
        let o: Vec<f64> = samples.iter().map(|s| s.max_overlap as f64).collect();
        let dt: Vec<f64> = samples.iter().map(|s| s.max_excess).collect();
        let (o, dt) = (mean_estimate(&o), mean_estimate(&dt));
        let inv = 1.0 / size as f64;
        let mut row = vec![size.to_string(), k.to_string(), num(t)];
        row.extend(est(o));
        row.extend(est(scaled(o, inv)));
        row.extend(est(dt));
        row.extend(est(scaled(dt, inv)));
        row.extend([batch.seed.to_string(), samples.len().to_string(), censored.to_string()]);
        table.push(row);
        o_series.push(scaled(o, inv));
        dt_series.push(scaled(dt, inv));
        let n = k + 1;
        let mean_matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| samples.iter().map(|s| s.overlaps[i][j] as f64).sum::<f64>() / samples.len() as f64)
                    .collect()
            })
            .collect();
        matrices.push(json!({"size": size, "mean_overlap_matrix": mean_matrix}));
        schedule.push(valley_schedule(&cfg.dist, cfg.d, size, cfg.proxy_c, cfg.proxy_c_prime));
    }
    let (o_strict, o_sep) = decreasing(&o_series, 3.0);
    let (dt_strict, dt_sep) = decreasing(&dt_series, 3.0);
    let summary = json!({
        "experiment": "valleys",
        "config": config_json(cfg),
        "k": k,
        "t": t,
        "O_k_per_v": o_series,
        "dT_k_per_v": dt_series,
        "O_k_strictly_decreasing": o_strict,
        "O_k_separated_3se": o_sep,
        "dT_k_strictly_decreasing": dt_strict,
        "dT_k_separated_3se": dt_sep,
        "overlap_matrices": matrices,
        "schedule": schedule,
    });
    Ok(ExperimentOutput {
        table,
        summary,
        failed: false,
        plot: Some(("size".into(), "O_k_per_v".into(), "O_k_per_v_stderr".into())),
    })
}

/// Variance of the passage time and low-weight edge counts along the geodesic.
pub fn run_var_scaling(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let targets = cfg.targets();
    if targets.len() < 3 {
        return Err(Error::Config(format!("var-scaling needs at least 3 sizes, got {}", targets.len())));
    }
    let dist = &cfg.dist;
    let eps = cfg.eps.or_else(|| default_eps(dist));
    let threshold = eps.map(|e| dist.r() + e);
    let low_mass = eps.map(|e| dist.cdf(dist.r() + e));
    let mut table = Table::new(&[
        "size",
        "var_T",
        "var_T_stderr",
        "var_log_per_v",
        "var_log_per_v_stderr",
        "var_per_v",
        "var_per_v_stderr",
        "low_weight_ratio",
        "low_weight_ratio_stderr",
        "mean_T",
        "seed",
        "n_samples",
        "censored",
    ]);
    let mut var_per_v = Vec::new();
    let mut low_ratios = Vec::new();
    let mut variances = Vec::new();
    for target in targets {
        let size = target.l1_norm();
        let batch = batch_for(cfg, &target);
        let results: Vec<Option<(f64, f64)>> = batch
            .map_replicates(|j| {
                batch.with_retries(j, 0, |field| {
                    let region = field.region();
                    let config = field.realize_main().slice(0, 0.0);
                    let g = geodesic_between(&config, region.origin_index(), region.target_index())?;
                    if batch.censors() && g.touched_boundary {
                        return Ok(None);
                    }
                    let low = threshold.map_or(0, |th| g.witness_path.iter().filter(|&&id| config.weight(id) <= th).count());
                    Ok(Some((g.time, low as f64)))
                })
            })?
            .into_iter()
            .collect::<Result<_>>()?;
        let (samples, censored) = uncensored(results)?;
        let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let var = variance_estimate(&times);
        let n = size as f64;
        let low_ratio = match low_mass {
            Some(f) if f > 0.0 => {
                let counts: Vec<f64> = samples.iter().map(|s| s.1).collect();
                scaled(mean_estimate(&counts), 1.0 / (n * f.powf(1.0 / cfg.d as f64)))
            }
            _ => Estimate::exact(f64::NAN),
        };
        let mut row = vec![size.to_string()];
        row.extend(est(var));
        row.extend(est(scaled(var, n.ln() / n)));
        row.extend(est(scaled(var, 1.0 / n)));
        row.extend(est(low_ratio));
        row.push(num(crate::stats::mean(&times)));
        row.extend([batch.seed.to_string(), samples.len().to_string(), censored.to_string()]);
        table.push(row);
        var_per_v.push(scaled(var, 1.0 / n));
        low_ratios.push(low_ratio.estimate);
        variances.push(var.estimate);
    }
    let summary = json!({
        "experiment": "var-scaling",
        "config": config_json(cfg),
        "eps": eps,
        "var_per_v": var_per_v,
        "var_per_v_nonincreasing_3se": nonincreasing_within(&var_per_v, 3.0),
        "low_weight_ratio": low_ratios,
        "low_weight_ratio_spread": spread(&low_ratios),
        "low_weight_ratio_stable_factor_4": spread(&low_ratios) <= 4.0,
        "zero_variance": variances.iter().all(|v| *v == 0.0),
    });
    Ok(ExperimentOutput {
        table,
        summary,
        failed: false,
        plot: Some(("size".into(), "var_per_v".into(), "var_per_v_stderr".into())),
    })
}

pub(crate) fn config_json(cfg: &ExperimentConfig) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serialises");
    if let Value::Object(map) = &mut v {
        map.insert("dist".into(), Value::String(cfg.dist.to_string()));
        map.insert("workers".into(), Value::Null);
        map.insert("out".into(), Value::Null);
        for (k, val) in cfg.metadata() {
            map.entry(k).or_insert(Value::String(val));
        }
    }
    v
}

