//! Monte Carlo estimators over independent field realisations.
//!
//! Replicate `j` uses the seed `derive_seed(seed, j)`. One realisation serves
//! every time on the grid, so differences across times share their noise.
//! A replicate whose geodesic touches the box boundary is rerun with doubled
//! padding, at most twice, and otherwise counted as censored.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::WeightDistribution;
use crate::error::{Error, Result};
use crate::field::{DynamicalField, WeightConfig};
use crate::geodesy::{geodesic_between, GeodesicResult, ReplacementEngine};
use crate::influence::profile::{co_influence_term, EdgeProfile};
use crate::lattice::{EdgeId, Region, Vertex};
use crate::rng::derive_seed;
use crate::stats::{correlation_estimate, covariance_estimate, mean_estimate, variance_estimate, CorrelationEstimate, Estimate};

/// Censored fraction above which an estimate is refused.
pub const CENSORING_BUDGET: f64 = 0.01;

/// Padding doublings tried before a replicate is declared censored.
pub const PADDING_RETRIES: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Quantity {
    Variance,
    Covariance,
    Correlation,
    Overlap,
    CoInfluence,
}

/// What to simulate: the law, the target vertex and the replicate budget.
#[derive(Clone, Debug)]
pub struct FieldBatch {
    pub dist: Arc<WeightDistribution>,
    pub target: Vertex,
    /// `None` selects the default padding.
    pub padding: Option<i64>,
    /// A fixed box used instead of the padded one. Boundary touches are then
    /// expected and never censor a replicate.
    pub region: Option<Arc<Region>>,
    pub seed: u64,
    pub n_samples: usize,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
}

impl FieldBatch {
    pub fn new(dist: WeightDistribution, target: Vertex, seed: u64, n_samples: usize) -> Self {
        FieldBatch {
            dist: Arc::new(dist),
            target,
            padding: None,
            region: None,
            seed,
            n_samples,
            workers: 0,
        }
    }

    /// Runs `job` for every replicate index on the configured pool, returning results in index order.
    pub fn map_replicates<T: Send>(&self, job: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
        Ok(pool.install(|| (0..self.n_samples).into_par_iter().map(&job).collect()))
    }

    /// Whether boundary touches censor replicates.
    pub fn censors(&self) -> bool {
        self.region.is_none()
    }

    /// The field of replicate `j` on its first-attempt region.
    pub fn field(&self, j: usize, replicas: usize) -> Result<DynamicalField> {
        let region = match &self.region {
            Some(r) => r.clone(),
            None => Arc::new(Region::around(&self.target, self.padding)?),
        };
        Ok(DynamicalField::shared(derive_seed(self.seed, j as u64), self.dist.clone(), region, replicas))
    }

    /// Runs `attempt` on the replicate's field, doubling the padding while it
    /// reports a boundary touch. `None` means censored. `attempt` should
    /// ignore boundary touches when [`FieldBatch::censors`] is false.
    pub fn with_retries<T>(
        &self,
        j: usize,
        replicas: usize,
        mut attempt: impl FnMut(&DynamicalField) -> Result<Option<T>>,
    ) -> Result<Option<T>> {
        let mut field = self.field(j, replicas)?;
        if self.region.is_some() {
            return attempt(&field);
        }
        for retry in 0..=PADDING_RETRIES {
            if let Some(out) = attempt(&field)? {
                return Ok(Some(out));
            }
            if retry < PADDING_RETRIES {
                let region = field.region().scaled_padding(2)?;
                field = DynamicalField::shared(field.seed(), self.dist.clone(), Arc::new(region), replicas);
            }
        }
        Ok(None)
    }
}

/// Raw per-replicate measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateSample {
    pub time0: f64,
    pub pi0_len: usize,
    pub witness_len: usize,
    pub times: Vec<f64>,
    pub overlaps: Vec<usize>,
    pub coinfluence: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimePoint {
    pub t: f64,
    pub covariance: Estimate,
    pub correlation: CorrelationEstimate,
    pub overlap: Estimate,
    /// `E[(T_0 - T_t)^2]`.
    pub mean_sq_increment: Estimate,
    pub coinfluence_sum: Option<Estimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorReport {
    pub seed: u64,
    pub n_requested: usize,
    pub n_samples: usize,
    pub censored: usize,
    pub quantities: Vec<Quantity>,
    pub mean_time: Estimate,
    pub variance: Estimate,
    pub mean_pi_len: Estimate,
    pub mean_witness_len: Estimate,
    pub points: Vec<TimePoint>,
}

pub fn sorted_overlap(a: &[EdgeId], b: &[EdgeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// `Σ_e ∫ D_0 D_t dF` over edges whose profiles are nonzero in both slices.
pub fn coinfluence_sum(config0: &WeightConfig, config_t: &WeightConfig, dist: &WeightDistribution) -> Result<f64> {
    let region = config0.region();
    let (s, t) = (region.origin_index(), region.target_index());
    let mut engine0 = ReplacementEngine::between(config0, s, t);
    let mut engine_t = ReplacementEngine::between(config_t, s, t);
    let c0 = engine0.candidates(dist.r());
    let ct = engine_t.candidates(dist.r());
    let mut total = 0.0;
    let mut k = 0;
    for id in c0 {
        while k < ct.len() && ct[k] < id {
            k += 1;
        }
        if k == ct.len() || ct[k] != id {
            continue;
        }
        let p0 = EdgeProfile::from_replacement(engine0.values(id), dist)?;
        let pt = EdgeProfile::from_replacement(engine_t.values(id), dist)?;
        total += co_influence_term(&p0, &pt, dist);
    }
    Ok(total)
}

/// The same sum with profiles recomputed from scratch for every edge of the region.
pub fn coinfluence_sum_naive(config0: &WeightConfig, config_t: &WeightConfig, dist: &WeightDistribution) -> Result<f64> {
    let region = config0.region();
    let mut total = 0.0;
    for id in region.edge_ids() {
        let e = region.edge_at(id);
        let p0 = crate::influence::edge_profile(config0, &e, dist)?;
        let pt = crate::influence::edge_profile(config_t, &e, dist)?;
        total += co_influence_term(&p0, &pt, dist);
    }
    Ok(total)
}

fn simulate(field: &DynamicalField, t_grid: &[f64], coinfluence: bool, censor: bool) -> Result<Option<ReplicateSample>> {
    let region = field.region();
    let (s, v) = (region.origin_index(), region.target_index());
    let real = field.realize_main();
    let config0 = real.slice(0, 0.0);
    let g0 = geodesic_between(&config0, s, v)?;
    if censor && g0.touched_boundary {
        return Ok(None);
    }
    let mut sample = ReplicateSample {
        time0: g0.time,
        pi0_len: g0.pi.len(),
        witness_len: g0.witness_path.len(),
        times: Vec::with_capacity(t_grid.len()),
        overlaps: Vec::with_capacity(t_grid.len()),
        coinfluence: Vec::new(),
    };
    for &t in t_grid {
        let config_t = real.slice(0, t);
        let gt: GeodesicResult = if config_t == config0 { g0.clone() } else { geodesic_between(&config_t, s, v)? };
        if censor && gt.touched_boundary {
            return Ok(None);
        }
        sample.times.push(gt.time);
        sample.overlaps.push(sorted_overlap(&g0.pi, &gt.pi));
        if coinfluence {
            sample.coinfluence.push(coinfluence_sum(&config0, &config_t, field.dist())?);
        }
    }
    Ok(Some(sample))
}

pub fn validate_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::EmptyTimeGrid);
    }
    if let Some(&bad) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidTime(bad));
    }
    Ok(())
}

/// Checks the censoring budget and returns the uncensored samples in order.
pub fn uncensored<T>(results: Vec<Option<T>>) -> Result<(Vec<T>, usize)> {
    let total = results.len();
    let kept: Vec<T> = results.into_iter().flatten().collect();
    let censored = total - kept.len();
    if kept.is_empty() {
        return Err(Error::AllCensored);
    }
    let fraction = censored as f64 / total as f64;
    if fraction > CENSORING_BUDGET {
        return Err(Error::CensoringBudget {
            fraction,
            censored,
            total,
        });
    }
    Ok((kept, censored))
}

/// Raw replicate samples; `None` entries are censored.
pub fn simulate_batch(batch: &FieldBatch, t_grid: &[f64], coinfluence: bool) -> Result<Vec<Option<ReplicateSample>>> {
    validate_grid(t_grid)?;
    if batch.n_samples < 2 {
        return Err(Error::TooFewSamples(batch.n_samples));
    }
    batch
        .map_replicates(|j| batch.with_retries(j, 0, |field| simulate(field, t_grid, coinfluence, batch.censors())))?
        .into_iter()
        .collect()
}

pub fn estimate(batch: &FieldBatch, t_grid: &[f64], quantities: &[Quantity]) -> Result<EstimatorReport> {
    let coinfluence = quantities.contains(&Quantity::CoInfluence);
    let results = simulate_batch(batch, t_grid, coinfluence)?;
    let (samples, censored) = uncensored(results)?;
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    let time0: Vec<f64> = samples.iter().map(|s| s.time0).collect();
    let column = |f: &dyn Fn(&ReplicateSample) -> f64| -> Vec<f64> { samples.iter().map(f).collect() };
    let points = t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let times = column(&|s| s.times[k]);
            let increments: Vec<f64> = time0.iter().zip(&times).map(|(a, b)| (a - b) * (a - b)).collect();
            TimePoint {
                t,
                covariance: covariance_estimate(&time0, &times),
                correlation: correlation_estimate(&time0, &times),
                overlap: mean_estimate(&column(&|s| s.overlaps[k] as f64)),
                mean_sq_increment: mean_estimate(&increments),
                coinfluence_sum: coinfluence.then(|| mean_estimate(&column(&|s| s.coinfluence[k]))),
            }
        })
        .collect();
    Ok(EstimatorReport {
        seed: batch.seed,
        n_requested: batch.n_samples,
        n_samples: samples.len(),
        censored,
        quantities: quantities.to_vec(),
        mean_time: mean_estimate(&time0),
        variance: variance_estimate(&time0),
        mean_pi_len: mean_estimate(&column(&|s| s.pi0_len as f64)),
        mean_witness_len: mean_estimate(&column(&|s| s.witness_len as f64)),
        points,
    })
}

impl EstimatorReport {
    fn rows(&self) -> Vec<(&'static str, f64, Estimate)> {
        let mut rows = vec![("mean_T", 0.0, self.mean_time), ("pi_len", 0.0, self.mean_pi_len)];
        if self.quantities.contains(&Quantity::Variance) {
            rows.push(("var_T", 0.0, self.variance));
        }
        for p in &self.points {
            if self.quantities.contains(&Quantity::Covariance) {
                rows.push(("cov_T0_Tt", p.t, p.covariance));
                rows.push(("mean_sq_increment", p.t, p.mean_sq_increment));
            }
            if self.quantities.contains(&Quantity::Correlation) {
                rows.push(("corr", p.t, p.correlation.as_estimate()));
            }
            if self.quantities.contains(&Quantity::Overlap) {
                rows.push(("overlap", p.t, p.overlap));
            }
            if let Some(c) = p.coinfluence_sum {
                rows.push(("coinfluence_sum", p.t, c));
            }
        }
        rows
    }

    /// `{seed, n_samples, censored, quantities: {name: [{t, estimate, stderr, n}]}}`.
    pub fn to_json(&self) -> Value {
        let mut quantities = serde_json::Map::new();
        for (name, t, e) in self.rows() {
            let entry = quantities.entry(name).or_insert_with(|| Value::Array(Vec::new()));
            if let Value::Array(list) = entry {
                list.push(json!({"t": t, "estimate": e.estimate, "stderr": e.stderr, "n": self.n_samples}));
            }
        }
        if self.quantities.contains(&Quantity::Correlation) {
            let raw: Vec<Value> = self.points.iter().map(|p| json!({"t": p.t, "raw": p.correlation.raw})).collect();
            quantities.insert("corr_raw".into(), Value::Array(raw));
        }
        json!({
            "seed": self.seed,
            "n_requested": self.n_requested,
            "n_samples": self.n_samples,
            "censored": self.censored,
            "quantities": quantities,
        })
    }

    /// CSV with columns `quantity,t,estimate,stderr,n_samples,censored`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["quantity", "t", "estimate", "stderr", "n_samples", "censored"])?;
        for (name, t, e) in self.rows() {
            w.write_record([
                name.to_string(),
                t.to_string(),
                e.estimate.to_string(),
                e.stderr.to_string(),
                self.n_samples.to_string(),
                self.censored.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(n: usize) -> FieldBatch {
        let mut b = FieldBatch::new(WeightDistribution::uniform(0.0, 1.0).unwrap(), Vertex::on_axis(2, 8), 42, n);
        b.workers = 2;
        b
    }

    #[test]
    fn time_zero_is_trivial() {
        let report = estimate(&batch(40), &[0.0], &[Quantity::Overlap, Quantity::Correlation]).unwrap();
        let p = &report.points[0];
        assert_eq!(p.correlation.estimate, 1.0);
        assert_eq!(p.overlap.estimate, report.mean_pi_len.estimate);
        assert_eq!(p.mean_sq_increment.estimate, 0.0);
        assert_eq!(report.censored, 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(estimate(&batch(10), &[], &[]), Err(Error::EmptyTimeGrid)));
        assert!(matches!(estimate(&batch(10), &[1.5], &[]), Err(Error::InvalidTime(_))));
        assert!(matches!(estimate(&batch(1), &[0.5], &[]), Err(Error::TooFewSamples(1))));
    }

    #[test]
    fn engine_sum_matches_naive_sum() {
        let b = batch(2);
        let field = b.field(0, 0).unwrap();
        let real = field.realize_main();
        let (c0, ct) = (real.slice(0, 0.0), real.slice(0, 0.4));
        let fast = coinfluence_sum(&c0, &ct, field.dist()).unwrap();
        let slow = coinfluence_sum_naive(&c0, &ct, field.dist()).unwrap();
        assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0), "{fast} vs {slow}");
    }

    #[test]
    fn overlap_counts() {
        let a = [EdgeId(1), EdgeId(4), EdgeId(7)];
        let b = [EdgeId(2), EdgeId(4), EdgeId(7), EdgeId(9)];
        assert_eq!(sorted_overlap(&a, &b), 2);
    }

    #[test]
    fn serialisations_agree_on_rows() {
        let all = [Quantity::Variance, Quantity::Covariance, Quantity::Correlation, Quantity::Overlap];
        let report = estimate(&batch(20), &[0.0, 0.5], &all).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("quantity,t,estimate,stderr,n_samples,censored\n"));
        let json = report.to_json();
        assert_eq!(json["quantities"]["overlap"].as_array().unwrap().len(), 2);
        assert_eq!(text.lines().count() - 1, report.rows().len());
    }
}
