//! Deterministic inequalities that every pair of coupled edge profiles obeys.
//!
//! * `positive_part`: `∫ D_0 D_t dF >= ∫ (D_0)_- (D_t)_- dF`.
//! * `delta_bd`: when `F(r + eps) <= 1/2`, `Z >= r + eps` forces `Y >= r + eps/2`.
//! * `lemma_h`: when `gamma` lies in `(r, r + 1/2)` with `F(gamma) <= 1/2`,
//!   `Z <= gamma` forces `H <= F(Y)`.
//!
//! Each check reports a signed slack; a negative slack beyond rounding is a
//! failure.

use std::fmt;

use serde::Serialize;

use crate::distributions::WeightDistribution;
use crate::influence::profile::{co_influence_term, negative_part_term, EdgeProfile};

/// Absolute slack tolerated as rounding, scaled by the magnitude of the compared values.
pub const SLACK_TOLERANCE: f64 = 1e-12;

/// Number of probe points used to pick the default `eps`.
pub const EPS_GRID: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaId {
    #[serde(rename = "positive_part")]
    PositivePart,
    #[serde(rename = "delta_bd")]
    DeltaBound,
    #[serde(rename = "lemma_h")]
    FlatHeight,
}

impl LemmaId {
    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::PositivePart => "positive_part",
            LemmaId::DeltaBound => "delta_bd",
            LemmaId::FlatHeight => "lemma_h",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub id: LemmaId,
    pub outcome: Outcome,
    pub slack: f64,
}

impl LemmaCheck {
    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }

    fn graded(id: LemmaId, slack: f64, scale: f64) -> Self {
        let outcome = if slack >= -SLACK_TOLERANCE * (1.0 + scale) {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        LemmaCheck { id, outcome, slack }
    }

    fn skipped(id: LemmaId, reason: String) -> Self {
        LemmaCheck {
            id,
            outcome: Outcome::Skipped(reason),
            slack: f64::NAN,
        }
    }
}

/// The largest `eps` on a 64-point grid over `(0, F^{-1}(0.99) - r]` with
/// `F(r + eps) <= 1/2`.
pub fn default_eps(dist: &WeightDistribution) -> Option<f64> {
    let r = dist.r();
    let span = dist.sample(0.99) - r;
    if span <= 0.0 {
        return None;
    }
    (1..=EPS_GRID)
        .rev()
        .map(|j| j as f64 / EPS_GRID as f64 * span)
        .find(|&eps| dist.cdf(r + eps) <= 0.5)
}

/// `min(r + 0.49, r + eps)`.
pub fn default_gamma(dist: &WeightDistribution, eps: f64) -> f64 {
    dist.r() + eps.min(0.49)
}

pub type TermFn = fn(&EdgeProfile, &EdgeProfile, &WeightDistribution) -> f64;

pub fn check_lemma_suite(
    p0: &EdgeProfile,
    pt: &EdgeProfile,
    dist: &WeightDistribution,
    eps: f64,
    gamma: f64,
) -> Vec<LemmaCheck> {
    check_lemma_suite_with(co_influence_term, p0, pt, dist, eps, gamma)
}

/// As [`check_lemma_suite`], with the co-influence integrand supplied by the caller.
pub fn check_lemma_suite_with(
    term: TermFn,
    p0: &EdgeProfile,
    pt: &EdgeProfile,
    dist: &WeightDistribution,
    eps: f64,
    gamma: f64,
) -> Vec<LemmaCheck> {
    let r = dist.r();
    let mut out = Vec::with_capacity(3);

    let value = term(p0, pt, dist);
    let negative = negative_part_term(p0, pt, dist);
    out.push(LemmaCheck::graded(LemmaId::PositivePart, value - negative, value.abs() + negative.abs()));

    let f_eps = dist.cdf(r + eps);
    out.push(if !(eps > 0.0) || f_eps > 0.5 {
        LemmaCheck::skipped(LemmaId::DeltaBound, format!("needs eps > 0 and F(r + eps) <= 1/2; eps = {eps}, F = {f_eps}"))
    } else {
        let slack = [p0, pt]
            .iter()
            .filter(|p| p.z >= r + eps)
            .map(|p| p.y - (r + eps / 2.0))
            .fold(f64::INFINITY, f64::min);
        if slack.is_infinite() {
            LemmaCheck::graded(LemmaId::DeltaBound, 0.0, 0.0)
        } else {
            LemmaCheck::graded(LemmaId::DeltaBound, slack, r.abs() + eps)
        }
    });

    let f_gamma = dist.cdf(gamma);
    out.push(if !(gamma > r && gamma < r + 0.5) || f_gamma > 0.5 {
        LemmaCheck::skipped(
            LemmaId::FlatHeight,
            format!("needs r < gamma < r + 1/2 and F(gamma) <= 1/2; gamma = {gamma}, F = {f_gamma}"),
        )
    } else {
        let slack = [p0, pt]
            .iter()
            .filter(|p| p.z <= gamma)
            .map(|p| dist.cdf(p.y) - p.h)
            .fold(f64::INFINITY, f64::min);
        if slack.is_infinite() {
            LemmaCheck::graded(LemmaId::FlatHeight, 0.0, 0.0)
        } else {
            LemmaCheck::graded(LemmaId::FlatHeight, slack, 1.0)
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters() {
        let u = WeightDistribution::uniform(0.0, 1.0).unwrap();
        let eps = default_eps(&u).unwrap();
        assert!(u.cdf(eps) <= 0.5);
        assert!(u.cdf(eps + 0.99 / 64.0) > 0.5);
        assert_eq!(default_gamma(&u, eps), 0.49);
        let point = WeightDistribution::atomic(&[(1.0, 1.0)]).unwrap();
        assert_eq!(default_eps(&point), None);
    }

    #[test]
    fn zero_profiles_pass_with_zero_slack() {
        let u = WeightDistribution::uniform(0.0, 1.0).unwrap();
        let z = EdgeProfile::zero(&u);
        let eps = default_eps(&u).unwrap();
        for check in check_lemma_suite(&z, &z, &u, eps, default_gamma(&u, eps)) {
            assert_eq!(check.outcome, Outcome::Pass, "{check:?}");
            assert_eq!(check.slack, 0.0);
        }
    }

    #[test]
    fn adversarial_profile_fails_delta_bound() {
        let u = WeightDistribution::uniform(0.0, 1.0).unwrap();
        let eps = 0.4;
        let bad = EdgeProfile::synthetic(eps, 0.2, 0.0);
        let checks = check_lemma_suite(&bad, &bad, &u, eps, 0.3);
        let delta = checks.iter().find(|c| c.id == LemmaId::DeltaBound).unwrap();
        assert!(delta.failed());
    }

    #[test]
    fn invalid_parameters_are_skipped() {
        let u = WeightDistribution::uniform(0.0, 1.0).unwrap();
        let z = EdgeProfile::zero(&u);
        let checks = check_lemma_suite(&z, &z, &u, 0.9, 0.7);
        assert!(matches!(checks[1].outcome, Outcome::Skipped(_)));
        assert!(matches!(checks[2].outcome, Outcome::Skipped(_)));
    }
}
