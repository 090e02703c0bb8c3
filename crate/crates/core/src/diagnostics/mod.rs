//! Max-family criteria evaluated over a finite range of indices.
//!
//! Every test records its raw per-index sequence; the verdict is a
//! deterministic classification of the trailing window (see [`trend`]).
//! Ratio and integral tests work with `ln f'` and normalised generator
//! values so that steep families do not overflow.

mod trend;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use trend::{classify_log_trend, classify_trend, NGrid, TrendClass, TrendConfig, TrendEvidence, TrendVerdict};

use crate::error::{invalid, Error, Result};
use crate::generators::{Generator, GeneratorFamily};
use crate::means::{qa_mean_two, qa_mean_two_relative, TwoPointQuery};
use crate::quadrature::{self, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NStatus {
    Ok,
    Failed,
}

impl NStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            NStatus::Ok => "ok",
            NStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NValue {
    pub n: u32,
    pub value: Option<f64>,
    pub status: NStatus,
    /// Why the value is missing.
    #[serde(skip)]
    pub failure: Option<String>,
}

impl NValue {
    fn from_result(n: u32, r: Result<f64>) -> NValue {
        match r {
            Ok(v) if v.is_finite() => NValue {
                n,
                value: Some(v),
                status: NStatus::Ok,
                failure: None,
            },
            Ok(v) => NValue {
                n,
                value: None,
                status: NStatus::Failed,
                failure: Some(format!("non-finite value {v}")),
            },
            Err(e) => NValue {
                n,
                value: None,
                status: NStatus::Failed,
                failure: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub test: String,
    pub params: BTreeMap<String, f64>,
    /// One entry per index of the n-grid, in order.
    pub values: Vec<NValue>,
    pub verdict: TrendVerdict,
    pub c_hat: Option<f64>,
    pub phi: Option<f64>,
    /// Largest `|∫A - Δ ln f'|` over the indices (integral test only).
    pub cross_check: Option<f64>,
}

impl DiagnosticReport {
    /// `(n, value)` for the indices that did not fail.
    pub fn finite_values(&self) -> Vec<(u32, f64)> {
        self.values.iter().filter_map(|v| v.value.map(|x| (v.n, x))).collect()
    }

    /// At least one index produced a value.
    pub fn completed(&self) -> bool {
        self.values.iter().any(|v| v.value.is_some())
    }

    pub fn value_at(&self, n: u32) -> Option<f64> {
        self.values.iter().find(|v| v.n == n).and_then(|v| v.value)
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn per_n<F>(ns: &NGrid, f: F) -> Vec<NValue>
where
    F: Fn(u32) -> Result<f64> + Sync,
{
    ns.indices()
        .par_iter()
        .map(|&n| NValue::from_result(n, f(n)))
        .collect()
}

fn require_inside(fam: &GeneratorFamily, points: &[f64]) -> Result<()> {
    let d = fam.domain();
    if let Some(p) = points.iter().find(|p| !d.contains(**p)) {
        return Err(Error::Domain(format!("point {p} outside family domain {d}")));
    }
    Ok(())
}

fn require_ordered(points: &[f64]) -> Result<()> {
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(format!("points must be finite and strictly increasing, got {points:?}")));
    }
    Ok(())
}

/// Sign and logarithm of `|f(a) - f(b)|`, with the difference taken from
/// the generator normalised at the steeper endpoint.
fn log_abs_diff(g: &Generator, a: f64, b: f64) -> (f64, f64) {
    let (la, lb) = (g.log_abs_deriv1(a), g.log_abs_deriv1(b));
    let (d, l) = if la >= lb {
        (-g.eval_relative(b, a), la)
    } else {
        (g.eval_relative(a, b), lb)
    };
    (d.signum(), d.abs().ln() + l)
}

/// `(f_n(x) - f_n(y)) / (f_n(z) - f_n(y))` for increasing-normalised `f_n`,
/// evaluated in log space.
pub fn ratio_test(fam: &GeneratorFamily, x: f64, y: f64, z: f64, ns: &NGrid, cfg: &TrendConfig) -> Result<DiagnosticReport> {
    require_ordered(&[x, y, z])?;
    require_inside(fam, &[x, y, z])?;
    cfg.validate()?;
    let values = per_n(ns, |n| {
        let g = fam.at(n)?.increasing();
        let (s_num, l_num) = log_abs_diff(&g, x, y);
        let (s_den, l_den) = log_abs_diff(&g, z, y);
        Ok(s_num * s_den * (l_num - l_den).exp())
    });
    let mut report = DiagnosticReport {
        test: "ratio".into(),
        params: params(&[("x", x), ("y", y), ("z", z)]),
        values,
        verdict: classify_trend(&[], cfg),
        c_hat: None,
        phi: None,
        cross_check: None,
    };
    report.verdict = classify_trend(&report.finite_values(), cfg);
    Ok(report)
}

fn log_deriv_ratio(g: &Generator, p: f64, q: f64) -> Result<f64> {
    let g = g.increasing();
    for t in [p, q] {
        let d = g.deriv1(t);
        if d.is_finite() && d <= 0.0 {
            return Err(Error::Internal(format!(
                "normalised generator {} has derivative {d} at {t}",
                g.describe()
            )));
        }
    }
    Ok(g.log_abs_deriv1(q) - g.log_abs_deriv1(p))
}

/// `ln f_n'(q) - ln f_n'(p)` per index.
pub fn derivative_ratio_test(fam: &GeneratorFamily, p: f64, q: f64, ns: &NGrid, cfg: &TrendConfig) -> Result<DiagnosticReport> {
    require_ordered(&[p, q])?;
    require_inside(fam, &[p, q])?;
    cfg.validate()?;
    // A sign problem is a bug in the normalisation, not a per-index failure.
    let raw: Vec<(u32, Result<f64>)> = ns
        .indices()
        .par_iter()
        .map(|&n| (n, fam.at(n).and_then(|g| log_deriv_ratio(&g, p, q))))
        .collect();
    if let Some((_, Err(e))) = raw.iter().find(|(_, r)| matches!(r, Err(Error::Internal(_)))) {
        return Err(e.clone());
    }
    let values: Vec<NValue> = raw.into_iter().map(|(n, r)| NValue::from_result(n, r)).collect();
    let mut report = DiagnosticReport {
        test: "deriv-ratio".into(),
        params: params(&[("p", p), ("q", q)]),
        values,
        verdict: classify_log_trend(&[], cfg),
        c_hat: None,
        phi: None,
        cross_check: None,
    };
    report.verdict = classify_log_trend(&report.finite_values(), cfg);
    Ok(report)
}

/// `∫_p^q A_{f_n}` per index, with the largest deviation from
/// `ln f_n'(q) - ln f_n'(p)` recorded as a cross-check.
pub fn integral_test(
    fam: &GeneratorFamily,
    p: f64,
    q: f64,
    ns: &NGrid,
    quad: &QuadratureConfig,
    cfg: &TrendConfig,
) -> Result<DiagnosticReport> {
    require_ordered(&[p, q])?;
    require_inside(fam, &[p, q])?;
    cfg.validate()?;
    quad.validate()?;
    let first = fam.at(ns.indices()[0])?;
    if !first.has_deriv2() {
        return Err(Error::UnsupportedGenerator(format!(
            "integral test needs a smooth family; {} has no second derivative",
            first.describe()
        )));
    }
    let raw: Vec<(u32, Result<(f64, f64)>)> = ns
        .indices()
        .par_iter()
        .map(|&n| {
            let r = fam.at(n).and_then(|g| {
                let g = g.increasing();
                let integral = quadrature::integrate(|t| g.arrow(t).unwrap_or(f64::NAN), p, q, &g.breakpoints(), quad)?;
                let delta = g.log_abs_deriv1(q) - g.log_abs_deriv1(p);
                Ok((integral, (integral - delta).abs()))
            });
            (n, r)
        })
        .collect();
    let cross_check = raw
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok().map(|v| v.1))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    let values: Vec<NValue> = raw
        .into_iter()
        .map(|(n, r)| NValue::from_result(n, r.map(|v| v.0)))
        .collect();
    let mut report = DiagnosticReport {
        test: "integral".into(),
        params: params(&[("p", p), ("q", q)]),
        values,
        verdict: classify_log_trend(&[], cfg),
        c_hat: None,
        phi: None,
        cross_check,
    };
    report.verdict = classify_log_trend(&report.finite_values(), cfg);
    Ok(report)
}

/// Two-point mean, falling back to the normalised evaluation when the
/// generator overflows.
pub fn two_point_mean(g: &Generator, q: &TwoPointQuery) -> Result<f64> {
    match qa_mean_two(g, q) {
        Err(Error::Overflow { .. }) => qa_mean_two_relative(g, q),
        r => r,
    }
}

fn empirical(
    fam: &GeneratorFamily,
    queries: &[TwoPointQuery],
    ns: &NGrid,
    cfg: &TrendConfig,
    name: &str,
    gap: fn(&TwoPointQuery, f64) -> f64,
) -> Result<Vec<DiagnosticReport>> {
    if queries.is_empty() {
        return Err(invalid("no query points given"));
    }
    cfg.validate()?;
    for q in queries {
        TwoPointQuery::new(q.x, q.z, q.xi)?;
        require_inside(fam, &[q.x, q.z])?;
    }
    Ok(queries
        .iter()
        .map(|q| {
            let values = per_n(ns, |n| Ok(gap(q, two_point_mean(&fam.at(n)?, q)?)));
            let mut report = DiagnosticReport {
                test: name.into(),
                params: params(&[("x", q.x), ("z", q.z), ("xi", q.xi)]),
                values,
                verdict: classify_trend(&[], cfg),
                c_hat: None,
                phi: None,
                cross_check: None,
            };
            report.verdict = classify_trend(&report.finite_values(), cfg);
            report
        })
        .collect())
}

/// `max(x, z) - M_{f_n}(x, z, ξ)` per index, one report per query.
pub fn empirical_max_test(
    fam: &GeneratorFamily,
    queries: &[TwoPointQuery],
    ns: &NGrid,
    cfg: &TrendConfig,
) -> Result<Vec<DiagnosticReport>> {
    empirical(fam, queries, ns, cfg, "empirical", |q, m| q.max() - m)
}

/// `M_{f_n}(x, z, ξ) - min(x, z)` per index, one report per query.
pub fn empirical_min_test(
    fam: &GeneratorFamily,
    queries: &[TwoPointQuery],
    ns: &NGrid,
    cfg: &TrendConfig,
) -> Result<Vec<DiagnosticReport>> {
    empirical(fam, queries, ns, cfg, "empirical-min", |q, m| m - q.min())
}

/// `Ĉ = min` over indices and adjacent grid pairs of the slope of
/// `ln f_n'`. A finite value only shows lower-boundedness on the sample.
pub fn lower_bounded_estimate(fam: &GeneratorFamily, grid: &[f64], ns: &NGrid) -> Result<f64> {
    if grid.len() < 2 {
        return Err(invalid("lower-bound estimate needs at least two grid points"));
    }
    require_ordered(grid)?;
    require_inside(fam, grid)?;
    let mins: Vec<Result<f64>> = ns
        .indices()
        .par_iter()
        .map(|&n| {
            let g = fam.at(n)?.increasing();
            let logs: Vec<f64> = grid.iter().map(|&t| g.log_abs_deriv1(t)).collect();
            let mut best = f64::INFINITY;
            for (w, l) in grid.windows(2).zip(logs.windows(2)) {
                let slope = (l[1] - l[0]) / (w[1] - w[0]);
                if slope.is_nan() {
                    return Err(Error::Internal(format!(
                        "ln f'_{n} is undefined on [{}, {}]",
                        w[0], w[1]
                    )));
                }
                best = best.min(slope);
            }
            Ok(best)
        })
        .collect();
    let mut c_hat = f64::INFINITY;
    for m in mins {
        c_hat = c_hat.min(m?);
    }
    Ok(c_hat)
}

/// A point where the Arrow operator decreased between consecutive indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncreasingWitness {
    pub n_prev: u32,
    pub n_next: u32,
    pub x: f64,
    pub a_prev: f64,
    pub a_next: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncreasingReport {
    pub increasing: bool,
    pub witness: Option<IncreasingWitness>,
}

/// Checks `A_{f_next} >= A_{f_prev} - 1e-10` on the grid for consecutive
/// indices of `ns`.
pub fn increasing_check(fam: &GeneratorFamily, grid: &[f64], ns: &NGrid) -> Result<IncreasingReport> {
    if grid.is_empty() {
        return Err(invalid("increasing check needs a grid"));
    }
    require_inside(fam, grid)?;
    let arrows: Vec<Result<Vec<f64>>> = ns
        .indices()
        .par_iter()
        .map(|&n| {
            let g = fam.at(n)?;
            grid.iter().map(|&t| g.arrow(t)).collect()
        })
        .collect();
    let arrows: Vec<Vec<f64>> = arrows.into_iter().collect::<Result<_>>()?;
    for (i, pair) in arrows.windows(2).enumerate() {
        for (j, &x) in grid.iter().enumerate() {
            if pair[1][j] < pair[0][j] - 1e-10 {
                return Ok(IncreasingReport {
                    increasing: false,
                    witness: Some(IncreasingWitness {
                        n_prev: ns.indices()[i],
                        n_next: ns.indices()[i + 1],
                        x,
                        a_prev: pair[0][j],
                        a_next: pair[1][j],
                    }),
                });
            }
        }
    }
    Ok(IncreasingReport {
        increasing: true,
        witness: None,
    })
}

/// `Φ(ξ, C, ε, x, y) = ξ (e^{C(x-y)} - 1) / ((1-ξ)(1 - e^{Cε}))`.
pub fn phi_threshold(xi: f64, c: f64, eps: f64, x: f64, y: f64) -> Result<f64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(invalid(format!("xi must lie in (0, 1), got {xi}")));
    }
    if !(c < 0.0) || !c.is_finite() {
        return Err(invalid(format!("lower-bound constant C must be negative, got {c}")));
    }
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    if !(x < y) || !x.is_finite() || !y.is_finite() {
        return Err(invalid(format!("need x < y, got {x}, {y}")));
    }
    Ok(xi * (c * (x - y)).exp_m1() / ((1.0 - xi) * -(c * eps).exp_m1()))
}

/// Grid size for checking the lower-bound hypothesis.
const HYPOTHESIS_GRID: usize = 257;

/// Checks that `f'(z-ε)/f'(y) >= Φ` implies `M(x, z, ξ) >= y` for `g`.
/// Vacuously true when the derivative ratio is below `Φ`.
pub fn phi_implication_check(g: &Generator, xi: f64, c: f64, eps: f64, x: f64, y: f64, z: f64) -> Result<bool> {
    let phi = phi_threshold(xi, c, eps, x, y)?;
    if !(y < z) {
        return Err(invalid(format!("need y < z, got {y}, {z}")));
    }
    if !(eps < z - y) {
        return Err(invalid(format!("eps must be below z - y = {}, got {eps}", z - y)));
    }
    let d = g.domain();
    if !(d.contains(x) && d.contains(z)) {
        return Err(Error::Domain(format!("[{x}, {z}] not inside {d}")));
    }
    let g = g.increasing();
    let span = crate::generators::Interval::new(x, z)?;
    let grid = span.grid(HYPOTHESIS_GRID);
    for w in grid.windows(2) {
        let slope = (g.log_abs_deriv1(w[1]) - g.log_abs_deriv1(w[0])) / (w[1] - w[0]);
        if !(slope >= c - 1e-9 * c.abs().max(1.0)) {
            return Err(Error::HypothesisViolated(format!(
                "ln f' has slope {slope} < C = {c} on [{}, {}]",
                w[0], w[1]
            )));
        }
    }
    let log_ratio = g.log_abs_deriv1(z - eps) - g.log_abs_deriv1(y);
    if log_ratio < phi.ln() {
        return Ok(true);
    }
    let m = two_point_mean(&g, &TwoPointQuery::new(x, z, xi)?)?;
    Ok(m >= y - 1e-10 * y.abs().max(1.0))
}

/// Grid points flagged as likely members of `X_∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XInfinityEstimate {
    pub grid: Vec<f64>,
    pub member_flags: Vec<bool>,
    pub threshold: f64,
    /// First and last index of the window the monotonicity was checked on.
    pub n_window: (u32, u32),
}

impl XInfinityEstimate {
    pub fn flagged(&self) -> Vec<f64> {
        self.grid
            .iter()
            .zip(&self.member_flags)
            .filter_map(|(&x, &f)| f.then_some(x))
            .collect()
    }
}

/// Flags `x` when `A_{f_N}(x) >= threshold` for the last index `N` and
/// `A_{f_n}(x)` is nondecreasing over the trailing half of `ns`.
pub fn x_infinity_estimate(fam: &GeneratorFamily, grid: &[f64], ns: &NGrid, threshold: f64) -> Result<XInfinityEstimate> {
    require_inside(fam, grid)?;
    if !threshold.is_finite() {
        return Err(invalid("threshold must be finite"));
    }
    let tail = &ns.indices()[ns.len() / 2..];
    let arrows: Vec<Result<Vec<f64>>> = tail
        .par_iter()
        .map(|&n| {
            let g = fam.at(n)?;
            grid.iter().map(|&t| g.arrow(t)).collect()
        })
        .collect();
    let arrows: Vec<Vec<f64>> = arrows.into_iter().collect::<Result<_>>()?;
    let last = &arrows[arrows.len() - 1];
    let member_flags = (0..grid.len())
        .map(|j| last[j] >= threshold && arrows.windows(2).all(|w| w[1][j] >= w[0][j] - 1e-10))
        .collect();
    Ok(XInfinityEstimate {
        grid: grid.to_vec(),
        member_flags,
        threshold,
        n_window: (tail[0], tail[tail.len() - 1]),
    })
}

/// `g_n(x) = f_n(-x)` on the reflected domain. Min-family questions about
/// `fam` are max-family questions about the dual on reflected queries.
pub fn dualize(fam: &GeneratorFamily) -> GeneratorFamily {
    let inner = fam.clone();
    GeneratorFamily::from_fn(format!("dual({})", fam.label()), fam.domain().reflect(), move |n| {
        inner.at(n).map(|g| g.reflect())
    })
}
