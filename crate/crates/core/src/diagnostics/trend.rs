//! Finite-horizon proxies for `n -> ∞` limits.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Strictly increasing indices `n >= 1` at which a family is sampled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGrid(Vec<u32>);

impl NGrid {
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        if indices.is_empty() {
            return Err(invalid("n-grid is empty"));
        }
        if indices[0] == 0 {
            return Err(invalid("n-grid indices start at 1"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n-grid must be strictly increasing"));
        }
        Ok(NGrid(indices))
    }

    /// `start, start + step, ..., <= stop`.
    pub fn range(start: u32, stop: u32, step: u32) -> Result<Self> {
        if step == 0 {
            return Err(invalid("n-grid step must be positive"));
        }
        Self::new((start..=stop).step_by(step as usize).collect())
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> u32 {
        self.0[self.0.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendClass {
    DivergesToInfinity,
    ConvergesToZero,
    Bounded,
    Indeterminate,
}

impl TrendClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrendClass::DivergesToInfinity => "diverges_to_infinity",
            TrendClass::ConvergesToZero => "converges_to_zero",
            TrendClass::Bounded => "bounded",
            TrendClass::Indeterminate => "indeterminate",
        }
    }
}

/// Statistics of the trailing window a verdict was based on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendEvidence {
    pub window: usize,
    pub first_n: u32,
    pub last_n: u32,
    pub min: f64,
    pub max: f64,
    pub max_abs: f64,
    /// Least-squares slope of value against `n`.
    pub slope: f64,
    /// Least-squares slope of `ln |value|` against `n`; absent when some
    /// value is zero.
    pub log_slope: Option<f64>,
    pub total_variation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendVerdict {
    pub class: TrendClass,
    pub evidence: Option<TrendEvidence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendConfig {
    /// Trailing window length; `None` means a quarter of the values,
    /// rounded up.
    pub window: Option<usize>,
    pub div_threshold: f64,
    pub zero_tol: f64,
    pub stability_tol: f64,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig {
            window: None,
            div_threshold: 1e3,
            zero_tol: 1e-3,
            stability_tol: 1e-6,
        }
    }
}

impl TrendConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == Some(0) {
            return Err(invalid("trend window must be positive"));
        }
        if !(self.div_threshold > 0.0 && self.div_threshold.is_finite()) {
            return Err(invalid("div_threshold must be positive"));
        }
        if !(self.zero_tol > 0.0 && self.zero_tol.is_finite()) {
            return Err(invalid("zero_tol must be positive"));
        }
        if !(self.stability_tol > 0.0 && self.stability_tol.is_finite()) {
            return Err(invalid("stability_tol must be positive"));
        }
        Ok(())
    }

    fn window_len(&self, count: usize) -> usize {
        self.window.unwrap_or_else(|| count.div_ceil(4))
    }
}

/// Classifies a raw sequence `(n, value)`.
///
/// * `diverges_to_infinity`: window minimum above `div_threshold` and
///   positive slope;
/// * `converges_to_zero`: window maximum of `|value|` below `zero_tol`;
/// * `bounded`: window total variation below `stability_tol`;
/// * `indeterminate` otherwise, or when there are fewer values than the
///   window.
pub fn classify_trend(values: &[(u32, f64)], cfg: &TrendConfig) -> TrendVerdict {
    classify(values, cfg, false)
}

/// Same as [`classify_trend`] for a sequence of logarithms `ln r_n` of a
/// positive quantity: thresholds are compared in log space and
/// `converges_to_zero` means `r_n -> 0`.
pub fn classify_log_trend(log_values: &[(u32, f64)], cfg: &TrendConfig) -> TrendVerdict {
    classify(log_values, cfg, true)
}

fn classify(values: &[(u32, f64)], cfg: &TrendConfig, log_scale: bool) -> TrendVerdict {
    let window = cfg.window_len(values.len());
    if window == 0 || values.len() < window {
        return TrendVerdict {
            class: TrendClass::Indeterminate,
            evidence: None,
        };
    }
    let tail = &values[values.len() - window..];
    let ev = evidence(tail);

    let class = if log_scale {
        if ev.min > cfg.div_threshold.ln() && ev.slope > 0.0 {
            TrendClass::DivergesToInfinity
        } else if ev.max < cfg.zero_tol.ln() && ev.slope < 0.0 {
            TrendClass::ConvergesToZero
        } else if ev.total_variation < cfg.stability_tol {
            TrendClass::Bounded
        } else {
            TrendClass::Indeterminate
        }
    } else if ev.min > cfg.div_threshold && ev.slope > 0.0 {
        TrendClass::DivergesToInfinity
    } else if ev.max_abs < cfg.zero_tol {
        TrendClass::ConvergesToZero
    } else if ev.total_variation < cfg.stability_tol {
        TrendClass::Bounded
    } else {
        TrendClass::Indeterminate
    };
    TrendVerdict {
        class,
        evidence: Some(ev),
    }
}

fn evidence(tail: &[(u32, f64)]) -> TrendEvidence {
    let min = tail.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max = tail.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let max_abs = tail.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let total_variation = tail.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum();
    let slope = ls_slope(tail.iter().map(|&(n, v)| (n as f64, v)));
    let log_slope = tail
        .iter()
        .all(|p| p.1 != 0.0)
        .then(|| ls_slope(tail.iter().map(|&(n, v)| (n as f64, v.abs().ln()))));
    TrendEvidence {
        window: tail.len(),
        first_n: tail[0].0,
        last_n: tail[tail.len() - 1].0,
        min,
        max,
        max_abs,
        slope,
        log_slope,
        total_variation,
    }
}

fn ls_slope(points: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let count = points.clone().count() as f64;
    if count < 2.0 {
        return 0.0;
    }
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / count, sy / count);
    let (sxy, sxx) = points.fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
