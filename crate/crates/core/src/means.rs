//! Weighted quasi-arithmetic means `M_f(a, w) = f⁻¹(Σ w_i f(a_i))`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generators::{Generator, Interval};

/// Entries with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    entries: Vec<f64>,
    weights: Vec<f64>,
}

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

impl WeightedSample {
    pub fn new(entries: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("sample needs at least one entry"));
        }
        if entries.len() != weights.len() {
            return Err(invalid(format!(
                "{} entries but {} weights",
                entries.len(),
                weights.len()
            )));
        }
        if let Some(a) = entries.iter().find(|a| !a.is_finite()) {
            return Err(invalid(format!("non-finite entry {a}")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!("weights must be positive, got {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(WeightedSample { entries, weights })
    }

    /// Equal weights `1/r`.
    pub fn uniform(entries: Vec<f64>) -> Result<Self> {
        let r = entries.len();
        let w = if r == 0 { 0.0 } else { 1.0 / r as f64 };
        // 1/r summed r times can miss 1 by a few ulps; fine under the tolerance
        Self::new(entries, vec![w; r])
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `(x, z, ξ)` for the two-variable mean `f⁻¹(ξ f(x) + (1-ξ) f(z))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointQuery {
    pub x: f64,
    pub z: f64,
    pub xi: f64,
}

impl TwoPointQuery {
    pub fn new(x: f64, z: f64, xi: f64) -> Result<Self> {
        if !(x.is_finite() && z.is_finite()) {
            return Err(invalid("query points must be finite"));
        }
        if !(xi > 0.0 && xi < 1.0) {
            return Err(invalid(format!("weight xi must lie in (0, 1), got {xi}")));
        }
        Ok(TwoPointQuery { x, z, xi })
    }

    /// `(z, x, 1 - ξ)`, which has the same mean.
    pub fn swapped(&self) -> TwoPointQuery {
        TwoPointQuery {
            x: self.z,
            z: self.x,
            xi: 1.0 - self.xi,
        }
    }

    /// `(-x, -z, ξ)`, for the reflected family.
    pub fn reflect(&self) -> TwoPointQuery {
        TwoPointQuery {
            x: -self.x,
            z: -self.z,
            xi: self.xi,
        }
    }

    pub fn max(&self) -> f64 {
        self.x.max(self.z)
    }

    pub fn min(&self) -> f64 {
        self.x.min(self.z)
    }
}

pub fn qa_mean(g: &Generator, s: &WeightedSample) -> Result<f64> {
    mean_of(g, s.entries(), s.weights())
}

pub fn qa_mean_two(g: &Generator, q: &TwoPointQuery) -> Result<f64> {
    mean_of(g, &[q.x, q.z], &[q.xi, 1.0 - q.xi])
}

fn mean_of(g: &Generator, entries: &[f64], weights: &[f64]) -> Result<f64> {
    let domain = g.domain();
    if let Some(a) = entries.iter().find(|a| !domain.contains(**a)) {
        return Err(Error::Domain(format!("entry {a} outside generator domain {domain}")));
    }
    let lo = entries.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = entries.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(lo);
    }

    // Sorting the terms makes the sum independent of the input order.
    let mut terms: Vec<(f64, f64, usize)> = entries
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (&a, &w))| (a, w, i))
        .collect();
    terms.sort_by(|l, r| l.0.total_cmp(&r.0).then(l.1.total_cmp(&r.1)));

    let mut sum = 0.0;
    let mut comp = 0.0;
    for &(a, w, index) in &terms {
        let fa = g.eval(a);
        if !fa.is_finite() {
            return Err(Error::Overflow { index, entry: a });
        }
        let term = w * fa;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let target = sum + comp;
    if !target.is_finite() {
        let (_, _, index) = terms[terms.len() - 1];
        return Err(Error::Overflow {
            index,
            entry: entries[index],
        });
    }

    // Rounding can push the weighted sum a hair outside [f(lo), f(hi)].
    let (flo, fhi) = (g.eval(lo), g.eval(hi));
    let target = target.clamp(flo.min(fhi), flo.max(fhi));
    let x = g.invert(target, Interval { lo, hi })?;
    Ok(x.clamp(lo, hi))
}

/// Two-point mean computed from the generator normalised (zero value, unit
/// slope) at the entry where `|f'|` is largest. Agrees with [`qa_mean_two`]
/// and stays finite for steep generators such as `e^{t x}` with large `t`,
/// where `f` itself overflows.
pub fn qa_mean_two_relative(g: &Generator, q: &TwoPointQuery) -> Result<f64> {
    let domain = g.domain();
    for a in [q.x, q.z] {
        if !domain.contains(a) {
            return Err(Error::Domain(format!("entry {a} outside generator domain {domain}")));
        }
    }
    let (lo, hi) = (q.min(), q.max());
    if lo == hi {
        return Ok(lo);
    }
    let g = g.increasing();
    let anchor = if g.log_abs_deriv1(hi) >= g.log_abs_deriv1(lo) { hi } else { lo };
    let phi = |t: f64| g.eval_relative(t, anchor);
    let (w_lo, index_lo) = if q.x <= q.z { (q.xi, 0) } else { (1.0 - q.xi, 1) };
    let target = w_lo * phi(lo) + (1.0 - w_lo) * phi(hi);
    if !target.is_finite() {
        let (index, entry) = if anchor == hi { (index_lo, lo) } else { (1 - index_lo, hi) };
        return Err(Error::Overflow { index, entry });
    }

    let (mut a, mut b) = (lo, hi);
    while b - a > 1e-13 * a.abs().max(b.abs()).max(1.0) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let v = phi(m);
        if v.is_nan() {
            return Err(Error::Internal(format!("normalised generator is NaN at {m}")));
        }
        if v < target {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// `(Σ w_i a_i^p)^{1/p}` evaluated through logarithms.
pub fn power_mean_closed_form(p: f64, s: &WeightedSample) -> Result<f64> {
    if !p.is_finite() || p == 0.0 {
        return Err(invalid(format!("power mean exponent must be non-zero, got {p}")));
    }
    if let Some(a) = s.entries().iter().find(|a| **a <= 0.0) {
        return Err(Error::Domain(format!("power mean needs positive entries, got {a}")));
    }
    // log-sum-exp of ln w_i + p ln a_i
    let logs: Vec<f64> = s
        .entries()
        .iter()
        .zip(s.weights())
        .map(|(a, w)| w.ln() + p * a.ln())
        .collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let acc: f64 = logs.iter().map(|l| (l - peak).exp()).sum();
    let log_mean = (peak + acc.ln()) / p;
    Ok(log_mean.exp().clamp(s.min(), s.max()))
}
