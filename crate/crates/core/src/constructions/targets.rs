use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generators::Interval;

/// Deepest Cantor approximation accepted.
pub const MAX_CANTOR_DEPTH: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    FinitePoints,
    CantorApprox { depth: u32 },
}

/// A finite stand-in for a null set `V`.
///
/// For a Cantor approximation of depth `d`, `intervals` are the `2^d`
/// retained closed intervals and `points` their `2^{d+1}` endpoints, which
/// all belong to the Cantor set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSetSpec {
    pub kind: TargetKind,
    pub base: Interval,
    pub points: Vec<f64>,
    pub intervals: Vec<Interval>,
}

impl TargetSetSpec {
    pub fn finite_points(base: Interval, mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("target set needs at least one point"));
        }
        if let Some(p) = points.iter().find(|p| !base.contains(**p)) {
            return Err(Error::Domain(format!("target point {p} outside {base}")));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(TargetSetSpec {
            kind: TargetKind::FinitePoints,
            base,
            points,
            intervals: Vec::new(),
        })
    }

    pub fn midpoint(base: Interval) -> Self {
        TargetSetSpec {
            kind: TargetKind::FinitePoints,
            base,
            points: vec![base.midpoint()],
            intervals: Vec::new(),
        }
    }

    /// Middle-thirds construction on `base` stopped after `depth` steps.
    pub fn cantor(base: Interval, depth: u32) -> Result<Self> {
        if depth > MAX_CANTOR_DEPTH {
            return Err(invalid(format!("Cantor depth {depth} exceeds {MAX_CANTOR_DEPTH}")));
        }
        let mut intervals = vec![base];
        for _ in 0..depth {
            intervals = intervals
                .iter()
                .flat_map(|iv| {
                    let third = iv.width() / 3.0;
                    [
                        Interval { lo: iv.lo, hi: iv.lo + third },
                        Interval { lo: iv.hi - third, hi: iv.hi },
                    ]
                })
                .collect();
        }
        let points = intervals.iter().flat_map(|iv| [iv.lo, iv.hi]).collect();
        Ok(TargetSetSpec {
            kind: TargetKind::CantorApprox { depth },
            base,
            points,
            intervals,
        })
    }

    /// Distance from `x` to the nearest target point.
    pub fn distance(&self, x: f64) -> f64 {
        self.points.iter().map(|p| (p - x).abs()).fold(f64::INFINITY, f64::min)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The first `count` rationals in the open interval `(u.lo, u.hi)`, by
/// increasing denominator and then numerator, in lowest terms.
pub fn rational_enumeration(u: Interval, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut den: u64 = 1;
    while out.len() < count {
        let d = den as f64;
        let first = (u.lo * d).floor() as i64 + 1;
        let mut num = first;
        while out.len() < count {
            let q = num as f64 / d;
            if q >= u.hi {
                break;
            }
            if q > u.lo && gcd(num.unsigned_abs(), den) == 1 {
                out.push(q);
            }
            num += 1;
        }
        den += 1;
    }
    out
}

/// `4^d / (n^{2d} (1 - 2^{-d}))`, the covering-sum bound for `X_∞` of the
/// rational-ball construction. The direct sum with `10^4` terms is checked
/// against it.
pub fn covering_bound(d: f64, n: u32) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid(format!("covering exponent d must be positive, got {d}")));
    }
    if n == 0 {
        return Err(invalid("covering index n starts at 1"));
    }
    let nf = n as f64;
    let bound = 4f64.powf(d) / (nf.powf(2.0 * d) * -(-d * std::f64::consts::LN_2).exp_m1());
    let direct = covering_sum(d, n, 10_000)?;
    if direct > bound * (1.0 + 1e-12) {
        return Err(Error::Internal(format!(
            "covering sum {direct} exceeds its bound {bound} at d = {d}, n = {n}"
        )));
    }
    Ok(bound)
}

/// `Σ_{i<=n} (4/(n² 2^i))^d + Σ_{n<i<=cap} (4/(i² 2^i))^d`.
pub fn covering_sum(d: f64, n: u32, cap: u32) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid(format!("covering exponent d must be positive, got {d}")));
    }
    let term = |m: f64, i: u32| ((4f64).ln() - 2.0 * m.ln() - i as f64 * std::f64::consts::LN_2) * d;
    let head: f64 = (1..=n).map(|i| term(n as f64, i).exp()).sum();
    let tail: f64 = (n + 1..=cap.max(n)).map(|i| term(i as f64, i).exp()).sum();
    Ok(head + tail)
}
