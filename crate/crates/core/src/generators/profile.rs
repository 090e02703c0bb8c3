//! Piecewise-linear Arrow profiles `x -> A(x)`.

use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub x: f64,
    pub a: f64,
}

/// One affine segment of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub a_lo: f64,
    pub a_hi: f64,
}

impl Piece {
    pub fn eval(&self, x: f64) -> f64 {
        if x == self.lo {
            return self.a_lo;
        }
        if x == self.hi {
            return self.a_hi;
        }
        let s = (x - self.lo) / (self.hi - self.lo);
        self.a_lo + s * (self.a_hi - self.a_lo)
    }
}

/// Trapezoid bump: zero outside `(support_lo, support_hi)`, `height` on
/// `[plateau_lo, plateau_hi]`, linear ramps in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub support_lo: f64,
    pub plateau_lo: f64,
    pub plateau_hi: f64,
    pub support_hi: f64,
    pub height: f64,
}

impl Trapezoid {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.support_lo || x >= self.support_hi {
            0.0
        } else if x >= self.plateau_lo && x <= self.plateau_hi {
            self.height
        } else if x < self.plateau_lo {
            self.height * (x - self.support_lo) / (self.plateau_lo - self.support_lo)
        } else {
            self.height * (self.support_hi - x) / (self.support_hi - self.plateau_hi)
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.support_lo < self.plateau_lo
            && self.plateau_lo <= self.plateau_hi
            && self.plateau_hi < self.support_hi
            && self.height.is_finite()
            && self.height >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("malformed trapezoid {self:?}")))
        }
    }
}

/// A continuous piecewise-linear profile on a closed interval, stored as
/// knots whose first and last abscissae are the domain endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowProfile {
    domain: Interval,
    knots: Vec<Knot>,
}

impl ArrowProfile {
    pub fn from_knots(knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("profile needs at least two knots"));
        }
        for k in &knots {
            if !(k.x.is_finite() && k.a.is_finite()) {
                return Err(invalid(format!("non-finite knot {k:?}")));
            }
        }
        if knots.windows(2).any(|w| w[0].x >= w[1].x) {
            return Err(invalid("knot abscissae must be strictly increasing"));
        }
        let domain = Interval::new(knots[0].x, knots[knots.len() - 1].x)?;
        Ok(ArrowProfile { domain, knots })
    }

    pub fn constant(domain: Interval, value: f64) -> Result<Self> {
        Self::from_knots(vec![
            Knot { x: domain.lo, a: value },
            Knot { x: domain.hi, a: value },
        ])
    }

    /// Pieces must tile the domain in order and agree at shared endpoints.
    pub fn from_pieces(pieces: &[Piece]) -> Result<Self> {
        let first = pieces.first().ok_or_else(|| invalid("no pieces"))?;
        let mut knots = vec![Knot { x: first.lo, a: first.a_lo }];
        for (i, p) in pieces.iter().enumerate() {
            let last = knots[knots.len() - 1];
            if p.lo != last.x {
                return Err(invalid(format!("piece {i} starts at {} but previous ends at {}", p.lo, last.x)));
            }
            if (p.a_lo - last.a).abs() > 1e-12 * last.a.abs().max(1.0) {
                return Err(invalid(format!("profile discontinuous at x = {}", p.lo)));
            }
            knots.push(Knot { x: p.hi, a: p.a_hi });
        }
        Self::from_knots(knots)
    }

    /// Sum of trapezoids restricted to `domain`. Trapezoids reaching past
    /// the domain are cut off there, keeping their values at the ends.
    pub fn from_trapezoids(domain: Interval, traps: &[Trapezoid]) -> Result<Self> {
        for t in traps {
            t.validate()?;
        }
        let mut xs = vec![domain.lo, domain.hi];
        for t in traps {
            for x in [t.support_lo, t.plateau_lo, t.plateau_hi, t.support_hi] {
                if x > domain.lo && x < domain.hi {
                    xs.push(x);
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let knots = xs
            .into_iter()
            .map(|x| Knot {
                x,
                a: traps.iter().map(|t| t.eval(x)).sum(),
            })
            .collect();
        Self::from_knots(knots)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        self.knots.windows(2).map(|w| Piece {
            lo: w[0].x,
            hi: w[1].x,
            a_lo: w[0].a,
            a_hi: w[1].a,
        })
    }

    /// Index of the piece containing `x` (clamped to the first/last piece).
    pub(crate) fn piece_index(&self, x: f64) -> usize {
        let idx = self.knots.partition_point(|k| k.x <= x);
        idx.saturating_sub(1).min(self.knots.len() - 2)
    }

    pub(crate) fn piece(&self, i: usize) -> Piece {
        Piece {
            lo: self.knots[i].x,
            hi: self.knots[i + 1].x,
            a_lo: self.knots[i].a,
            a_hi: self.knots[i + 1].a,
        }
    }

    /// Value at `x`; points outside the domain take the end values.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.domain.lo {
            return self.knots[0].a;
        }
        if x >= self.domain.hi {
            return self.knots[self.knots.len() - 1].a;
        }
        self.piece(self.piece_index(x)).eval(x)
    }

    /// Exact integral over `[a, b]` (clipped to the domain).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a > b {
            return -self.integral(b, a);
        }
        let a = a.max(self.domain.lo);
        let b = b.min(self.domain.hi);
        if a >= b {
            return 0.0;
        }
        let mut total = 0.0;
        let mut i = self.piece_index(a);
        while i + 1 < self.knots.len() {
            let p = self.piece(i);
            if p.lo >= b {
                break;
            }
            let u = p.lo.max(a);
            let v = p.hi.min(b);
            if v > u {
                total += 0.5 * (v - u) * (p.eval(u) + p.eval(v));
            }
            i += 1;
        }
        total
    }

    /// Exact `∫ |A|` over the domain.
    pub fn l1_norm(&self) -> f64 {
        self.pieces()
            .map(|p| {
                let w = p.hi - p.lo;
                if p.a_lo * p.a_hi >= 0.0 {
                    0.5 * w * (p.a_lo.abs() + p.a_hi.abs())
                } else {
                    // split at the root
                    let (l, r) = (p.a_lo.abs(), p.a_hi.abs());
                    0.5 * w * (l * l + r * r) / (l + r)
                }
            })
            .sum()
    }

    pub fn min_value(&self) -> f64 {
        self.knots.iter().map(|k| k.a).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.knots.iter().map(|k| k.a).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise sum; both profiles must share the domain.
    pub fn add(&self, other: &ArrowProfile) -> Result<ArrowProfile> {
        if self.domain != other.domain {
            return Err(invalid(format!(
                "cannot add profiles on {} and {}",
                self.domain, other.domain
            )));
        }
        let mut xs: Vec<f64> = self
            .knots
            .iter()
            .chain(other.knots.iter())
            .map(|k| k.x)
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let knots = xs
            .into_iter()
            .map(|x| Knot {
                x,
                a: self.eval(x) + other.eval(x),
            })
            .collect();
        Self::from_knots(knots)
    }

    pub fn scale(&self, c: f64) -> ArrowProfile {
        ArrowProfile {
            domain: self.domain,
            knots: self.knots.iter().map(|k| Knot { x: k.x, a: c * k.a }).collect(),
        }
    }

    /// Midpoint of the longest run on which the profile vanishes, if any.
    pub fn longest_zero_run_midpoint(&self) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        let mut run: Option<(f64, f64)> = None;
        for p in self.pieces() {
            if p.a_lo == 0.0 && p.a_hi == 0.0 {
                run = Some(match run {
                    Some((lo, _)) => (lo, p.hi),
                    None => (p.lo, p.hi),
                });
            } else {
                run = None;
            }
            if let Some((lo, hi)) = run {
                if best.map_or(true, |(blo, bhi)| hi - lo > bhi - blo) {
                    best = Some((lo, hi));
                }
            }
        }
        best.map(|(lo, hi)| 0.5 * (lo + hi))
    }
}
