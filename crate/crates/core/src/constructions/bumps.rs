//! Unions of balls turned into continuous piecewise-linear bumps.

use crate::error::{Error, Result};
use crate::generators::{ArrowProfile, Interval, Knot, Trapezoid};

/// A ball with a plateau radius and a strictly larger support radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ball {
    pub center: f64,
    pub plateau: f64,
    pub support: f64,
}

/// Plateau set, support set and height of one bump. Each component is a
/// trapezoid; components have disjoint supports and are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub components: Vec<Trapezoid>,
    pub height: f64,
}

impl BumpSpec {
    /// Merges balls whose supports overlap or touch. A merged component is
    /// at full height from its leftmost to its rightmost plateau point.
    pub(crate) fn from_balls(balls: &[Ball], height: f64) -> BumpSpec {
        let mut sorted = balls.to_vec();
        sorted.sort_by(|a, b| (a.center - a.support).total_cmp(&(b.center - b.support)));
        let mut components: Vec<Trapezoid> = Vec::new();
        for b in sorted {
            let t = Trapezoid {
                support_lo: b.center - b.support,
                plateau_lo: b.center - b.plateau,
                plateau_hi: b.center + b.plateau,
                support_hi: b.center + b.support,
                height,
            };
            match components.last_mut() {
                Some(c) if t.support_lo <= c.support_hi => {
                    c.support_hi = c.support_hi.max(t.support_hi);
                    c.plateau_lo = c.plateau_lo.min(t.plateau_lo);
                    c.plateau_hi = c.plateau_hi.max(t.plateau_hi);
                }
                _ => components.push(t),
            }
        }
        BumpSpec { components, height }
    }

    /// Number of components whose support reaches outside `domain`.
    pub fn clipped(&self, domain: Interval) -> usize {
        self.components
            .iter()
            .filter(|c| c.support_lo < domain.lo || c.support_hi > domain.hi)
            .count()
    }

    /// Measure of the support inside `domain`.
    pub fn support_length(&self, domain: Interval) -> f64 {
        self.components
            .iter()
            .map(|c| (c.support_hi.min(domain.hi) - c.support_lo.max(domain.lo)).max(0.0))
            .sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.eval(x)).sum()
    }

    /// The bump restricted to `domain`, as knots.
    pub fn to_profile(&self, domain: Interval) -> Result<ArrowProfile> {
        let mut knots = vec![Knot {
            x: domain.lo,
            a: self.eval(domain.lo),
        }];
        for c in &self.components {
            for (x, a) in [
                (c.support_lo, 0.0),
                (c.plateau_lo, c.height),
                (c.plateau_hi, c.height),
                (c.support_hi, 0.0),
            ] {
                if x > domain.lo && x < domain.hi {
                    knots.push(Knot { x, a });
                }
            }
        }
        knots.push(Knot {
            x: domain.hi,
            a: self.eval(domain.hi),
        });
        ArrowProfile::from_knots(knots).map_err(|e| {
            Error::ConstructionInfeasible(format!("bump geometry below floating-point resolution: {e}"))
        })
    }
}
