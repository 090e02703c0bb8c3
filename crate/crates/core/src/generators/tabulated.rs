//! Generators reconstructed from a prescribed Arrow profile.
//!
//! With the normalisation `f(anchor) = 0`, `f'(anchor) = 1`:
//!
//! ```text
//! ln f'(t) = ∫_anchor^t A,      f(τ) = ∫_anchor^τ f'(t) dt,      f'' = A f'.
//! ```
//!
//! `ln f'` is exact for piecewise-linear profiles (piecewise quadratic).
//! `f` is tabulated on a node grid of spacing at most `max_step` merged with
//! the profile knots; between nodes it is completed by a local quadrature of
//! the exact `f'`, so it stays strictly increasing.

use super::{ArrowProfile, Generator};
use crate::error::{invalid, Result};
use crate::quadrature::{self, QuadratureConfig};

pub(crate) struct ArrowGenerator {
    profile: ArrowProfile,
    anchor: f64,
    /// `ln f'` at every profile knot.
    log_d1: Vec<f64>,
    nodes: Vec<f64>,
    values: Vec<f64>,
    quad: QuadratureConfig,
}

/// Reconstructs the generator whose Arrow operator is `profile`,
/// normalised at `anchor`.
pub fn generator_from_arrow(profile: &ArrowProfile, anchor: f64, quad: &QuadratureConfig) -> Result<Generator> {
    let domain = profile.domain();
    quad.validate()?;
    if !(anchor > domain.lo && anchor < domain.hi) {
        return Err(invalid(format!("anchor {anchor} must lie strictly inside {domain}")));
    }
    let arrow = ArrowGenerator::new(profile.clone(), anchor, *quad)?;
    Ok(Generator::from_arrow(domain, arrow))
}

impl ArrowGenerator {
    fn new(profile: ArrowProfile, anchor: f64, quad: QuadratureConfig) -> Result<Self> {
        let knots = profile.knots();
        let ja = profile.piece_index(anchor);

        // ln f' at knots, propagated outward from the anchor's piece.
        let mut log_d1 = vec![0.0; knots.len()];
        let pa = profile.piece(ja);
        log_d1[ja] = -partial_integral(pa.lo, pa.hi, pa.a_lo, pa.a_hi, anchor - pa.lo);
        log_d1[ja + 1] = partial_integral(pa.lo, pa.hi, pa.a_lo, pa.a_hi, pa.hi - pa.lo) + log_d1[ja];
        for j in ja + 1..knots.len() - 1 {
            let h = knots[j + 1].x - knots[j].x;
            log_d1[j + 1] = log_d1[j] + 0.5 * h * (knots[j].a + knots[j + 1].a);
        }
        for j in (0..ja).rev() {
            let h = knots[j + 1].x - knots[j].x;
            log_d1[j] = log_d1[j + 1] - 0.5 * h * (knots[j].a + knots[j + 1].a);
        }

        let domain = profile.domain();
        let cells = (domain.width() / quad.max_step).ceil().max(1.0) as usize;
        let mut nodes: Vec<f64> = domain.grid(cells + 1);
        nodes.extend(knots.iter().map(|k| k.x));
        nodes.push(anchor);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();

        let mut gen = ArrowGenerator {
            profile,
            anchor,
            log_d1,
            nodes,
            values: Vec::new(),
            quad,
        };

        let ia = gen
            .nodes
            .binary_search_by(|x| x.total_cmp(&anchor))
            .expect("anchor is a node");
        let mut values = vec![0.0; gen.nodes.len()];
        for i in ia + 1..gen.nodes.len() {
            values[i] = values[i - 1] + gen.integrate_d1(gen.nodes[i - 1], gen.nodes[i])?;
        }
        for i in (0..ia).rev() {
            values[i] = values[i + 1] - gen.integrate_d1(gen.nodes[i], gen.nodes[i + 1])?;
        }
        gen.values = values;
        Ok(gen)
    }

    fn integrate_d1(&self, a: f64, b: f64) -> Result<f64> {
        quadrature::integrate(|t| self.log_deriv1(t).exp(), a, b, &[], &self.quad)
    }

    pub(crate) fn anchor(&self) -> f64 {
        self.anchor
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        self.profile.knots().iter().map(|k| k.x).collect()
    }

    pub(crate) fn log_deriv1(&self, t: f64) -> f64 {
        let j = self.profile.piece_index(t);
        let p = self.profile.piece(j);
        self.log_d1[j] + partial_integral(p.lo, p.hi, p.a_lo, p.a_hi, t - p.lo)
    }

    pub(crate) fn deriv1(&self, t: f64) -> f64 {
        self.log_deriv1(t).exp()
    }

    pub(crate) fn deriv2(&self, t: f64) -> f64 {
        self.arrow(t) * self.deriv1(t)
    }

    pub(crate) fn arrow(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }

    fn node_index(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|&t| t <= x);
        idx.saturating_sub(1).min(self.nodes.len() - 2)
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let i = self.node_index(x);
        let base = self.nodes[i];
        if x == base {
            return self.values[i];
        }
        match self.integrate_d1(base, x) {
            Ok(v) => self.values[i] + v,
            Err(_) => f64::NAN,
        }
    }

    pub(crate) fn eval_relative(&self, x: f64, anchor: f64) -> f64 {
        (self.eval(x) - self.eval(anchor)) * (-self.log_deriv1(anchor)).exp()
    }

    /// Shrinks `[a, b]` to the node cell whose tabulated values straddle `y`.
    pub(crate) fn narrow(&self, y: f64, a: f64, b: f64) -> (f64, f64) {
        let j = self.values.partition_point(|&v| v <= y);
        if j == 0 || j == self.values.len() {
            return (a, b);
        }
        let lo = self.nodes[j - 1].max(a);
        let hi = self.nodes[j].min(b);
        if lo < hi {
            (lo, hi)
        } else {
            (a, b)
        }
    }
}

/// `∫_lo^{lo+s} A` for the affine piece through `(lo, a_lo)`, `(hi, a_hi)`.
fn partial_integral(lo: f64, hi: f64, a_lo: f64, a_hi: f64, s: f64) -> f64 {
    let slope = (a_hi - a_lo) / (hi - lo);
    s * (a_lo + 0.5 * slope * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{Interval, Knot, Trapezoid};

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn zero_profile_gives_shifted_identity() {
        let p = ArrowProfile::constant(unit(), 0.0).unwrap();
        let g = generator_from_arrow(&p, 0.3, &QuadratureConfig::default()).unwrap();
        for x in [0.0, 0.1, 0.3, 0.55, 1.0] {
            assert!((g.eval(x) - (x - 0.3)).abs() < 1e-14);
        }
        assert_eq!(g.eval(0.3), 0.0);
        assert_eq!(g.deriv1(0.3), 1.0);
    }

    #[test]
    fn constant_profile_matches_closed_form() {
        let quad = QuadratureConfig::default();
        for t in [-3.0, -0.5, 1.0, 4.0] {
            let p = ArrowProfile::constant(unit(), t).unwrap();
            let g = generator_from_arrow(&p, 0.4, &quad).unwrap();
            for x in [0.0, 0.123, 0.4, 0.77, 1.0] {
                let want = (t * (x - 0.4f64)).exp_m1() / t;
                assert!((g.eval(x) - want).abs() <= quad.abs_tol, "t={t} x={x}");
                assert!((g.arrow(x).unwrap() - t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn anchor_must_be_interior() {
        let p = ArrowProfile::constant(unit(), 1.0).unwrap();
        assert!(generator_from_arrow(&p, 0.0, &QuadratureConfig::default()).is_err());
        assert!(generator_from_arrow(&p, 1.5, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn impossible_tolerance_is_a_quadrature_error() {
        let p = ArrowProfile::constant(unit(), 50.0).unwrap();
        let quad = QuadratureConfig::new(crate::quadrature::QuadMethod::CompositeSimpson, 0.5, 1e-300).unwrap();
        let err = generator_from_arrow(&p, 0.5, &quad).unwrap_err();
        assert!(matches!(err, crate::error::Error::Quadrature(_)));
    }

    #[test]
    fn trapezoid_round_trip_and_finite_differences() {
        let t = Trapezoid {
            support_lo: 0.2,
            plateau_lo: 0.35,
            plateau_hi: 0.5,
            support_hi: 0.6,
            height: 8.0,
        };
        let p = ArrowProfile::from_trapezoids(unit(), &[t]).unwrap();
        let g = generator_from_arrow(&p, 0.1, &QuadratureConfig::default()).unwrap();
        let h = 1e-6;
        for i in 1..100 {
            let x = i as f64 / 100.0 + 0.0031;
            assert!((g.arrow(x).unwrap() - p.eval(x)).abs() < 1e-12);
            // A recovered from the tabulated derivatives
            let fd = (g.log_abs_deriv1(x + h) - g.log_abs_deriv1(x - h)) / (2.0 * h);
            assert!((fd - p.eval(x)).abs() < 1e-6, "x={x} fd={fd}");
            let fd1 = (g.eval(x + h) - g.eval(x - h)) / (2.0 * h);
            assert!((fd1 - g.deriv1(x)).abs() < 1e-6 * g.deriv1(x).max(1.0));
        }
        // ln f'(0.9) = total mass of the bump
        let mass = p.integral(0.0, 1.0);
        assert!((g.log_abs_deriv1(0.9) - mass).abs() < 1e-13);
    }

    #[test]
    fn inversion_on_tabulated_generator() {
        let p = ArrowProfile::from_knots(vec![
            Knot { x: 0.0, a: 0.0 },
            Knot { x: 0.5, a: 20.0 },
            Knot { x: 1.0, a: 0.0 },
        ])
        .unwrap();
        let g = generator_from_arrow(&p, 0.25, &QuadratureConfig::default()).unwrap();
        for x in [0.0, 0.01, 0.3, 0.5, 0.71, 0.999, 1.0] {
            let back = g.invert(g.eval(x), unit()).unwrap();
            assert!((back - x).abs() < 1e-9, "x={x} back={back}");
        }
    }
}
