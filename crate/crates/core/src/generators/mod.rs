//! Generators of quasi-arithmetic means.
//!
//! A [`Generator`] is a strictly monotone function on a finite interval with
//! first and (usually) second derivatives and an inverse, either in closed
//! form or numeric. Built-in generators (power, exponential, logarithm,
//! identity) are evaluated in closed form; generators reconstructed from an
//! Arrow profile are tabulated (see [`generator_from_arrow`]).

mod family;
mod profile;
mod tabulated;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use crate::quadrature::{QuadMethod, QuadratureConfig};
pub use family::{builtin_family, FamilyKind, GeneratorFamily, ParamRule};
pub use profile::{ArrowProfile, Knot, Piece, Trapezoid};
pub use tabulated::generator_from_arrow;

use tabulated::ArrowGenerator;

/// Distance kept from singular endpoints such as `0` for `log`.
pub const SINGULAR_MARGIN: f64 = 1e-12;

/// Bisection stops once the bracket is narrower than this.
const BISECTION_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(invalid(format!("interval endpoints must be finite, got [{lo}, {hi}]")));
        }
        if lo >= hi {
            return Err(invalid(format!("interval requires lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    /// `[-hi, -lo]`.
    pub fn reflect(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// `count` evenly spaced points including both endpoints.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![self.midpoint()],
            _ => {
                let step = self.width() / (count - 1) as f64;
                (0..count)
                    .map(|i| {
                        if i + 1 == count {
                            self.hi
                        } else {
                            self.lo + i as f64 * step
                        }
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinKind {
    /// `x^p`
    Power(f64),
    /// `e^{t x}`
    Exponential(f64),
    Log,
    Identity,
}

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user supplied generator given by closures.
pub struct CustomGenerator {
    direction: Direction,
    eval: ScalarFn,
    deriv1: ScalarFn,
    deriv2: Option<ScalarFn>,
    inverse: Option<ScalarFn>,
}

impl CustomGenerator {
    pub fn new<F, D>(direction: Direction, eval: F, deriv1: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CustomGenerator {
            direction,
            eval: Box::new(eval),
            deriv1: Box::new(deriv1),
            deriv2: None,
            inverse: None,
        }
    }

    pub fn with_deriv2<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.deriv2 = Some(Box::new(f));
        self
    }

    pub fn with_inverse<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.inverse = Some(Box::new(f));
        self
    }
}

#[derive(Clone)]
enum Repr {
    Identity,
    Power(f64),
    Exp(f64),
    Log,
    Affine {
        inner: Arc<Generator>,
        alpha: f64,
        beta: f64,
    },
    Reflected(Arc<Generator>),
    Arrow(Arc<ArrowGenerator>),
    Custom(Arc<CustomGenerator>),
}

/// A strictly monotone generator on a finite interval.
///
/// Cloning is cheap; all heavy state is shared.
#[derive(Clone)]
pub struct Generator {
    domain: Interval,
    repr: Repr,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generator({} on {})", self.describe(), self.domain)
    }
}

/// Builds one of the closed-form generators.
pub fn builtin_generator(kind: BuiltinKind, domain: Interval) -> Result<Generator> {
    let repr = match kind {
        BuiltinKind::Identity => Repr::Identity,
        BuiltinKind::Power(p) => {
            if !p.is_finite() || p == 0.0 {
                return Err(invalid(format!("power exponent must be finite and non-zero, got {p}")));
            }
            require_positive_domain("power", &domain)?;
            Repr::Power(p)
        }
        BuiltinKind::Exponential(t) => {
            if !t.is_finite() || t == 0.0 {
                return Err(invalid(format!("exponential rate must be finite and non-zero, got {t}")));
            }
            Repr::Exp(t)
        }
        BuiltinKind::Log => {
            require_positive_domain("log", &domain)?;
            Repr::Log
        }
    };
    Ok(Generator { domain, repr })
}

fn require_positive_domain(name: &str, domain: &Interval) -> Result<()> {
    if domain.lo < SINGULAR_MARGIN {
        return Err(Error::Domain(format!(
            "{name} generator needs a domain inside (0, inf) with margin {SINGULAR_MARGIN}, got {domain}"
        )));
    }
    Ok(())
}

/// `alpha * g + beta`. The mean it generates is the same as that of `g`.
pub fn affine_transform(g: &Generator, alpha: f64, beta: f64) -> Result<Generator> {
    if !alpha.is_finite() || alpha == 0.0 {
        return Err(invalid(format!("affine factor must be finite and non-zero, got {alpha}")));
    }
    if !beta.is_finite() {
        return Err(invalid(format!("affine shift must be finite, got {beta}")));
    }
    Ok(Generator {
        domain: g.domain,
        repr: Repr::Affine {
            inner: Arc::new(g.clone()),
            alpha,
            beta,
        },
    })
}

/// Solves `g(x) = y` for `x` inside `bracket`.
pub fn invert(g: &Generator, y: f64, bracket: Interval) -> Result<f64> {
    g.invert(y, bracket)
}

impl Generator {
    pub fn custom(domain: Interval, custom: CustomGenerator) -> Generator {
        Generator {
            domain,
            repr: Repr::Custom(Arc::new(custom)),
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn direction(&self) -> Direction {
        match &self.repr {
            Repr::Identity | Repr::Log | Repr::Arrow(_) => Direction::Increasing,
            Repr::Power(p) | Repr::Exp(p) => {
                if *p > 0.0 {
                    Direction::Increasing
                } else {
                    Direction::Decreasing
                }
            }
            Repr::Affine { inner, alpha, .. } => {
                if *alpha > 0.0 {
                    inner.direction()
                } else {
                    inner.direction().flip()
                }
            }
            Repr::Reflected(inner) => inner.direction().flip(),
            Repr::Custom(c) => c.direction,
        }
    }

    pub fn is_increasing(&self) -> bool {
        self.direction() == Direction::Increasing
    }

    /// Short human readable form, e.g. `power:2` or `affine(exp:1,3,-1)`.
    pub fn describe(&self) -> String {
        match &self.repr {
            Repr::Identity => "identity".into(),
            Repr::Power(p) => format!("power:{p}"),
            Repr::Exp(t) => format!("exp:{t}"),
            Repr::Log => "log".into(),
            Repr::Affine { inner, alpha, beta } => {
                format!("affine({},{alpha},{beta})", inner.describe())
            }
            Repr::Reflected(inner) => format!("reflect({})", inner.describe()),
            Repr::Arrow(t) => format!("arrow-profile(anchor={})", t.anchor()),
            Repr::Custom(_) => "custom".into(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Identity => x,
            Repr::Power(p) => x.powf(*p),
            Repr::Exp(t) => (t * x).exp(),
            Repr::Log => x.ln(),
            Repr::Affine { inner, alpha, beta } => alpha * inner.eval(x) + beta,
            Repr::Reflected(inner) => inner.eval(-x),
            Repr::Arrow(t) => t.eval(x),
            Repr::Custom(c) => (c.eval)(x),
        }
    }

    pub fn deriv1(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Identity => 1.0,
            Repr::Power(p) => p * x.powf(p - 1.0),
            Repr::Exp(t) => t * (t * x).exp(),
            Repr::Log => 1.0 / x,
            Repr::Affine { inner, alpha, .. } => alpha * inner.deriv1(x),
            Repr::Reflected(inner) => -inner.deriv1(-x),
            Repr::Arrow(t) => t.deriv1(x),
            Repr::Custom(c) => (c.deriv1)(x),
        }
    }

    pub fn has_deriv2(&self) -> bool {
        match &self.repr {
            Repr::Affine { inner, .. } | Repr::Reflected(inner) => inner.has_deriv2(),
            Repr::Custom(c) => c.deriv2.is_some(),
            _ => true,
        }
    }

    pub fn deriv2(&self, x: f64) -> Result<f64> {
        Ok(match &self.repr {
            Repr::Identity => 0.0,
            Repr::Power(p) => p * (p - 1.0) * x.powf(p - 2.0),
            Repr::Exp(t) => t * t * (t * x).exp(),
            Repr::Log => -1.0 / (x * x),
            Repr::Affine { inner, alpha, .. } => alpha * inner.deriv2(x)?,
            Repr::Reflected(inner) => inner.deriv2(-x)?,
            Repr::Arrow(t) => t.deriv2(x),
            Repr::Custom(c) => match &c.deriv2 {
                Some(d2) => d2(x),
                None => {
                    return Err(Error::UnsupportedGenerator(
                        "generator has no second derivative".into(),
                    ))
                }
            },
        })
    }

    /// `f''(x) / f'(x)`, evaluated without forming the (possibly
    /// overflowing) derivatives when a closed form exists.
    pub fn arrow(&self, x: f64) -> Result<f64> {
        Ok(match &self.repr {
            Repr::Identity => 0.0,
            Repr::Power(p) => (p - 1.0) / x,
            Repr::Exp(t) => *t,
            Repr::Log => -1.0 / x,
            Repr::Affine { inner, .. } => inner.arrow(x)?,
            Repr::Reflected(inner) => -inner.arrow(-x)?,
            Repr::Arrow(t) => t.arrow(x),
            Repr::Custom(c) => match &c.deriv2 {
                Some(d2) => d2(x) / (c.deriv1)(x),
                None => {
                    return Err(Error::UnsupportedGenerator(
                        "generator has no second derivative".into(),
                    ))
                }
            },
        })
    }

    /// `ln |f'(x)|` in closed form where possible.
    pub fn log_abs_deriv1(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Identity => 0.0,
            Repr::Power(p) => p.abs().ln() + (p - 1.0) * x.ln(),
            Repr::Exp(t) => t.abs().ln() + t * x,
            Repr::Log => -x.ln(),
            Repr::Affine { inner, alpha, .. } => alpha.abs().ln() + inner.log_abs_deriv1(x),
            Repr::Reflected(inner) => inner.log_abs_deriv1(-x),
            Repr::Arrow(t) => t.log_deriv1(x),
            Repr::Custom(c) => (c.deriv1)(x).abs().ln(),
        }
    }

    /// `(f(x) - f(anchor)) / |f'(anchor)|`: the generator normalised to
    /// vanish at `anchor` with unit slope there. Stays finite far beyond
    /// the point where `f` itself overflows for exponential-type
    /// generators.
    pub fn eval_relative(&self, x: f64, anchor: f64) -> f64 {
        match &self.repr {
            Repr::Identity => x - anchor,
            Repr::Power(p) => anchor * (p * (x / anchor).ln()).exp_m1() / p.abs(),
            Repr::Exp(t) => (t * (x - anchor)).exp_m1() / t.abs(),
            Repr::Log => anchor * (x / anchor).ln(),
            Repr::Affine { inner, alpha, .. } => alpha.signum() * inner.eval_relative(x, anchor),
            Repr::Reflected(inner) => inner.eval_relative(-x, -anchor),
            Repr::Arrow(t) => t.eval_relative(x, anchor),
            Repr::Custom(c) => ((c.eval)(x) - (c.eval)(anchor)) / (c.deriv1)(anchor).abs(),
        }
    }

    /// Closed-form inverse, when one is known.
    pub fn closed_inverse(&self, y: f64) -> Option<f64> {
        match &self.repr {
            Repr::Identity => Some(y),
            Repr::Power(p) => Some(y.powf(1.0 / p)),
            Repr::Exp(t) => Some(y.ln() / t),
            Repr::Log => Some(y.exp()),
            Repr::Affine { inner, alpha, beta } => inner.closed_inverse((y - beta) / alpha),
            Repr::Reflected(inner) => inner.closed_inverse(y).map(|x| -x),
            Repr::Arrow(_) => None,
            Repr::Custom(c) => c.inverse.as_ref().map(|inv| inv(y)),
        }
    }

    /// Points where the second derivative may be discontinuous. Quadrature
    /// of the Arrow operator splits at these.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Affine { inner, .. } => inner.breakpoints(),
            Repr::Reflected(inner) => inner.breakpoints().into_iter().rev().map(|x| -x).collect(),
            Repr::Arrow(t) => t.breakpoints(),
            _ => Vec::new(),
        }
    }

    /// The generator with its direction normalised to increasing
    /// (`-f` replaces a decreasing `f`); generates the same mean.
    pub fn increasing(&self) -> Generator {
        match self.direction() {
            Direction::Increasing => self.clone(),
            Direction::Decreasing => Generator {
                domain: self.domain,
                repr: Repr::Affine {
                    inner: Arc::new(self.clone()),
                    alpha: -1.0,
                    beta: 0.0,
                },
            },
        }
    }

    /// `x -> f(-x)` on the reflected domain.
    pub fn reflect(&self) -> Generator {
        if let Repr::Reflected(inner) = &self.repr {
            return (**inner).clone();
        }
        Generator {
            domain: self.domain.reflect(),
            repr: Repr::Reflected(Arc::new(self.clone())),
        }
    }

    pub fn invert(&self, y: f64, bracket: Interval) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::NoBracket {
                target: y,
                lo: bracket.lo,
                hi: bracket.hi,
                image_lo: f64::NAN,
                image_hi: f64::NAN,
            });
        }
        // Work with an increasing function h = s * f and target s * y.
        let sign = match self.direction() {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        };
        let h = |x: f64| sign * self.eval(x);
        let target = sign * y;

        let (mut a, mut b) = (bracket.lo, bracket.hi);
        let (ha, hb) = (h(a), h(b));
        let slack = 1e-12 * target.abs().max(1.0);
        if !(target >= ha - slack && target <= hb + slack) {
            let (image_lo, image_hi) = if sign > 0.0 { (ha, hb) } else { (-hb, -ha) };
            return Err(Error::NoBracket {
                target: y,
                lo: a,
                hi: b,
                image_lo,
                image_hi,
            });
        }
        if target <= ha {
            return Ok(a);
        }
        if target >= hb {
            return Ok(b);
        }

        if let Some(x) = self.closed_inverse(y) {
            if x.is_finite() {
                return Ok(x.clamp(a, b));
            }
        }

        if let Repr::Arrow(t) = &self.repr {
            // sign is +1 here: arrow generators are increasing
            (a, b) = t.narrow(target, a, b);
        }

        while b - a > BISECTION_WIDTH.max(4.0 * f64::EPSILON * a.abs().max(b.abs())) {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if h(m) < target {
                a = m;
            } else {
                b = m;
            }
        }

        // derivative polish
        let mut x = 0.5 * (a + b);
        let mut resid = h(x) - target;
        for _ in 0..3 {
            if resid == 0.0 {
                break;
            }
            let slope = sign * self.deriv1(x);
            if !(slope.is_finite() && slope > 0.0) {
                break;
            }
            let cand = x - resid / slope;
            if !(cand >= a && cand <= b) {
                break;
            }
            let cand_resid = h(cand) - target;
            if cand_resid.abs() >= resid.abs() {
                break;
            }
            x = cand;
            resid = cand_resid;
        }
        Ok(x)
    }

    pub(crate) fn from_arrow(domain: Interval, arrow: ArrowGenerator) -> Generator {
        Generator {
            domain,
            repr: Repr::Arrow(Arc::new(arrow)),
        }
    }
}
