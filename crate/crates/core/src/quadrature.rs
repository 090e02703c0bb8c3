//! Simpson-based quadrature used for Arrow-profile tabulation and the
//! integral criterion.
//!
//! The tolerance is mixed: a result is accepted when the estimated error is
//! at most `abs_tol * max(1, |integral|)`, so wide-dynamic-range integrands
//! (derivatives of steep generators) are held to a relative standard.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const MAX_DEPTH: u32 = 48;
const MAX_COMPOSITE_CELLS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    CompositeSimpson,
    AdaptiveSimpson,
}

impl std::str::FromStr for QuadMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "composite-simpson" | "composite" => Ok(QuadMethod::CompositeSimpson),
            "adaptive-simpson" | "adaptive" => Ok(QuadMethod::AdaptiveSimpson),
            other => Err(invalid(format!("unknown quadrature method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: QuadMethod,
    pub max_step: f64,
    pub abs_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            method: QuadMethod::AdaptiveSimpson,
            max_step: 1e-3,
            abs_tol: 1e-10,
        }
    }
}

impl QuadratureConfig {
    pub fn new(method: QuadMethod, max_step: f64, abs_tol: f64) -> Result<Self> {
        let cfg = QuadratureConfig {
            method,
            max_step,
            abs_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return Err(invalid(format!("max_step must be > 0, got {}", self.max_step)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(invalid(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        Ok(())
    }
}

/// Integrates `f` over `[a, b]`, splitting at every breakpoint strictly
/// inside the interval. Reversed limits give the negated integral.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("integration limits must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, breakpoints, cfg).map(|v| -v);
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let total_len = b - a;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for w in edges.windows(2) {
        let share = (w[1] - w[0]) / total_len;
        let part = match cfg.method {
            QuadMethod::CompositeSimpson => composite(&f, w[0], w[1], cfg, share)?,
            QuadMethod::AdaptiveSimpson => adaptive(&f, w[0], w[1], cfg, share)?,
        };
        // Neumaier summation
        let t = sum + part;
        if sum.abs() >= part.abs() {
            comp += (sum - t) + part;
        } else {
            comp += (part - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

fn simpson_sum<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cells: usize) -> f64 {
    let n = 2 * cells;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig, share: f64) -> Result<f64> {
    let mut cells = ((b - a) / cfg.max_step).ceil().max(1.0) as usize;
    let mut coarse = simpson_sum(f, a, b, cells);
    loop {
        let fine = simpson_sum(f, a, b, 2 * cells);
        if !fine.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        let err = (fine - coarse).abs() / 15.0;
        if err <= cfg.abs_tol * share.max(f64::EPSILON) * fine.abs().max(1.0) {
            return Ok(fine + (fine - coarse) / 15.0);
        }
        cells *= 2;
        if cells > MAX_COMPOSITE_CELLS {
            return Err(Error::Quadrature(format!(
                "composite Simpson did not reach tolerance {} on [{a}, {b}] (error estimate {err:e})",
                cfg.abs_tol
            )));
        }
        coarse = fine;
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig, share: f64) -> Result<f64> {
    let cells = ((b - a) / cfg.max_step).ceil().max(1.0) as usize;
    let h = (b - a) / cells as f64;

    // A coarse pass fixes the relative scale of the tolerance.
    let scale = simpson_sum(f, a, b, cells).abs().max(1.0);
    let tol = cfg.abs_tol * share.max(f64::EPSILON) * scale / cells as f64;

    let mut total = 0.0;
    for i in 0..cells {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == cells { b } else { a + (i + 1) as f64 * h };
        let flo = f(lo);
        let fhi = f(hi);
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += recurse(f, lo, hi, flo, fmid, fhi, whole, tol, MAX_DEPTH)?;
    }
    if !total.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integral on [{a}, {b}]")));
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand near {m}")));
    }
    // Past this width the midpoint no longer moves in floating point.
    let exhausted = (b - a) <= 8.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300);
    if delta.abs() <= 15.0 * tol || exhausted {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "adaptive Simpson exceeded depth {MAX_DEPTH} near [{a}, {b}]"
        )));
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}
