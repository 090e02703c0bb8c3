//! Pointwise comparison of generators through the Arrow operator
//! `A_f = f''/f'`: `A_f <= A_g` on the domain exactly when every mean
//! generated by `f` is at most the corresponding mean generated by `g`.
//!
//! Orderings are certified on a finite grid only; the verdict carries the
//! grid it was checked on.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generators::Generator;

/// Absolute tolerance for comparing Arrow values.
pub const ARROW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    #[serde(rename = "f_le_g")]
    FLeG,
    #[serde(rename = "g_le_f")]
    GLeF,
    EqualAffine,
    Incomparable,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::FLeG => "f_le_g",
            Relation::GLeF => "g_le_f",
            Relation::EqualAffine => "equal_affine",
            Relation::Incomparable => "incomparable",
        }
    }
}

/// Two grid points where `A_f - A_g` takes opposite strict signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// A point with `A_f > A_g`.
    pub f_above: f64,
    /// A point with `A_f < A_g`.
    pub g_above: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub relation: Relation,
    pub witness: Option<Witness>,
    pub grid: Vec<f64>,
}

pub fn arrow_operator(g: &Generator, x: f64) -> Result<f64> {
    let domain = g.domain();
    if !domain.contains(x) {
        return Err(Error::Domain(format!("{x} outside {domain}")));
    }
    g.arrow(x)
}

pub fn compare_generators(f: &Generator, g: &Generator, grid: &[f64]) -> Result<OrderingVerdict> {
    if grid.is_empty() {
        return Err(invalid("comparison grid is empty"));
    }
    let mut f_above = None;
    let mut g_above = None;
    for &x in grid {
        let d = arrow_operator(f, x)? - arrow_operator(g, x)?;
        if !d.is_finite() {
            return Err(Error::Internal(format!("non-finite Arrow difference at {x}")));
        }
        if d > ARROW_TOL && f_above.is_none() {
            f_above = Some(x);
        }
        if d < -ARROW_TOL && g_above.is_none() {
            g_above = Some(x);
        }
    }
    let (relation, witness) = match (f_above, g_above) {
        (None, None) => (Relation::EqualAffine, None),
        (None, Some(_)) => (Relation::FLeG, None),
        (Some(_), None) => (Relation::GLeF, None),
        (Some(a), Some(b)) => (
            Relation::Incomparable,
            Some(Witness {
                f_above: a,
                g_above: b,
            }),
        ),
    };
    Ok(OrderingVerdict {
        relation,
        witness,
        grid: grid.to_vec(),
    })
}

/// Least-squares fit `f ≈ α g + β` on the grid, kept only when the largest
/// residual is at most `1e-8` times the range of `f` on the grid.
pub fn affine_fit(f: &Generator, g: &Generator, grid: &[f64]) -> Option<(f64, f64)> {
    if grid.len() < 3 {
        return None;
    }
    let fv: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    let gv: Vec<f64> = grid.iter().map(|&x| g.eval(x)).collect();
    if fv.iter().chain(&gv).any(|v| !v.is_finite()) {
        return None;
    }
    let n = grid.len() as f64;
    let gm = gv.iter().sum::<f64>() / n;
    let fm = fv.iter().sum::<f64>() / n;
    let sgg: f64 = gv.iter().map(|v| (v - gm) * (v - gm)).sum();
    let sgf: f64 = gv.iter().zip(&fv).map(|(a, b)| (a - gm) * (b - fm)).sum();
    if sgg == 0.0 {
        return None;
    }
    let alpha = sgf / sgg;
    let beta = fm - alpha * gm;
    if alpha == 0.0 || !alpha.is_finite() {
        return None;
    }
    let range = fv.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - fv.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = fv
        .iter()
        .zip(&gv)
        .map(|(fy, gy)| (fy - (alpha * gy + beta)).abs())
        .fold(0.0, f64::max);
    (worst <= 1e-8 * range).then_some((alpha, beta))
}
