//! Increasing max-family whose `X_∞` is a null set of dimension zero.
//!
//! `c_k` has height `k²` on `Q_k = ∪_{i<=k} B(q_i, 1/(k² 2^i))` and vanishes
//! outside the doubled balls, where `q_1, q_2, ...` enumerate the
//! rationals of the domain.

use serde::{Deserialize, Serialize};

use super::bumps::{Ball, BumpSpec};
use super::targets::rational_enumeration;
use super::{choose_anchor, family_of, partial_sums, Construction, ConstructionCertificate};
use crate::error::{invalid, Error, Result};
use crate::generators::{ArrowProfile, Interval};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop53Details {
    pub rationals: Vec<f64>,
    pub queries: Vec<QueryIntegrals>,
}

/// Integral growth of `A_{f_n}` over one query interval `(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryIntegrals {
    pub x: f64,
    pub y: f64,
    /// First enumerated rational inside `(x, y)` and its 1-based position.
    pub focus: Option<f64>,
    pub focus_index: Option<usize>,
    /// `max(i, first k whose plateau ball around q_i fits in (x, y))`.
    pub k0: Option<u32>,
    /// `∫_x^y c_k`, `k = 1..=max_k`.
    pub per_k: Vec<f64>,
    /// `∫_x^y A_{f_n}`, `n = 1..=max_k`.
    pub per_n: Vec<f64>,
    /// `(n - k0) 2^{1-i}` for `n > k0`.
    pub lower_bounds: Vec<Option<f64>>,
}

fn plateau_radius(k: u32, i: usize) -> f64 {
    1.0 / ((k as f64).powi(2) * 2f64.powi(i as i32))
}

fn query_integrals(x: f64, y: f64, rationals: &[f64], bumps: &[ArrowProfile], profiles: &[ArrowProfile]) -> QueryIntegrals {
    let focus_index = rationals.iter().position(|&q| q > x && q < y);
    let focus = focus_index.map(|i| rationals[i]);
    let k0 = focus_index.and_then(|pos| {
        let i = pos + 1;
        let q = rationals[pos];
        let fits = (1..=bumps.len() as u32).find(|&k| {
            let r = plateau_radius(k, i);
            q - r > x && q + r < y
        })?;
        Some(fits.max(i as u32))
    });
    let lower_bounds = (1..=profiles.len() as u32)
        .map(|n| match (k0, focus_index) {
            (Some(k0), Some(pos)) if n > k0 => Some((n - k0) as f64 * 2f64.powi(-(pos as i32))),
            _ => None,
        })
        .collect();
    QueryIntegrals {
        x,
        y,
        focus,
        focus_index: focus_index.map(|p| p + 1),
        k0,
        per_k: bumps.iter().map(|b| b.integral(x, y)).collect(),
        per_n: profiles.iter().map(|p| p.integral(x, y)).collect(),
        lower_bounds,
    }
}

/// Builds `A_{f_n} = c_1 + ... + c_n`, `n <= max_k`, on `u`. Each query
/// `(x, y)` gets its integral certificate; with no queries the middle 60%
/// of `u` is used.
pub fn build_prop53_family(
    u: Interval,
    max_k: u32,
    rational_count: usize,
    queries: &[(f64, f64)],
    quad: &QuadratureConfig,
) -> Result<Construction> {
    if max_k == 0 {
        return Err(invalid("max_k must be at least 1"));
    }
    if rational_count < max_k as usize {
        return Err(invalid(format!(
            "rational_count {rational_count} must be at least max_k {max_k}"
        )));
    }
    quad.validate()?;
    let default_query = [(u.lo + 0.2 * u.width(), u.hi - 0.2 * u.width())];
    let queries = if queries.is_empty() { &default_query[..] } else { queries };
    for &(x, y) in queries {
        if !(x < y && u.contains(x) && u.contains(y)) {
            return Err(invalid(format!("query ({x}, {y}) must satisfy x < y inside {u}")));
        }
    }

    let rationals = rational_enumeration(u, rational_count);
    let specs: Vec<BumpSpec> = (1..=max_k)
        .map(|k| {
            let balls: Vec<Ball> = rationals
                .iter()
                .take(k as usize)
                .enumerate()
                .map(|(pos, &q)| {
                    let r = plateau_radius(k, pos + 1);
                    Ball {
                        center: q,
                        plateau: r,
                        support: 2.0 * r,
                    }
                })
                .collect();
            BumpSpec::from_balls(&balls, (k as f64).powi(2))
        })
        .collect();
    let smallest = plateau_radius(max_k, max_k as usize);
    if smallest < 64.0 * f64::EPSILON * u.lo.abs().max(u.hi.abs()).max(1.0) {
        return Err(Error::ConstructionInfeasible(format!(
            "ball radius {smallest} at k = {max_k} is below floating-point resolution"
        )));
    }
    let bumps = specs.iter().map(|s| s.to_profile(u)).collect::<Result<Vec<_>>>()?;
    let profiles = partial_sums(&bumps)?;

    let certificate = ConstructionCertificate {
        construction: "prop53".into(),
        per_k_l1: bumps.iter().map(|b| b.l1_norm()).collect(),
        per_n_l1: profiles.iter().map(|p| p.l1_norm()).collect(),
        clipped: specs.iter().map(|s| s.clipped(u)).sum(),
        prop51: None,
        prop53: Some(Prop53Details {
            queries: queries
                .iter()
                .map(|&(x, y)| query_integrals(x, y, &rationals, &bumps, &profiles))
                .collect(),
            rationals,
        }),
    };

    let anchor = choose_anchor(&profiles[profiles.len() - 1]);
    let family = family_of(&profiles, anchor, quad)?;
    Ok(Construction {
        family,
        profiles,
        anchor,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn focus_and_lower_bound() {
        let c = build_prop53_family(unit(), 32, 32, &[], &QuadratureConfig::default()).unwrap();
        let q = &c.certificate.prop53.as_ref().unwrap().queries[0];
        assert_eq!((q.x, q.y), (0.2, 0.8));
        assert_eq!(q.focus, Some(0.5));
        assert_eq!(q.focus_index, Some(1));
        // 1/(k² 2) < 0.3 first holds at k = 2
        assert_eq!(q.k0, Some(2));
        for (i, lb) in q.lower_bounds.iter().enumerate() {
            let n = i as u32 + 1;
            match lb {
                Some(b) => {
                    assert!(n > 2);
                    assert_eq!(*b, (n - 2) as f64);
                    assert!(q.per_n[i] > *b);
                }
                None => assert!(n <= 2),
            }
        }
        assert!(q.per_n.windows(2).all(|w| w[1] > w[0]));
        for k in 2..=32 {
            assert!(q.per_k[k - 1] > 1.0);
        }
    }

    #[test]
    fn bumps_have_expected_heights() {
        let c = build_prop53_family(unit(), 6, 10, &[], &QuadratureConfig::default()).unwrap();
        // every c_k has its plateau at 1/2
        for (i, p) in c.profiles.iter().enumerate() {
            let n = i as f64 + 1.0;
            let want = n * (n + 1.0) * (2.0 * n + 1.0) / 6.0;
            assert_eq!(p.eval(0.5), want);
            assert!(p.min_value() >= 0.0);
        }
        // c_1 covers the whole unit interval, so there is no zero run
        assert_eq!(c.anchor, 0.5);
    }

    #[test]
    fn clipping_is_counted() {
        // the first ball around 1/2 reaches past a short domain
        let u = Interval::new(0.3, 0.7).unwrap();
        let c = build_prop53_family(u, 3, 3, &[], &QuadratureConfig::default()).unwrap();
        assert!(c.certificate.clipped > 0);
        assert!(c.profiles[0].eval(0.3) > 0.0);
    }

    #[test]
    fn validation() {
        let quad = QuadratureConfig::default();
        assert!(build_prop53_family(unit(), 0, 4, &[], &quad).is_err());
        assert!(build_prop53_family(unit(), 5, 4, &[], &quad).is_err());
        assert!(build_prop53_family(unit(), 5, 5, &[(0.6, 0.4)], &quad).is_err());
        assert!(matches!(
            build_prop53_family(unit(), 60, 60, &[], &quad),
            Err(Error::ConstructionInfeasible(_))
        ));
    }
}
