//! Bounded-`L1` family with `A_{f_n} = n` on a prescribed null set.
//!
//! Cover `k` consists of balls of radius `h_k` around every target point,
//! with plateau radius `g_k = (h_k + h_{k+1}) / 2`, so that
//! `G_k ⋐ H_k ⊂ G_{k-1}`. With `m` points and
//! `h_k = θ eps w_k / (2m)`, `w_k = 1/(2k(k+1))`, the covers have total
//! length at most `θ eps / 2`, which bounds every `‖A_{f_n}‖_{L1}`.

use serde::{Deserialize, Serialize};

use super::bumps::{Ball, BumpSpec};
use super::{choose_anchor, family_of, partial_sums, BoundedRatioCertificate, Construction, ConstructionCertificate, TargetSetSpec};
use crate::error::{invalid, Error, Result};
use crate::generators::Interval;
use crate::quadrature::QuadratureConfig;

/// Safety factor keeping the cover lengths strictly below their budget.
const THETA: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop51Details {
    pub eps: f64,
    pub target_points: Vec<f64>,
    /// `λ(H_k)` achieved, `k = 1..=n_max`.
    pub cover_lengths: Vec<f64>,
    /// Outer radius `h_k` of the balls of cover `k`.
    pub support_radii: Vec<f64>,
    /// `max_{n, v} |A_{f_n}(v) - n|` over the target points.
    pub max_point_deviation: f64,
    pub bounded_ratio: BoundedRatioCertificate,
}

fn cover_weight(k: u32) -> f64 {
    let k = k as f64;
    1.0 / (2.0 * k * (k + 1.0))
}

/// Weights for which every mean of a generator with
/// `f'(s)/f'(t) <= h` on `[x, z]` stays below `y`.
///
/// Normalising `f(y) = 0`, the ratio bound gives
/// `f(y) - f(x) >= (y - x) f'(y) / h` and `f(z) - f(y) <= (z - y) h f'(y)`,
/// so `ξ f(x) + (1-ξ) f(z) < 0` as soon as `ξ/(1-ξ) > h² (z-y)/(y-x)`.
pub fn bounded_ratio_certificate(h: f64, x: f64, y: f64, z: f64) -> Result<BoundedRatioCertificate> {
    if !(h >= 1.0 && h.is_finite()) {
        return Err(invalid(format!("ratio bound must be at least 1, got {h}")));
    }
    if !(x < y && y < z) {
        return Err(invalid(format!("need x < y < z, got {x}, {y}, {z}")));
    }
    let h2 = h * h;
    let xi_star = h2 * (z - y) / ((y - x) + h2 * (z - y));
    let xi = 0.5 * (xi_star + 1.0);
    // at ξ = 1/2 the bound holds for y >= (x + h² z)/(1 + h²)
    let gap_at_half = (z - x) / (1.0 + h2);
    Ok(BoundedRatioCertificate {
        h,
        x,
        y,
        z,
        xi,
        xi_star,
        gap_at_half,
    })
}

/// Builds `A_{f_n} = s_1 + ... + s_n`, `n <= n_max`, on `u` for the target
/// set `v`.
pub fn build_prop51_family(
    v: &TargetSetSpec,
    eps: f64,
    u: Interval,
    n_max: u32,
    quad: &QuadratureConfig,
) -> Result<Construction> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    quad.validate()?;
    let points = &v.points;
    if points.is_empty() {
        return Err(invalid("target set is empty"));
    }
    if let Some(p) = points.iter().find(|p| !(**p > u.lo && **p < u.hi)) {
        return Err(Error::Domain(format!("target point {p} not inside the open interval {u}")));
    }

    let m = points.len() as f64;
    let radius = |k: u32| THETA * eps * cover_weight(k) / (2.0 * m);
    let h1 = radius(1);
    if points[0] - h1 <= u.lo || points[points.len() - 1] + h1 >= u.hi {
        return Err(Error::ConstructionInfeasible(format!(
            "covers of radius {h1} around the target points leave {u}; decrease eps"
        )));
    }
    let scale = points.iter().fold(1.0f64, |a, p| a.max(p.abs()));
    let ramp = 0.5 * (radius(n_max) - radius(n_max + 1));
    if ramp < 64.0 * f64::EPSILON * scale {
        return Err(Error::ConstructionInfeasible(format!(
            "cover {n_max} would need ramps of width {ramp}, below floating-point resolution"
        )));
    }

    let specs: Vec<BumpSpec> = (1..=n_max)
        .map(|k| {
            let (h, h_next) = (radius(k), radius(k + 1));
            let balls: Vec<Ball> = points
                .iter()
                .map(|&c| Ball {
                    center: c,
                    plateau: 0.5 * (h + h_next),
                    support: h,
                })
                .collect();
            BumpSpec::from_balls(&balls, 1.0)
        })
        .collect();
    let bumps = specs.iter().map(|s| s.to_profile(u)).collect::<Result<Vec<_>>>()?;
    let profiles = partial_sums(&bumps)?;

    let max_point_deviation = profiles
        .iter()
        .enumerate()
        .flat_map(|(i, p)| points.iter().map(move |&x| (p.eval(x) - (i + 1) as f64).abs()))
        .fold(0.0, f64::max);

    let width = u.width();
    let bounded_ratio = bounded_ratio_certificate(eps.exp(), u.lo + 0.1 * width, u.midpoint(), u.hi - 0.1 * width)?;
    let certificate = ConstructionCertificate {
        construction: "prop51".into(),
        per_k_l1: bumps.iter().map(|b| b.l1_norm()).collect(),
        per_n_l1: profiles.iter().map(|p| p.l1_norm()).collect(),
        clipped: specs.iter().map(|s| s.clipped(u)).sum(),
        prop51: Some(Prop51Details {
            eps,
            target_points: points.clone(),
            cover_lengths: specs.iter().map(|s| s.support_length(u)).collect(),
            support_radii: (1..=n_max).map(radius).collect(),
            max_point_deviation,
            bounded_ratio,
        }),
        prop53: None,
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
