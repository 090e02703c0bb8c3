//! Arrow-profile families built from sums of bumps.
//!
//! * [`build_prop51_family`]: bumps of height 1 on shrinking covers of a
//!   null set `V`. `A_{f_n} -> ∞` on `V` while `‖A_{f_n}‖_{L1}` stays
//!   below `eps`, so the family is not a max-family.
//! * [`build_prop53_family`]: bumps of height `k²` on shrinking balls around
//!   the rationals. `∫_x^y A_{f_n} -> ∞` on every interval (a max-family)
//!   while `X_∞` has Hausdorff dimension zero.

mod bumps;
mod prop51;
mod prop53;
mod targets;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use bumps::BumpSpec;
pub use prop51::{bounded_ratio_certificate, build_prop51_family, Prop51Details};
pub use prop53::{build_prop53_family, Prop53Details, QueryIntegrals};
pub use targets::{covering_bound, covering_sum, rational_enumeration, TargetKind, TargetSetSpec, MAX_CANTOR_DEPTH};

use crate::error::{invalid, Error, Result};
use crate::generators::{builtin_family, ArrowProfile, FamilyKind, GeneratorFamily, Interval, Knot, QuadratureConfig};

/// Bound on the mean `M(x, z, ξ) < y < z` obtained from the derivative-ratio
/// bound `f'(s)/f'(t) <= h` on `[x, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedRatioCertificate {
    pub h: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Weight guaranteeing `M(x, z, ξ) < y`.
    pub xi: f64,
    /// Smallest weight for which the bound gives `M <= y`.
    pub xi_star: f64,
    /// Lower bound on `z - M(x, z, 1/2)`.
    pub gap_at_half: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionCertificate {
    pub construction: String,
    /// `‖bump_k‖_{L1}` for `k = 1..=n_max`.
    pub per_k_l1: Vec<f64>,
    /// `‖A_{f_n}‖_{L1}` for `n = 1..=n_max`.
    pub per_n_l1: Vec<f64>,
    /// Bump components cut off at the domain ends.
    pub clipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop51: Option<Prop51Details>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop53: Option<Prop53Details>,
}

/// A constructed family with the data needed to rebuild it.
#[derive(Debug, Clone)]
pub struct Construction {
    pub family: GeneratorFamily,
    /// `A_{f_n}` for `n = 1..=n_max`.
    pub profiles: Vec<ArrowProfile>,
    pub anchor: f64,
    pub certificate: ConstructionCertificate,
}

impl Construction {
    pub fn domain(&self) -> Interval {
        self.profiles[0].domain()
    }

    pub fn artifact(&self, with_certificate: bool) -> FamilyArtifact {
        FamilyArtifact {
            domain: self.domain(),
            anchor: self.anchor,
            profiles: self
                .profiles
                .iter()
                .enumerate()
                .map(|(i, p)| ProfileRecord {
                    n: i as u32 + 1,
                    knots: p.knots().to_vec(),
                })
                .collect(),
            certificate: with_certificate.then(|| self.certificate.clone()),
        }
    }
}

/// Anchor for the generators: inside the longest zero run of the last
/// (pointwise largest) profile, else the domain midpoint.
pub(crate) fn choose_anchor(last: &ArrowProfile) -> f64 {
    last.longest_zero_run_midpoint()
        .unwrap_or_else(|| last.domain().midpoint())
}

/// Running sums `b_1, b_1 + b_2, ...` of the bump profiles.
pub(crate) fn partial_sums(bumps: &[ArrowProfile]) -> Result<Vec<ArrowProfile>> {
    let mut out: Vec<ArrowProfile> = Vec::with_capacity(bumps.len());
    for b in bumps {
        let next = match out.last() {
            Some(prev) => prev.add(b)?,
            None => b.clone(),
        };
        out.push(next);
    }
    Ok(out)
}

pub(crate) fn family_of(profiles: &[ArrowProfile], anchor: f64, quad: &QuadratureConfig) -> Result<GeneratorFamily> {
    let domain = profiles
        .first()
        .ok_or_else(|| invalid("family needs at least one profile"))?
        .domain();
    builtin_family(
        FamilyKind::ArrowProfileSeq {
            profiles: profiles.to_vec(),
            anchor,
            quad: *quad,
        },
        domain,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub n: u32,
    pub knots: Vec<Knot>,
}

/// On-disk form of an Arrow-profile family:
/// `{domain: {lo, hi}, anchor, profiles: [{n, knots: [{x, a}]}], certificate?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyArtifact {
    pub domain: Interval,
    pub anchor: f64,
    pub profiles: Vec<ProfileRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ConstructionCertificate>,
}

impl FamilyArtifact {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(format!("cannot serialise artifact: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("malformed family artifact: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checked profiles, in index order.
    pub fn profiles(&self) -> Result<Vec<ArrowProfile>> {
        let domain = Interval::new(self.domain.lo, self.domain.hi)?;
        if self.profiles.is_empty() {
            return Err(invalid("artifact has no profiles"));
        }
        self.profiles
            .iter()
            .enumerate()
            .map(|(i, rec)| {
                if rec.n as usize != i + 1 {
                    return Err(invalid(format!("artifact profile {} has index {}", i + 1, rec.n)));
                }
                let p = ArrowProfile::from_knots(rec.knots.clone())?;
                if p.domain() != domain {
                    return Err(invalid(format!("profile {} spans {} instead of {domain}", rec.n, p.domain())));
                }
                Ok(p)
            })
            .collect()
    }

    pub fn to_family(&self, quad: &QuadratureConfig) -> Result<GeneratorFamily> {
        family_of(&self.profiles()?, self.anchor, quad)
    }
}
