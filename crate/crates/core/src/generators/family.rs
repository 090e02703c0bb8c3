use std::fmt;
use std::sync::{Arc, OnceLock};

use super::{builtin_generator, generator_from_arrow, ArrowProfile, BuiltinKind, Generator, Interval};
use crate::error::{invalid, Error, Result};
use crate::quadrature::QuadratureConfig;

type Producer = dyn Fn(u32) -> Result<Generator> + Send + Sync;

/// An index-to-generator sequence `n -> f_n`, `n >= 1`, on a shared domain.
#[derive(Clone)]
pub struct GeneratorFamily {
    label: String,
    domain: Interval,
    producer: Arc<Producer>,
}

impl fmt::Debug for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneratorFamily({} on {})", self.label, self.domain)
    }
}

impl GeneratorFamily {
    pub fn from_fn<F>(label: impl Into<String>, domain: Interval, f: F) -> Self
    where
        F: Fn(u32) -> Result<Generator> + Send + Sync + 'static,
    {
        GeneratorFamily {
            label: label.into(),
            domain,
            producer: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn at(&self, n: u32) -> Result<Generator> {
        if n == 0 {
            return Err(invalid("family indices start at 1"));
        }
        let g = (self.producer)(n)?;
        if g.domain() != self.domain {
            return Err(Error::Internal(format!(
                "family `{}` produced a generator on {} instead of {}",
                self.label,
                g.domain(),
                self.domain
            )));
        }
        Ok(g)
    }
}

/// Rule for the parameter sequence of a power or exponential family.
#[derive(Clone)]
pub enum ParamRule {
    /// `scale * n + offset`
    Linear { scale: f64, offset: f64 },
    Custom(Arc<dyn Fn(u32) -> f64 + Send + Sync>),
}

impl ParamRule {
    pub fn linear(scale: f64) -> ParamRule {
        ParamRule::Linear { scale, offset: 0.0 }
    }

    pub fn value(&self, n: u32) -> f64 {
        match self {
            ParamRule::Linear { scale, offset } => scale * n as f64 + offset,
            ParamRule::Custom(f) => f(n),
        }
    }

    fn validate(&self) -> Result<()> {
        if let ParamRule::Linear { scale, offset } = self {
            if !(scale.is_finite() && offset.is_finite()) {
                return Err(invalid("parameter rule coefficients must be finite"));
            }
            if *scale == 0.0 && *offset == 0.0 {
                return Err(invalid("parameter rule is identically zero"));
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        match self {
            ParamRule::Linear { scale, offset } if *offset == 0.0 => format!("{scale}*n"),
            ParamRule::Linear { scale, offset } => format!("{scale}*n+{offset}"),
            ParamRule::Custom(_) => "custom".into(),
        }
    }
}

pub enum FamilyKind {
    /// `x^{p_n}`
    PowerSeq(ParamRule),
    /// `e^{t_n x}`
    ExpSeq(ParamRule),
    /// The same generator for every index.
    Constant(Generator),
    /// `f_n = generator_from_arrow(profiles[n-1], anchor)`.
    ArrowProfileSeq {
        profiles: Vec<ArrowProfile>,
        anchor: f64,
        quad: QuadratureConfig,
    },
}

pub fn builtin_family(kind: FamilyKind, domain: Interval) -> Result<GeneratorFamily> {
    match kind {
        FamilyKind::PowerSeq(rule) => {
            rule.validate()?;
            // surfaces domain errors at construction rather than per index
            builtin_generator(BuiltinKind::Power(1.0), domain)?;
            let label = format!("power-seq(p_n={})", rule.describe());
            Ok(GeneratorFamily::from_fn(label, domain, move |n| {
                builtin_generator(BuiltinKind::Power(rule.value(n)), domain)
            }))
        }
        FamilyKind::ExpSeq(rule) => {
            rule.validate()?;
            let label = format!("exp-seq(t_n={})", rule.describe());
            Ok(GeneratorFamily::from_fn(label, domain, move |n| {
                builtin_generator(BuiltinKind::Exponential(rule.value(n)), domain)
            }))
        }
        FamilyKind::Constant(g) => {
            if g.domain() != domain {
                return Err(Error::Domain(format!(
                    "constant family on {domain} given a generator on {}",
                    g.domain()
                )));
            }
            let label = format!("constant({})", g.describe());
            Ok(GeneratorFamily::from_fn(label, domain, move |_| Ok(g.clone())))
        }
        FamilyKind::ArrowProfileSeq { profiles, anchor, quad } => {
            if profiles.is_empty() {
                return Err(invalid("arrow-profile family needs at least one profile"));
            }
            if let Some(p) = profiles.iter().find(|p| p.domain() != domain) {
                return Err(Error::Domain(format!(
                    "profile on {} does not match family domain {domain}",
                    p.domain()
                )));
            }
            quad.validate()?;
            if !(anchor > domain.lo && anchor < domain.hi) {
                return Err(invalid(format!("anchor {anchor} must lie strictly inside {domain}")));
            }
            let count = profiles.len();
            let cache: Arc<Vec<OnceLock<Result<Generator>>>> =
                Arc::new((0..count).map(|_| OnceLock::new()).collect());
            let profiles = Arc::new(profiles);
            let label = format!("arrow-profile-seq(n<={count})");
            Ok(GeneratorFamily::from_fn(label, domain, move |n| {
                let i = n as usize - 1;
                if i >= count {
                    return Err(invalid(format!("index {n} beyond the {count} profiles of this family")));
                }
                cache[i]
                    .get_or_init(|| generator_from_arrow(&profiles[i], anchor, &quad))
                    .clone()
            }))
        }
    }
}
