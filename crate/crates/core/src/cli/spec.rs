//! Parsers for the small command-line grammars.
//!
//! ```text
//! generator  identity | log | power:P | exp:T | affine(GEN,A,B)   [@LO,HI]
//! family     exp-seq[:S[,O]]@LO,HI | power-seq[:S[,O]]@LO,HI
//!            | constant:GEN@LO,HI | file:PATH
//! n-grid     A..B | A..B..STEP
//! points     pq=P,Q | xyz=X,Y,Z | query=X,Z,XI
//! target     midpoint | points:V1,V2,... | cantor:DEPTH[@LO,HI]
//! ```

use std::path::Path;

use crate::constructions::{FamilyArtifact, TargetSetSpec};
use crate::diagnostics::NGrid;
use crate::error::{invalid, Result};
use crate::generators::{
    affine_transform, builtin_family, builtin_generator, BuiltinKind, FamilyKind, Generator, GeneratorFamily, Interval,
    ParamRule, QuadratureConfig,
};
use crate::means::TwoPointQuery;

pub fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| invalid(format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(format!("`{s}` is not finite")));
    }
    Ok(v)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

/// `LO,HI`
pub fn parse_interval(s: &str) -> Result<Interval> {
    match parse_list(s)?.as_slice() {
        [lo, hi] => Interval::new(*lo, *hi),
        _ => Err(invalid(format!("expected `LO,HI`, got `{s}`"))),
    }
}

/// Splits `BODY@LO,HI` at the last `@` outside parentheses.
fn split_domain(s: &str) -> Result<(&str, Option<Interval>)> {
    let mut depth = 0i32;
    let mut at = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '@' if depth == 0 => at = Some(i),
            _ => {}
        }
    }
    match at {
        Some(i) => Ok((&s[..i], Some(parse_interval(&s[i + 1..])?))),
        None => Ok((s, None)),
    }
}

/// Splits at commas outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// A generator; `default_domain` is used when the spec carries none.
pub fn parse_generator(s: &str, default_domain: Option<Interval>) -> Result<Generator> {
    let (body, domain) = split_domain(s.trim())?;
    let domain = domain
        .or(default_domain)
        .ok_or_else(|| invalid(format!("generator `{s}` needs a domain `@LO,HI`")))?;
    generator_body(body.trim(), domain)
}

fn generator_body(body: &str, domain: Interval) -> Result<Generator> {
    if let Some(inner) = body.strip_prefix("affine(").and_then(|r| r.strip_suffix(')')) {
        let parts = split_top_level(inner);
        if parts.len() != 3 {
            return Err(invalid(format!("expected `affine(GEN,A,B)`, got `{body}`")));
        }
        let g = generator_body(parts[0].trim(), domain)?;
        return affine_transform(&g, parse_f64(parts[1])?, parse_f64(parts[2])?);
    }
    let kind = match body.split_once(':') {
        None if body == "identity" => BuiltinKind::Identity,
        None if body == "log" => BuiltinKind::Log,
        Some(("power", p)) => BuiltinKind::Power(parse_f64(p)?),
        Some(("exp", t)) => BuiltinKind::Exponential(parse_f64(t)?),
        _ => return Err(invalid(format!("unknown generator `{body}`"))),
    };
    builtin_generator(kind, domain)
}

fn param_rule(params: Option<&str>) -> Result<ParamRule> {
    let Some(p) = params else {
        return Ok(ParamRule::linear(1.0));
    };
    match parse_list(p)?.as_slice() {
        [scale] => Ok(ParamRule::linear(*scale)),
        [scale, offset] => Ok(ParamRule::Linear {
            scale: *scale,
            offset: *offset,
        }),
        _ => Err(invalid(format!("expected `SCALE[,OFFSET]`, got `{p}`"))),
    }
}

pub fn parse_family(s: &str, quad: &QuadratureConfig) -> Result<GeneratorFamily> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix("file:") {
        return FamilyArtifact::load(Path::new(path))?.to_family(quad);
    }
    let (body, domain) = split_domain(s)?;
    let domain = domain.ok_or_else(|| invalid(format!("family `{s}` needs a domain `@LO,HI`")))?;
    if let Some(gen) = body.strip_prefix("constant:") {
        return builtin_family(FamilyKind::Constant(generator_body(gen.trim(), domain)?), domain);
    }
    let (kind, params) = match body.split_once(':') {
        Some((k, p)) => (k, Some(p)),
        None => (body, None),
    };
    let rule = param_rule(params)?;
    match kind {
        "exp-seq" => builtin_family(FamilyKind::ExpSeq(rule), domain),
        "power-seq" => builtin_family(FamilyKind::PowerSeq(rule), domain),
        _ => Err(invalid(format!("unknown family kind `{kind}`"))),
    }
}

/// `A..B` or `A..B..STEP`.
pub fn parse_ngrid(s: &str) -> Result<NGrid> {
    let parts: Vec<&str> = s.trim().split("..").collect();
    let num = |p: &str| {
        p.trim()
            .parse::<u32>()
            .map_err(|_| invalid(format!("`{p}` is not a non-negative integer in n-grid `{s}`")))
    };
    match parts.as_slice() {
        [a, b] => NGrid::range(num(a)?, num(b)?, 1),
        [a, b, step] => NGrid::range(num(a)?, num(b)?, num(step)?),
        _ => Err(invalid(format!("expected `A..B[..STEP]`, got `{s}`"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointSet {
    Pq(f64, f64),
    Xyz(f64, f64, f64),
    Query(TwoPointQuery),
}

pub fn parse_points(s: &str) -> Result<PointSet> {
    let (kind, values) = s
        .split_once('=')
        .ok_or_else(|| invalid(format!("expected `pq=..`, `xyz=..` or `query=..`, got `{s}`")))?;
    let v = parse_list(values)?;
    match (kind.trim(), v.as_slice()) {
        ("pq", [p, q]) => Ok(PointSet::Pq(*p, *q)),
        ("xyz", [x, y, z]) => Ok(PointSet::Xyz(*x, *y, *z)),
        ("query", [x, z, xi]) => Ok(PointSet::Query(TwoPointQuery::new(*x, *z, *xi)?)),
        _ => Err(invalid(format!("malformed point set `{s}`"))),
    }
}

/// Target sets for the bounded-`L1` construction on `u`. A Cantor set
/// without explicit base sits on `u` shrunk by a tenth of its width on
/// each side.
pub fn parse_target(s: &str, u: Interval) -> Result<TargetSetSpec> {
    let s = s.trim();
    if s == "midpoint" {
        return Ok(TargetSetSpec::midpoint(u));
    }
    if let Some(list) = s.strip_prefix("points:") {
        return TargetSetSpec::finite_points(u, parse_list(list)?);
    }
    if let Some(rest) = s.strip_prefix("cantor:") {
        let (depth, base) = split_domain(rest)?;
        let depth: u32 = depth
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad Cantor depth in `{s}`")))?;
        let base = match base {
            Some(b) => b,
            None => Interval::new(u.lo + 0.1 * u.width(), u.hi - 0.1 * u.width())?,
        };
        return TargetSetSpec::cantor(base, depth);
    }
    Err(invalid(format!("unknown target `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn generators() {
        assert_eq!(parse_generator("power:2@1,2", None).unwrap().eval(1.5), 2.25);
        let g = parse_generator("affine(power:2,3,1)", Some(Interval::new(1.0, 2.0).unwrap())).unwrap();
        assert_eq!(g.eval(2.0), 13.0);
        let g = parse_generator("affine(affine(exp:1,2,0),-1,5)@0,1", None).unwrap();
        assert!((g.eval(0.0) - 3.0).abs() < 1e-15);
        assert!(parse_generator("power:2", None).is_err());
        assert!(parse_generator("cosh@0,1", None).is_err());
        assert!(matches!(parse_generator("log@-1,1", None), Err(Error::Domain(_))));
    }

    #[test]
    fn families() {
        let q = QuadratureConfig::default();
        let f = parse_family("exp-seq@0,1", &q).unwrap();
        assert_eq!(f.at(2).unwrap().arrow(0.5).unwrap(), 2.0);
        let f = parse_family("exp-seq:2,1@0,1", &q).unwrap();
        assert_eq!(f.at(2).unwrap().arrow(0.5).unwrap(), 5.0);
        let f = parse_family("power-seq@1,2", &q).unwrap();
        assert_eq!(f.at(3).unwrap().eval(2.0), 8.0);
        let f = parse_family("constant:affine(power:2,3,1)@1,2", &q).unwrap();
        assert_eq!(f.at(9).unwrap().eval(1.0), 4.0);
        assert!(parse_family("exp-seq", &q).is_err());
        assert!(parse_family("gamma-seq@0,1", &q).is_err());
        assert!(parse_family("file:/nonexistent/x.json", &q).is_err());
    }

    #[test]
    fn ngrids() {
        assert_eq!(parse_ngrid("1..64").unwrap().len(), 64);
        assert_eq!(parse_ngrid("2..10..4").unwrap().indices(), &[2, 6, 10]);
        assert!(parse_ngrid("0..5").is_err());
        assert!(parse_ngrid("5").is_err());
        assert!(parse_ngrid("1..x").is_err());
    }

    #[test]
    fn points() {
        assert_eq!(parse_points("pq=0,1").unwrap(), PointSet::Pq(0.0, 1.0));
        assert_eq!(parse_points("xyz=0,0.5,1").unwrap(), PointSet::Xyz(0.0, 0.5, 1.0));
        assert!(matches!(parse_points("query=0,1,0.5").unwrap(), PointSet::Query(_)));
        assert!(parse_points("query=0,1,1.5").is_err());
        assert!(parse_points("pq=0").is_err());
        assert!(parse_points("abc").is_err());
    }

    #[test]
    fn targets() {
        assert_eq!(parse_target("midpoint", unit()).unwrap().points, vec![0.5]);
        assert_eq!(parse_target("points:0.7,0.2", unit()).unwrap().points, vec![0.2, 0.7]);
        let c = parse_target("cantor:2", unit()).unwrap();
        assert!((c.base.lo - 0.1).abs() < 1e-15 && (c.base.hi - 0.9).abs() < 1e-15);
        let c = parse_target("cantor:1@0.2,0.5", unit()).unwrap();
        assert_eq!(c.points.len(), 4);
        assert!(parse_target("cloud", unit()).is_err());
    }
}
