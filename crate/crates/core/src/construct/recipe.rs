//! Construction recipes such as `(13,4,10)_13^Iq,s(8)`.
//!
//! ```text
//! recipe    := base [ "^" transform ("," transform)* ]
//! base      := "(" n "," k "," d ")_" q  |  name
//! name      := letter+ "(" int ("," int)* ")"
//! transform := "Iq" | name | "s(" k ")" | "x" | "x(" n ")"
//! ```
//!
//! After a q-ary base the first transform picks the inner code: `Iq` for the
//! identity or a registered binary code by name.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{concat_identity, concat_inner, extend_greedy, inner_affine_lines, inner_inversive_plane, shorten_zero};
use crate::binmat::BinaryCode;
use crate::error::{Error, Result};
use crate::gf::{rs_code, rs_code_extended, Field, QaryCode, DEFAULT_ENUMERATION_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    Qary { n: usize, k: usize, d: usize, q: u64 },
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inner {
    Identity,
    Named(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// `s(k)`: k zero-shortening steps.
    Shorten(usize),
    /// `x`: greedy extension, to the build target or to an explicit size.
    Extend(Option<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub base: Base,
    pub inner: Option<Inner>,
    pub transforms: Vec<Transform>,
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.base {
            Base::Qary { n, k, d, q } => write!(f, "({n},{k},{d})_{q}")?,
            Base::Named(name) => f.write_str(name)?,
        }
        let mut parts: Vec<String> = Vec::new();
        match &self.inner {
            Some(Inner::Identity) => parts.push("Iq".into()),
            Some(Inner::Named(name)) => parts.push(name.clone()),
            None => {}
        }
        for t in &self.transforms {
            parts.push(match t {
                Transform::Shorten(k) => format!("s({k})"),
                Transform::Extend(None) => "x".into(),
                Transform::Extend(Some(n)) => format!("x({n})"),
            });
        }
        if !parts.is_empty() {
            write!(f, "^{}", parts.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: &str| Error::Recipe {
            descriptor: s.to_string(),
            msg: msg.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (base_str, rest) = match compact.split_once('^') {
            Some((b, r)) => (b, Some(r)),
            None => (compact.as_str(), None),
        };
        let base = if let Some(body) = base_str.strip_prefix('(') {
            let (nums, q) = body.split_once(")_").ok_or_else(|| err("expected (n,k,d)_q"))?;
            let nums: Vec<usize> = nums
                .split(',')
                .map(|x| x.parse().map_err(|_| err("bad integer in (n,k,d)")))
                .collect::<Result<_>>()?;
            let [n, k, d] = nums[..] else {
                return Err(err("expected three parameters (n,k,d)"));
            };
            let q = q.parse().map_err(|_| err("bad field order"))?;
            Base::Qary { n, k, d, q }
        } else if is_name(base_str) {
            Base::Named(base_str.to_string())
        } else {
            return Err(err("unrecognised base"));
        };
        let mut inner = None;
        let mut transforms = Vec::new();
        if let Some(rest) = rest {
            for (i, tok) in split_top_level(rest).into_iter().enumerate() {
                let tr = parse_transform(tok);
                match tr {
                    Some(Tok::Inner(x)) if i == 0 && matches!(base, Base::Qary { .. }) => inner = Some(x),
                    Some(Tok::Inner(_)) => return Err(err("inner code must come first, after a q-ary base")),
                    Some(Tok::Transform(t)) => transforms.push(t),
                    None => return Err(err(&format!("unknown transform {tok:?}"))),
                }
            }
        }
        if matches!(base, Base::Qary { .. }) && inner.is_none() {
            return Err(err("a q-ary base needs an inner code (Iq or a named code)"));
        }
        Ok(Recipe { base, inner, transforms })
    }
}

enum Tok {
    Inner(Inner),
    Transform(Transform),
}

fn parse_transform(tok: &str) -> Option<Tok> {
    if tok == "Iq" || tok == "I_q" {
        return Some(Tok::Inner(Inner::Identity));
    }
    if tok == "x" {
        return Some(Tok::Transform(Transform::Extend(None)));
    }
    if let Some(k) = tok.strip_prefix("s(").and_then(|r| r.strip_suffix(')')) {
        return k.parse().ok().map(|k| Tok::Transform(Transform::Shorten(k)));
    }
    if let Some(n) = tok.strip_prefix("x(").and_then(|r| r.strip_suffix(')')) {
        return n.parse().ok().map(|n| Tok::Transform(Transform::Extend(Some(n))));
    }
    is_name(tok).then(|| Tok::Inner(Inner::Named(tok.to_string())))
}

fn is_name(s: &str) -> bool {
    let Some(open) = s.find('(') else { return false };
    let (head, args) = s.split_at(open);
    !head.is_empty()
        && head.chars().all(|c| c.is_ascii_alphabetic())
        && head != "s"
        && head != "x"
        && args.ends_with(')')
        && args[1..args.len() - 1]
            .split(',')
            .all(|a| !a.is_empty() && a.chars().all(|c| c.is_ascii_digit()))
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Named binary codes available to recipes. The default registry holds
/// `A(9,4,3)`, realised by the lines of AG(2,3) (a length-9, weight-3,
/// distance-4 code with 12 words), and `S(3,5,17)`, the 68 circles of the
/// inversive plane of order 4.
#[derive(Clone, Debug)]
pub struct Registry {
    codes: BTreeMap<String, BinaryCode>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        let lines = inner_affine_lines(3).expect("3 is prime").with_descriptor("A(9,4,3)");
        r.register("A(9,4,3)", lines);
        let circles = inner_inversive_plane(4).expect("4 is a prime power");
        r.register("S(3,5,17)", circles);
        r
    }
}

impl Registry {
    pub fn empty() -> Self {
        Self { codes: BTreeMap::new() }
    }

    pub fn register(&mut self, name: impl Into<String>, code: BinaryCode) {
        self.codes.insert(name.into(), code);
    }

    pub fn get(&self, name: &str) -> Result<&BinaryCode> {
        self.codes
            .get(name)
            .ok_or_else(|| Error::UnavailableIngredient(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.codes.keys().map(String::as_str)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub target_n: usize,
    pub seed: u64,
    /// Draw budget for `x` extensions.
    pub max_draws: u64,
}

impl BuildOptions {
    pub fn new(target_n: usize) -> Self {
        Self { target_n, seed: 0, max_draws: 10_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub code: BinaryCode,
    /// Column count after each stage, labelled.
    pub stages: Vec<(String, usize)>,
}

/// The outer q-ary code named by a recipe base: Reed–Solomon for `n ≤ q`,
/// the doubly extended Reed–Solomon code for `n = q + 1`.
pub fn outer_code(n: usize, k: usize, d: usize, q: u64) -> Result<QaryCode> {
    let field = Field::of_order(q)?;
    let code = if n == q as usize + 1 {
        rs_code_extended(&field, k)?
    } else {
        rs_code(&field, n, k)?
    };
    if code.distance() != d {
        return Err(Error::InvalidParams(format!(
            "({n},{k},{d})_{q}: an MDS code of this length and dimension has distance {}",
            code.distance()
        )));
    }
    Ok(code)
}

pub fn build_recipe(recipe: &Recipe, opts: &BuildOptions, registry: &Registry) -> Result<BuildOutcome> {
    let rerr = |msg: String| Error::Recipe {
        descriptor: recipe.to_string(),
        msg,
    };
    let target = opts.target_n;
    if target == 0 {
        return Err(rerr("target n must be at least 1".into()));
    }
    let mut stages = Vec::new();
    let needs_all = recipe.transforms.iter().any(|t| matches!(t, Transform::Shorten(_)));
    let mut code = match &recipe.base {
        Base::Qary { n, k, d, q } => {
            let outer = outer_code(*n, *k, *d, *q)?;
            let size = outer.size();
            let count = if needs_all { size } else { size.min(target as u128) };
            if count > DEFAULT_ENUMERATION_LIMIT {
                return Err(Error::EnumerationLimit { count, limit: DEFAULT_ENUMERATION_LIMIT });
            }
            let c = match recipe.inner.as_ref().expect("parser requires an inner code") {
                Inner::Identity => concat_identity(&outer, count as usize)?,
                Inner::Named(name) => concat_inner(&outer, registry.get(name)?, count as usize)?,
            };
            stages.push((outer.label(), c.n()));
            c
        }
        Base::Named(name) => {
            let c = registry.get(name)?.clone();
            stages.push((name.clone(), c.n()));
            c
        }
    };
    for tr in &recipe.transforms {
        match *tr {
            Transform::Shorten(k) => {
                code = shorten_zero(&code, k)?.code;
                stages.push((format!("s({k})"), code.n()));
            }
            Transform::Extend(n) => {
                let goal = n.unwrap_or(target);
                code = extend_greedy(&code, goal, opts.seed, opts.max_draws)?.code;
                stages.push(("x".into(), code.n()));
            }
        }
    }
    if code.n() < target {
        return Err(rerr(format!("yields only {} columns, target {target}", code.n())));
    }
    let code = code.truncate(target)?.with_descriptor(recipe.to_string());
    Ok(BuildOutcome { code, stages })
}

/// Parse and build in one step.
pub fn build_descriptor(descriptor: &str, opts: &BuildOptions, registry: &Registry) -> Result<BuildOutcome> {
    build_recipe(&descriptor.parse()?, opts, registry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "(13,4,10)_13^Iq,s(8)",
            "(9,3,7)_13^Iq,s(4),x",
            "(7,4,4)_11^A(9,4,3)",
            "C(65,9,3)^s(1)",
            "A(21,8,7)",
            "(10,4,7)_11^Iq,x(200)",
        ] {
            let r: Recipe = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        let r: Recipe = "( 10, 4, 7 )_11 ^ I_q".parse().unwrap();
        assert_eq!(r.to_string(), "(10,4,7)_11^Iq");
    }

    #[test]
    fn parse_errors() {
        for s in ["(10,4)_11^Iq", "(10,4,7)_11", "(10,4,7)_11^s(2)", "(10,4,7)_11^Iq,zz", "A(9,4,3)^Iq", "?"] {
            assert!(s.parse::<Recipe>().is_err(), "{s}");
        }
    }

    #[test]
    fn printed_builds() {
        let reg = Registry::default();
        let c = build_descriptor("(10,4,7)_11^Iq", &BuildOptions::new(14_400), &reg).unwrap().code;
        assert_eq!((c.t(), c.n(), c.meta().certified_d), (110, 14_400, Some(3)));
        let c = build_descriptor("(16,4,13)_16^Iq,s(23)", &BuildOptions::new(14_400), &reg).unwrap().code;
        assert_eq!((c.t(), c.n(), c.meta().certified_d), (233, 14_400, Some(5)));
        let c = build_descriptor("(13,3,11)_25^Iq,s(2)", &BuildOptions::new(14_400), &reg).unwrap().code;
        assert_eq!((c.t(), c.n(), c.meta().certified_d), (323, 14_400, Some(6)));
        let c = build_descriptor("(7,4,4)_11^A(9,4,3)", &BuildOptions::new(14_400), &reg).unwrap().code;
        assert_eq!((c.t(), c.n(), c.meta().certified_d), (63, 14_400, Some(2)));
    }

    #[test]
    fn missing_ingredients() {
        let reg = Registry::default();
        assert!(matches!(
            build_descriptor("A(51,8,7)", &BuildOptions::new(3600), &reg),
            Err(Error::UnavailableIngredient(_))
        ));
        assert!(build_descriptor("(10,4,6)_11^Iq", &BuildOptions::new(10), &reg).is_err());
        assert!(build_descriptor("(10,4,7)_11^Iq,s(60)", &BuildOptions::new(3600), &reg).is_err());
    }
}
