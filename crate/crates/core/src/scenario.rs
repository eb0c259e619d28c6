//! Scenario files: line-oriented `block key=value ...` configuration.
//!
//! ```text
//! field p=2 t=4 modulus=1,1,0,0,1
//! code n=16 k=7 u=4
//! goodpoly family=additive theta=1,0,1 nbar=4
//! scheme kind=gw_subfield delta=2
//! failures 1:2,3,4
//! helpers 2,3,4
//! seed 42
//! ```
//!
//! Racks and nodes are numbered from 1. `failures random` draws a pattern
//! from the seed, and `failures random racks=2` fixes how many racks fail.
//! `failures none` runs no repair. `helpers all`, the default, uses every
//! surviving rack. `message 1,2,3` fixes the message coefficients;
//! otherwise they are drawn from the seed.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Gf};
use crate::good_poly::GoodPolynomial;
use crate::poly::Poly;
use crate::rack::rack_params;
use crate::repair::{plan, FailureSpec, RepairPlan, SchemeConfig};
use crate::rs::{CodeParams, RackShape};
use crate::sim::{random_failures, random_failures_in, random_message};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Power { m: u64 },
    Additive { theta: Vec<u32> },
    Composite { theta: Vec<u32>, m: u64, e: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failures {
    None,
    /// Drawn from the seed; `Some(m)` fixes the number of failed racks.
    Random(Option<usize>),
    /// Zero-based `(rack, nodes)`.
    Listed(Vec<(usize, Vec<usize>)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub p: u32,
    pub t: u32,
    pub modulus: Option<Vec<u32>>,
    pub n: usize,
    pub k: usize,
    pub u: usize,
    pub family: FamilySpec,
    pub nbar: Option<usize>,
    pub scheme: SchemeConfig,
    pub failures: Failures,
    /// Zero-based helper racks; `None` for every surviving rack.
    pub helpers: Option<Vec<usize>>,
    pub message: Option<Vec<u32>>,
    pub seed: u64,
}

/// Everything needed to run one repair.
#[derive(Clone, Debug)]
pub struct Instance {
    pub gf: Gf,
    pub gp: GoodPolynomial,
    pub params: CodeParams,
    pub shape: RackShape,
    pub f: Poly,
    pub spec: FailureSpec,
    pub helpers: Vec<usize>,
    pub plan: RepairPlan,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| err(line, format!("{key}: cannot parse {v:?}")))
}

fn list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|x| num(line, key, x.trim())).collect()
}

fn one_based(line: usize, v: usize) -> Result<usize> {
    v.checked_sub(1).ok_or_else(|| err(line, "indices start at 1"))
}

struct Block {
    line: usize,
    words: Vec<String>,
    kv: BTreeMap<String, String>,
}

impl Block {
    fn get(&self, key: &str) -> Option<&str> {
        self.kv.get(key).map(String::as_str)
    }

    fn req(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| err(self.line, format!("missing {key}=")))
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.kv.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(err(self.line, format!("unknown key {k}"))),
            None => Ok(()),
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut blocks: BTreeMap<String, Block> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut parts = body.split_whitespace();
            let name = parts.next().expect("nonempty line").to_string();
            let mut words = Vec::new();
            let mut kv = BTreeMap::new();
            for part in parts {
                match part.split_once('=') {
                    Some((k, v)) => {
                        if kv.insert(k.to_string(), v.to_string()).is_some() {
                            return Err(err(line, format!("repeated key {k}")));
                        }
                    }
                    None => words.push(part.to_string()),
                }
            }
            if blocks.insert(name.clone(), Block { line, words, kv }).is_some() {
                return Err(err(line, format!("repeated block {name}")));
            }
        }
        let known = ["field", "code", "goodpoly", "scheme", "failures", "helpers", "message", "seed"];
        if let Some((name, b)) = blocks.iter().find(|(n, _)| !known.contains(&n.as_str())) {
            return Err(err(b.line, format!("unknown block {name}")));
        }
        let need = |name: &str| blocks.get(name).ok_or_else(|| err(0, format!("missing {name} block")));

        let field = need("field")?;
        field.allow(&["p", "t", "modulus"])?;
        let p = num(field.line, "p", field.req("p")?)?;
        let t = num(field.line, "t", field.req("t")?)?;
        let modulus = field.get("modulus").map(|v| list(field.line, "modulus", v)).transpose()?;

        let code = need("code")?;
        code.allow(&["n", "k", "u"])?;
        let n = num(code.line, "n", code.req("n")?)?;
        let k = num(code.line, "k", code.req("k")?)?;
        let u = num(code.line, "u", code.req("u")?)?;

        let gpb = need("goodpoly")?;
        gpb.allow(&["family", "m", "theta", "e", "nbar"])?;
        let l = gpb.line;
        let family = match gpb.req("family")? {
            "power" => FamilySpec::Power { m: num(l, "m", gpb.req("m")?)? },
            "additive" => FamilySpec::Additive { theta: list(l, "theta", gpb.req("theta")?)? },
            "composite" => FamilySpec::Composite {
                theta: list(l, "theta", gpb.req("theta")?)?,
                m: num(l, "m", gpb.req("m")?)?,
                e: num(l, "e", gpb.req("e")?)?,
            },
            other => return Err(err(l, format!("unknown family {other}"))),
        };
        let nbar = gpb.get("nbar").map(|v| num(l, "nbar", v)).transpose()?;

        let sb = need("scheme")?;
        sb.allow(&["kind", "delta", "sbar"])?;
        let scheme = match sb.req("kind")? {
            "gw_subfield" => SchemeConfig::gw(num(sb.line, "delta", sb.req("delta")?)?),
            "subspace" => SchemeConfig::subspace(num(sb.line, "sbar", sb.req("sbar")?)?),
            "naive" => SchemeConfig::Naive,
            other => return Err(err(sb.line, format!("unknown scheme {other}"))),
        };

        let failures = match blocks.get("failures") {
            None => Failures::None,
            Some(b) => {
                let words: Vec<&str> = b.words.iter().map(String::as_str).collect();
                b.allow(if words == ["random"] { &["racks"] } else { &[] })?;
                match words.as_slice() {
                    [] | ["none"] => Failures::None,
                    ["random"] => Failures::Random(b.get("racks").map(|v| num(b.line, "racks", v)).transpose()?),
                    groups => {
                        let mut out = Vec::new();
                        for g in groups {
                            let (r, ns) = g
                                .split_once(':')
                                .ok_or_else(|| err(b.line, format!("expected rack:nodes, got {g}")))?;
                            let rack = one_based(b.line, num(b.line, "rack", r)?)?;
                            let nodes = list::<usize>(b.line, "nodes", ns)?
                                .into_iter()
                                .map(|x| one_based(b.line, x))
                                .collect::<Result<Vec<_>>>()?;
                            out.push((rack, nodes));
                        }
                        Failures::Listed(out)
                    }
                }
            }
        };

        let helpers = match blocks.get("helpers") {
            None => None,
            Some(b) => match b.words.as_slice() {
                [w] if w == "all" => None,
                [w] => Some(
                    list::<usize>(b.line, "helpers", w)?
                        .into_iter()
                        .map(|x| one_based(b.line, x))
                        .collect::<Result<Vec<_>>>()?,
                ),
                _ => return Err(err(b.line, "expected a comma-separated rack list or all")),
            },
        };

        let message = match blocks.get("message") {
            None => None,
            Some(b) => match b.words.as_slice() {
                [w] if w == "random" => None,
                [w] => Some(list(b.line, "message", w)?),
                _ => return Err(err(b.line, "expected coefficients or random")),
            },
        };

        let seed = match blocks.get("seed") {
            None => 0,
            Some(b) => match b.words.as_slice() {
                [w] => num(b.line, "seed", w)?,
                _ => return Err(err(b.line, "expected one seed value")),
            },
        };

        Ok(Scenario { p, t, modulus, n, k, u, family, nbar, scheme, failures, helpers, message, seed })
    }

    pub fn field(&self) -> Result<Gf> {
        match &self.modulus {
            Some(m) => Gf::new(self.p, self.t, m),
            None => Gf::standard(self.p, self.t),
        }
    }

    pub fn good_polynomial(&self, gf: &Gf) -> Result<GoodPolynomial> {
        let nbar = Some(self.nbar.unwrap_or(if self.u == 0 { 0 } else { self.n / self.u }));
        let elems = |v: &[u32]| -> Result<Vec<Elem>> {
            v.iter()
                .map(|&c| {
                    let e = Elem(c);
                    if gf.contains(e) {
                        Ok(e)
                    } else {
                        Err(Error::BadParams(format!("{c} is not a field element")))
                    }
                })
                .collect()
        };
        let gp = match &self.family {
            FamilySpec::Power { m } => GoodPolynomial::power(gf, *m, nbar)?,
            FamilySpec::Additive { theta } => GoodPolynomial::additive(gf, elems(theta)?, nbar)?,
            FamilySpec::Composite { theta, m, e } => GoodPolynomial::composite(gf, elems(theta)?, *m, *e, nbar)?,
        };
        if gp.u() != self.u {
            return Err(Error::BadParams(format!("good polynomial has degree {}, code asks u={}", gp.u(), self.u)));
        }
        if gp.nbar() * gp.u() != self.n {
            return Err(Error::BadParams(format!("{} racks of {} do not give n={}", gp.nbar(), gp.u(), self.n)));
        }
        Ok(gp)
    }

    /// Builds the code, message, failures and plan. `seed` overrides the
    /// scenario's own seed.
    pub fn instantiate(&self, seed: Option<u64>) -> Result<Instance> {
        let gf = self.field()?;
        let gp = self.good_polynomial(&gf)?;
        let params = rack_params(&gf, &gp, self.k)?;
        let shape = params.rack_shape(gp.u())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(self.seed));
        let f = match &self.message {
            Some(c) => {
                if c.iter().any(|&x| !gf.contains(Elem(x))) {
                    return Err(Error::BadParams("message coefficient outside the field".into()));
                }
                let f = Poly::from_coeffs(c.iter().map(|&x| Elem(x)).collect());
                if !f.degree_below(self.k) {
                    return Err(Error::BadParams(format!("message degree must be below k={}", self.k)));
                }
                f
            }
            None => random_message(&gf, self.k, &mut rng),
        };
        let spec = match &self.failures {
            Failures::None => FailureSpec::none(),
            Failures::Random(None) => random_failures(&shape, &mut rng),
            Failures::Random(Some(m)) => {
                let max = shape.nbar - shape.s;
                if *m == 0 || *m > max {
                    return Err(Error::TooManyFailedRacks { m: *m, max });
                }
                random_failures_in(&shape, *m, &mut rng)
            }
            Failures::Listed(l) => FailureSpec::new(l.clone(), &shape)?,
        };
        let helpers = match &self.helpers {
            Some(h) => h.clone(),
            None if spec.is_empty() => Vec::new(),
            None => (0..shape.nbar).filter(|&r| spec.failed(r).is_none()).collect(),
        };
        let plan = plan(&gf, &spec, &helpers, &self.scheme, &gp.constants(), &shape)?;
        Ok(Instance { gf, gp, params, shape, f, spec, helpers, plan })
    }
}
