// Shared fixtures for the integration tests. Each test binary uses a
// different subset, so unused items are expected here.
#![allow(dead_code)]

use rand::seq::index::sample;
use rand::Rng;

use rackcode::field::{linearized_eval, rank_over_subfield, Elem, Gf};
use rackcode::repair::{
    default_gw_bases, default_subspace, plan, FailureSpec, Method, PlanStep, RepairPlan, SchemeConfig,
};
use rackcode::rs::RackShape;
use rackcode::scenario::{Failures, Instance, Scenario};
use rackcode::Error;

pub const EXAMPLE1: &str = include_str!("../../scenarios/example1.conf");
pub const POWER: &str = include_str!("../../scenarios/power.conf");
pub const COMPOSITE: &str = include_str!("../../scenarios/composite.conf");
pub const RANDOM: &str = include_str!("../../scenarios/random.conf");
pub const TERNARY: &str = include_str!("../../scenarios/ternary.conf");

pub fn gf16() -> Gf {
    Gf::new(2, 4, &[1, 1, 0, 0, 1]).unwrap()
}

/// A scenario's code with its failure and helper blocks stripped.
pub fn base(text: &str) -> (Scenario, Instance) {
    let mut sc = Scenario::parse(text).unwrap();
    sc.failures = Failures::None;
    sc.helpers = None;
    let inst = sc.instantiate(None).unwrap();
    (sc, inst)
}

/// Every shipped code configuration, by name.
pub fn all_configs() -> Vec<(&'static str, Scenario, Instance)> {
    [
        ("gf16-additive", EXAMPLE1),
        ("gf64-power", POWER),
        ("gf256-composite", COMPOSITE),
        ("gf256-additive", RANDOM),
        ("gf81-additive", TERNARY),
    ]
    .into_iter()
    .map(|(name, text)| {
        let (sc, inst) = base(text);
        (name, sc, inst)
    })
    .collect()
}

/// Failures on `m` random racks; each rack loses everything with
/// probability `whole`, otherwise a random nonempty subset.
pub fn failures<R: Rng>(shape: &RackShape, m: usize, whole: f64, rng: &mut R) -> FailureSpec {
    let racks = sample(rng, shape.nbar, m).into_vec();
    let lists: Vec<(usize, Vec<usize>)> = racks
        .into_iter()
        .map(|r| {
            let eps = if rng.gen_bool(whole) { shape.u } else { rng.gen_range(1..=shape.u) };
            (r, sample(rng, shape.u, eps).into_vec())
        })
        .collect();
    FailureSpec::new(lists, shape).unwrap()
}

pub fn survivors(spec: &FailureSpec, nbar: usize) -> Vec<usize> {
    (0..nbar).filter(|&r| spec.failed(r).is_none()).collect()
}

/// Plans with `scheme` over all survivors. A trace scheme whose length
/// precondition fails on the punctured column code is replaced by the
/// subspace scheme with `U = {0}`, which applies at any length.
pub fn plan_or_plain(inst: &Instance, spec: &FailureSpec, scheme: &SchemeConfig) -> (RepairPlan, SchemeConfig) {
    let helpers = survivors(spec, inst.shape.nbar);
    let ys = inst.gp.constants();
    match plan(&inst.gf, spec, &helpers, scheme, &ys, &inst.shape) {
        Ok(p) => (p, scheme.clone()),
        Err(Error::PreconditionFailed(_)) => {
            let plain = SchemeConfig::subspace(0);
            (plan(&inst.gf, spec, &helpers, &plain, &ys, &inst.shape).unwrap(), plain)
        }
        Err(e) => panic!("{}: {e}", scheme.tag()),
    }
}

/// Cost of one plan step derived from the repair polynomials alone:
/// `rank_Fp {g_l(y_i)}` summed over helpers for trace steps, `s * t` for
/// naive ones.
pub fn independent_cost(gf: &Gf, step: &PlanStep, scheme: &SchemeConfig, ys: &[Elem], s: usize) -> usize {
    let sch = match &step.method {
        Method::Naive(_) => return s * gf.t() as usize,
        Method::Trace(sch) => sch,
    };
    let ystar = ys[sch.target];
    let g_at = |y: Elem| -> Vec<Elem> {
        let z = gf.sub(y, ystar);
        match scheme {
            SchemeConfig::GwSubfield { delta, .. } => {
                let (eta, beta) = default_gw_bases(gf, *delta).unwrap();
                let mut out = Vec::new();
                for &em in &eta {
                    for &bw in &beta {
                        let tr = gf.relative_trace(gf.mul(bw, z), *delta, 1).unwrap();
                        out.push(gf.mul(em, gf.div(tr, z).unwrap()));
                    }
                }
                out
            }
            SchemeConfig::Subspace { sbar, .. } => {
                let (ubar, beta) = default_subspace(gf, *sbar).unwrap();
                beta.iter().map(|&b| gf.div(linearized_eval(gf, &ubar, gf.mul(b, z)), z).unwrap()).collect()
            }
            SchemeConfig::Naive => unreachable!(),
        }
    };
    sch.helpers.iter().map(|&h| rank_over_subfield(gf, &g_at(ys[h]), 1).unwrap()).sum()
}
