//! A rack cluster that executes repairs as messages and keeps a ledger.
//!
//! Racks are numbered from 1 in the ledger; rack 0 is the repair center.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Gf};
use crate::good_poly::GoodPolynomial;
use crate::poly::Poly;
use crate::rack::layout;
use crate::repair::{
    run_with_report, BandwidthReport, Endpoint, ErasedView, FailureSpec, Phase, Recorder, RepairPlan, Transfer,
};
use crate::rs::{CodeParams, RackShape};

/// Nodes with their points and symbols; relayers are implicit and stateless.
#[derive(Clone, Debug)]
pub struct Cluster {
    shape: RackShape,
    ys: Vec<Elem>,
    points: Vec<Vec<Elem>>,
    symbols: Vec<Vec<Option<Elem>>>,
}

pub fn build_cluster(gf: &Gf, params: &CodeParams, gp: &GoodPolynomial, f: &Poly) -> Result<Cluster> {
    let arr = layout(gf, f, gp, params)?;
    Ok(Cluster {
        shape: arr.shape,
        ys: arr.ys,
        points: arr.points,
        symbols: arr.symbols.into_iter().map(|row| row.into_iter().map(Some).collect()).collect(),
    })
}

impl Cluster {
    pub fn shape(&self) -> RackShape {
        self.shape
    }

    pub fn ys(&self) -> &[Elem] {
        &self.ys
    }

    /// `None` for a failed node.
    pub fn read(&self, rack: usize, node: usize) -> Option<Elem> {
        self.symbols[rack][node]
    }

    pub fn symbols(&self) -> Vec<Vec<Option<Elem>>> {
        self.symbols.clone()
    }

    /// The failure pattern currently present.
    pub fn failures(&self) -> FailureSpec {
        let lists = self.symbols.iter().enumerate().filter_map(|(r, row)| {
            let nodes: Vec<usize> = (0..row.len()).filter(|&n| row[n].is_none()).collect();
            (!nodes.is_empty()).then_some((r, nodes))
        });
        FailureSpec::new(lists, &self.shape).expect("erasures were validated on injection")
    }

    /// Erases the nodes of `spec`, on top of any existing erasures.
    pub fn inject(&mut self, spec: &FailureSpec) -> Result<()> {
        let mut racks: std::collections::BTreeSet<usize> = self.failures().racks().collect();
        racks.extend(spec.racks());
        let max = self.shape.nbar - self.shape.s;
        if racks.len() > max {
            return Err(Error::TooManyFailedRacks { m: racks.len(), max });
        }
        for r in spec.racks() {
            if r >= self.shape.nbar {
                return Err(Error::InvalidFailure(format!("rack {r} out of range")));
            }
            for &n in spec.failed(r).expect("listed rack") {
                if n >= self.shape.u {
                    return Err(Error::InvalidFailure(format!("node {n} out of range")));
                }
                self.symbols[r][n] = None;
            }
        }
        Ok(())
    }

    /// Repairs the current erasures with `plan`; on success every node holds
    /// a symbol again. On error the cluster is unchanged.
    pub fn run(&mut self, gf: &Gf, plan: &RepairPlan) -> Result<(Ledger, BandwidthReport)> {
        if self.failures() != plan.spec {
            return Err(Error::InvalidFailure("plan does not match the injected failures".into()));
        }
        let mut ledger = Ledger::default();
        let view = ErasedView { points: &self.points, symbols: &self.symbols, shape: self.shape };
        let (restored, report) = run_with_report(gf, &view, &self.ys, plan, &mut ledger)?;
        self.symbols = restored.into_iter().map(|row| row.into_iter().map(Some).collect()).collect();
        Ok((ledger, report))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub phase: Phase,
    pub src: usize,
    pub dst: usize,
    pub subsymbols: usize,
}

impl Message {
    pub fn is_cross(&self) -> bool {
        self.src != self.dst && self.phase != Phase::Delivery
    }
}

fn endpoint_id(e: Endpoint) -> usize {
    match e {
        Endpoint::Center => 0,
        Endpoint::Rack(r) => r + 1,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    pub messages: Vec<Message>,
}

impl Recorder for Ledger {
    fn record(&mut self, tr: Transfer) {
        self.messages.push(Message {
            phase: tr.phase,
            src: endpoint_id(tr.src),
            dst: endpoint_id(tr.dst),
            subsymbols: tr.payload.len(),
        });
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    /// Sub-symbols that crossed a rack boundary during column repair.
    pub cross: usize,
    pub intra: usize,
    /// Repaired coefficients returned by the repair center; not bandwidth.
    pub delivery: usize,
    pub messages: usize,
}

pub fn measure(ledger: &Ledger) -> Summary {
    let mut s = Summary { cross: 0, intra: 0, delivery: 0, messages: ledger.messages.len() };
    for m in &ledger.messages {
        if m.phase == Phase::Delivery {
            s.delivery += m.subsymbols;
        } else if m.src != m.dst {
            s.cross += m.subsymbols;
        } else {
            s.intra += m.subsymbols;
        }
    }
    s
}

impl Ledger {
    /// `phase,src,dst,subsymbols` lines and a closing summary line.
    /// Intra-rack lines are listed only with `show_intra`.
    pub fn export(&self, show_intra: bool) -> String {
        let mut out = String::from("phase,src,dst,subsymbols\n");
        for m in &self.messages {
            if show_intra || m.src != m.dst {
                writeln!(out, "{},{},{},{}", m.phase.tag(), m.src, m.dst, m.subsymbols).unwrap();
            }
        }
        let s = measure(self);
        writeln!(out, "total,cross={},intra={},delivery={}", s.cross, s.intra, s.delivery).unwrap();
        out
    }
}

/// A uniformly random message polynomial of degree below `k`.
pub fn random_message<R: Rng + ?Sized>(gf: &Gf, k: usize, rng: &mut R) -> Poly {
    Poly::from_coeffs((0..k).map(|_| Elem(rng.gen_range(0..gf.size()))).collect())
}

/// A random admissible failure pattern: between 1 and `nbar - s` racks, each
/// losing between 1 and `u` nodes.
pub fn random_failures<R: Rng + ?Sized>(shape: &RackShape, rng: &mut R) -> FailureSpec {
    let m = rng.gen_range(1..=shape.nbar - shape.s);
    random_failures_in(shape, m, rng)
}

/// A random failure pattern on exactly `m` racks.
pub fn random_failures_in<R: Rng + ?Sized>(shape: &RackShape, m: usize, rng: &mut R) -> FailureSpec {
    let racks = sample(rng, shape.nbar, m).into_vec();
    let lists: Vec<(usize, Vec<usize>)> = racks
        .into_iter()
        .map(|r| {
            let eps = rng.gen_range(1..=shape.u);
            (r, sample(rng, shape.u, eps).into_vec())
        })
        .collect();
    FailureSpec::new(lists, shape).unwrap_or_else(|e| panic!("{m} racks: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rack::rack_params;
    use crate::repair::{plan, SchemeConfig};

    fn setup(f: &Poly) -> (Gf, Cluster) {
        let gf = Gf::new(2, 4, &[1, 1, 0, 0, 1]).unwrap();
        let gp = GoodPolynomial::additive(&gf, vec![Elem(1), Elem(0), Elem(1)], None).unwrap();
        let params = rack_params(&gf, &gp, 7).unwrap();
        let c = build_cluster(&gf, &params, &gp, f).unwrap();
        (gf, c)
    }

    #[test]
    fn inject_and_read() {
        let (_, mut c) = setup(&Poly::constant(Elem(4)));
        assert_eq!(c.read(2, 3), Some(Elem(4)));
        let spec = FailureSpec::new([(2, vec![3])], &c.shape()).unwrap();
        c.inject(&spec).unwrap();
        c.inject(&spec).unwrap();
        assert_eq!(c.read(2, 3), None);
        assert_eq!(c.failures(), spec);
        let more = FailureSpec::new([(0, vec![0]), (1, vec![0])], &c.shape()).unwrap();
        assert_eq!(c.inject(&more), Err(Error::TooManyFailedRacks { m: 3, max: 2 }));
    }

    #[test]
    fn gf16_ledger() {
        let f = Poly::from_coeffs((0..7).map(|i| Elem(i + 2)).collect());
        let (gf, mut c) = setup(&f);
        let before = c.symbols();
        let spec = FailureSpec::new([(0, vec![1, 2, 3])], &c.shape()).unwrap();
        c.inject(&spec).unwrap();
        let pl = plan(&gf, &spec, &[1, 2, 3], &SchemeConfig::gw(2), c.ys(), &c.shape()).unwrap();
        let (ledger, report) = c.run(&gf, &pl).unwrap();
        let sum = measure(&ledger);
        assert_eq!(sum.cross, 18);
        assert_eq!(report.total(), 18);
        assert!(sum.intra > 0);
        assert_eq!(c.symbols(), before);
        let text = ledger.export(false);
        assert_eq!(text.lines().count(), 1 + 9 + 1);
        assert!(text.contains("step2-cross,2,1,2"));
        assert_eq!(text.lines().last(), ledger.export(true).lines().last());
    }

    #[test]
    fn no_failures_empty_ledger() {
        let (gf, mut c) = setup(&Poly::constant(Elem(1)));
        let pl = plan(&gf, &FailureSpec::none(), &[], &SchemeConfig::Naive, c.ys(), &c.shape()).unwrap();
        let (ledger, _) = c.run(&gf, &pl).unwrap();
        assert!(ledger.messages.is_empty());
    }
}
