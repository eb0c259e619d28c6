//! Rack-level repair: failure bookkeeping, planning and execution.
//!
//! A repair runs in three steps. Helper racks turn their rows into residue
//! coefficients (free, inside the rack). For every `t` up to the largest
//! per-rack failure count, column `u - t` is repaired at the racks in `R_t`
//! by a homogeneous scheme, which is the only cross-rack traffic. Each failed
//! rack then solves a Vandermonde system for its remaining coefficients from
//! its surviving nodes.
//!
//! Rack and node indices are zero-based here.

mod naive;
mod predict;
mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use naive::{naive_repair, NaiveScheme};
pub use predict::{predict, Exact, Formula};
pub use trace::{
    default_gw_bases, default_subspace, gw_scheme, gw_subfield_repair, subspace_repair, subspace_scheme, SingleRepair,
    TraceScheme,
};

use crate::error::{Error, Result};
use crate::field::{Elem, Gf, SubspaceDesc};
use crate::poly::{vandermonde_solve, Poly};
use crate::rack::{row_coefficients, RackArray};
use crate::rs::RackShape;

/// Failed nodes per rack.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FailureSpec {
    racks: BTreeMap<usize, BTreeSet<usize>>,
}

impl FailureSpec {
    pub fn none() -> Self {
        FailureSpec::default()
    }

    pub fn new(failures: impl IntoIterator<Item = (usize, Vec<usize>)>, shape: &RackShape) -> Result<Self> {
        let mut racks: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (rack, nodes) in failures {
            if rack >= shape.nbar {
                return Err(Error::InvalidFailure(format!("rack {rack} out of range")));
            }
            if nodes.is_empty() {
                return Err(Error::InvalidFailure(format!("rack {rack} lists no nodes")));
            }
            if let Some(n) = nodes.iter().find(|&&n| n >= shape.u) {
                return Err(Error::InvalidFailure(format!("node {n} out of range in rack {rack}")));
            }
            racks.entry(rack).or_default().extend(nodes);
        }
        let spec = FailureSpec { racks };
        spec.check(shape)?;
        Ok(spec)
    }

    pub fn check(&self, shape: &RackShape) -> Result<()> {
        let max = shape.nbar - shape.s;
        if self.m() > max {
            return Err(Error::TooManyFailedRacks { m: self.m(), max });
        }
        Ok(())
    }

    /// Number of failed racks.
    pub fn m(&self) -> usize {
        self.racks.len()
    }

    /// Largest per-rack failure count.
    pub fn eps(&self) -> usize {
        self.racks.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn eps_of(&self, rack: usize) -> usize {
        self.racks.get(&rack).map_or(0, BTreeSet::len)
    }

    pub fn racks(&self) -> impl Iterator<Item = usize> + '_ {
        self.racks.keys().copied()
    }

    pub fn failed(&self, rack: usize) -> Option<&BTreeSet<usize>> {
        self.racks.get(&rack)
    }

    pub fn is_failed(&self, rack: usize, node: usize) -> bool {
        self.racks.get(&rack).is_some_and(|s| s.contains(&node))
    }

    pub fn is_empty(&self) -> bool {
        self.racks.is_empty()
    }
}

impl fmt::Display for FailureSpec {
    /// One-based `rack:node,node` groups separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .racks
            .iter()
            .map(|(r, ns)| {
                let nodes: Vec<String> = ns.iter().map(|n| (n + 1).to_string()).collect();
                format!("{}:{}", r + 1, nodes.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `R_t`, the failed racks with at least `t` failures, for `t = 1..=eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtSets {
    pub sets: Vec<Vec<usize>>,
}

impl RtSets {
    pub fn get(&self, t: usize) -> &[usize] {
        &self.sets[t - 1]
    }
}

pub fn compute_rt(spec: &FailureSpec) -> RtSets {
    RtSets { sets: (1..=spec.eps()).map(|t| spec.racks().filter(|&r| spec.eps_of(r) >= t).collect()).collect() }
}

/// The homogeneous scheme used when a column has a single erasure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeConfig {
    GwSubfield { delta: u32, eta: Option<Vec<Elem>>, beta: Option<Vec<Elem>> },
    Subspace { sbar: u32, ubar: Option<Vec<Elem>>, beta: Option<Vec<Elem>> },
    Naive,
}

impl SchemeConfig {
    pub fn gw(delta: u32) -> Self {
        SchemeConfig::GwSubfield { delta, eta: None, beta: None }
    }

    pub fn subspace(sbar: u32) -> Self {
        SchemeConfig::Subspace { sbar, ubar: None, beta: None }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SchemeConfig::GwSubfield { .. } => "gw_subfield",
            SchemeConfig::Subspace { .. } => "subspace",
            SchemeConfig::Naive => "naive",
        }
    }

    fn trace_scheme(&self, gf: &Gf, ys: &[Elem], s: usize, target: usize, helpers: Vec<usize>) -> Result<TraceScheme> {
        match self {
            SchemeConfig::GwSubfield { delta, eta, beta } => {
                let (de, db) = default_gw_bases(gf, *delta)?;
                let eta = eta.as_ref().unwrap_or(&de);
                let beta = beta.as_ref().unwrap_or(&db);
                gw_scheme(gf, ys, s, target, helpers, *delta, eta, beta)
            }
            SchemeConfig::Subspace { sbar, ubar, beta } => {
                let (du, db) = default_subspace(gf, *sbar)?;
                let ubar = match ubar {
                    Some(b) => SubspaceDesc::new(gf, b.clone(), 1)?,
                    None => du,
                };
                if ubar.basis().len() != *sbar as usize {
                    return Err(Error::BadParams("subspace basis size differs from sbar".into()));
                }
                subspace_scheme(gf, ys, s, target, helpers, &ubar, beta.as_ref().unwrap_or(&db))
            }
            SchemeConfig::Naive => unreachable!("naive is not a trace scheme"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Method {
    Trace(TraceScheme),
    Naive(NaiveScheme),
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Trace(_) => "trace",
            Method::Naive(_) => "naive",
        }
    }
}

/// Repair of column `u - t` at the racks of `R_t`.
#[derive(Clone, Debug)]
pub struct PlanStep {
    pub t: usize,
    pub column: usize,
    pub targets: Vec<usize>,
    pub method: Method,
    /// Naive repair used because several racks share the column erasure.
    pub baseline: bool,
    pub predicted: usize,
}

#[derive(Clone, Debug)]
pub struct RepairPlan {
    pub spec: FailureSpec,
    pub helpers: Vec<usize>,
    pub scheme: String,
    pub steps: Vec<PlanStep>,
}

impl RepairPlan {
    pub fn predicted_total(&self) -> usize {
        self.steps.iter().map(|s| s.predicted).sum()
    }
}

/// Chooses a scheme for every column to repair. Single-erasure columns use
/// `scheme`, columns erased at several racks fall back to naive repair.
pub fn plan(
    gf: &Gf,
    spec: &FailureSpec,
    helpers: &[usize],
    scheme: &SchemeConfig,
    ys: &[Elem],
    shape: &RackShape,
) -> Result<RepairPlan> {
    spec.check(shape)?;
    let d: BTreeSet<usize> = helpers.iter().copied().collect();
    if d.len() != helpers.len() {
        return Err(Error::InsufficientHelpers("helper racks repeat".into()));
    }
    if let Some(h) = helpers.iter().find(|&&h| h >= shape.nbar || spec.failed(h).is_some()) {
        return Err(Error::InsufficientHelpers(format!("rack {h} cannot help")));
    }
    if !spec.is_empty() && helpers.len() < shape.s {
        return Err(Error::InsufficientHelpers(format!("{} helper racks, at least {} needed", helpers.len(), shape.s)));
    }
    let rt = compute_rt(spec);
    let all_survivors = shape.nbar - spec.m();
    let mut cache: BTreeMap<usize, TraceScheme> = BTreeMap::new();
    let mut steps = Vec::with_capacity(rt.sets.len());
    for (i, targets) in rt.sets.iter().enumerate() {
        let t = i + 1;
        let single = targets.len() == 1 && *scheme != SchemeConfig::Naive;
        let method = if single {
            if helpers.len() != all_survivors {
                return Err(Error::InsufficientHelpers(format!(
                    "{} needs all {all_survivors} surviving racks as helpers",
                    scheme.tag()
                )));
            }
            let target = targets[0];
            if !cache.contains_key(&target) {
                let sch = scheme.trace_scheme(gf, ys, shape.s, target, helpers.to_vec())?;
                cache.insert(target, sch);
            }
            Method::Trace(cache[&target].clone())
        } else {
            Method::Naive(NaiveScheme::new(shape.nbar, shape.s, targets, helpers)?)
        };
        let predicted = match &method {
            Method::Trace(sch) => sch.predicted().iter().sum(),
            Method::Naive(n) => n.predicted(gf.t()),
        };
        steps.push(PlanStep {
            t,
            column: shape.u - t,
            targets: targets.clone(),
            baseline: targets.len() > 1 && *scheme != SchemeConfig::Naive,
            method,
            predicted,
        });
    }
    Ok(RepairPlan { spec: spec.clone(), helpers: helpers.to_vec(), scheme: scheme.tag().into(), steps })
}

/// Where a transfer starts or ends.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Endpoint {
    /// The repair center used for multi-rack columns.
    Center,
    /// The relayer of a rack.
    Rack(usize),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Phase {
    Step1Intra,
    Step2Cross,
    Step3Intra,
    /// Repaired coefficients handed from the repair center to their racks.
    Delivery,
}

impl Phase {
    pub fn tag(self) -> &'static str {
        match self {
            Phase::Step1Intra => "step1-intra",
            Phase::Step2Cross => "step2-cross",
            Phase::Step3Intra => "step3-intra",
            Phase::Delivery => "delivery",
        }
    }
}

/// One message produced during a repair; `payload` holds F_p sub-symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub phase: Phase,
    pub src: Endpoint,
    pub dst: Endpoint,
    pub column: Option<usize>,
    pub payload: Vec<u32>,
}

pub trait Recorder {
    fn record(&mut self, transfer: Transfer);
}

/// Discards everything.
pub struct NullRecorder;

impl Recorder for NullRecorder {
    fn record(&mut self, _: Transfer) {}
}

impl Recorder for Vec<Transfer> {
    fn record(&mut self, transfer: Transfer) {
        self.push(transfer);
    }
}

struct Tally<'a> {
    inner: &'a mut dyn Recorder,
    // (column, helper rack) -> sub-symbols
    cross: BTreeMap<(usize, usize), usize>,
}

impl Recorder for Tally<'_> {
    fn record(&mut self, tr: Transfer) {
        if tr.phase == Phase::Step2Cross {
            if let (Some(col), Endpoint::Rack(src)) = (tr.column, tr.src) {
                *self.cross.entry((col, src)).or_default() += tr.payload.len();
            }
        }
        self.inner.record(tr);
    }
}

/// A rack array with some symbols erased.
pub struct ErasedView<'a> {
    pub points: &'a [Vec<Elem>],
    pub symbols: &'a [Vec<Option<Elem>>],
    pub shape: RackShape,
}

fn node_payload(gf: &Gf, x: Elem) -> Vec<u32> {
    gf.digits(x)
}

/// Runs `plan` on the surviving symbols and returns the full array.
pub fn execute(
    gf: &Gf,
    view: &ErasedView<'_>,
    ys: &[Elem],
    plan: &RepairPlan,
    rec: &mut dyn Recorder,
) -> Result<Vec<Vec<Elem>>> {
    let u = view.shape.u;
    let spec = &plan.spec;
    for (r, row) in view.symbols.iter().enumerate() {
        for (n, s) in row.iter().enumerate() {
            if s.is_none() != spec.is_failed(r, n) {
                return Err(Error::InvalidFailure(format!("rack {r} node {n} disagrees with the failure spec")));
            }
        }
    }
    let mut restored: Vec<Vec<Elem>> =
        view.symbols.iter().map(|row| row.iter().map(|s| s.unwrap_or(Elem::ZERO)).collect()).collect();
    if spec.is_empty() {
        return Ok(restored);
    }

    // step 1: helper relayers collect their rack and interpolate
    let mut coeffs: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
    for &h in &plan.helpers {
        for &s in &restored[h] {
            rec.record(Transfer {
                phase: Phase::Step1Intra,
                src: Endpoint::Rack(h),
                dst: Endpoint::Rack(h),
                column: None,
                payload: node_payload(gf, s),
            });
        }
        coeffs.insert(h, row_coefficients(gf, &view.points[h], &restored[h])?);
    }

    // step 2: column repairs
    let mut repaired: BTreeMap<(usize, usize), Elem> = BTreeMap::new();
    for step in &plan.steps {
        let col = step.column;
        match &step.method {
            Method::Trace(sch) => {
                let mut payloads = Vec::with_capacity(sch.helpers.len());
                for (idx, &h) in sch.helpers.iter().enumerate() {
                    let payload = sch.helper_payload(gf, idx, coeffs[&h][col]);
                    rec.record(Transfer {
                        phase: Phase::Step2Cross,
                        src: Endpoint::Rack(h),
                        dst: Endpoint::Rack(sch.target),
                        column: Some(col),
                        payload: payload.clone(),
                    });
                    payloads.push(payload);
                }
                repaired.insert((sch.target, col), sch.recover(gf, &payloads));
            }
            Method::Naive(nv) => {
                let single = nv.targets.len() == 1;
                let dst = if single { Endpoint::Rack(nv.targets[0]) } else { Endpoint::Center };
                let mut vals = Vec::with_capacity(nv.helpers.len());
                for &h in &nv.helpers {
                    let v = coeffs[&h][col];
                    rec.record(Transfer {
                        phase: Phase::Step2Cross,
                        src: Endpoint::Rack(h),
                        dst,
                        column: Some(col),
                        payload: node_payload(gf, v),
                    });
                    vals.push(v);
                }
                let out = nv.recover(gf, ys, &vals)?;
                for (&target, &v) in nv.targets.iter().zip(&out) {
                    if !single {
                        rec.record(Transfer {
                            phase: Phase::Delivery,
                            src: Endpoint::Center,
                            dst: Endpoint::Rack(target),
                            column: Some(col),
                            payload: node_payload(gf, v),
                        });
                    }
                    repaired.insert((target, col), v);
                }
            }
        }
    }

    // step 3: each failed rack solves for its low coefficients
    for rack in spec.racks() {
        let eps = spec.eps_of(rack);
        let failed = spec.failed(rack).expect("listed rack");
        let w = u - eps;
        let mut full = vec![Elem::ZERO; u];
        for j in w..u {
            full[j] = *repaired
                .get(&(rack, j))
                .ok_or_else(|| Error::PreconditionFailed(format!("column {j} of rack {rack} was not repaired")))?;
        }
        let survivors: Vec<usize> = (0..u).filter(|n| !failed.contains(n)).collect();
        let xs: Vec<Elem> = survivors.iter().map(|&n| view.points[rack][n]).collect();
        let rhs: Vec<Elem> = survivors
            .iter()
            .map(|&n| {
                let a = view.points[rack][n];
                let known = (w..u).fold(Elem::ZERO, |acc, j| gf.add(acc, gf.mul(full[j], gf.pow(a, j as u64))));
                rec.record(Transfer {
                    phase: Phase::Step3Intra,
                    src: Endpoint::Rack(rack),
                    dst: Endpoint::Rack(rack),
                    column: None,
                    payload: node_payload(gf, restored[rack][n]),
                });
                gf.sub(restored[rack][n], known)
            })
            .collect();
        if w > 0 {
            let low = vandermonde_solve(gf, &xs, &rhs, 0)?;
            full[..w].copy_from_slice(&low);
        }
        let fi = Poly::from_coeffs(full);
        for &n in failed {
            let v = fi.eval(gf, view.points[rack][n]);
            rec.record(Transfer {
                phase: Phase::Step3Intra,
                src: Endpoint::Rack(rack),
                dst: Endpoint::Rack(rack),
                column: None,
                payload: node_payload(gf, v),
            });
            restored[rack][n] = v;
        }
    }
    Ok(restored)
}

/// Measured and predicted cross-rack cost of one column repair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub t: usize,
    pub column: usize,
    pub targets: Vec<usize>,
    pub method: &'static str,
    pub baseline: bool,
    /// `(helper rack, sub-symbols)`.
    pub per_helper: Vec<(usize, usize)>,
    pub measured: usize,
    pub predicted: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandwidthReport {
    pub t_field: u32,
    pub steps: Vec<StepReport>,
}

impl BandwidthReport {
    /// Total cross-rack sub-symbols.
    pub fn total(&self) -> usize {
        self.steps.iter().map(|s| s.measured).sum()
    }

    pub fn predicted_total(&self) -> usize {
        self.steps.iter().map(|s| s.predicted).sum()
    }

    pub fn matches(&self) -> bool {
        self.steps.iter().all(|s| s.measured == s.predicted)
    }

    /// The total in whole field symbols.
    pub fn symbols(&self) -> num_rational::Ratio<i64> {
        num_rational::Ratio::new(self.total() as i64, self.t_field as i64)
    }
}

/// Erases the failed symbols of `arr`, repairs them and reports bandwidth.
pub fn repair_rack(
    gf: &Gf,
    arr: &RackArray,
    plan: &RepairPlan,
    rec: &mut dyn Recorder,
) -> Result<(Vec<Vec<Elem>>, BandwidthReport)> {
    let erased: Vec<Vec<Option<Elem>>> = arr
        .symbols
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter().enumerate().map(|(n, &s)| if plan.spec.is_failed(r, n) { None } else { Some(s) }).collect()
        })
        .collect();
    let view = ErasedView { points: &arr.points, symbols: &erased, shape: arr.shape };
    run_with_report(gf, &view, &arr.ys, plan, rec)
}

/// [`execute`] plus a bandwidth report built from the recorded transfers.
pub fn run_with_report(
    gf: &Gf,
    view: &ErasedView<'_>,
    ys: &[Elem],
    plan: &RepairPlan,
    rec: &mut dyn Recorder,
) -> Result<(Vec<Vec<Elem>>, BandwidthReport)> {
    let mut tally = Tally { inner: rec, cross: BTreeMap::new() };
    let restored = execute(gf, view, ys, plan, &mut tally)?;
    let steps = plan
        .steps
        .iter()
        .map(|st| {
            let per_helper: Vec<(usize, usize)> =
                tally.cross.range((st.column, 0)..(st.column + 1, 0)).map(|(&(_, h), &c)| (h, c)).collect();
            StepReport {
                t: st.t,
                column: st.column,
                targets: st.targets.clone(),
                method: st.method.tag(),
                baseline: st.baseline,
                measured: per_helper.iter().map(|x| x.1).sum(),
                per_helper,
                predicted: st.predicted,
            }
        })
        .collect();
    Ok((restored, BandwidthReport { t_field: gf.t(), steps }))
}
