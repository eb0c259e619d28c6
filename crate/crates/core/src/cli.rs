//! Command implementations behind the `rackcode` binary. Each returns its
//! text output and an exit code so it can be driven from tests.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Elem, Gf};
use crate::poly::coefficient_polys;
use crate::rack::{column, layout, rack_residues, RackArray};
use crate::repair::{plan, predict, Exact, Formula, Method, RepairPlan, SchemeConfig};
use crate::rs::erasure_decode;
use crate::scenario::{Failures, Instance, Scenario};
use crate::sim::{build_cluster, measure, random_failures, random_message, Ledger};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub ledger: Option<String>,
    pub code: i32,
}

impl Outcome {
    fn failed(e: &Error) -> Outcome {
        Outcome { report: format!("error {}: {e}\n", e.kind()), ledger: None, code: EXIT_CONFIG }
    }
}

/// Everything observed in one executed repair.
pub struct Execution {
    pub array: RackArray,
    pub restored: Vec<Vec<Elem>>,
    pub oracle: Option<Vec<Elem>>,
    pub ledger: Ledger,
    pub report: crate::repair::BandwidthReport,
}

impl Execution {
    pub fn restored_ok(&self) -> bool {
        self.restored == self.array.symbols
    }

    pub fn oracle_ok(&self) -> bool {
        let flat: Vec<Elem> = self.restored.iter().flatten().copied().collect();
        self.oracle.as_ref() == Some(&flat)
    }

    pub fn accounting_ok(&self) -> bool {
        measure(&self.ledger).cross == self.report.total() && self.report.matches()
    }
}

/// Builds the cluster, injects the failures, runs the plan and reconstructs
/// the same codeword independently through erasure decoding.
pub fn execute(inst: &Instance) -> Result<Execution> {
    let gf = &inst.gf;
    let array = layout(gf, &inst.f, &inst.gp, &inst.params)?;
    let mut cluster = build_cluster(gf, &inst.params, &inst.gp, &inst.f)?;
    cluster.inject(&inst.spec)?;
    let erased: Vec<Option<Elem>> = cluster.symbols().into_iter().flatten().collect();
    let oracle = erasure_decode(gf, &erased, &inst.params)
        .ok()
        .map(|f| inst.params.points.iter().map(|&a| f.eval(gf, a)).collect());
    let (ledger, report) = cluster.run(gf, &inst.plan)?;
    let restored = cluster
        .symbols()
        .into_iter()
        .map(|row| row.into_iter().map(|s| s.expect("repair restores every node")).collect())
        .collect();
    Ok(Execution { array, restored, oracle, ledger, report })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "MISMATCH"
    }
}

fn rack_list(racks: &[usize]) -> String {
    racks.iter().map(|r| (r + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn header(out: &mut String, sc: &Scenario, inst: &Instance) {
    let gf = &inst.gf;
    let modulus: Vec<String> = gf.modulus().iter().map(u32::to_string).collect();
    writeln!(out, "field GF({}^{}) modulus={}", gf.p(), gf.t(), modulus.join(",")).unwrap();
    let sh = inst.shape;
    writeln!(out, "code n={} k={} u={} nbar={} s={}", inst.params.n(), inst.params.k, sh.u, sh.nbar, sh.s).unwrap();
    writeln!(out, "goodpoly {}", inst.gp).unwrap();
    writeln!(out, "scheme {}", sc.scheme.tag()).unwrap();
    let fails = if inst.spec.is_empty() { "none".to_string() } else { inst.spec.to_string() };
    writeln!(out, "failures {fails}").unwrap();
    writeln!(out, "helpers {}", rack_list(&inst.helpers)).unwrap();
}

/// The deterministic report of one run, and whether everything matched.
pub fn render_run(sc: &Scenario, inst: &Instance, ex: &Execution, show_intra: bool) -> (String, bool) {
    let mut out = String::new();
    header(&mut out, sc, inst);
    for st in &ex.report.steps {
        let dl: Vec<String> = st.per_helper.iter().map(|(h, c)| format!("{}:{c}", h + 1)).collect();
        writeln!(
            out,
            "t={} column={} racks={} method={}{} measured={} predicted={} downloads={}",
            st.t,
            st.column,
            rack_list(&st.targets),
            st.method,
            if st.baseline { " baseline" } else { "" },
            st.measured,
            st.predicted,
            dl.join(","),
        )
        .unwrap();
    }
    let sum = measure(&ex.ledger);
    let report = &ex.report;
    writeln!(
        out,
        "bandwidth measured={} predicted={} ledger={} symbols={}",
        report.total(),
        report.predicted_total(),
        sum.cross,
        Exact(report.symbols())
    )
    .unwrap();
    if show_intra {
        writeln!(out, "intra {} delivery {}", sum.intra, sum.delivery).unwrap();
    }
    let measured: Vec<i64> = report.steps.iter().map(|s| s.measured as i64).collect();
    let formula = if inst.spec.m() == 1 {
        Formula::Cor1 { eps: inst.spec.eps() as i64, bprime: measured[0] }
    } else {
        Formula::Thm2 { terms: measured }
    };
    let value = predict(&formula).expect("integer formulas");
    let formula_ok = value == num_rational::Ratio::from_integer(sum.cross as i64);
    writeln!(out, "formula {}={}", formula.name(), Exact(value)).unwrap();
    writeln!(out, "restored {}", ok(ex.restored_ok())).unwrap();
    writeln!(out, "oracle {}", ok(ex.oracle_ok())).unwrap();
    let all = ex.restored_ok() && ex.oracle_ok() && ex.accounting_ok() && formula_ok;
    writeln!(out, "status {}", if all { "ok" } else { "MISMATCH" }).unwrap();
    (out, all)
}

pub fn cmd_run(text: &str, seed: Option<u64>, show_intra: bool) -> Outcome {
    let sc = match Scenario::parse(text) {
        Ok(sc) => sc,
        Err(e) => return Outcome::failed(&e),
    };
    let inst = match sc.instantiate(seed) {
        Ok(i) => i,
        Err(e) => return Outcome::failed(&e),
    };
    match execute(&inst) {
        Ok(ex) => {
            let (report, good) = render_run(&sc, &inst, &ex, show_intra);
            Outcome {
                report,
                ledger: Some(ex.ledger.export(show_intra)),
                code: if good { EXIT_OK } else { EXIT_MISMATCH },
            }
        }
        Err(e) => Outcome::failed(&e),
    }
}

pub const EXAMPLE1: &str = "\
# GF(16) with x^4 + x + 1, h(x) = x + x^4, three failures in rack 1
field p=2 t=4 modulus=1,1,0,0,1
code n=16 k=7 u=4
goodpoly family=additive theta=1,0,1 nbar=4
scheme kind=gw_subfield delta=2
failures 1:2,3,4
helpers 2,3,4
seed 42
";

// Tr(c e / z) written with a single net power of the generator.
fn trace_label(gf: &Gf, b: Elem, z: Elem) -> String {
    let lz = gf.log(z).expect("nonzero offset") as i64;
    let lc = gf.log(gf.mul(b, z)).expect("nonzero basis element") as i64;
    let d = lc - lz;
    let g = |k: i64| if k == 1 { "γ".to_string() } else { format!("γ^{k}") };
    match d {
        0 => "Tr(e)".into(),
        d if d > 0 => format!("Tr({}e)", g(d)),
        d => format!("Tr(e/{})", g(-d)),
    }
}

pub fn cmd_example1(show_intra: bool) -> Outcome {
    let sc = Scenario::parse(EXAMPLE1).expect("built-in scenario");
    let inst = match sc.instantiate(None) {
        Ok(i) => i,
        Err(e) => return Outcome::failed(&e),
    };
    let ex = match execute(&inst) {
        Ok(ex) => ex,
        Err(e) => return Outcome::failed(&e),
    };
    let gf = &inst.gf;
    let mut out = String::from("rack-aware RS over GF(16), h(x) = x + x^4, n=16 k=7 u=4\n");
    for (i, (pts, y)) in ex.array.points.iter().zip(&ex.array.ys).enumerate() {
        let names: Vec<String> = pts.iter().map(|&a| gf.show_power(a)).collect();
        writeln!(out, "rack {}: {}  (y={})", i + 1, names.join(" "), gf.show_power(*y)).unwrap();
    }
    let failed: Vec<String> = inst
        .spec
        .failed(0)
        .expect("rack 1 fails")
        .iter()
        .map(|&n| format!("f({})", gf.show_power(ex.array.points[0][n])))
        .collect();
    writeln!(out, "failed in rack 1: {}", failed.join(", ")).unwrap();
    writeln!(out, "downloads per coefficient e = e_(i,4-t), t=1..3:").unwrap();
    if let Some(Method::Trace(sch)) = inst.plan.steps.first().map(|s| &s.method) {
        let ystar = ex.array.ys[sch.target];
        for (idx, &h) in sch.helpers.iter().enumerate() {
            let z = gf.sub(ex.array.ys[h], ystar);
            let labels: Vec<String> = sch.basis(idx).iter().map(|&b| trace_label(gf, b, z)).collect();
            writeln!(out, "  rack {}: {}", h + 1, labels.join(", ")).unwrap();
        }
    }
    let bprime = ex.report.steps[0].measured;
    writeln!(out, "b = eps*b' = {}*{} = {} bits", inst.spec.eps(), bprime, inst.spec.eps() * bprime).unwrap();
    let (report, good) = render_run(&sc, &inst, &ex, show_intra);
    out.push_str(&report);
    Outcome {
        report: out,
        ledger: Some(ex.ledger.export(show_intra)),
        code: if good { EXIT_OK } else { EXIT_MISMATCH },
    }
}

// "a:b" inclusive range, "a,b,c" list, or a single integer
fn parse_values(v: &str) -> Result<Vec<i64>> {
    let bad = || Error::Config { line: 0, msg: format!("cannot parse value {v:?}") };
    if let Some((a, b)) = v.split_once(':') {
        let a: i64 = a.parse().map_err(|_| bad())?;
        let b: i64 = b.parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    v.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

/// `table <formula> key=values ...` as CSV, sweeping every listed value.
pub fn cmd_table(args: &[String]) -> Result<String> {
    let (name, rest) = args.split_first().ok_or(Error::Config { line: 0, msg: "missing formula".into() })?;
    let keys = Formula::params(name).ok_or(Error::Config { line: 0, msg: format!("unknown formula {name}") })?;
    let mut values: Vec<Option<Vec<i64>>> = vec![None; keys.len()];
    for arg in rest {
        let (k, v) =
            arg.split_once('=').ok_or(Error::Config { line: 0, msg: format!("expected key=value, got {arg}") })?;
        let pos =
            keys.iter().position(|&x| x == k).ok_or(Error::Config { line: 0, msg: format!("{name} takes no {k}") })?;
        values[pos] = Some(parse_values(v)?);
    }
    let values: Vec<Vec<i64>> = values
        .into_iter()
        .zip(keys.iter())
        .map(|(v, k)| v.ok_or(Error::Config { line: 0, msg: format!("missing {k}=") }))
        .collect::<Result<_>>()?;
    let mut out = format!("{},{}\n", keys.join(","), name);
    if *name == "thm2" {
        let f = Formula::Thm2 { terms: values[0].clone() };
        let terms: Vec<String> = values[0].iter().map(i64::to_string).collect();
        writeln!(out, "{},{}", terms.join("+"), Exact(predict(&f)?)).unwrap();
        return Ok(out);
    }
    let mut idx = vec![0usize; keys.len()];
    loop {
        let row: Vec<i64> = idx.iter().zip(&values).map(|(&i, v)| v[i]).collect();
        let f = Formula::from_values(name, |k| keys.iter().position(|&x| x == k).map(|p| vec![row[p]]))?;
        let cells: Vec<String> = row.iter().map(i64::to_string).collect();
        writeln!(out, "{},{}", cells.join(","), Exact(predict(&f)?)).unwrap();
        // odometer over the grid, last key fastest
        let mut pos = keys.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < values[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrialResult {
    pub columns: bool,
    pub residues: bool,
    pub oracle: bool,
    pub accounting: bool,
    /// Error kind when the configured scheme rejected the failure pattern
    /// and naive repair was used instead.
    pub fallback: Option<&'static str>,
    pub error: Option<String>,
}

impl TrialResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.columns && self.residues && self.oracle && self.accounting
    }
}

/// One randomized trial: fresh message, column and residue checks, a
/// random failure pattern repaired and compared with the decoding oracle.
pub fn trial(inst: &Instance, scheme: &SchemeConfig, seed: u64) -> TrialResult {
    let mut res = TrialResult::default();
    let mut run = || -> Result<()> {
        let gf = &inst.gf;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_message(gf, inst.params.k, &mut rng);
        let arr = layout(gf, &f, &inst.gp, &inst.params)?;
        let rs = rack_residues(gf, &arr)?;
        res.columns =
            (0..arr.u()).map(|j| column(&rs, j)?.is_codeword(gf)).collect::<Result<Vec<_>>>()?.into_iter().all(|b| b);
        let hs = coefficient_polys(gf, &f, inst.gp.h())?;
        res.residues = hs.iter().all(|h| h.degree_below(inst.shape.s))
            && arr.ys.iter().enumerate().all(|(i, &y)| {
                (0..arr.u()).all(|j| hs.get(j).map_or(Elem::ZERO, |h| h.eval(gf, y)) == rs.coeffs[i][j])
            });
        let spec = random_failures(&inst.shape, &mut rng);
        let helpers: Vec<usize> = (0..inst.shape.nbar).filter(|&r| spec.failed(r).is_none()).collect();
        let ys = inst.gp.constants();
        let pl: RepairPlan = match plan(gf, &spec, &helpers, scheme, &ys, &inst.shape) {
            Ok(p) => p,
            Err(e @ (Error::PreconditionFailed(_) | Error::InsufficientHelpers(_) | Error::BasisDegenerate)) => {
                res.fallback = Some(e.kind());
                plan(gf, &spec, &helpers, &SchemeConfig::Naive, &ys, &inst.shape)?
            }
            Err(e) => return Err(e),
        };
        let trial_inst = Instance { f, spec, helpers, plan: pl, ..inst.clone() };
        let ex = execute(&trial_inst)?;
        res.oracle = ex.restored_ok() && ex.oracle_ok();
        res.accounting = ex.accounting_ok();
        Ok(())
    };
    if let Err(e) = run() {
        res.error = Some(format!("{}: {e}", e.kind()));
    }
    res
}

pub fn cmd_verify(text: &str, trials: usize, seed: Option<u64>) -> Outcome {
    let sc = match Scenario::parse(text) {
        Ok(sc) => sc,
        Err(e) => return Outcome::failed(&e),
    };
    let base = seed.unwrap_or(sc.seed);
    // the campaign draws its own failures, so build the code without any
    let mut quiet = sc.clone();
    quiet.failures = Failures::None;
    quiet.helpers = None;
    let inst = match quiet.instantiate(Some(base)) {
        Ok(i) => i,
        Err(e) => return Outcome::failed(&e),
    };
    let results: Vec<TrialResult> =
        (0..trials as u64).into_par_iter().map(|i| trial(&inst, &sc.scheme, base.wrapping_add(i))).collect();
    let count = |f: fn(&TrialResult) -> bool| results.iter().filter(|r| f(r)).count();
    let mut out = String::new();
    writeln!(out, "trials {trials} seed {base}").unwrap();
    writeln!(out, "columns {}/{trials}", count(|r| r.columns)).unwrap();
    writeln!(out, "residues {}/{trials}", count(|r| r.residues)).unwrap();
    writeln!(out, "oracle {}/{trials}", count(|r| r.oracle)).unwrap();
    writeln!(out, "bandwidth {}/{trials}", count(|r| r.accounting)).unwrap();
    writeln!(out, "naive-fallback {}", count(|r| r.fallback.is_some())).unwrap();
    for (i, r) in results.iter().enumerate() {
        if let Some(e) = &r.error {
            writeln!(out, "trial {i} error {e}").unwrap();
        }
    }
    let good = results.iter().all(TrialResult::passed);
    writeln!(out, "status {}", if good { "ok" } else { "MISMATCH" }).unwrap();
    Outcome { report: out, ledger: None, code: if good { EXIT_OK } else { EXIT_MISMATCH } }
}
