//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rackcode::cli::{cmd_run, execute, EXIT_OK};
use rackcode::field::{Elem, Gf};
use rackcode::good_poly::GoodPolynomial;
use rackcode::poly::{coefficient_polys, Poly};
use rackcode::rack::{column, layout, rack_params, rack_residues};
use rackcode::repair::{predict, repair_rack, Endpoint, Exact, Formula, Phase, SchemeConfig, Transfer};
use rackcode::rs::{dual_word, erasure_decode, CodeParams};
use rackcode::scenario::Scenario;
use rackcode::sim::{build_cluster, measure, random_message};

use common::*;

type Verdict = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn single_rack_reproduction() -> Verdict {
    let start = Instant::now();
    let sc = Scenario::parse(EXAMPLE1).map_err(|e| e.to_string())?;
    let inst = sc.instantiate(None).map_err(|e| e.to_string())?;
    let ex = execute(&inst).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let gf = &inst.gf;
    let lost: Vec<Elem> = inst.spec.failed(0).unwrap().iter().map(|&n| ex.array.points[0][n]).collect();
    check(lost == vec![Elem::ONE, gf.exp(5), gf.exp(10)], || format!("failed points {lost:?}"))?;
    check(ex.restored_ok(), || "restored symbols differ from the originals".into())?;
    check(ex.oracle_ok(), || "restored symbols differ from the decoder".into())?;
    let cross = measure(&ex.ledger).cross;
    check(cross == 18, || format!("ledger cross-rack total {cross}, expected 18"))?;
    check(ex.report.total() == 18, || format!("report total {}", ex.report.total()))?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("18 bits cross-rack, 3 symbols restored, {elapsed:.2?}"))
}

fn download_table() -> Verdict {
    let gf = gf16();
    let (_, inst) = base(EXAMPLE1);
    let inv = |i| gf.inv(gf.exp(i)).unwrap();
    // helper rack (0-based) -> multipliers c with payload Tr(c e)
    let table = [(1, [Elem::ONE, gf.exp(1)]), (2, [inv(5), inv(4)]), (3, [inv(10), inv(9)])];
    let ys = inst.gp.constants();
    check(ys == vec![Elem::ZERO, Elem::ONE, gf.exp(5), gf.exp(10)], || format!("rack constants {ys:?}"))?;
    let spec = rackcode::repair::FailureSpec::new([(0, vec![1, 2, 3])], &inst.shape).unwrap();
    let pl = rackcode::repair::plan(&gf, &spec, &[1, 2, 3], &SchemeConfig::gw(2), &ys, &inst.shape)
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for trial in 0..50 {
        let f = if trial == 0 { inst.f.clone() } else { random_message(&gf, 7, &mut rng) };
        let arr = layout(&gf, &f, &inst.gp, &inst.params).map_err(|e| e.to_string())?;
        let rs = rack_residues(&gf, &arr).map_err(|e| e.to_string())?;
        let mut log: Vec<Transfer> = Vec::new();
        let (restored, _) = repair_rack(&gf, &arr, &pl, &mut log).map_err(|e| e.to_string())?;
        check(restored == arr.symbols, || format!("message {trial} not restored"))?;
        let cross: Vec<&Transfer> = log.iter().filter(|t| t.phase == Phase::Step2Cross).collect();
        check(cross.len() == 9, || format!("{} cross-rack messages, expected 9", cross.len()))?;
        for t in 1..=3 {
            let j = 4 - t;
            for (rack, mult) in &table {
                let msg = cross
                    .iter()
                    .find(|m| m.src == Endpoint::Rack(*rack) && m.column == Some(j))
                    .ok_or_else(|| format!("no download from rack {} for t={t}", rack + 1))?;
                check(msg.dst == Endpoint::Rack(0), || format!("download sent to {:?}", msg.dst))?;
                let e = rs.coeffs[*rack][j];
                let want: Vec<u32> = mult.iter().map(|&c| gf.trace(gf.mul(c, e))).collect();
                check(msg.payload == want, || {
                    format!("rack {} t={t}: payload {:?}, table gives {want:?}", rack + 1, msg.payload)
                })?;
                checked += want.len();
            }
        }
    }
    Ok(format!("{checked} trace values over 50 messages match the 3x2 table for t=1..3"))
}

fn column_property() -> Verdict {
    let gf256 = Gf::standard(2, 8).unwrap();
    let mut configs: Vec<(String, Gf, GoodPolynomial, usize)> = all_configs()
        .into_iter()
        .map(|(name, _, inst)| (format!("{name}/{}", inst.gp.family().tag()), inst.gf, inst.gp, inst.params.k))
        .collect();
    let gf16 = gf16();
    let power16 = GoodPolynomial::power(&gf16, 5, None).unwrap();
    configs.push(("gf16-power".into(), gf16, power16, 7));
    configs.push(("gf256-power".into(), gf256.clone(), GoodPolynomial::power(&gf256, 17, None).unwrap(), 60));
    let gf64 = Gf::standard(2, 6).unwrap();
    let composite = GoodPolynomial::composite(&gf64, vec![Elem(1), Elem(1)], 3, 2, None).unwrap();
    configs.push(("gf64-composite".into(), gf64, composite, 13));
    let mut families = std::collections::BTreeSet::new();
    let mut words = 0;
    for (name, gf, gp, k) in &configs {
        families.insert(gp.family().tag());
        let params = rack_params(gf, gp, *k).map_err(|e| e.to_string())?;
        let s = params.rack_shape(gp.u()).unwrap().s;
        let col_code = CodeParams::new(gf, s, gp.constants()).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let duals: Vec<Vec<Elem>> = (0..3)
            .map(|_| {
                let g = random_message(gf, gp.nbar() - s, &mut rng);
                dual_word(gf, &g, &col_code).unwrap().symbols
            })
            .collect();
        for trial in 0..200 {
            let f = random_message(gf, *k, &mut rng);
            let arr = layout(gf, &f, gp, &params).map_err(|e| e.to_string())?;
            let rs = rack_residues(gf, &arr).map_err(|e| e.to_string())?;
            for j in 0..gp.u() {
                let w = column(&rs, j).map_err(|e| e.to_string())?;
                check(w.is_codeword(gf).unwrap(), || format!("{name} message {trial} column {j}: degree >= {s}"))?;
                for d in &duals {
                    let ip = rackcode::rs::inner_product(gf, &w.values, d);
                    check(ip.is_zero(), || format!("{name} message {trial} column {j}: dual check failed"))?;
                }
                words += 1;
            }
        }
    }
    check(families.len() == 3, || format!("families covered: {families:?}"))?;
    Ok(format!("{words} column words over {} configurations, all three families", configs.len()))
}

fn coefficient_polys_suite() -> Verdict {
    let fields = [gf16(), Gf::standard(2, 8).unwrap(), Gf::standard(3, 4).unwrap(), Gf::standard(5, 3).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rand_elem = |gf: &Gf, rng: &mut ChaCha8Rng| Elem(rng.gen_range(0..gf.size()));
    for trial in 0..500 {
        let gf = &fields[trial % fields.len()];
        let u = rng.gen_range(1..=8usize);
        let k = rng.gen_range(1..=40usize);
        let s = k.div_ceil(u);
        let mut hc: Vec<Elem> = (0..u).map(|_| rand_elem(gf, &mut rng)).collect();
        hc.push(Elem(rng.gen_range(1..gf.size())));
        let h = Poly::from_coeffs(hc);
        let f = random_message(gf, k, &mut rng);
        let hs = coefficient_polys(gf, &f, &h).map_err(|e| e.to_string())?;
        check(hs.len() == u, || format!("trial {trial}: {} coefficient polynomials", hs.len()))?;
        check(hs.iter().all(|p| p.degree_below(s)), || {
            format!("trial {trial}: degree bound {s} violated (k={k}, u={u})")
        })?;
        for _ in 0..20 {
            let y = rand_elem(gf, &mut rng);
            let rebuilt = Poly::from_coeffs(hs.iter().map(|p| p.eval(gf, y)).collect());
            let (_, rem) = f.divmod(gf, &h.sub(gf, &Poly::constant(y))).unwrap();
            check(rebuilt == rem, || format!("trial {trial}: identity fails at y={}", y.0))?;
        }
    }
    Ok("500 (f, h) pairs over GF(16), GF(256), GF(81), GF(125); 10000 shifts".into())
}

#[derive(Default)]
struct Campaign {
    scenarios: usize,
    whole_rack: usize,
    multi_rack: usize,
    fallbacks: usize,
    oracle_errors: Vec<String>,
    accounting_errors: Vec<String>,
    elapsed: Duration,
}

struct Outcome {
    whole: bool,
    multi: bool,
    fallback: bool,
    oracle: Option<String>,
    accounting: Option<String>,
}

fn scenario(configs: &[(&'static str, Scenario, rackcode::scenario::Instance)], i: usize) -> Outcome {
    let (name, sc, inst) = &configs[i % configs.len()];
    let gf = &inst.gf;
    let sh = inst.shape;
    let mut rng = ChaCha8Rng::seed_from_u64(10_000 + i as u64);
    let m = rng.gen_range(1..=sh.nbar - sh.s);
    let spec = failures(&sh, m, 0.3, &mut rng);
    let f = random_message(gf, inst.params.k, &mut rng);
    let (pl, used) = plan_or_plain(inst, &spec, &sc.scheme);
    let mut out = Outcome {
        whole: spec.racks().any(|r| spec.eps_of(r) == sh.u),
        multi: m > 1,
        fallback: used != sc.scheme,
        oracle: None,
        accounting: None,
    };
    let tag = format!("{name} #{i} failures {spec}");
    let mut cluster = build_cluster(gf, &inst.params, &inst.gp, &f).unwrap();
    let original: Vec<Option<Elem>> = cluster.symbols().into_iter().flatten().collect();
    cluster.inject(&spec).unwrap();
    let erased: Vec<Option<Elem>> = cluster.symbols().into_iter().flatten().collect();
    let decoded = erasure_decode(gf, &erased, &inst.params).unwrap();
    let oracle: Vec<Option<Elem>> = inst.params.points.iter().map(|&a| Some(decoded.eval(gf, a))).collect();
    let (ledger, report) = match cluster.run(gf, &pl) {
        Ok(r) => r,
        Err(e) => {
            out.oracle = Some(format!("{tag}: {e}"));
            return out;
        }
    };
    let restored: Vec<Option<Elem>> = cluster.symbols().into_iter().flatten().collect();
    if restored != oracle || restored != original {
        out.oracle = Some(format!("{tag}: restored array differs from the decoder"));
    }

    let sum = measure(&ledger);
    let total = report.total();
    let ys = inst.gp.constants();
    let independent: Vec<usize> = pl.steps.iter().map(|st| independent_cost(gf, st, &used, &ys, sh.s)).collect();
    let measured: Vec<i64> = report.steps.iter().map(|s| s.measured as i64).collect();
    let formula = if m == 1 {
        Formula::Cor1 { eps: spec.eps() as i64, bprime: measured[0] }
    } else {
        Formula::Thm2 { terms: measured.clone() }
    };
    let full = ledger.export(true);
    let quiet = ledger.export(false);
    let problems = [
        (sum.cross != total, format!("ledger {} vs report {total}", sum.cross)),
        (total != pl.predicted_total(), format!("report {total} vs plan {}", pl.predicted_total())),
        (
            measured.iter().map(|&x| x as usize).ne(independent.iter().copied()),
            format!("per-step {measured:?} vs rank {independent:?}"),
        ),
        (m == 1 && measured.iter().any(|&x| x != measured[0]), format!("single-rack steps differ {measured:?}")),
        (
            predict(&formula).unwrap() != Ratio::from_integer(total as i64),
            format!("{} gives {}", formula.name(), Exact(predict(&formula).unwrap())),
        ),
        (full.lines().last() != quiet.lines().last(), "summary line depends on --show-intra".into()),
        (sum.intra == 0 || full.lines().count() <= quiet.lines().count(), "intra traffic not recorded".into()),
    ];
    if let Some((_, msg)) = problems.iter().find(|p| p.0) {
        out.accounting = Some(format!("{tag}: {msg}"));
    }
    out
}

fn campaign() -> Campaign {
    let configs = all_configs();
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..1000).into_par_iter().map(|i| scenario(&configs, i)).collect();
    let mut c = Campaign { scenarios: outcomes.len(), elapsed: start.elapsed(), ..Campaign::default() };
    for o in outcomes {
        c.whole_rack += o.whole as usize;
        c.multi_rack += o.multi as usize;
        c.fallbacks += o.fallback as usize;
        c.oracle_errors.extend(o.oracle);
        c.accounting_errors.extend(o.accounting);
    }
    c
}

fn oracle_equivalence(c: &Campaign) -> Verdict {
    check(c.oracle_errors.is_empty(), || {
        format!("{} mismatches, first: {}", c.oracle_errors.len(), c.oracle_errors[0])
    })?;
    check(c.whole_rack > 0 && c.multi_rack > 0, || "no whole-rack or multi-rack scenario drawn".into())?;
    check(c.elapsed < Duration::from_secs(60), || format!("took {:.1?}", c.elapsed))?;
    Ok(format!(
        "{} scenarios ({} with a whole rack lost, {} multi-rack, {} on the U={{0}} scheme), {:.1?}",
        c.scenarios, c.whole_rack, c.multi_rack, c.fallbacks, c.elapsed
    ))
}

fn accounting(c: &Campaign) -> Verdict {
    check(c.accounting_errors.is_empty(), || {
        format!("{} mismatches, first: {}", c.accounting_errors.len(), c.accounting_errors[0])
    })?;
    let totals = |o: &rackcode::cli::Outcome| -> Vec<String> {
        o.report.lines().filter(|l| l.starts_with("bandwidth") || l.starts_with("formula")).map(String::from).collect()
    };
    let quiet = cmd_run(EXAMPLE1, None, false);
    let loud = cmd_run(EXAMPLE1, None, true);
    check(quiet.code == EXIT_OK && loud.code == EXIT_OK, || "example run failed".into())?;
    check(quiet.report != loud.report, || "--show-intra changed nothing".into())?;
    check(totals(&quiet) == totals(&loud), || "--show-intra changed the totals".into())?;
    let (lq, ll) = (quiet.ledger.unwrap(), loud.ledger.unwrap());
    check(lq.lines().last() == ll.lines().last(), || "--show-intra changed the ledger summary".into())?;
    Ok(format!(
        "{} scenarios: ledger = report = plan = rank formula = cor1/thm2; intra toggle display-only",
        c.scenarios
    ))
}

fn subspace_bound() -> Verdict {
    let mut codes: Vec<(Gf, GoodPolynomial)> = Vec::new();
    for (t, ms) in [(4u32, vec![3u64, 5]), (6, vec![3, 7, 9]), (8, vec![5, 15, 17])] {
        let gf = Gf::standard(2, t).unwrap();
        for m in ms {
            codes.push((gf.clone(), GoodPolynomial::power(&gf, m, None).unwrap()));
        }
    }
    let gf256 = Gf::standard(2, 8).unwrap();
    codes.push((gf256.clone(), GoodPolynomial::additive(&gf256, vec![Elem(1), Elem(1)], None).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut runs, mut tight, mut settings) = (0, 0, 0);
    for (gf, gp) in &codes {
        let (u, nbar) = (gp.u(), gp.nbar());
        for sbar in 1..gf.t() {
            let smax = nbar as i64 - (1i64 << sbar);
            if smax < 1 {
                continue;
            }
            let smax = smax as usize;
            let mut ss = vec![1, 2, smax / 2, smax];
            ss.retain(|&s| (1..=smax).contains(&s));
            ss.sort();
            ss.dedup();
            for s in ss {
                let k = if s == 1 { rng.gen_range(1..=u) } else { (s - 1) * u + rng.gen_range(1..=u) };
                let params = rack_params(gf, gp, k).map_err(|e| e.to_string())?;
                let shape = params.rack_shape(u).unwrap();
                let ys = gp.constants();
                settings += 1;
                for _ in 0..3 {
                    let spec = failures(&shape, 1, 0.3, &mut rng);
                    let helpers = survivors(&spec, nbar);
                    let pl = rackcode::repair::plan(gf, &spec, &helpers, &SchemeConfig::subspace(sbar), &ys, &shape)
                        .map_err(|e| format!("nbar={nbar} k={k} sbar={sbar}: {e}"))?;
                    let f = random_message(gf, k, &mut rng);
                    let arr = layout(gf, &f, gp, &params).map_err(|e| e.to_string())?;
                    let (restored, report) =
                        repair_rack(gf, &arr, &pl, &mut rackcode::repair::NullRecorder).map_err(|e| e.to_string())?;
                    check(restored == arr.symbols, || format!("nbar={nbar} k={k} sbar={sbar}: not restored"))?;
                    let bound = Formula::Cor2 {
                        eps: spec.eps() as i64,
                        nbar: nbar as i64,
                        t: gf.t() as i64,
                        sbar: sbar as i64,
                    };
                    let bound = predict(&bound).unwrap();
                    let total = Ratio::from_integer(report.total() as i64);
                    check(total <= bound, || format!("nbar={nbar} k={k} t={} sbar={sbar}: {total} > {bound}", gf.t()))?;
                    tight += (total == bound) as usize;
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} runs over {settings} (nbar, k, t, sbar) settings within the bound, {tight} at equality"))
}

fn formulas() -> Verdict {
    let cor3 = predict(&Formula::Cor3 { eps: 2, dbar: 10, t: 30, kp: 5 }).map_err(|e| e.to_string())?;
    check(cor3 == Ratio::from_integer(100), || format!("cor3 = {cor3}"))?;
    let two = predict(&Formula::TwoRack { eps1: 1, eps2: 2, dbar: 10, t: 30, kp: 5 }).map_err(|e| e.to_string())?;
    let want = Ratio::new(600, 7) + Ratio::from_integer(50);
    check(two == want, || format!("two_rack = {two}, expected {want}"))?;
    check(Exact(two).to_string() == "950/7", || format!("rendered {}", Exact(two)))?;
    let cor1 = predict(&Formula::Cor1 { eps: 3, bprime: 6 }).unwrap();
    check(cor1 == Ratio::from_integer(18), || format!("cor1 = {cor1}"))?;
    Ok(format!("cor3 = {}, two_rack = 600/7 + 50 = {}, cor1 = {}", Exact(cor3), Exact(two), Exact(cor1)))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Verdict)> = vec![
        (1, "single-rack reproduction over GF(16)", single_rack_reproduction()),
        (2, "download table", download_table()),
        (3, "column words are codewords", column_property()),
        (4, "coefficient polynomials", coefficient_polys_suite()),
    ];
    let c = campaign();
    results.push((5, "oracle equivalence", oracle_equivalence(&c)));
    results.push((6, "bandwidth accounting", accounting(&c)));
    results.push((7, "subspace bound", subspace_bound()));
    results.push((8, "formula calculators", formulas()));
    let mut failed = 0;
    for (n, name, v) in &results {
        match v {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
