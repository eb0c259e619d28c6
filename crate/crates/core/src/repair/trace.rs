//! Single-erasure repair of a column code by traces of dual codewords.
//!
//! For dual polynomials `g_l` of degree below `N - s` and GRS multipliers
//! `nu_i`, every codeword satisfies `sum_i nu_i g_l(y_i) e_i = 0`. Taking the
//! absolute trace gives `Tr(nu* g_l(y*) e*)` from the helpers' traces, and
//! when `{nu* g_l(y*)}` is a basis the erased symbol follows from the dual
//! basis. Helper `i` only has to send `Tr(b e_i)` for `b` in an F_p-basis of
//! `{nu_i g_l(y_i)}_l`.

use crate::error::{Error, Result};
use crate::field::{dual_basis, fp_coordinates, linearized_eval, rank_over_subfield, span_basis};
use crate::field::{Elem, Gf, SubspaceDesc};
use crate::rack::ColumnWord;
use crate::rs::dual_multipliers;

/// A precomputed trace repair for one erased position of a column code.
#[derive(Clone, Debug)]
pub struct TraceScheme {
    pub target: usize,
    pub helpers: Vec<usize>,
    helper_basis: Vec<Vec<Elem>>,
    // [helper][l] coordinates of nu_i g_l(y_i) in helper_basis
    helper_coords: Vec<Vec<Vec<u32>>>,
    target_dual: Vec<Elem>,
    predicted: Vec<usize>,
}

/// Outcome of repairing one column symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleRepair {
    pub value: Elem,
    /// `(helper, sub-symbols sent)`.
    pub downloads: Vec<(usize, usize)>,
}

impl SingleRepair {
    pub fn total(&self) -> usize {
        self.downloads.iter().map(|d| d.1).sum()
    }
}

impl TraceScheme {
    /// `values[l][i]` is `g_l` at the `i`-th helper's point, with the value
    /// at the target (the removable-singularity limit) last.
    fn build(gf: &Gf, ys: &[Elem], target: usize, helpers: Vec<usize>, values: Vec<Vec<Elem>>) -> Result<Self> {
        let mut pts: Vec<Elem> = helpers.iter().map(|&h| ys[h]).collect();
        pts.push(ys[target]);
        let nu = dual_multipliers(gf, &pts)?;
        let p = gf.p();
        let mut helper_basis = Vec::with_capacity(helpers.len());
        let mut helper_coords = Vec::with_capacity(helpers.len());
        let mut predicted = Vec::with_capacity(helpers.len());
        for idx in 0..helpers.len() {
            let raw: Vec<Elem> = values.iter().map(|row| row[idx]).collect();
            let scaled: Vec<Elem> = raw.iter().map(|&v| gf.mul(nu[idx], v)).collect();
            let basis = span_basis(gf, &scaled, 1)?;
            let digits: Vec<Vec<u32>> = basis.iter().map(|&b| gf.digits(b)).collect();
            let coords = scaled
                .iter()
                .map(|&v| {
                    fp_coordinates(p, &digits, &gf.digits(v))
                        .ok_or_else(|| Error::Singular("helper value outside its span".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            predicted.push(rank_over_subfield(gf, &raw, 1)?);
            helper_basis.push(basis);
            helper_coords.push(coords);
        }
        let last = helpers.len();
        let at_target: Vec<Elem> = values.iter().map(|row| gf.mul(nu[last], row[last])).collect();
        if at_target.len() != gf.t() as usize || rank_over_subfield(gf, &at_target, 1)? != at_target.len() {
            return Err(Error::BasisDegenerate);
        }
        let target_dual = dual_basis(gf, &at_target, gf.t(), 1)?;
        Ok(TraceScheme { target, helpers, helper_basis, helper_coords, target_dual, predicted })
    }

    /// Sub-symbols helper number `idx` sends: `Tr(b e)` for its basis `b`.
    pub fn helper_payload(&self, gf: &Gf, idx: usize, e: Elem) -> Vec<u32> {
        self.helper_basis[idx].iter().map(|&b| gf.trace(gf.mul(b, e))).collect()
    }

    pub fn recover(&self, gf: &Gf, payloads: &[Vec<u32>]) -> Elem {
        let p = gf.p() as u64;
        let mut out = Elem::ZERO;
        for (l, &d) in self.target_dual.iter().enumerate() {
            let mut acc = 0u64;
            for (idx, payload) in payloads.iter().enumerate() {
                for (c, &v) in self.helper_coords[idx][l].iter().zip(payload) {
                    acc = (acc + *c as u64 * v as u64) % p;
                }
            }
            let tr = ((p - acc) % p) as u32;
            out = gf.add(out, gf.scale(tr, d));
        }
        out
    }

    /// The elements `b` whose traces helper number `idx` sends.
    pub fn basis(&self, idx: usize) -> &[Elem] {
        &self.helper_basis[idx]
    }

    /// Per-helper download sizes, in helper order.
    pub fn downloads(&self) -> Vec<usize> {
        self.helper_basis.iter().map(Vec::len).collect()
    }

    /// `Rank_Fp {g_l(y_i)}_l` per helper, computed without the multipliers.
    pub fn predicted(&self) -> &[usize] {
        &self.predicted
    }

    /// Runs the scheme on a column word whose helper entries are known.
    pub fn run(&self, gf: &Gf, word: &ColumnWord) -> SingleRepair {
        let payloads: Vec<Vec<u32>> =
            self.helpers.iter().enumerate().map(|(idx, &h)| self.helper_payload(gf, idx, word.values[h])).collect();
        SingleRepair {
            value: self.recover(gf, &payloads),
            downloads: self.helpers.iter().copied().zip(payloads.iter().map(Vec::len)).collect(),
        }
    }
}

fn check_positions(ys: &[Elem], target: usize, helpers: &[usize], s: usize) -> Result<()> {
    if target >= ys.len() || helpers.iter().any(|&h| h >= ys.len() || h == target) {
        return Err(Error::InsufficientHelpers("helper or target index out of range".into()));
    }
    if helpers.len() < s {
        return Err(Error::InsufficientHelpers(format!("{} helpers for dimension {s}", helpers.len())));
    }
    Ok(())
}

// x + x^p + ... + x^(p^(delta-1)), valid as a polynomial for any x
fn partial_trace(gf: &Gf, x: Elem, delta: u32) -> Elem {
    (0..delta).fold(Elem::ZERO, |acc, k| gf.add(acc, gf.frobenius(x, k)))
}

/// Default GW bases: powers of the field generator for `eta`, powers of the
/// subfield generator for `beta`.
pub fn default_gw_bases(gf: &Gf, delta: u32) -> Result<(Vec<Elem>, Vec<Elem>)> {
    if delta == 0 || gf.t() % delta != 0 {
        return Err(Error::BadSubfield { delta, t: gf.t() });
    }
    let g = gf.generator();
    let z = gf.subfield_generator(delta)?;
    let eta = (0..(gf.t() / delta) as u64).map(|i| gf.pow(g, i)).collect();
    let beta = (0..delta as u64).map(|i| gf.pow(z, i)).collect();
    Ok((eta, beta))
}

/// Trace repair with `g_{m,w}(x) = eta_m Tr_{GF(p^delta)/GF(p)}(beta_w (x - y*)) / (x - y*)`.
pub fn gw_scheme(
    gf: &Gf,
    ys: &[Elem],
    s: usize,
    target: usize,
    helpers: Vec<usize>,
    delta: u32,
    eta: &[Elem],
    beta: &[Elem],
) -> Result<TraceScheme> {
    check_positions(ys, target, &helpers, s)?;
    if delta == 0 || gf.t() % delta != 0 {
        return Err(Error::BadSubfield { delta, t: gf.t() });
    }
    let n = helpers.len() + 1;
    let need = (gf.p() as u64).pow(delta - 1);
    if ((n - s) as u64) < need {
        return Err(Error::PreconditionFailed(format!(
            "code length {n} minus dimension {s} is below p^(delta-1) = {need}"
        )));
    }
    for &i in helpers.iter().chain(std::iter::once(&target)) {
        if !gf.in_subfield(ys[i], delta)? {
            return Err(Error::PreconditionFailed(format!("column point {} is outside GF(p^{delta})", ys[i].0)));
        }
    }
    let products: Vec<Elem> =
        eta.iter().flat_map(|&a| beta.iter().map(move |&b| (a, b))).map(|(a, b)| gf.mul(a, b)).collect();
    if products.len() != gf.t() as usize || rank_over_subfield(gf, &products, 1)? != products.len() {
        return Err(Error::BasisDegenerate);
    }
    let ystar = ys[target];
    let mut values = Vec::with_capacity(products.len());
    for &em in eta {
        for &bw in beta {
            let mut row: Vec<Elem> = helpers
                .iter()
                .map(|&h| {
                    let z = gf.sub(ys[h], ystar);
                    let tr = partial_trace(gf, gf.mul(bw, z), delta);
                    gf.mul(em, gf.div(tr, z).expect("distinct column points"))
                })
                .collect();
            row.push(gf.mul(em, bw));
            values.push(row);
        }
    }
    TraceScheme::build(gf, ys, target, helpers, values)
}

/// Default subspace data: `U = span_Fp{1, g, ..., g^(sbar-1)}` and the
/// power basis of the field.
pub fn default_subspace(gf: &Gf, sbar: u32) -> Result<(SubspaceDesc, Vec<Elem>)> {
    if sbar >= gf.t() {
        return Err(Error::BadParams(format!("subspace dimension {sbar} must be below t")));
    }
    let g = gf.generator();
    let ubar = SubspaceDesc::new(gf, (0..sbar as u64).map(|i| gf.pow(g, i)).collect(), 1)?;
    let beta = (0..gf.t() as u64).map(|i| gf.pow(g, i)).collect();
    Ok((ubar, beta))
}

/// Trace repair with `g_l(x) = L_U(beta_l (x - y*)) / (x - y*)`.
pub fn subspace_scheme(
    gf: &Gf,
    ys: &[Elem],
    s: usize,
    target: usize,
    helpers: Vec<usize>,
    ubar: &SubspaceDesc,
    beta: &[Elem],
) -> Result<TraceScheme> {
    check_positions(ys, target, &helpers, s)?;
    if ubar.delta() != 1 {
        return Err(Error::BadParams("the subspace must be given over GF(p)".into()));
    }
    let n = helpers.len() + 1;
    let need = ubar.cardinality() as u64;
    if ((n - s) as u64) < need {
        return Err(Error::PreconditionFailed(format!("code length {n} minus dimension {s} is below |U| = {need}")));
    }
    if beta.len() != gf.t() as usize || rank_over_subfield(gf, beta, 1)? != beta.len() {
        return Err(Error::BasisDegenerate);
    }
    // linear coefficient of L_U: product of -u over the nonzero elements
    let c1 = ubar.elements().iter().filter(|u| !u.is_zero()).fold(Elem::ONE, |acc, &u| gf.mul(acc, gf.neg(u)));
    let ystar = ys[target];
    let values = beta
        .iter()
        .map(|&bl| {
            let mut row: Vec<Elem> = helpers
                .iter()
                .map(|&h| {
                    let z = gf.sub(ys[h], ystar);
                    let l = linearized_eval(gf, ubar, gf.mul(bl, z));
                    gf.div(l, z).expect("distinct column points")
                })
                .collect();
            row.push(gf.mul(bl, c1));
            row
        })
        .collect();
    TraceScheme::build(gf, ys, target, helpers, values)
}

fn all_but(n: usize, target: usize) -> Vec<usize> {
    (0..n).filter(|&i| i != target).collect()
}

/// GW repair of `word[target]` from every other position, default bases.
pub fn gw_subfield_repair(gf: &Gf, word: &ColumnWord, target: usize, delta: u32) -> Result<SingleRepair> {
    let (eta, beta) = default_gw_bases(gf, delta)?;
    let scheme = gw_scheme(gf, &word.ys, word.s, target, all_but(word.len(), target), delta, &eta, &beta)?;
    Ok(scheme.run(gf, word))
}

/// Subspace repair of `word[target]` from every other position.
pub fn subspace_repair(
    gf: &Gf,
    word: &ColumnWord,
    target: usize,
    ubar: &SubspaceDesc,
    beta: &[Elem],
) -> Result<SingleRepair> {
    let scheme = subspace_scheme(gf, &word.ys, word.s, target, all_but(word.len(), target), ubar, beta)?;
    Ok(scheme.run(gf, word))
}
