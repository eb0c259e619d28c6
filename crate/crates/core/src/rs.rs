//! Reed-Solomon codes, their GRS duals, and an erasure-decoding oracle.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Gf};
use crate::poly::{lagrange, Poly};

/// Length, dimension and evaluation points of an RS code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    pub k: usize,
    pub points: Vec<Elem>,
}

/// The rack quantities derived from a code and a rack size `u`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RackShape {
    pub u: usize,
    /// Number of racks.
    pub nbar: usize,
    /// Dimension bound of every column code, `ceil(k/u)`.
    pub s: usize,
    /// `k - u*floor(k/u)`.
    pub v: usize,
}

impl CodeParams {
    pub fn new(gf: &Gf, k: usize, points: Vec<Elem>) -> Result<Self> {
        let n = points.len();
        if k < 1 || k >= n {
            return Err(Error::BadParams(format!("need 1 <= k < n, got k={k}, n={n}")));
        }
        if n > gf.size() as usize {
            return Err(Error::BadParams(format!("n={n} exceeds the field size")));
        }
        let mut seen = HashSet::with_capacity(n);
        for &a in &points {
            if !gf.contains(a) {
                return Err(Error::BadParams(format!("{} is not a field element", a.0)));
            }
            if !seen.insert(a) {
                return Err(Error::DuplicatePoint(a.0));
            }
        }
        Ok(CodeParams { k, points })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn rack_shape(&self, u: usize) -> Result<RackShape> {
        let n = self.n();
        if u == 0 || n % u != 0 {
            return Err(Error::BadParams(format!("rack size {u} does not divide n={n}")));
        }
        Ok(RackShape { u, nbar: n / u, s: self.k.div_ceil(u), v: self.k % u })
    }
}

/// A vector of symbols aligned with the evaluation points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub symbols: Vec<Elem>,
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| s.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn encode(gf: &Gf, f: &Poly, params: &CodeParams) -> Result<Codeword> {
    if !f.degree_below(params.k) {
        return Err(Error::BadParams(format!("message degree must be below k={}", params.k)));
    }
    Ok(Codeword { symbols: params.points.iter().map(|&a| f.eval(gf, a)).collect() })
}

/// GRS column multipliers `nu_i = prod_{j != i} (a_i - a_j)^-1`.
pub fn dual_multipliers(gf: &Gf, points: &[Elem]) -> Result<Vec<Elem>> {
    points
        .iter()
        .enumerate()
        .map(|(i, &ai)| {
            let prod = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Elem::ONE, |acc, (_, &aj)| gf.mul(acc, gf.sub(ai, aj)));
            gf.inv(prod).map_err(|_| Error::DuplicatePoint(ai.0))
        })
        .collect()
}

/// The dual codeword `(nu_i g(a_i))` for `deg g < n - k`.
pub fn dual_word(gf: &Gf, g: &Poly, params: &CodeParams) -> Result<Codeword> {
    let r = params.n() - params.k;
    if !g.degree_below(r) {
        return Err(Error::BadParams(format!("dual polynomial degree must be below n-k={r}")));
    }
    let nu = dual_multipliers(gf, &params.points)?;
    Ok(Codeword { symbols: params.points.iter().zip(&nu).map(|(&a, &m)| gf.mul(m, g.eval(gf, a))).collect() })
}

pub fn inner_product(gf: &Gf, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| gf.add(acc, gf.mul(x, y)))
}

/// Recovers the message polynomial from a word with erasures (`None`).
///
/// Interpolates the first `k` surviving positions and checks the rest.
pub fn erasure_decode(gf: &Gf, word: &[Option<Elem>], params: &CodeParams) -> Result<Poly> {
    if word.len() != params.n() {
        return Err(Error::BadParams("word length differs from n".into()));
    }
    let survivors: Vec<(Elem, Elem)> = params.points.iter().zip(word).filter_map(|(&a, s)| s.map(|v| (a, v))).collect();
    if survivors.len() < params.k {
        return Err(Error::TooManyErasures { survivors: survivors.len(), k: params.k });
    }
    let f = lagrange(gf, &survivors[..params.k])?;
    if survivors[params.k..].iter().any(|&(a, v)| f.eval(gf, a) != v) {
        return Err(Error::Inconsistent);
    }
    Ok(f)
}
