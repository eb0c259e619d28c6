//! Bases, dual bases, subfield ranks and subspaces of GF(p^t).

use super::linalg::{invert, FpEchelon};
use super::{Elem, Gf};
use crate::error::{Error, Result};

fn check_pair(gf: &Gf, upper: u32, lower: u32) -> Result<()> {
    if upper == 0 || gf.t() % upper != 0 {
        return Err(Error::BadSubfield { delta: upper, t: gf.t() });
    }
    if lower == 0 || upper % lower != 0 {
        return Err(Error::BadSubfield { delta: lower, t: upper });
    }
    Ok(())
}

/// Dual basis of `basis` for the extension GF(p^upper)/GF(p^lower): the
/// unique `b*` with `Tr(b_i b*_j) = [i == j]` under the relative trace.
pub fn dual_basis(gf: &Gf, basis: &[Elem], upper: u32, lower: u32) -> Result<Vec<Elem>> {
    check_pair(gf, upper, lower)?;
    let dim = (upper / lower) as usize;
    if basis.len() != dim {
        return Err(Error::NotABasis(format!("expected {dim} elements, got {}", basis.len())));
    }
    for &b in basis {
        if !gf.in_subfield(b, upper)? {
            return Err(Error::NotABasis(format!("{b} is outside GF(p^{upper})")));
        }
    }
    let mut gram = vec![vec![Elem::ZERO; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            gram[i][j] = gf.relative_trace(gf.mul(basis[i], basis[j]), upper, lower)?;
        }
    }
    let inv = invert(gf, &gram).map_err(|_| Error::NotABasis("trace form is singular".into()))?;
    Ok((0..dim).map(|j| (0..dim).fold(Elem::ZERO, |acc, k| gf.add(acc, gf.mul(inv[k][j], basis[k])))).collect())
}

/// Coordinates `Tr(b_i x)` of `x` against `basis` (relative trace
/// GF(p^upper)/GF(p^lower)).
pub fn expand(gf: &Gf, x: Elem, basis: &[Elem], upper: u32, lower: u32) -> Result<Vec<Elem>> {
    check_pair(gf, upper, lower)?;
    basis.iter().map(|&b| gf.relative_trace(gf.mul(b, x), upper, lower)).collect()
}

/// Inverse of [`expand`]: `sum_i c_i b*_i` over the dual basis.
pub fn reassemble(gf: &Gf, coords: &[Elem], dual: &[Elem]) -> Elem {
    coords.iter().zip(dual).fold(Elem::ZERO, |acc, (&c, &d)| gf.add(acc, gf.mul(c, d)))
}

struct SubfieldSpan<'a> {
    gf: &'a Gf,
    scalars: Vec<Elem>,
    ech: FpEchelon,
}

impl<'a> SubfieldSpan<'a> {
    fn new(gf: &'a Gf, delta: u32) -> Result<Self> {
        let z = gf.subfield_generator(delta)?;
        let scalars = (0..delta as u64).map(|i| gf.pow(z, i)).collect();
        Ok(SubfieldSpan { gf, scalars, ech: FpEchelon::new(gf.p()) })
    }

    // GF(p)-span of {b * s : b in a GF(p)-basis of the subfield} is the
    // subfield-span of s, so one echelon over GF(p) tracks both.
    fn insert(&mut self, s: Elem) -> bool {
        if !self.ech.insert(&self.gf.digits(s)) {
            return false;
        }
        for &b in &self.scalars[1..] {
            self.ech.insert(&self.gf.digits(self.gf.mul(b, s)));
        }
        true
    }

    fn rank(&self) -> usize {
        self.ech.rank() / self.scalars.len()
    }
}

/// Dimension of the GF(p^delta)-span of `elems`.
pub fn rank_over_subfield(gf: &Gf, elems: &[Elem], delta: u32) -> Result<usize> {
    let mut span = SubfieldSpan::new(gf, delta)?;
    for &s in elems {
        span.insert(s);
    }
    Ok(span.rank())
}

/// A maximal GF(p^delta)-independent subset of `elems`, chosen greedily in
/// input order.
pub fn span_basis(gf: &Gf, elems: &[Elem], delta: u32) -> Result<Vec<Elem>> {
    let mut span = SubfieldSpan::new(gf, delta)?;
    Ok(elems.iter().copied().filter(|&s| span.insert(s)).collect())
}

/// A subspace of GF(p^t) over the degree-`delta` subfield, stored with its
/// full element list.
#[derive(Debug, Clone)]
pub struct SubspaceDesc {
    delta: u32,
    basis: Vec<Elem>,
    elements: Vec<Elem>,
}

impl SubspaceDesc {
    pub fn new(gf: &Gf, basis: Vec<Elem>, delta: u32) -> Result<Self> {
        if rank_over_subfield(gf, &basis, delta)? != basis.len() {
            return Err(Error::NotABasis("subspace generators are dependent".into()));
        }
        let scalars = gf.subfield_elements(delta)?;
        let mut elements = vec![Elem::ZERO];
        for &b in &basis {
            let mut next = Vec::with_capacity(elements.len() * scalars.len());
            for &lambda in &scalars {
                let shift = gf.mul(lambda, b);
                next.extend(elements.iter().map(|&x| gf.add(x, shift)));
            }
            elements = next;
        }
        elements.sort_unstable();
        Ok(SubspaceDesc { delta, basis, elements })
    }

    /// The zero subspace.
    pub fn zero() -> Self {
        SubspaceDesc { delta: 1, basis: Vec::new(), elements: vec![Elem::ZERO] }
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}

/// `L_U(x)`: the product of `(x - u)` over every `u` in the subspace.
pub fn linearized_eval(gf: &Gf, u: &SubspaceDesc, x: Elem) -> Elem {
    u.elements().iter().fold(Elem::ONE, |acc, &e| gf.mul(acc, gf.sub(x, e)))
}
