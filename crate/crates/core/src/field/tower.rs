//! Explicit subfield chains GF(p) ⊂ GF(p^d1) ⊂ … ⊂ GF(p^t).
//!
//! Each level is a field in its own right, with its own packed encoding.
//! Level `l` is generated by `z_l = g^((p^t - 1)/(p^d_l - 1))` for the top
//! generator `g`, and its modulus is the minimal polynomial of `z_l` over
//! GF(p), so the level's indeterminate maps to `z_l` under the embedding.
//! The top level keeps the caller's modulus.

use std::collections::HashMap;

use super::{Elem, Gf};
use crate::error::{Error, Result};

/// Arithmetic operations available through [`FieldTower::arith`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Pow(u64),
}

/// An element tagged with its tower level; `packed` uses that level's
/// encoding.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub level: usize,
    pub packed: u32,
}

#[derive(Debug, Clone)]
pub struct Level {
    /// Degree over GF(p).
    pub degree: u32,
    /// Degree over the previous level.
    pub rel_degree: u32,
    pub field: Gf,
    /// Minimal polynomial of this level's indeterminate over the previous
    /// level, coefficients packed in the previous level's encoding.
    pub rel_modulus: Vec<u32>,
    embed: Vec<u32>,
    unembed: HashMap<u32, u32>,
}

#[derive(Debug, Clone)]
pub struct FieldTower {
    levels: Vec<Level>,
}

fn default_chain(t: u32) -> Vec<u32> {
    let mut chain = vec![1];
    let mut cur = 1;
    let mut rest = t;
    while rest > 1 {
        let r = (2..=rest).find(|d| rest % d == 0).unwrap();
        cur *= r;
        rest /= r;
        chain.push(cur);
    }
    chain
}

// coefficients of prod_i (x - r_i), low-to-high, in the top field
fn poly_from_roots(gf: &Gf, roots: &[Elem]) -> Vec<Elem> {
    let mut c = vec![Elem::ONE];
    for &r in roots {
        let mut next = vec![Elem::ZERO; c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i + 1] = gf.add(next[i + 1], a);
            next[i] = gf.sub(next[i], gf.mul(a, r));
        }
        c = next;
    }
    c
}

impl FieldTower {
    /// Builds the tower over `top` along the default chain, which climbs by
    /// the smallest prime factor at each step (GF(2) ⊂ GF(4) ⊂ GF(16) for
    /// t = 4).
    pub fn new(top: Gf) -> Result<Self> {
        let chain = default_chain(top.t());
        Self::with_chain(top, &chain)
    }

    /// Builds the tower along an explicit chain of degrees, which must start
    /// at 1, end at `t`, and divide each other in turn.
    pub fn with_chain(top: Gf, chain: &[u32]) -> Result<Self> {
        let t = top.t();
        if chain.first() != Some(&1) || chain.last() != Some(&t) {
            return Err(Error::BadSubfield { delta: *chain.last().unwrap_or(&0), t });
        }
        for w in chain.windows(2) {
            if w[1] % w[0] != 0 || w[1] == w[0] {
                return Err(Error::BadSubfield { delta: w[0], t: w[1] });
            }
        }
        let p = top.p();
        let mut levels: Vec<Level> = Vec::with_capacity(chain.len());
        for (idx, &d) in chain.iter().enumerate() {
            let (field, embed, unembed, x_top) = if d == t {
                (top.clone(), Vec::new(), HashMap::new(), top.indeterminate())
            } else {
                let z = top.subfield_generator(d)?;
                let conj: Vec<Elem> = (0..d).map(|i| top.frobenius(z, i)).collect();
                let minpoly = poly_from_roots(&top, &conj);
                let coeffs: Vec<u32> = minpoly.iter().map(|c| c.0).collect();
                debug_assert!(coeffs.iter().all(|&c| c < p));
                let field = Gf::new(p, d, &coeffs)?;
                let powers: Vec<Elem> = (0..d as u64).map(|i| top.pow(z, i)).collect();
                let embed: Vec<u32> = field
                    .elements()
                    .map(|e| {
                        field
                            .digits(e)
                            .iter()
                            .zip(&powers)
                            .fold(Elem::ZERO, |acc, (&c, &pw)| top.add(acc, top.scale(c, pw)))
                            .0
                    })
                    .collect();
                let unembed = embed.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
                let x_top = Elem(embed[field.indeterminate().0 as usize]);
                (field, embed, unembed, x_top)
            };
            let (rel_degree, rel_modulus) = if idx == 0 {
                (d, field.modulus().to_vec())
            } else {
                let prev = &levels[idx - 1];
                let r = d / prev.degree;
                let conj: Vec<Elem> = (0..r).map(|i| top.frobenius(x_top, i * prev.degree)).collect();
                let coeffs = poly_from_roots(&top, &conj);
                let packed = coeffs
                    .iter()
                    .map(|&c| Self::unembed_with(prev, c))
                    .collect::<Option<Vec<u32>>>()
                    .expect("minimal polynomial coefficients lie in the previous level");
                (r, packed)
            };
            levels.push(Level { degree: d, rel_degree, field, rel_modulus, embed, unembed });
        }
        Ok(FieldTower { levels })
    }

    fn unembed_with(level: &Level, x: Elem) -> Option<u32> {
        if level.embed.is_empty() {
            Some(x.0)
        } else {
            level.unembed.get(&x.0).copied()
        }
    }

    pub fn p(&self) -> u32 {
        self.top().p()
    }

    pub fn t(&self) -> u32 {
        self.top().t()
    }

    pub fn top(&self) -> &Gf {
        &self.levels.last().unwrap().field
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, idx: usize) -> Result<&Level> {
        self.levels.get(idx).ok_or(Error::NoSuchLevel(idx))
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Level index holding the degree-`degree` subfield, if it is on the chain.
    pub fn level_of_degree(&self, degree: u32) -> Option<usize> {
        self.levels.iter().position(|l| l.degree == degree)
    }

    pub fn elem(&self, level: usize, packed: u32) -> Result<FieldElem> {
        let l = self.level(level)?;
        if packed >= l.field.size() {
            return Err(Error::BadParams(format!("{packed} is not an element of level {level}")));
        }
        Ok(FieldElem { level, packed })
    }

    /// Image of a level element in the top field.
    pub fn embed(&self, x: FieldElem) -> Result<Elem> {
        let l = self.level(x.level)?;
        if l.embed.is_empty() {
            return Ok(Elem(x.packed));
        }
        l.embed
            .get(x.packed as usize)
            .map(|&v| Elem(v))
            .ok_or_else(|| Error::BadParams(format!("{} is not in level {}", x.packed, x.level)))
    }

    /// Preimage of a top-field element at `level`, if it lies in that subfield.
    pub fn restrict(&self, x: Elem, level: usize) -> Result<Option<FieldElem>> {
        let l = self.level(level)?;
        Ok(Self::unembed_with(l, x).map(|packed| FieldElem { level, packed }))
    }

    /// Checked arithmetic on same-level operands.
    pub fn arith(&self, op: ArithOp, operands: &[FieldElem]) -> Result<FieldElem> {
        let level = operands.first().ok_or_else(|| Error::BadParams("no operands".into()))?.level;
        if let Some(o) = operands.iter().find(|o| o.level != level) {
            return Err(Error::LevelMismatch(level, o.level));
        }
        let f = &self.level(level)?.field;
        let e: Vec<Elem> = operands.iter().map(|o| Elem(o.packed)).collect();
        let need = |n: usize| {
            if e.len() == n {
                Ok(())
            } else {
                Err(Error::BadParams(format!("{op:?} takes {n} operand(s)")))
            }
        };
        let out = match op {
            ArithOp::Add => {
                need(2)?;
                f.add(e[0], e[1])
            }
            ArithOp::Sub => {
                need(2)?;
                f.sub(e[0], e[1])
            }
            ArithOp::Mul => {
                need(2)?;
                f.mul(e[0], e[1])
            }
            ArithOp::Div => {
                need(2)?;
                f.div(e[0], e[1])?
            }
            ArithOp::Inv => {
                need(1)?;
                f.inv(e[0])?
            }
            ArithOp::Pow(k) => {
                need(1)?;
                f.pow(e[0], k)
            }
        };
        Ok(FieldElem { level, packed: out.0 })
    }

    /// Trace between two levels, computed inside the top field.
    pub fn trace_between(&self, x: FieldElem, to_level: usize) -> Result<FieldElem> {
        let from = self.level(x.level)?.degree;
        let to = self.level(to_level)?.degree;
        let v = self.top().relative_trace(self.embed(x)?, from, to)?;
        Ok(self.restrict(v, to_level)?.expect("trace lands in the target subfield"))
    }
}
