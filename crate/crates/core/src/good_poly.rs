//! Good polynomials: degree-`u` polynomials that are constant on each block
//! of an equal-size partition of the evaluation set.
//!
//! Three families are supported:
//! - power: `h(x) = x^m`, constant on multiplicative cosets of the order-`m`
//!   subgroup;
//! - additive: `h(x) = sum_i theta_i x^(q^i)`, constant on additive cosets of
//!   its kernel;
//! - composite: `h(x) = (sum_i theta_i x^(q^(e i)))^m`.
//!
//! Whatever the family, the partition is found by evaluating `h` on every
//! candidate point and grouping by value; nothing about constancy is taken
//! on faith. Classes are ordered by their packed constant `y`, and points
//! within a class by packed value.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Gf};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Power {
        m: u64,
    },
    Additive {
        theta: Vec<Elem>,
    },
    Composite {
        theta: Vec<Elem>,
        m: u64,
        e: u32,
    },
    /// An arbitrary polynomial supplied by the caller.
    Explicit,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Power { .. } => "power",
            Family::Additive { .. } => "additive",
            Family::Composite { .. } => "composite",
            Family::Explicit => "explicit",
        }
    }
}

/// One rack: its evaluation points and the constant value of `h` on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RackClass {
    pub y: Elem,
    pub points: Vec<Elem>,
}

#[derive(Clone, Debug)]
pub struct GoodPolynomial {
    family: Family,
    h: Poly,
    u: usize,
    classes: Vec<RackClass>,
}

impl fmt::Display for GoodPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} h=[{}] u={} nbar={}", self.family.tag(), self.h, self.u, self.classes.len())
    }
}

// sum_i theta_i x^(p^(step*i)) as a polynomial
fn linearized_poly(gf: &Gf, theta: &[Elem], step: u32) -> Poly {
    let p = gf.p() as usize;
    let mut out = Poly::zero();
    for (i, &c) in theta.iter().enumerate() {
        out = out.add(gf, &Poly::monomial(c, p.pow(step * i as u32)));
    }
    out
}

fn linearized_eval(gf: &Gf, theta: &[Elem], step: u32, x: Elem) -> Elem {
    let mut acc = Elem::ZERO;
    let mut cur = x;
    for &c in theta {
        acc = gf.add(acc, gf.mul(c, cur));
        cur = gf.frobenius(cur, step);
    }
    acc
}

fn poly_pow(gf: &Gf, base: &Poly, mut e: u64) -> Poly {
    let mut acc = Poly::constant(Elem::ONE);
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(gf, &b);
        }
        b = b.mul(gf, &b);
        e >>= 1;
    }
    acc
}

fn check_theta(theta: &[Elem]) -> Result<()> {
    match (theta.first(), theta.last()) {
        (Some(a), Some(b)) if !a.is_zero() && !b.is_zero() => Ok(()),
        _ => Err(Error::BadParams("theta needs nonzero first and last coefficients".into())),
    }
}

/// Groups `domain` into fibers of `eval` and keeps only fibers of exactly
/// `u` points, ordered by constant.
pub fn complete_classes(
    domain: impl IntoIterator<Item = Elem>,
    u: usize,
    eval: impl Fn(Elem) -> Elem,
) -> Vec<RackClass> {
    let mut fibers: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
    for a in domain {
        fibers.entry(eval(a)).or_default().push(a);
    }
    fibers
        .into_iter()
        .filter(|(_, pts)| pts.len() == u)
        .map(|(y, mut points)| {
            points.sort_unstable();
            RackClass { y, points }
        })
        .collect()
}

/// Partitions the point set `a` into fibers of `h`, each of size `deg(h)`.
pub fn build_partition(gf: &Gf, h: &Poly, a: &[Elem]) -> Result<Vec<RackClass>> {
    let u =
        h.degree().filter(|&d| d >= 1).ok_or_else(|| Error::NotGoodOnSet("h must have degree at least 1".into()))?;
    if a.len() % u != 0 {
        return Err(Error::NotGoodOnSet(format!("{} points do not split into groups of {u}", a.len())));
    }
    let mut seen = HashSet::new();
    if let Some(d) = a.iter().find(|x| !seen.insert(**x)) {
        return Err(Error::DuplicatePoint(d.0));
    }
    let classes = complete_classes(a.iter().copied(), u, |x| h.eval(gf, x));
    if classes.len() * u != a.len() {
        return Err(Error::NotGoodOnSet(format!("some fibers of h on the set differ from size {u}")));
    }
    Ok(classes)
}

fn take_classes(mut classes: Vec<RackClass>, nbar: Option<usize>) -> Result<Vec<RackClass>> {
    if let Some(want) = nbar {
        if want == 0 || classes.len() < want {
            return Err(Error::InsufficientClasses { requested: want, available: classes.len() });
        }
        classes.truncate(want);
    }
    if classes.is_empty() {
        return Err(Error::InsufficientClasses { requested: 1, available: 0 });
    }
    Ok(classes)
}

impl GoodPolynomial {
    /// `h = x^m` on multiplicative cosets of the order-`m` subgroup.
    pub fn power(gf: &Gf, m: u64, nbar: Option<usize>) -> Result<Self> {
        if m == 0 || gf.order() % m != 0 {
            return Err(Error::OrderNotDividing { m, order: gf.order() });
        }
        let classes = complete_classes(gf.elements().skip(1), m as usize, |x| gf.pow(x, m));
        let gp = GoodPolynomial {
            family: Family::Power { m },
            h: Poly::monomial(Elem::ONE, m as usize),
            u: m as usize,
            classes: take_classes(classes, nbar)?,
        };
        gp.validate(gf)?;
        Ok(gp)
    }

    /// `h = sum_{i=0}^{a} theta_i x^(p^i)` on cosets of its kernel.
    pub fn additive(gf: &Gf, theta: Vec<Elem>, nbar: Option<usize>) -> Result<Self> {
        check_theta(&theta)?;
        let a = theta.len() as u32 - 1;
        if a > gf.t() {
            return Err(Error::BadParams(format!("kernel dimension {a} exceeds t")));
        }
        let u = gf.p().pow(a) as usize;
        let kernel = gf.elements().filter(|&x| linearized_eval(gf, &theta, 1, x).is_zero()).count();
        if kernel != u {
            return Err(Error::WrongKernelSize { found: kernel, expected: u });
        }
        let classes = complete_classes(gf.elements(), u, |x| linearized_eval(gf, &theta, 1, x));
        let gp = GoodPolynomial {
            h: linearized_poly(gf, &theta, 1),
            family: Family::Additive { theta },
            u,
            classes: take_classes(classes, nbar)?,
        };
        gp.validate(gf)?;
        Ok(gp)
    }

    /// `h = (sum_{i=0}^{a/e} theta_i x^(p^(e i)))^m`.
    pub fn composite(gf: &Gf, theta: Vec<Elem>, m: u64, e: u32, nbar: Option<usize>) -> Result<Self> {
        if e == 0 || gf.t() % e != 0 {
            return Err(Error::BadSubfield { delta: e, t: gf.t() });
        }
        let sub_order = (gf.p() as u64).pow(e) - 1;
        if m == 0 || sub_order % m != 0 {
            return Err(Error::OrderNotDividing { m, order: sub_order });
        }
        if theta.iter().fold(Elem::ZERO, |acc, &c| gf.add(acc, c)) != Elem::ZERO {
            return Err(Error::CoeffSumNonzero);
        }
        check_theta(&theta)?;
        let a = e * (theta.len() as u32 - 1);
        if a > gf.t() {
            return Err(Error::BadParams(format!("kernel dimension {a} exceeds t")));
        }
        let inner = |x| linearized_eval(gf, &theta, e, x);
        let kernel: Vec<Elem> = gf.elements().filter(|&x| inner(x).is_zero()).collect();
        let expected = gf.p().pow(a) as usize;
        if kernel.len() != expected {
            return Err(Error::WrongKernelSize { found: kernel.len(), expected });
        }
        let scalars = gf.subfield_elements(e)?;
        let closed = kernel.iter().all(|&v| scalars.iter().all(|&c| kernel.binary_search(&gf.mul(c, v)).is_ok()));
        if !closed {
            return Err(Error::ClosureFailure(e));
        }
        let u = m as usize * expected;
        let classes = complete_classes(gf.elements(), u, |x| gf.pow(inner(x), m));
        let gp = GoodPolynomial {
            h: poly_pow(gf, &linearized_poly(gf, &theta, e), m),
            family: Family::Composite { theta, m, e },
            u,
            classes: take_classes(classes, nbar)?,
        };
        gp.validate(gf)?;
        Ok(gp)
    }

    /// Any `h` that is good on the point set `a`.
    pub fn explicit(gf: &Gf, h: Poly, a: &[Elem]) -> Result<Self> {
        let classes = build_partition(gf, &h, a)?;
        let gp = GoodPolynomial { u: h.degree().unwrap_or(0), h, family: Family::Explicit, classes };
        gp.validate(gf)?;
        Ok(gp)
    }

    /// Exhaustive check: `h` is constant `y_i` on class `i`, constants are
    /// distinct, classes are disjoint and all of size `deg(h)`.
    pub fn validate(&self, gf: &Gf) -> Result<()> {
        if self.h.degree() != Some(self.u) {
            return Err(Error::NotGoodOnSet(format!("deg h differs from class size {}", self.u)));
        }
        let mut ys = HashSet::new();
        let mut pts = HashSet::new();
        for c in &self.classes {
            if c.points.len() != self.u {
                return Err(Error::NotGoodOnSet(format!("class of size {}", c.points.len())));
            }
            if !ys.insert(c.y) {
                return Err(Error::DuplicateConstants(c.y.0));
            }
            for &a in &c.points {
                if !pts.insert(a) {
                    return Err(Error::NotGoodOnSet(format!("point {} in two classes", a.0)));
                }
                if self.eval(gf, a) != c.y {
                    return Err(Error::NotGoodOnSet(format!("h is not constant at {}", a.0)));
                }
            }
        }
        Ok(())
    }

    /// `h(x)`, through the family's structure where there is one.
    pub fn eval(&self, gf: &Gf, x: Elem) -> Elem {
        match &self.family {
            Family::Power { m } => gf.pow(x, *m),
            Family::Additive { theta } => linearized_eval(gf, theta, 1, x),
            Family::Composite { theta, m, e } => gf.pow(linearized_eval(gf, theta, *e, x), *m),
            Family::Explicit => self.h.eval(gf, x),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn nbar(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[RackClass] {
        &self.classes
    }

    pub fn constants(&self) -> Vec<Elem> {
        self.classes.iter().map(|c| c.y).collect()
    }

    /// Evaluation points in rack order.
    pub fn points(&self) -> Vec<Elem> {
        self.classes.iter().flat_map(|c| c.points.iter().copied()).collect()
    }
}
