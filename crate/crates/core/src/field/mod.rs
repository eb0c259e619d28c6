//! Exact arithmetic in GF(p^t).
//!
//! Elements are packed canonically as base-`p` integers: the coefficient of
//! `x^i` in the polynomial representation is the `i`-th base-`p` digit, so the
//! lowest-degree coefficient is the least significant digit. Every field in
//! this crate (including subfields reached through [`FieldTower`]) uses this
//! packing for I/O.
//!
//! Fields with at most 2^16 elements multiply through log/antilog tables;
//! larger fields fall back to schoolbook multiplication with reduction by the
//! modulus.

mod basis;
mod linalg;
pub mod moduli;
mod tower;

use std::fmt;

use crate::error::{Error, Result};

pub use basis::{dual_basis, expand, linearized_eval, rank_over_subfield, reassemble, span_basis, SubspaceDesc};
pub use linalg::{fp_coordinates, solve_linear, FpEchelon};
pub use tower::{ArithOp, FieldElem, FieldTower, Level};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;
const TABLE_LIMIT: u32 = 1 << 16;

/// A field element in packed form. Only meaningful together with the [`Gf`]
/// it was produced by.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn packed(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone)]
struct LogTables {
    // exp has 2*order entries so that exp[log a + log b] needs no reduction
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The finite field GF(p^t) defined by an irreducible monic modulus over GF(p).
#[derive(Clone)]
pub struct Gf {
    p: u32,
    t: u32,
    size: u32,
    modulus: Vec<u32>,
    place: Vec<u32>,
    generator: Elem,
    tables: Option<LogTables>,
    abs_trace: Option<Vec<u8>>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gf")
            .field("p", &self.p)
            .field("t", &self.t)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Remainder of `a` divided by monic `m` over GF(p); coefficient vectors low-to-high.
fn fp_poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = r.pop().unwrap();
        if c != 0 {
            let shift = r.len() - dm;
            for i in 0..dm {
                r[shift + i] = (r[shift + i] + (p - c) * m[i]) % p;
            }
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let t = modulus.len() - 1;
    for d in 1..=t / 2 {
        let count = (p as u64).pow(d as u32);
        for v in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut x = v;
            for _ in 0..d {
                divisor.push((x % p as u64) as u32);
                x /= p as u64;
            }
            divisor.push(1);
            if fp_poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Gf {
    /// Builds GF(p^t) from an explicit monic modulus of degree `t`.
    pub fn new(p: u32, t: u32, modulus: &[u32]) -> Result<Gf> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if t == 0 {
            return Err(Error::BadModulus("degree must be at least 1".into()));
        }
        if (p as u64).checked_pow(t).map_or(true, |s| s > MAX_FIELD_SIZE) {
            return Err(Error::FieldTooLarge { p, t });
        }
        if modulus.len() != t as usize + 1 {
            return Err(Error::BadModulus(format!("expected {} coefficients, got {}", t + 1, modulus.len())));
        }
        if modulus[t as usize] != 1 {
            return Err(Error::BadModulus("modulus must be monic".into()));
        }
        if let Some(c) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::BadModulus(format!("coefficient {c} is not below {p}")));
        }
        if !is_irreducible(modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        let size = p.pow(t);
        let place = (0..=t).map(|i| p.pow(i)).collect::<Vec<_>>();
        let mut gf =
            Gf { p, t, size, modulus: modulus.to_vec(), place, generator: Elem::ONE, tables: None, abs_trace: None };
        gf.generator = gf.find_generator();
        if size <= TABLE_LIMIT {
            gf.build_tables();
        }
        Ok(gf)
    }

    /// Builds GF(p^t) from the fixed modulus table.
    pub fn standard(p: u32, t: u32) -> Result<Gf> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let m = moduli::lookup(p, t).ok_or(Error::NoTabulatedModulus { p, t })?;
        Gf::new(p, t, m)
    }

    fn find_generator(&self) -> Elem {
        let order = self.order();
        let factors = prime_factors(order);
        let full = |g: Elem| factors.iter().all(|&r| self.pow_slow(g, order / r) != Elem::ONE);
        let x = self.indeterminate();
        if !x.is_zero() && full(x) {
            return x;
        }
        (1..self.size).map(Elem).find(|&g| full(g)).expect("a finite field has a primitive element")
    }

    fn build_tables(&mut self) {
        let order = self.order() as usize;
        let mut exp = vec![0u32; 2 * order.max(1)];
        let mut log = vec![0u32; self.size as usize];
        let mut cur = Elem::ONE;
        for i in 0..order {
            exp[i] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_slow(cur, self.generator);
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        self.tables = Some(LogTables { exp, log });
        let traces = (0..self.size).map(|v| self.trace_slow(Elem(v), 1).0 as u8).collect();
        self.abs_trace = Some(traces);
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Extension degree over the prime field.
    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Order of the multiplicative group.
    pub fn order(&self) -> u64 {
        self.size as u64 - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The distinguished primitive element.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// The class of `x` in GF(p)[x]/(modulus).
    pub fn indeterminate(&self) -> Elem {
        if self.t >= 2 {
            Elem(self.p)
        } else {
            Elem((self.p - self.modulus[0]) % self.p)
        }
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.size
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size).map(Elem)
    }

    /// The prime-field element `c mod p`.
    pub fn scalar(&self, c: u64) -> Elem {
        Elem((c % self.p as u64) as u32)
    }

    pub fn digits(&self, x: Elem) -> Vec<u32> {
        let mut v = x.0;
        (0..self.t)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        Elem(digits.iter().zip(&self.place).map(|(&d, &pl)| (d % self.p) * pl).sum())
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut a, mut b) = (a.0, b.0);
        let mut r = 0;
        let mut place = 1;
        while a != 0 || b != 0 {
            r += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        Elem(r)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let mut a = a.0;
        let mut r = 0;
        let mut place = 1;
        while a != 0 {
            r += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        Elem(r)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        match &self.tables {
            Some(tb) => Elem(tb.exp[(tb.log[a.0 as usize] + tb.log[b.0 as usize]) as usize]),
            None => self.mul_slow(a, b),
        }
    }

    /// Multiplies by a prime-field scalar.
    pub fn scale(&self, c: u32, a: Elem) -> Elem {
        self.mul(self.scalar(c as u64), a)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let t = self.t as usize;
        if self.p == 2 {
            let mut prod: u64 = 0;
            let (a, mut b) = (a.0 as u64, b.0 as u64);
            let mut shift = 0;
            while b != 0 {
                if b & 1 == 1 {
                    prod ^= a << shift;
                }
                b >>= 1;
                shift += 1;
            }
            let mbits: u64 = self.modulus.iter().enumerate().map(|(i, &c)| (c as u64) << i).sum();
            for d in (t..64).rev() {
                if prod >> d & 1 == 1 {
                    prod ^= mbits << (d - t);
                }
            }
            return Elem(prod as u32);
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let p = self.p;
        let mut prod = vec![0u32; 2 * t];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let r = fp_poly_rem(&prod, &self.modulus, p);
        self.from_digits(&r)
    }

    fn pow_slow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let order = self.order();
        match &self.tables {
            Some(tb) => {
                let l = tb.log[a.0 as usize] as u128 * e as u128 % order as u128;
                Elem(tb.exp[l as usize])
            }
            None => self.pow_slow(a, e % order),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivideByZero);
        }
        Ok(match &self.tables {
            Some(tb) => {
                let order = self.order() as u32;
                Elem(tb.exp[((order - tb.log[a.0 as usize]) % order) as usize])
            }
            None => self.pow_slow(a, self.order() - 1),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `g^i` for the distinguished generator `g`.
    pub fn exp(&self, i: u64) -> Elem {
        self.pow(self.generator, i)
    }

    /// Discrete log to the distinguished generator, when tables exist.
    pub fn log(&self, a: Elem) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        self.tables.as_ref().map(|tb| tb.log[a.0 as usize] as u64)
    }

    /// `x^(p^k)`.
    pub fn frobenius(&self, x: Elem, k: u32) -> Elem {
        if x.is_zero() {
            return x;
        }
        let order = self.order();
        let mut e = 1u64;
        for _ in 0..k {
            e = e * self.p as u64 % order.max(1);
        }
        if e == 0 {
            e = order;
        }
        self.pow(x, e)
    }

    fn check_subfield(&self, delta: u32) -> Result<()> {
        if delta == 0 || self.t % delta != 0 {
            return Err(Error::BadSubfield { delta, t: self.t });
        }
        Ok(())
    }

    fn trace_slow(&self, x: Elem, delta: u32) -> Elem {
        let mut acc = Elem::ZERO;
        let mut cur = x;
        for _ in 0..self.t / delta {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur, delta);
        }
        acc
    }

    /// Trace from GF(p^t) down to its degree-`delta` subfield:
    /// the sum of `x^(p^(delta*i))` for `i < t/delta`.
    pub fn trace_to(&self, x: Elem, delta: u32) -> Result<Elem> {
        self.check_subfield(delta)?;
        if delta == 1 {
            return Ok(Elem(self.trace(x)));
        }
        Ok(self.trace_slow(x, delta))
    }

    /// Absolute trace onto GF(p), returned as a digit in `[0, p)`.
    #[inline]
    pub fn trace(&self, x: Elem) -> u32 {
        match &self.abs_trace {
            Some(tab) => tab[x.0 as usize] as u32,
            None => self.trace_slow(x, 1).0,
        }
    }

    /// Relative trace between two subfields, `Tr_{GF(p^upper)/GF(p^lower)}`,
    /// evaluated on an element of the degree-`upper` subfield.
    pub fn relative_trace(&self, x: Elem, upper: u32, lower: u32) -> Result<Elem> {
        self.check_subfield(upper)?;
        if lower == 0 || upper % lower != 0 {
            return Err(Error::BadSubfield { delta: lower, t: upper });
        }
        let mut acc = Elem::ZERO;
        let mut cur = x;
        for _ in 0..upper / lower {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur, lower);
        }
        Ok(acc)
    }

    pub fn in_subfield(&self, x: Elem, delta: u32) -> Result<bool> {
        self.check_subfield(delta)?;
        Ok(self.frobenius(x, delta) == x)
    }

    /// Primitive element of the degree-`delta` subfield:
    /// `g^((p^t - 1)/(p^delta - 1))`.
    pub fn subfield_generator(&self, delta: u32) -> Result<Elem> {
        self.check_subfield(delta)?;
        let sub_order = (self.p as u64).pow(delta) - 1;
        Ok(self.exp(self.order() / sub_order))
    }

    /// Elements of the degree-`delta` subfield in packed order.
    pub fn subfield_elements(&self, delta: u32) -> Result<Vec<Elem>> {
        let g = self.subfield_generator(delta)?;
        let sub_order = (self.p as u64).pow(delta) - 1;
        let mut out = vec![Elem::ZERO];
        let mut cur = Elem::ONE;
        for _ in 0..sub_order {
            out.push(cur);
            cur = self.mul(cur, g);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Multiplicative order of a nonzero element.
    pub fn elem_order(&self, x: Elem) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::DivideByZero);
        }
        let mut ord = self.order();
        for r in prime_factors(ord) {
            while ord % r == 0 && self.pow(x, ord / r) == Elem::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Packed value followed by the generator power, e.g. `6 (γ^5)`.
    pub fn show(&self, x: Elem) -> String {
        match self.log(x) {
            Some(l) => format!("{} (γ^{})", x.0, l),
            None => format!("{}", x.0),
        }
    }

    /// Compact generator-power notation: `0`, `1`, `γ`, `γ^5`.
    pub fn show_power(&self, x: Elem) -> String {
        match self.log(x) {
            None if x.is_zero() => "0".into(),
            None => x.0.to_string(),
            Some(0) => "1".into(),
            Some(1) => "γ".into(),
            Some(l) => format!("γ^{l}"),
        }
    }
}
