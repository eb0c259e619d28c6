//! Univariate polynomials over the top field of a tower.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{solve_linear, Elem, Gf};

/// Coefficients low-to-high with no trailing zeros; the zero polynomial has
/// no coefficients and degree `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * x^d`.
    pub fn monomial(c: Elem, d: usize) -> Self {
        let mut v = vec![Elem::ZERO; d + 1];
        v[d] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the end.
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when `deg(self) < bound`; the zero polynomial passes every bound.
    pub fn degree_below(&self, bound: usize) -> bool {
        self.coeffs.len() <= bound
    }

    pub fn eval(&self, gf: &Gf, x: Elem) -> Elem {
        self.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| gf.add(gf.mul(acc, x), c))
    }

    pub fn add(&self, gf: &Gf, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| gf.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, gf: &Gf, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| gf.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, gf: &Gf, c: Elem) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| gf.mul(a, c)).collect())
    }

    pub fn mul(&self, gf: &Gf, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = gf.add(out[i + j], gf.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Quotient and remainder with `deg(remainder) < deg(divisor)`.
    pub fn divmod(&self, gf: &Gf, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivideByZeroPoly)?;
        let lead_inv = gf.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Elem::ZERO; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = gf.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c.is_zero() {
                continue;
            }
            for (k, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + k] = gf.sub(rem[i + k], gf.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, gf: &Gf, divisor: &Poly) -> Result<Poly> {
        Ok(self.divmod(gf, divisor)?.1)
    }

    /// Divides by `(x - root)`, returning the quotient and `self(root)`.
    pub fn div_linear(&self, gf: &Gf, root: Elem) -> (Poly, Elem) {
        if self.is_zero() {
            return (Poly::zero(), Elem::ZERO);
        }
        let n = self.coeffs.len();
        let mut quot = vec![Elem::ZERO; n - 1];
        let mut carry = Elem::ZERO;
        for i in (0..n).rev() {
            let v = gf.add(self.coeffs[i], gf.mul(carry, root));
            if i == 0 {
                return (Poly::from_coeffs(quot), v);
            }
            quot[i - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(gf: &Gf, roots: &[Elem]) -> Poly {
        let mut c = vec![Elem::ONE];
        for &r in roots {
            let mut next = vec![Elem::ZERO; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] = gf.add(next[i + 1], a);
                next[i] = gf.sub(next[i], gf.mul(a, r));
            }
            c = next;
        }
        Poly::from_coeffs(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The unique polynomial of degree below `points.len()` through every point.
pub fn lagrange(gf: &Gf, points: &[(Elem, Elem)]) -> Result<Poly> {
    let mut seen = HashSet::with_capacity(points.len());
    for &(x, _) in points {
        if !seen.insert(x) {
            return Err(Error::DuplicatePoint(x.0));
        }
    }
    let xs: Vec<Elem> = points.iter().map(|&(x, _)| x).collect();
    let master = Poly::from_roots(gf, &xs);
    let mut acc = vec![Elem::ZERO; points.len()];
    for &(xi, yi) in points {
        if yi.is_zero() {
            continue;
        }
        let (basis, _) = master.div_linear(gf, xi);
        let w = gf.div(yi, basis.eval(gf, xi))?;
        for (a, &c) in acc.iter_mut().zip(basis.coeffs()) {
            *a = gf.add(*a, gf.mul(w, c));
        }
    }
    Ok(Poly::from_coeffs(acc))
}

/// `f mod (h - y)`: agrees with `f` wherever `h` takes the value `y`.
pub fn residue_shifted(gf: &Gf, f: &Poly, h: &Poly, y: Elem) -> Result<Poly> {
    if h.degree().unwrap_or(0) == 0 {
        return Err(Error::BadParams("shift polynomial must have degree at least 1".into()));
    }
    f.rem(gf, &h.sub(gf, &Poly::constant(y)))
}

/// Splits `f` along powers of `h`: returns `[H_0, …, H_{u-1}]` with
/// `sum_j H_j(y) x^j = f mod (h - y)` for every `y`.
///
/// Repeated division gives `f = v_1 + h v_2 + … + h^(s-1) v_s` with
/// `deg v_i < u`, hence `H_j(y) = sum_i [x^j]v_i · y^(i-1)`.
pub fn coefficient_polys(gf: &Gf, f: &Poly, h: &Poly) -> Result<Vec<Poly>> {
    let u = match h.degree() {
        Some(u) if u >= 1 => u,
        _ => return Err(Error::BadParams("shift polynomial must have degree at least 1".into())),
    };
    let mut chain = Vec::new();
    let mut cur = f.clone();
    while !cur.is_zero() {
        let (q, r) = cur.divmod(gf, h)?;
        chain.push(r);
        cur = q;
    }
    Ok((0..u).map(|j| Poly::from_coeffs(chain.iter().map(|v| v.coeff(j)).collect())).collect())
}

/// Solves `sum_{j=j0}^{j0+w-1} e_j x_s^j = rhs_s` for the `w` unknowns `e_j`.
pub fn vandermonde_solve(gf: &Gf, xs: &[Elem], rhs: &[Elem], j0: usize) -> Result<Vec<Elem>> {
    if xs.len() != rhs.len() {
        return Err(Error::Singular("point and value counts differ".into()));
    }
    let mut seen = HashSet::new();
    for &x in xs {
        if !seen.insert(x) {
            return Err(Error::Singular(format!("duplicate point {}", x.0)));
        }
        if j0 > 0 && x.is_zero() {
            return Err(Error::Singular("zero point with a shifted window".into()));
        }
    }
    let w = xs.len();
    let matrix = xs.iter().map(|&x| (0..w).map(|j| gf.pow(x, (j0 + j) as u64)).collect()).collect();
    solve_linear(gf, matrix, rhs.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16() -> Gf {
        Gf::new(2, 4, &[1, 1, 0, 0, 1]).unwrap()
    }

    fn p(v: &[u32]) -> Poly {
        Poly::from_coeffs(v.iter().map(|&c| Elem(c)).collect())
    }

    #[test]
    fn degree_sentinel() {
        assert_eq!(Poly::zero().degree(), None);
        assert!(Poly::zero().degree() < Some(0));
        assert_eq!(p(&[3, 0, 0]).degree(), Some(0));
        assert!(Poly::zero().degree_below(0));
    }

    #[test]
    fn divmod_basics() {
        let gf = gf16();
        let f = p(&[3, 7, 1, 9]);
        assert_eq!(f.divmod(&gf, &f).unwrap(), (Poly::constant(Elem::ONE), Poly::zero()));
        let g = p(&[1, 1, 1, 1, 1, 1]);
        assert_eq!(f.divmod(&gf, &g).unwrap(), (Poly::zero(), f.clone()));
        assert_eq!(f.divmod(&gf, &Poly::zero()), Err(Error::DivideByZeroPoly));
        // x^4 mod (x^4 + x + 1) = x + 1
        let x4 = Poly::monomial(Elem::ONE, 4);
        assert_eq!(x4.rem(&gf, &p(&[1, 1, 0, 0, 1])).unwrap(), p(&[1, 1]));
    }

    #[test]
    fn lagrange_basics() {
        let gf = gf16();
        assert_eq!(lagrange(&gf, &[(Elem(5), Elem(9))]).unwrap(), Poly::constant(Elem(9)));
        let line = lagrange(&gf, &[(Elem(0), Elem(0)), (Elem(1), Elem(1))]).unwrap();
        assert_eq!(line, Poly::monomial(Elem::ONE, 1));
        assert_eq!(lagrange(&gf, &[(Elem(2), Elem(1)), (Elem(2), Elem(3))]), Err(Error::DuplicatePoint(2)));
    }

    #[test]
    fn residue_of_x4() {
        let gf = gf16();
        let h = p(&[0, 1, 0, 0, 1]);
        let f = Poly::monomial(Elem::ONE, 4);
        for y in gf.elements() {
            // x^4 = (x^4 + x - y) + (x + y)
            assert_eq!(residue_shifted(&gf, &f, &h, y).unwrap(), p(&[y.0, 1]));
        }
        let small = p(&[4, 5, 6]);
        assert_eq!(residue_shifted(&gf, &small, &h, Elem(7)).unwrap(), small);
    }

    #[test]
    fn chain_of_x4() {
        let gf = gf16();
        let h = p(&[0, 1, 0, 0, 1]);
        let hs = coefficient_polys(&gf, &Poly::monomial(Elem::ONE, 4), &h).unwrap();
        assert_eq!(hs.len(), 4);
        assert_eq!(hs[0], p(&[0, 1])); // H_0(y) = y
        assert_eq!(hs[1], Poly::constant(Elem::ONE));
        assert!(hs[2].is_zero() && hs[3].is_zero());
        let f = p(&[3, 1, 4]);
        let hs = coefficient_polys(&gf, &f, &h).unwrap();
        for (j, hj) in hs.iter().enumerate() {
            assert_eq!(*hj, Poly::constant(f.coeff(j)));
        }
    }

    #[test]
    fn vandermonde_cases() {
        let gf = gf16();
        let e = vandermonde_solve(&gf, &[Elem(6)], &[Elem(11)], 2).unwrap();
        assert_eq!(e, vec![gf.div(Elem(11), gf.pow(Elem(6), 2)).unwrap()]);
        assert!(matches!(vandermonde_solve(&gf, &[Elem(0)], &[Elem(1)], 1), Err(Error::Singular(_))));
        assert!(matches!(vandermonde_solve(&gf, &[Elem(3), Elem(3)], &[Elem(1), Elem(2)], 0), Err(Error::Singular(_))));
        // a single survivor at 0 with j0 = 0 returns the value itself
        assert_eq!(vandermonde_solve(&gf, &[Elem(0)], &[Elem(13)], 0).unwrap(), vec![Elem(13)]);
    }

    #[test]
    fn display_packed() {
        assert_eq!(p(&[1, 0, 7]).to_string(), "1,0,7");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
