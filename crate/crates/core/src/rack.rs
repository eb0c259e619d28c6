//! Rack layout of an RS codeword, per-rack residue polynomials and the
//! column words they induce.
//!
//! Row `i` of the array holds the symbols of rack `i`, i.e. `f` evaluated on
//! the `i`-th class of the good polynomial. The residue `f_i = f mod (h - y_i)`
//! is the interpolant of that row, and the `j`-th coefficients of all
//! residues form a codeword of a short RS code at the points `y_i`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Gf};
use crate::good_poly::GoodPolynomial;
use crate::poly::{lagrange, vandermonde_solve, Poly};
use crate::rs::{encode, CodeParams, RackShape};

/// Code parameters whose point order is the rack order of `gp`.
pub fn rack_params(gf: &Gf, gp: &GoodPolynomial, k: usize) -> Result<CodeParams> {
    CodeParams::new(gf, k, gp.points())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RackArray {
    pub k: usize,
    pub shape: RackShape,
    /// `y_i` for every rack.
    pub ys: Vec<Elem>,
    pub points: Vec<Vec<Elem>>,
    pub symbols: Vec<Vec<Elem>>,
}

impl fmt::Display for RackArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pts, syms) in self.points.iter().zip(&self.symbols) {
            let row: Vec<String> = pts.iter().zip(syms).map(|(a, s)| format!("{}:{}", a.0, s.0)).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl RackArray {
    pub fn nbar(&self) -> usize {
        self.points.len()
    }

    pub fn u(&self) -> usize {
        self.shape.u
    }

    /// Symbols in rack order, matching [`rack_params`].
    pub fn flatten(&self) -> Vec<Elem> {
        self.symbols.iter().flatten().copied().collect()
    }
}

/// Encodes `f` and arranges the codeword by racks.
pub fn layout(gf: &Gf, f: &Poly, gp: &GoodPolynomial, params: &CodeParams) -> Result<RackArray> {
    if params.points != gp.points() {
        return Err(Error::BadParams("code points are not in the partition's rack order".into()));
    }
    let shape = params.rack_shape(gp.u())?;
    let word = encode(gf, f, params)?;
    let u = gp.u();
    Ok(RackArray {
        k: params.k,
        shape,
        ys: gp.constants(),
        points: gp.classes().iter().map(|c| c.points.clone()).collect(),
        symbols: word.symbols.chunks(u).map(<[Elem]>::to_vec).collect(),
    })
}

/// Coefficients of the interpolant of one rack's row.
pub fn row_coefficients(gf: &Gf, points: &[Elem], symbols: &[Elem]) -> Result<Vec<Elem>> {
    vandermonde_solve(gf, points, symbols, 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSet {
    pub polys: Vec<Poly>,
    /// `coeffs[i][j] = e_{i,j}`, padded to `u` entries.
    pub coeffs: Vec<Vec<Elem>>,
    pub ys: Vec<Elem>,
    pub s: usize,
}

pub fn rack_residues(gf: &Gf, arr: &RackArray) -> Result<ResidueSet> {
    let mut polys = Vec::with_capacity(arr.nbar());
    let mut coeffs = Vec::with_capacity(arr.nbar());
    for (pts, syms) in arr.points.iter().zip(&arr.symbols) {
        let pairs: Vec<(Elem, Elem)> = pts.iter().copied().zip(syms.iter().copied()).collect();
        let fi = lagrange(gf, &pairs)?;
        let mut row = fi.coeffs().to_vec();
        row.resize(arr.u(), Elem::ZERO);
        polys.push(fi);
        coeffs.push(row);
    }
    Ok(ResidueSet { polys, coeffs, ys: arr.ys.clone(), s: arr.shape.s })
}

/// Column `j` of the residue coefficients, a word of RS(nbar, s) at the `y_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnWord {
    pub j: usize,
    pub values: Vec<Elem>,
    pub ys: Vec<Elem>,
    pub s: usize,
}

impl ColumnWord {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The interpolant of `(y_i, e_{i,j})` has degree below `s`.
    pub fn is_codeword(&self, gf: &Gf) -> Result<bool> {
        let pairs: Vec<(Elem, Elem)> = self.ys.iter().copied().zip(self.values.iter().copied()).collect();
        Ok(lagrange(gf, &pairs)?.degree_below(self.s))
    }
}

pub fn column(rs: &ResidueSet, j: usize) -> Result<ColumnWord> {
    if rs.coeffs.first().is_some_and(|row| j >= row.len()) {
        return Err(Error::BadParams(format!("column {j} out of range")));
    }
    Ok(ColumnWord { j, values: rs.coeffs.iter().map(|row| row[j]).collect(), ys: rs.ys.clone(), s: rs.s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{coefficient_polys, residue_shifted};

    fn gf16_setup() -> (Gf, GoodPolynomial, CodeParams) {
        let gf = Gf::new(2, 4, &[1, 1, 0, 0, 1]).unwrap();
        let gp = GoodPolynomial::additive(&gf, vec![Elem(1), Elem(0), Elem(1)], None).unwrap();
        let params = rack_params(&gf, &gp, 7).unwrap();
        (gf, gp, params)
    }

    fn sample_f() -> Poly {
        Poly::from_coeffs([3, 14, 0, 9, 1, 7, 12].iter().map(|&c| Elem(c)).collect())
    }

    #[test]
    fn gf16_array_points() {
        let (gf, gp, params) = gf16_setup();
        let arr = layout(&gf, &sample_f(), &gp, &params).unwrap();
        let g = |i| gf.exp(i);
        let mut want = vec![
            vec![Elem(0), Elem(1), g(5), g(10)],
            vec![g(1), g(2), g(4), g(8)],
            vec![g(6), g(7), g(9), g(13)],
            vec![g(3), g(11), g(12), g(14)],
        ];
        for row in &mut want {
            row.sort();
        }
        assert_eq!(arr.points, want);
        assert_eq!(arr.flatten(), encode(&gf, &sample_f(), &params).unwrap().symbols);
    }

    #[test]
    fn constant_message() {
        let (gf, gp, params) = gf16_setup();
        let arr = layout(&gf, &Poly::constant(Elem(6)), &gp, &params).unwrap();
        assert!(arr.flatten().iter().all(|&s| s == Elem(6)));
        let rs = rack_residues(&gf, &arr).unwrap();
        assert!(column(&rs, 0).unwrap().values.iter().all(|&v| v == Elem(6)));
        for j in 1..4 {
            assert!(column(&rs, j).unwrap().values.iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn residues_match_coefficient_polys() {
        let (gf, gp, params) = gf16_setup();
        let f = sample_f();
        let arr = layout(&gf, &f, &gp, &params).unwrap();
        let rs = rack_residues(&gf, &arr).unwrap();
        let hs = coefficient_polys(&gf, &f, gp.h()).unwrap();
        for (i, &y) in arr.ys.iter().enumerate() {
            assert_eq!(rs.polys[i], residue_shifted(&gf, &f, gp.h(), y).unwrap());
            for j in 0..4 {
                assert_eq!(rs.coeffs[i][j], hs[j].eval(&gf, y));
            }
            let direct = row_coefficients(&gf, &arr.points[i], &arr.symbols[i]).unwrap();
            assert_eq!(direct, rs.coeffs[i]);
        }
        let col = column(&rs, 3).unwrap();
        assert_eq!(col.ys, gf.subfield_elements(2).unwrap());
        assert!(col.is_codeword(&gf).unwrap());
    }

    #[test]
    fn small_k_residue_is_f() {
        let (gf, gp, _) = gf16_setup();
        let params = rack_params(&gf, &gp, 3).unwrap();
        let f = Poly::from_coeffs(vec![Elem(2), Elem(0), Elem(5)]);
        let rs = rack_residues(&gf, &layout(&gf, &f, &gp, &params).unwrap()).unwrap();
        assert!(rs.polys.iter().all(|p| *p == f));
    }

    #[test]
    fn corrupted_row_breaks_fidelity() {
        let (gf, gp, params) = gf16_setup();
        let f = sample_f();
        let mut arr = layout(&gf, &f, &gp, &params).unwrap();
        arr.symbols[2][1] = gf.add(arr.symbols[2][1], Elem::ONE);
        let rs = rack_residues(&gf, &arr).unwrap();
        let row = &arr.points[2];
        assert!(row.iter().any(|&a| rs.polys[2].eval(&gf, a) != f.eval(&gf, a)));
    }

    #[test]
    fn dump_format() {
        let (gf, gp, params) = gf16_setup();
        let arr = layout(&gf, &Poly::constant(Elem(1)), &gp, &params).unwrap();
        let dump = arr.to_string();
        assert_eq!(dump.lines().count(), 4);
        assert!(dump.starts_with("0:1 1:1 "));
    }
}
