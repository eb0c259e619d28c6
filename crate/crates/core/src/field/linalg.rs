//! Small dense linear algebra: over GF(p) on digit vectors, and over the
//! full field on packed elements.

use super::{Elem, Gf};
use crate::error::{Error, Result};

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Incremental row echelon form over GF(p).
#[derive(Debug, Clone)]
pub struct FpEchelon {
    p: u32,
    rows: Vec<(usize, Vec<u32>)>,
}

impl FpEchelon {
    pub fn new(p: u32) -> Self {
        FpEchelon { p, rows: Vec::new() }
    }

    fn reduce(&self, v: &mut [u32]) {
        let p = self.p;
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - c) * r) % p;
                }
            }
        }
    }

    /// Adds `v` to the row space. Returns false if it was already in it.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut v = v.to_vec();
        self.reduce(&mut v);
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv_mod(v[pivot], self.p);
        for x in v.iter_mut() {
            *x = (*x * s) % self.p;
        }
        // keep earlier rows reduced at the new pivot
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                for (x, &r) in row.iter_mut().zip(&v) {
                    *x = (*x + (self.p - c) * r) % self.p;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut v = v.to_vec();
        self.reduce(&mut v);
        v.iter().all(|&x| x == 0)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Coordinates of `target` in terms of `basis` over GF(p), or `None` when
/// `target` is outside their span. `basis` must be linearly independent.
pub fn fp_coordinates(p: u32, basis: &[Vec<u32>], target: &[u32]) -> Option<Vec<u32>> {
    let dim = target.len();
    let nb = basis.len();
    // augmented matrix: rows are coordinates of the ambient space
    let mut m: Vec<Vec<u32>> = (0..dim)
        .map(|r| {
            let mut row: Vec<u32> = basis.iter().map(|b| b[r] % p).collect();
            row.push(target[r] % p);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nb {
        let Some(sel) = (row..dim).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, sel);
        let s = inv_mod(m[row][col], p);
        for x in m[row].iter_mut() {
            *x = *x * s % p;
        }
        for r in 0..dim {
            if r != row && m[r][col] != 0 {
                let c = m[r][col];
                for k in 0..=nb {
                    m[r][k] = (m[r][k] + (p - c) * m[row][k]) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if (row..dim).any(|r| m[r][nb] != 0) {
        return None;
    }
    let mut out = vec![0u32; nb];
    for (r, &col) in pivots.iter().enumerate() {
        out[col] = m[r][nb];
    }
    Some(out)
}

/// Solves the square system `a · x = b` over the field.
pub fn solve_linear(gf: &Gf, mut a: Vec<Vec<Elem>>, mut b: Vec<Elem>) -> Result<Vec<Elem>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Singular("system is not square".into()));
    }
    for col in 0..n {
        let sel = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
        a.swap(col, sel);
        b.swap(col, sel);
        let s = gf.inv(a[col][col])?;
        for x in a[col].iter_mut() {
            *x = gf.mul(*x, s);
        }
        b[col] = gf.mul(b[col], s);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let c = a[r][col];
            for k in col..n {
                let v = gf.mul(c, a[col][k]);
                a[r][k] = gf.sub(a[r][k], v);
            }
            b[r] = gf.sub(b[r], gf.mul(c, b[col]));
        }
    }
    Ok(b)
}

/// Inverse of a square matrix over the field.
pub(crate) fn invert(gf: &Gf, a: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Elem> = (0..n).map(|i| if i == j { Elem::ONE } else { Elem::ZERO }).collect();
        cols.push(solve_linear(gf, a.to_vec(), e)?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}
