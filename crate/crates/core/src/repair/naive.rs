//! Baseline repair: download `s` whole symbols and interpolate.

use crate::error::{Error, Result};
use crate::field::{Elem, Gf};
use crate::poly::lagrange;
use crate::rack::ColumnWord;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveScheme {
    pub targets: Vec<usize>,
    /// The `s` helpers actually contacted.
    pub helpers: Vec<usize>,
}

impl NaiveScheme {
    pub fn new(n: usize, s: usize, targets: &[usize], d: &[usize]) -> Result<Self> {
        if d.len() < s {
            return Err(Error::InsufficientHelpers(format!("{} helpers for dimension {s}", d.len())));
        }
        if let Some(t) = targets.iter().find(|t| d.contains(t)) {
            return Err(Error::InvalidFailure(format!("position {t} is both target and helper")));
        }
        if targets.iter().chain(d).any(|&i| i >= n) {
            return Err(Error::InvalidFailure("position out of range".into()));
        }
        Ok(NaiveScheme { targets: targets.to_vec(), helpers: d[..s].to_vec() })
    }

    /// `helper_values[i]` is the symbol of `helpers[i]`.
    pub fn recover(&self, gf: &Gf, ys: &[Elem], helper_values: &[Elem]) -> Result<Vec<Elem>> {
        let pairs: Vec<(Elem, Elem)> = self.helpers.iter().map(|&h| ys[h]).zip(helper_values.iter().copied()).collect();
        let f = lagrange(gf, &pairs)?;
        Ok(self.targets.iter().map(|&i| f.eval(gf, ys[i])).collect())
    }

    pub fn predicted(&self, t: u32) -> usize {
        self.helpers.len() * t as usize
    }
}

/// Recovers `targets` of `word` from the first `s` entries of `d`. Returns
/// the symbols and the download in sub-symbols.
pub fn naive_repair(gf: &Gf, word: &ColumnWord, targets: &[usize], d: &[usize]) -> Result<(Vec<Elem>, usize)> {
    let scheme = NaiveScheme::new(word.len(), word.s, targets, d)?;
    let vals: Vec<Elem> = scheme.helpers.iter().map(|&h| word.values[h]).collect();
    let out = scheme.recover(gf, &word.ys, &vals)?;
    Ok((out, scheme.predicted(gf.t())))
}
