//! Closed-form bandwidth formulas, evaluated as exact rationals.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    /// Single rack with one coefficient repair of cost `b'`: `eps * b'`.
    Cor1 { eps: i64, bprime: i64 },
    /// Subspace bound `eps (nbar - 1)(t - sbar)`.
    Cor2 { eps: i64, nbar: i64, t: i64, sbar: i64 },
    /// MSR-style single rack `eps dbar t / (dbar - k' + 1)`.
    Cor3 { eps: i64, dbar: i64, t: i64, kp: i64 },
    /// Sum of per-column bandwidths.
    Thm2 { terms: Vec<i64> },
    /// Two racks with `eps1 <= eps2` failures:
    /// `2 eps1 dbar t / (dbar - k' + 2) + (eps2 - eps1) dbar t / (dbar - k' + 1)`.
    TwoRack { eps1: i64, eps2: i64, dbar: i64, t: i64, kp: i64 },
}

impl Formula {
    pub fn name(&self) -> &'static str {
        match self {
            Formula::Cor1 { .. } => "cor1",
            Formula::Cor2 { .. } => "cor2",
            Formula::Cor3 { .. } => "cor3",
            Formula::Thm2 { .. } => "thm2",
            Formula::TwoRack { .. } => "two_rack",
        }
    }

    /// Parameter names accepted for a formula, in display order.
    pub fn params(name: &str) -> Option<&'static [&'static str]> {
        Some(match name {
            "cor1" => &["eps", "bprime"],
            "cor2" => &["eps", "nbar", "t", "sbar"],
            "cor3" => &["eps", "dbar", "t", "kp"],
            "thm2" => &["terms"],
            "two_rack" => &["eps1", "eps2", "dbar", "t", "kp"],
            _ => return None,
        })
    }

    /// Builds a formula from named integer values (`terms` is a list).
    pub fn from_values(name: &str, get: impl Fn(&str) -> Option<Vec<i64>>) -> Result<Self> {
        let one = |k: &str| -> Result<i64> {
            match get(k).as_deref() {
                Some([v]) => Ok(*v),
                _ => Err(Error::BadParams(format!("{name} needs a single value for {k}"))),
            }
        };
        Ok(match name {
            "cor1" => Formula::Cor1 { eps: one("eps")?, bprime: one("bprime")? },
            "cor2" => Formula::Cor2 { eps: one("eps")?, nbar: one("nbar")?, t: one("t")?, sbar: one("sbar")? },
            "cor3" => Formula::Cor3 { eps: one("eps")?, dbar: one("dbar")?, t: one("t")?, kp: one("kp")? },
            "thm2" => Formula::Thm2 { terms: get("terms").ok_or_else(|| Error::BadParams("thm2 needs terms".into()))? },
            "two_rack" => Formula::TwoRack {
                eps1: one("eps1")?,
                eps2: one("eps2")?,
                dbar: one("dbar")?,
                t: one("t")?,
                kp: one("kp")?,
            },
            other => return Err(Error::BadParams(format!("unknown formula {other}"))),
        })
    }
}

fn frac(num: i64, den: i64) -> Result<Ratio<i64>> {
    if den == 0 {
        return Err(Error::BadParams("formula denominator is zero".into()));
    }
    Ok(Ratio::new(num, den))
}

pub fn predict(formula: &Formula) -> Result<Ratio<i64>> {
    match *formula {
        Formula::Cor1 { eps, bprime } => Ok(Ratio::from_integer(eps * bprime)),
        Formula::Cor2 { eps, nbar, t, sbar } => Ok(Ratio::from_integer(eps * (nbar - 1) * (t - sbar))),
        Formula::Cor3 { eps, dbar, t, kp } => frac(eps * dbar * t, dbar - kp + 1),
        Formula::Thm2 { ref terms } => Ok(Ratio::from_integer(terms.iter().sum())),
        Formula::TwoRack { eps1, eps2, dbar, t, kp } => {
            Ok(frac(2 * eps1 * dbar * t, dbar - kp + 2)? + frac((eps2 - eps1) * dbar * t, dbar - kp + 1)?)
        }
    }
}

/// `num` for integers, `num/den` otherwise.
pub struct Exact(pub Ratio<i64>);

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}
