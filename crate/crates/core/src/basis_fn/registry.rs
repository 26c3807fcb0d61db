//! Function tags used on the command line and in reports.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ETilde, ExpNeg, FAlpha, KRs, Recip1p, SharedFn, ZOver1pz};
use crate::error::{Error, Result};
use crate::io::parse_real_literal;
use crate::scalar::Real;

/// A buildable evaluator: `etilde:alpha`, `krs`, `falpha:alpha:alphaprime`,
/// or one of the synthetic tags `recip1p`, `expneg`, `zover1pz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FnSpec {
    ETilde(f64),
    Krs,
    FAlpha(f64, f64),
    Recip1p,
    ExpNeg,
    ZOver1pz,
}

impl FnSpec {
    pub fn build<T: Real>(&self) -> Result<SharedFn<T>> {
        Ok(match *self {
            FnSpec::ETilde(a) => Arc::new(ETilde::<T>::new(a)?),
            FnSpec::Krs => Arc::new(KRs::<T>::new()),
            FnSpec::FAlpha(a, ap) => Arc::new(FAlpha::<T>::new(a, ap)?),
            FnSpec::Recip1p => Arc::new(Recip1p),
            FnSpec::ExpNeg => Arc::new(ExpNeg),
            FnSpec::ZOver1pz => Arc::new(ZOver1pz),
        })
    }
}

impl FromStr for FnSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| parse_real_literal(t).ok_or_else(|| Error::parse("function tag", s));
        match parts.as_slice() {
            ["krs"] => Ok(FnSpec::Krs),
            ["recip1p"] => Ok(FnSpec::Recip1p),
            ["expneg"] => Ok(FnSpec::ExpNeg),
            ["zover1pz"] => Ok(FnSpec::ZOver1pz),
            ["etilde", a] => Ok(FnSpec::ETilde(num(a)?)),
            ["falpha", a, ap] => Ok(FnSpec::FAlpha(num(a)?, num(ap)?)),
            _ => Err(Error::parse("function tag", s)),
        }
    }
}

impl TryFrom<String> for FnSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FnSpec> for String {
    fn from(f: FnSpec) -> String {
        f.to_string()
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::ETilde(a) => write!(f, "etilde:{a}"),
            FnSpec::Krs => f.write_str("krs"),
            FnSpec::FAlpha(a, ap) => write!(f, "falpha:{a}:{ap}"),
            FnSpec::Recip1p => f.write_str("recip1p"),
            FnSpec::ExpNeg => f.write_str("expneg"),
            FnSpec::ZOver1pz => f.write_str("zover1pz"),
        }
    }
}
