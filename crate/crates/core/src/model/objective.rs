use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    GoodWindow,
    DirFixWmp,
    DirBndWmp,
    FixWmp,
    BndWmp,
    MeanInf,
    MeanSup,
    TotalInf,
    TotalSup,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 9] = [
        ObjectiveKind::GoodWindow,
        ObjectiveKind::DirFixWmp,
        ObjectiveKind::DirBndWmp,
        ObjectiveKind::FixWmp,
        ObjectiveKind::BndWmp,
        ObjectiveKind::MeanInf,
        ObjectiveKind::MeanSup,
        ObjectiveKind::TotalInf,
        ObjectiveKind::TotalSup,
    ];

    /// Kinds parameterized by a window bound.
    pub fn needs_lmax(self) -> bool {
        matches!(
            self,
            ObjectiveKind::GoodWindow | ObjectiveKind::DirFixWmp | ObjectiveKind::FixWmp
        )
    }

    pub fn is_window(self) -> bool {
        matches!(
            self,
            ObjectiveKind::GoodWindow
                | ObjectiveKind::DirFixWmp
                | ObjectiveKind::DirBndWmp
                | ObjectiveKind::FixWmp
                | ObjectiveKind::BndWmp
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::GoodWindow => "GW",
            ObjectiveKind::DirFixWmp => "DirFixWMP",
            ObjectiveKind::DirBndWmp => "DirBndWMP",
            ObjectiveKind::FixWmp => "FixWMP",
            ObjectiveKind::BndWmp => "BndWMP",
            ObjectiveKind::MeanInf => "MeanInf",
            ObjectiveKind::MeanSup => "MeanSup",
            ObjectiveKind::TotalInf => "TotalInf",
            ObjectiveKind::TotalSup => "TotalSup",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An objective with its window bound and threshold vector.
/// An empty threshold stands for the zero vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    pub lmax: Option<usize>,
    pub threshold: Vec<Rational>,
}

impl ObjectiveSpec {
    /// Checks the `lmax` requirements of `kind`.
    pub fn new(kind: ObjectiveKind, lmax: Option<usize>, threshold: Vec<Rational>) -> Result<Self> {
        match (kind.needs_lmax(), lmax) {
            (true, None) => {
                return Err(Error::Unsupported(format!(
                    "{kind} requires a window bound"
                )))
            }
            (true, Some(0)) => return Err(Error::ZeroWindow),
            (false, Some(_)) => {
                return Err(Error::Unsupported(format!("{kind} takes no window bound")))
            }
            _ => {}
        }
        Ok(ObjectiveSpec {
            kind,
            lmax,
            threshold,
        })
    }

    /// A zero-threshold window objective. Panics on `lmax == 0`.
    pub fn window(kind: ObjectiveKind, lmax: usize) -> Self {
        Self::new(kind, Some(lmax), Vec::new()).expect("valid window objective")
    }

    /// A zero-threshold objective without a window bound.
    pub fn plain(kind: ObjectiveKind) -> Self {
        Self::new(kind, None, Vec::new()).expect("valid objective")
    }

    pub fn fix(lmax: usize) -> Self {
        Self::window(ObjectiveKind::FixWmp, lmax)
    }

    pub fn dir_fix(lmax: usize) -> Self {
        Self::window(ObjectiveKind::DirFixWmp, lmax)
    }

    pub fn good_window(lmax: usize) -> Self {
        Self::window(ObjectiveKind::GoodWindow, lmax)
    }

    pub fn with_threshold(mut self, threshold: Vec<Rational>) -> Self {
        self.threshold = threshold;
        self
    }

    /// Threshold entry for dimension `t`.
    pub fn threshold_at(&self, t: usize) -> Rational {
        self.threshold
            .get(t)
            .copied()
            .unwrap_or_else(|| Rational::from_integer(0))
    }

    pub fn check_dims(&self, dims: usize) -> Result<()> {
        if !self.threshold.is_empty() && self.threshold.len() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: self.threshold.len(),
            });
        }
        Ok(())
    }
}

/// A per-dimension value: a rational or an infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Value {
    pub fn int(v: i64) -> Self {
        Value::Finite(Rational::from_integer(v))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::NegInf => f.write_str("-inf"),
            Value::PosInf => f.write_str("+inf"),
            Value::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Parses `a/b` or `a` into a rational with a positive denominator.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Unsupported(format!("invalid rational `{text}`"));
    let (a, b) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), "1"),
    };
    let a: i64 = a.parse().map_err(|_| bad())?;
    let b: i64 = b.parse().map_err(|_| bad())?;
    if b == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(a, b))
}

/// Parses a comma-separated threshold vector.
pub fn parse_threshold(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(parse_rational).collect()
}

impl FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "-inf" => Ok(Value::NegInf),
            "+inf" | "inf" => Ok(Value::PosInf),
            _ => parse_rational(s).map(Value::Finite),
        }
    }
}
