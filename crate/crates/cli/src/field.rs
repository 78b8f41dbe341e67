//! Normal-speed fields on a marker curve from terms such as `cos:2:0.5`.

use std::fmt;
use std::str::FromStr;

/// One term of a field in the curve parameter `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldTerm {
    /// `amp·cos(mθ)`.
    Cos { m: u32, amp: f64 },
    /// `amp·sin(mθ)`.
    Sin { m: u32, amp: f64 },
    Const(f64),
}

impl FieldTerm {
    pub fn eval(&self, theta: f64) -> f64 {
        match *self {
            Self::Cos { m, amp } => amp * (m as f64 * theta).cos(),
            Self::Sin { m, amp } => amp * (m as f64 * theta).sin(),
            Self::Const(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParseError(String);

impl fmt::Display for FieldParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad field term `{}`: expected cos:m[:amp], sin:m[:amp] or const:c", self.0)
    }
}

impl std::error::Error for FieldParseError {}

impl FromStr for FieldTerm {
    type Err = FieldParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FieldParseError(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let number = |p: &str| p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(err);
        match parts.as_slice() {
            ["const", c] => Ok(Self::Const(number(c)?)),
            [kind @ ("cos" | "sin"), m, rest @ ..] if rest.len() <= 1 => {
                let m = m.parse::<u32>().map_err(|_| err())?;
                let amp = rest.first().map_or(Ok(1.0), |a| number(a))?;
                Ok(if *kind == "cos" { Self::Cos { m, amp } } else { Self::Sin { m, amp } })
            }
            _ => Err(err()),
        }
    }
}

/// Sum of terms at `θ`.
pub fn eval_sum(terms: &[FieldTerm], theta: f64) -> f64 {
    terms.iter().map(|t| t.eval(theta)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!("cos:2".parse::<FieldTerm>().unwrap(), FieldTerm::Cos { m: 2, amp: 1.0 });
        assert_eq!("sin:3:-0.5".parse::<FieldTerm>().unwrap(), FieldTerm::Sin { m: 3, amp: -0.5 });
        assert_eq!("const:1.5".parse::<FieldTerm>().unwrap(), FieldTerm::Const(1.5));
        for bad in ["cos", "cos:x", "cos:1:2:3", "tan:1", "const:", "const:nan", "sin:-1"] {
            assert!(bad.parse::<FieldTerm>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sums() {
        let terms = ["const:1", "cos:1:2"].map(|s| s.parse().unwrap());
        assert!((eval_sum(&terms, 0.0) - 3.0).abs() < 1e-15);
    }
}
