//! Sign patterns of limiting `T` eigenvalues and the 21-case verdict table.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Signs of the two limiting eigenvalues of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignPattern {
    PlusPlus,
    PlusZero,
    PlusMinus,
    ZeroZero,
    ZeroMinus,
    MinusMinus,
}

/// Sign of a single limiting eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Zero,
    Minus,
}

impl SignPattern {
    pub const ALL: [SignPattern; 6] = [
        SignPattern::PlusPlus,
        SignPattern::PlusZero,
        SignPattern::PlusMinus,
        SignPattern::ZeroZero,
        SignPattern::ZeroMinus,
        SignPattern::MinusMinus,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SignPattern::PlusPlus => "++",
            SignPattern::PlusZero => "+0",
            SignPattern::PlusMinus => "+-",
            SignPattern::ZeroZero => "00",
            SignPattern::ZeroMinus => "0-",
            SignPattern::MinusMinus => "--",
        }
    }

    /// Signs of the larger and the smaller eigenvalue.
    pub fn signs(&self) -> [Sign; 2] {
        use Sign::*;
        match self {
            SignPattern::PlusPlus => [Plus, Plus],
            SignPattern::PlusZero => [Plus, Zero],
            SignPattern::PlusMinus => [Plus, Minus],
            SignPattern::ZeroZero => [Zero, Zero],
            SignPattern::ZeroMinus => [Zero, Minus],
            SignPattern::MinusMinus => [Minus, Minus],
        }
    }

    /// Classifies a pair of limiting eigenvalues; `|t| < zero_tol` counts as zero.
    pub fn classify(t: [f64; 2], zero_tol: f64) -> SignPattern {
        let sign = |x: f64| {
            if x.abs() < zero_tol {
                Sign::Zero
            } else if x > 0.0 {
                Sign::Plus
            } else {
                Sign::Minus
            }
        };
        let (hi, lo) = if t[0] >= t[1] {
            (t[0], t[1])
        } else {
            (t[1], t[0])
        };
        match (sign(hi), sign(lo)) {
            (Sign::Plus, Sign::Plus) => SignPattern::PlusPlus,
            (Sign::Plus, Sign::Zero) => SignPattern::PlusZero,
            (Sign::Plus, Sign::Minus) => SignPattern::PlusMinus,
            (Sign::Zero, Sign::Zero) => SignPattern::ZeroZero,
            (Sign::Zero, Sign::Minus) => SignPattern::ZeroMinus,
            _ => SignPattern::MinusMinus,
        }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.trim().replace('\u{2212}', "-");
        SignPattern::ALL
            .into_iter()
            .find(|p| p.label() == norm)
            .ok_or_else(|| Error::Schema(format!("unknown sign pattern {s:?}")))
    }
}

/// Unordered pair of sign patterns, stored with the smaller pattern first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CaseId {
    first: SignPattern,
    second: SignPattern,
}

impl CaseId {
    pub fn new(a: SignPattern, b: SignPattern) -> Self {
        if a <= b {
            CaseId {
                first: a,
                second: b,
            }
        } else {
            CaseId {
                first: b,
                second: a,
            }
        }
    }

    pub fn first(&self) -> SignPattern {
        self.first
    }

    pub fn second(&self) -> SignPattern {
        self.second
    }

    /// All 21 cases in table order.
    pub fn all() -> Vec<CaseId> {
        let mut out = Vec::with_capacity(21);
        for (i, a) in SignPattern::ALL.iter().enumerate() {
            for b in &SignPattern::ALL[i..] {
                out.push(CaseId::new(*a, *b));
            }
        }
        out
    }

    pub fn label(&self) -> String {
        format!("{},{}", self.first.label(), self.second.label())
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.first, self.second)
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([',', ' ']).filter(|p| !p.is_empty()).collect();
        match parts.as_slice() {
            [a, b] => Ok(CaseId::new(a.parse()?, b.parse()?)),
            _ => Err(Error::Schema(format!(
                "expected two sign patterns like \"++,+-\", got {s:?}"
            ))),
        }
    }
}

impl Serialize for CaseId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

/// Limit forms of the ball-model points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Form {
    /// `W1 = W2 = Wa`.
    Identity,
    /// Each `W = V diag(1, alpha) V^t` with a shared `V`.
    Diag,
    /// Shared corner data `V^t Z V = [[z, r], [r, p]]` with free `z` in the closed upper half-plane.
    Corner,
}

/// Entry of the verdict table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExpectedVerdict {
    Identity,
    IdentityOrDiag,
    Diag,
    IdentityOrCorner,
    /// `W1 = W2 = Wa` with a real half-space limit.
    IdentityReal,
    /// Counted as feasible but with no limit form derived; any matched form is accepted.
    Unspecified,
    Impossible,
}

impl ExpectedVerdict {
    pub fn is_impossible(&self) -> bool {
        matches!(self, ExpectedVerdict::Impossible)
    }

    /// Forms that satisfy this entry, in the order they are tried.
    pub fn forms(&self) -> &'static [Form] {
        match self {
            ExpectedVerdict::Identity | ExpectedVerdict::IdentityReal => &[Form::Identity],
            ExpectedVerdict::IdentityOrDiag => &[Form::Identity, Form::Diag],
            ExpectedVerdict::Diag => &[Form::Diag],
            ExpectedVerdict::IdentityOrCorner => &[Form::Identity, Form::Corner],
            ExpectedVerdict::Unspecified => &[Form::Identity, Form::Diag, Form::Corner],
            ExpectedVerdict::Impossible => &[],
        }
    }
}

/// The verdict table.
pub fn expected_verdict(case: CaseId) -> ExpectedVerdict {
    use ExpectedVerdict as E;
    use SignPattern::*;
    match (case.first(), case.second()) {
        (PlusPlus, PlusPlus) => E::Identity,
        (PlusPlus, _) => E::Impossible,
        (PlusZero, PlusZero) => E::IdentityOrDiag,
        (PlusZero, PlusMinus) => E::Diag,
        (PlusZero, ZeroZero) => E::Diag,
        (PlusZero, ZeroMinus) | (PlusZero, MinusMinus) => E::Impossible,
        (PlusMinus, PlusMinus) => E::IdentityOrDiag,
        (PlusMinus, _) => E::Unspecified,
        (ZeroZero, ZeroZero) => E::IdentityOrDiag,
        (ZeroZero, ZeroMinus) | (ZeroZero, MinusMinus) => E::Impossible,
        (ZeroMinus, ZeroMinus) => E::IdentityOrCorner,
        (ZeroMinus, MinusMinus) => E::Impossible,
        (MinusMinus, MinusMinus) => E::IdentityReal,
        _ => unreachable!("CaseId keeps the smaller pattern first"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_one_cases() {
        let all = CaseId::all();
        assert_eq!(all.len(), 21);
        let impossible = all
            .iter()
            .filter(|c| expected_verdict(**c).is_impossible())
            .count();
        assert_eq!(impossible, 10);
    }

    #[test]
    fn parsing_is_order_free() {
        let a: CaseId = "+-,++".parse().unwrap();
        let b: CaseId = "++,+\u{2212}".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.label(), "++,+-");
        assert!("++".parse::<CaseId>().is_err());
        assert!("+x,++".parse::<CaseId>().is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(
            SignPattern::classify([-0.5, 2.0], 1e-6),
            SignPattern::PlusMinus
        );
        assert_eq!(
            SignPattern::classify([1e-8, -1.0], 1e-6),
            SignPattern::ZeroMinus
        );
        assert_eq!(
            SignPattern::classify([0.0, 0.0], 1e-6),
            SignPattern::ZeroZero
        );
    }
}
