//! Ordinals below ε₀ in Cantor normal form.
//!
//! `Cons(e, c, r)` denotes `ω^e·c + r`. A value is normal when exponents
//! strictly decrease along the spine, no exponent is zero and every
//! coefficient is positive.

use alloc::boxed::Box;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ordinal {
    Fin(BigUint),
    Cons(Box<Ordinal>, BigUint, Box<Ordinal>),
}

impl Ordinal {
    pub fn fin(n: u64) -> Ordinal {
        Ordinal::Fin(BigUint::from(n))
    }

    pub fn zero() -> Ordinal {
        Ordinal::fin(0)
    }

    pub fn cons(e: Ordinal, c: impl Into<BigUint>, r: Ordinal) -> Ordinal {
        Ordinal::Cons(Box::new(e), c.into(), Box::new(r))
    }

    /// `ω`
    pub fn omega() -> Ordinal {
        Ordinal::cons(Ordinal::fin(1), 1u32, Ordinal::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Ordinal::Fin(n) if n.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ordinal::Fin(_))
    }

    /// Exponent of the leading term; `None` for finite ordinals.
    pub fn leading_exp(&self) -> Option<&Ordinal> {
        match self {
            Ordinal::Fin(_) => None,
            Ordinal::Cons(e, _, _) => Some(e),
        }
    }

    /// Nesting depth of exponents: 0 for naturals, 1 below ω^ω, ...
    pub fn depth(&self) -> usize {
        match self {
            Ordinal::Fin(_) => 0,
            Ordinal::Cons(e, _, r) => (e.depth() + 1).max(r.depth()),
        }
    }
}

/// Clamps negative integers to zero.
pub fn of_int(n: &BigInt) -> Ordinal {
    if n.is_negative() {
        Ordinal::zero()
    } else {
        Ordinal::Fin(n.magnitude().clone())
    }
}

/// The strict order `<<`.
pub fn lt(x: &Ordinal, y: &Ordinal) -> bool {
    match (x, y) {
        (Ordinal::Fin(a), Ordinal::Fin(b)) => a < b,
        (Ordinal::Fin(_), Ordinal::Cons(..)) => true,
        (Ordinal::Cons(..), Ordinal::Fin(_)) => false,
        (Ordinal::Cons(a1, x1, t1), Ordinal::Cons(a2, x2, t2)) => {
            lt(a1, a2) || (a1 == a2 && (x1 < x2 || (x1 == x2 && lt(t1, t2))))
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else if lt(self, other) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

/// Ordinal addition with left absorption. Not commutative.
pub fn plus(x: &Ordinal, y: &Ordinal) -> Ordinal {
    match (x, y) {
        (Ordinal::Fin(a), Ordinal::Fin(b)) => Ordinal::Fin(a + b),
        (Ordinal::Fin(_), Ordinal::Cons(..)) => y.clone(),
        (Ordinal::Cons(a, c, t), Ordinal::Fin(_)) => Ordinal::Cons(a.clone(), c.clone(), Box::new(plus(t, y))),
        (Ordinal::Cons(a1, c1, t1), Ordinal::Cons(a2, c2, t2)) => {
            if lt(a1, a2) {
                y.clone()
            } else if a1 == a2 {
                Ordinal::Cons(a1.clone(), c1 + c2, t2.clone())
            } else {
                Ordinal::Cons(a1.clone(), c1.clone(), Box::new(plus(t1, y)))
            }
        }
    }
}

/// Multiplies by ω on the right-hand side of every term: `x·ω` for finite
/// `x`, and raises every exponent by one otherwise.
pub fn shift(x: &Ordinal) -> Ordinal {
    match x {
        Ordinal::Fin(n) if n.is_zero() => Ordinal::zero(),
        Ordinal::Fin(n) => Ordinal::Cons(Box::new(Ordinal::fin(1)), n.clone(), Box::new(Ordinal::zero())),
        Ordinal::Cons(e, c, r) => Ordinal::Cons(Box::new(plus(e, &Ordinal::fin(1))), c.clone(), Box::new(shift(r))),
    }
}

/// Lexicographic pairing: `pair(m, n) = m·ω + n` on naturals.
pub fn pair(x: &Ordinal, y: &Ordinal) -> Ordinal {
    plus(&shift(x), y)
}

pub fn is_normal_form(x: &Ordinal) -> bool {
    match x {
        Ordinal::Fin(_) => true,
        Ordinal::Cons(e, c, r) => {
            !e.is_zero()
                && !c.is_zero()
                && is_normal_form(e)
                && is_normal_form(r)
                && r.leading_exp().is_none_or(|e2| lt(e2, e))
        }
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordinal::Fin(n) => write!(f, "{}", n),
            Ordinal::Cons(e, c, r) => {
                match e.as_ref() {
                    Ordinal::Fin(k) if k.is_one() => f.write_str("ω")?,
                    Ordinal::Fin(k) => write!(f, "ω^{}", k)?,
                    other => write!(f, "ω^({})", other)?,
                }
                if !c.is_one() {
                    write!(f, "·{}", c)?;
                }
                if !r.is_zero() {
                    write!(f, " + {}", r)?;
                }
                Ok(())
            }
        }
    }
}

/// Renders the ordinal as an IML constructor term.
pub fn to_iml(x: &Ordinal) -> String {
    match x {
        Ordinal::Fin(n) => alloc::format!("Ordinal.Int {}", n),
        Ordinal::Cons(e, c, r) => alloc::format!("Ordinal.Cons ({}, {}, {})", to_iml(e), c, to_iml(r)),
    }
}

/// Small-value helper used by tests and the REPL.
pub fn to_u64(x: &Ordinal) -> Option<u64> {
    match x {
        Ordinal::Fin(n) => n.to_u64(),
        _ => None,
    }
}
