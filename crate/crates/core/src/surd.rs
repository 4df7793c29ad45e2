//! Non-negative real numbers of the form `q^(1/k)` with `q` rational.
//!
//! Norms built from p-th powers are carried this way so that every
//! comparison stays exact.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `a`, `a/b`, or a finite decimal like `0.25`.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_v: BigInt = if int == "-" || int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| format!("bad number {s:?}"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad number {s:?}"));
        }
        let f: BigInt = frac.parse().unwrap();
        let scale = num::pow(BigInt::from(10), frac.len());
        let mag = Q::new(int_v.abs() * &scale + f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    Ok(Q::from_integer(n))
}

pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn q_to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn pow_q(v: &Q, e: u32) -> Q {
    num::pow(v.clone(), e as usize)
}

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    if num::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// `base^(1/index)`, base >= 0, index >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    base: Q,
    index: u32,
}

impl Surd {
    pub fn rational(v: Q) -> Self {
        assert!(!v.is_negative(), "surd base must be non-negative");
        Surd { base: v, index: 1 }
    }

    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    /// The positive `index`-th root of `base`, simplified when the root is rational.
    pub fn root(base: Q, index: u32) -> Self {
        assert!(index >= 1);
        assert!(!base.is_negative(), "surd base must be non-negative");
        let mut s = Surd { base, index };
        s.simplify();
        s
    }

    fn simplify(&mut self) {
        if self.index == 1 || self.base.is_zero() {
            self.index = 1;
            return;
        }
        // try the largest divisor of the index first
        let k = self.index;
        for d in (2..=k).rev() {
            if k % d != 0 {
                continue;
            }
            if let (Some(n), Some(m)) = (int_root(self.base.numer(), d), int_root(self.base.denom(), d)) {
                self.base = Q::new(n, m);
                self.index = k / d;
                self.simplify();
                return;
            }
        }
    }

    pub fn base(&self) -> &Q {
        &self.base
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn as_rational(&self) -> Option<&Q> {
        if self.index == 1 {
            Some(&self.base)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    /// Value raised to `lcm`-compatible power `e*index`: returns base^e.
    fn lifted(&self, to: u32) -> Q {
        debug_assert_eq!(to % self.index, 0);
        pow_q(&self.base, to / self.index)
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        let l = self.index.lcm(&other.index);
        Surd::root(self.lifted(l) * other.lifted(l), l)
    }

    /// Panics on division by zero.
    pub fn div(&self, other: &Surd) -> Surd {
        assert!(!other.is_zero(), "division by zero surd");
        let l = self.index.lcm(&other.index);
        Surd::root(self.lifted(l) / other.lifted(l), l)
    }

    pub fn mul_q(&self, r: &Q) -> Surd {
        self.mul(&Surd::rational(r.abs()))
    }

    pub fn to_f64(&self) -> f64 {
        let b = q_to_f64(&self.base);
        if self.index == 1 {
            b
        } else {
            b.powf(1.0 / self.index as f64)
        }
    }

    pub fn cmp_q(&self, r: &Q) -> Ordering {
        if r.is_negative() {
            return Ordering::Greater;
        }
        self.cmp(&Surd::rational(r.clone()))
    }

    /// Display with `digits` decimals for irrational values.
    pub fn render(&self, digits: usize) -> String {
        match self.as_rational() {
            Some(v) => fmt_q(v),
            None => format!(
                "({})^(1/{}) ~ {:.*}",
                fmt_q(&self.base),
                self.index,
                digits,
                self.to_f64()
            ),
        }
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.index.lcm(&other.index);
        self.lifted(l).cmp(&other.lifted(l))
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(6))
    }
}

/// A non-negative quantity that may be infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Finite(Surd),
    Infinite,
}

impl Bound {
    pub fn finite(&self) -> Option<&Surd> {
        match self {
            Bound::Finite(s) => Some(s),
            Bound::Infinite => None,
        }
    }

    pub fn le_q(&self, c: &Q) -> bool {
        match self {
            Bound::Finite(s) => s.cmp_q(c) != Ordering::Greater,
            Bound::Infinite => false,
        }
    }

    pub fn render(&self, digits: usize) -> String {
        match self {
            Bound::Finite(s) => s.render(digits),
            Bound::Infinite => "inf".to_string(),
        }
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
            (Bound::Infinite, _) => Ordering::Greater,
            (_, Bound::Infinite) => Ordering::Less,
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(6))
    }
}

pub fn one() -> Q {
    Q::one()
}
