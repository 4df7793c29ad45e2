//! Ordinals below epsilon_0 in Cantor normal form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("fundamental sequence requested for {0}, which is not a limit ordinal")]
    NotLimit(Ordinal),
    #[error("fundamental sequence index must be >= 1")]
    ZeroIndex,
    #[error("cannot parse ordinal at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// `terms` lists `(exponent, coefficient)` with strictly decreasing exponents
/// and coefficients >= 1. The empty list is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(Self::zero(), n)],
            }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::nat(1))
    }

    /// omega^e
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal {
            terms: vec![(e, 1)],
        }
    }

    /// Builds from raw terms, validating canonical form.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Option<Self> {
        for (i, (_, c)) in terms.iter().enumerate() {
            if *c == 0 {
                return None;
            }
            if i > 0 && terms[i - 1].0.cmp(&terms[i].0) != Ordering::Greater {
                return None;
            }
        }
        Some(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns `Some(n)` when the ordinal is a natural number.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn classify(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some((e, c)) if e.is_zero() => {
                let mut terms = self.terms.clone();
                if *c == 1 {
                    terms.pop();
                } else {
                    terms.last_mut().unwrap().1 = c - 1;
                }
                Kind::Successor(Ordinal { terms })
            }
            Some(_) => Kind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.classify() == Kind::Limit
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::nat(1))
    }

    /// Ordinal sum. Terms of `self` below the leading exponent of `rhs` are absorbed.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some((lead, lead_c)) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, u64)> = Vec::new();
        for (e, c) in &self.terms {
            match e.cmp(lead) {
                Ordering::Greater => terms.push((e.clone(), *c)),
                Ordering::Equal => {
                    terms.push((e.clone(), c + lead_c));
                    terms.extend(rhs.terms[1..].iter().cloned());
                    return Ordinal { terms };
                }
                Ordering::Less => break,
            }
        }
        terms.extend(rhs.terms.iter().cloned());
        Ordinal { terms }
    }

    /// Wainer fundamental sequence with the default schedule.
    pub fn fundamental(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        FundamentalPolicy::default().apply(self, n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0) {
                Ordering::Equal => {}
                o => return o,
            }
            match a.1.cmp(&b.1) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The natural-number tail `omega[n] = q(n)` used wherever the Wainer rule
/// bottoms out at a finite value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum Schedule {
    #[default]
    Identity,
    /// q(n) = a*n + b
    Affine(u64, u64),
    /// q(n) = table[n-1]; beyond the table the last value grows by one per step.
    Table(Vec<u64>),
}

impl Schedule {
    pub fn q(&self, n: u64) -> u64 {
        match self {
            Schedule::Identity => n,
            Schedule::Affine(a, b) => a * n + b,
            Schedule::Table(t) => {
                let i = (n - 1) as usize;
                match t.get(i) {
                    Some(v) => *v,
                    None => t.last().copied().unwrap_or(0) + (i + 1 - t.len()) as u64,
                }
            }
        }
    }

    /// Checks that q is strictly increasing and positive on `1..=upto`.
    pub fn is_valid_upto(&self, upto: u64) -> bool {
        let mut prev = 0;
        for n in 1..=upto {
            let v = self.q(n);
            if v <= prev {
                return false;
            }
            prev = v;
        }
        true
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "identity" || s == "n" {
            return Ok(Schedule::Identity);
        }
        if let Some(rest) = s.strip_prefix("affine:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 2 {
                return Err(format!("expected affine:A:B, got {s}"));
            }
            let a = parts[0].parse().map_err(|_| format!("bad slope in {s}"))?;
            let b = parts[1].parse().map_err(|_| format!("bad offset in {s}"))?;
            let sch = Schedule::Affine(a, b);
            if !sch.is_valid_upto(64) {
                return Err(format!("schedule {s} is not strictly increasing"));
            }
            return Ok(sch);
        }
        if let Some(rest) = s.strip_prefix("table:") {
            let vals: Result<Vec<u64>, _> = rest.split(',').map(|v| v.trim().parse()).collect();
            let vals = vals.map_err(|_| format!("bad table in {s}"))?;
            let sch = Schedule::Table(vals);
            if !sch.is_valid_upto(64) {
                return Err(format!("schedule {s} is not strictly increasing"));
            }
            return Ok(sch);
        }
        Err(format!("unknown schedule {s}"))
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Identity => write!(f, "identity"),
            Schedule::Affine(a, b) => write!(f, "affine:{a}:{b}"),
            Schedule::Table(t) => {
                let v: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "table:{}", v.join(","))
            }
        }
    }
}

/// Wainer-style fundamental sequences:
/// `omega[n] = q(n)`, `(g + w^(b+1))[n] = g + w^b * n`, `(g + w^l)[n] = g + w^(l[n])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FundamentalPolicy {
    pub schedule: Schedule,
}

impl FundamentalPolicy {
    pub fn with_schedule(schedule: Schedule) -> Self {
        FundamentalPolicy { schedule }
    }

    pub fn apply(&self, xi: &Ordinal, n: u64) -> Result<Ordinal, OrdinalError> {
        if n == 0 {
            return Err(OrdinalError::ZeroIndex);
        }
        if !xi.is_limit() {
            return Err(OrdinalError::NotLimit(xi.clone()));
        }
        let mut terms = xi.terms.clone();
        let (e, c) = terms.pop().unwrap();
        if c > 1 {
            terms.push((e.clone(), c - 1));
        }
        let gamma = Ordinal { terms };
        let tail = match e.classify() {
            Kind::Zero => unreachable!("limit ordinal ends in a positive exponent"),
            Kind::Successor(beta) => {
                if beta.is_zero() {
                    Ordinal::nat(self.schedule.q(n))
                } else {
                    Ordinal {
                        terms: vec![(beta, n)],
                    }
                }
            }
            Kind::Limit => Ordinal::omega_pow(self.apply(&e, n)?),
        };
        Ok(gamma.add(&tail))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            write!(f, "w")?;
            if e.as_nat() != Some(1) {
                write!(f, "^")?;
                let bare = e.terms.len() == 1 && (e.terms[0].1 == 1 || e.terms[0].0.is_zero());
                if bare {
                    write!(f, "{e}")?;
                } else {
                    write!(f, "({e})")?;
                }
            }
            if *c > 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, OrdinalError> {
        Err(OrdinalError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if digits.len() > 1 && digits.starts_with('0') {
            self.pos = start;
            return self.err("leading zero");
        }
        match digits.parse() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("number out of range")
            }
        }
    }

    fn ordinal(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.peek() == Some(b'0') && !matches!(self.src.get(self.pos + 1), Some(b'0'..=b'9')) {
            self.pos += 1;
            return Ok(Ordinal::zero());
        }
        let mut terms: Vec<(Ordinal, u64)> = Vec::new();
        loop {
            let at = self.pos;
            let term = self.term()?;
            if let Some(prev) = terms.last() {
                if prev.0 <= term.0 {
                    self.pos = at;
                    return self.err("exponents must strictly decrease");
                }
            }
            terms.push(term);
            if self.peek() == Some(b'+') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(Ordinal { terms })
    }

    fn term(&mut self) -> Result<(Ordinal, u64), OrdinalError> {
        match self.peek() {
            Some(b'w') => {
                let e = self.power()?;
                let c = if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let at = self.pos;
                    let c = self.nat()?;
                    if c < 2 {
                        self.pos = at;
                        return self.err("coefficient must be >= 2 when written");
                    }
                    c
                } else {
                    1
                };
                Ok((e, c))
            }
            Some(b'1'..=b'9') => Ok((Ordinal::zero(), self.nat()?)),
            _ => self.err("expected a term"),
        }
    }

    /// Parses `w` or `w^<exp>`, returning the exponent.
    fn power(&mut self) -> Result<Ordinal, OrdinalError> {
        self.pos += 1;
        if self.peek() != Some(b'^') {
            return Ok(Ordinal::nat(1));
        }
        self.pos += 1;
        let at = self.pos;
        let e = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.ordinal()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                let bare = e.terms.len() == 1 && (e.terms[0].1 == 1 || e.terms[0].0.is_zero());
                if bare {
                    self.pos = at;
                    return self.err("redundant parentheses");
                }
                e
            }
            Some(b'w') => Ordinal::omega_pow(self.power()?),
            Some(b'1'..=b'9') => Ordinal::nat(self.nat()?),
            _ => return self.err("expected exponent"),
        };
        if e.is_zero() || e.as_nat() == Some(1) {
            self.pos = at;
            return self.err("exponents 0 and 1 are written without '^'");
        }
        Ok(e)
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let o = p.ordinal()?;
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(o("w").cmp(&o("w")), Ordering::Equal);
        assert_eq!(o("w").cmp(&o("5")), Ordering::Greater);
        assert_eq!(o("w^2+1").cmp(&o("w*3")), Ordering::Greater);
    }

    #[test]
    fn add_examples() {
        assert_eq!(o("1").add(&o("w")), o("w"));
        assert_eq!(o("w").add(&o("1")), o("w+1"));
        assert_eq!(o("w*2+3").add(&o("w+1")), o("w*3+1"));
    }

    #[test]
    fn fundamental_examples() {
        assert_eq!(o("w").fundamental(3).unwrap(), o("3"));
        assert_eq!(o("w^2").fundamental(2).unwrap(), o("w*2"));
        assert_eq!(o("w^w").fundamental(2).unwrap(), o("w^2"));
        assert!(o("w+1").fundamental(1).is_err());
        assert!(o("0").fundamental(1).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(o("0").classify(), Kind::Zero);
        assert_eq!(o("w+1").classify(), Kind::Successor(o("w")));
        assert_eq!(o("w*2").classify(), Kind::Limit);
    }

    #[test]
    fn rejects_noncanonical() {
        for bad in ["w+w^2", "w^1", "w^0", "w*1", "01", "1+1", "w+0", "w^(2)", "", "w^", "2+w"] {
            assert!(bad.parse::<Ordinal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn prints_nested_exponents() {
        for s in ["w^2*3+w+1", "w^w^2", "w^(w*2)+5", "w^(w+1)*2", "7", "0"] {
            assert_eq!(o(s).to_string(), s);
        }
    }
}
