//! Elements of the multiquadratic field `ℚ(√2, √3, √5, …)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::factor::{gcd_u64, least_prime, square_split};
use super::ArithError;

/// `Σ q_d √d` over squarefree `d`; key `1` is the rational part.
///
/// Zero coefficients are never stored, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiQuad {
    terms: BTreeMap<u64, BigRational>,
}

impl MultiQuad {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::term(q, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    /// `q·√d` for squarefree `d`.
    pub fn term(q: BigRational, d: u64) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(d, q);
        }
        MultiQuad { terms }
    }

    /// `√r` for a rational `r ≥ 0`, via `√(p/q) = √(pq)/q`.
    pub fn sqrt_rational(r: &BigRational) -> Result<Self, ArithError> {
        if r.is_negative() {
            return Err(ArithError::NegativeSqrt(r.to_string()));
        }
        if r.is_zero() {
            return Ok(Self::zero());
        }
        let pq: BigInt = r.numer() * r.denom();
        let (s, d) = square_split(&pq)?;
        let d = d.to_u64().ok_or_else(|| ArithError::FactorLimit(r.to_string()))?;
        Ok(Self::term(BigRational::new(s, r.denom().clone()), d))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(d, q)| (*d, q))
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(d, q)| q.to_f64().unwrap_or(f64::NAN) * (*d as f64).sqrt())
            .sum()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        MultiQuad {
            terms: self.terms.iter().map(|(d, c)| (*d, c * q)).collect(),
        }
    }

    fn insert_add(terms: &mut BTreeMap<u64, BigRational>, d: u64, q: BigRational) {
        let entry = terms.entry(d).or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            terms.remove(&d);
        }
    }

    /// Writes `self = a + b√p` where neither `a` nor `b` involves `√p`.
    fn split(&self, p: u64) -> (MultiQuad, MultiQuad) {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for (d, q) in &self.terms {
            if d % p == 0 {
                b.insert(d / p, q.clone());
            } else {
                a.insert(*d, q.clone());
            }
        }
        (MultiQuad { terms: a }, MultiQuad { terms: b })
    }

    fn pivot_prime(&self) -> Option<u64> {
        self.terms
            .keys()
            .filter(|d| **d > 1)
            .map(|d| least_prime(*d))
            .min()
    }

    /// Exact sign in {-1, 0, 1}.
    pub fn sign(&self) -> i8 {
        let Some(p) = self.pivot_prime() else {
            return match self.terms.get(&1) {
                None => 0,
                Some(q) if q.is_positive() => 1,
                Some(_) => -1,
            };
        };
        let (a, b) = self.split(p);
        let (sa, sb) = (a.sign(), b.sign());
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        // a and b√p have opposite signs: compare a² with p·b².
        let pr = BigRational::from_integer(BigInt::from(p));
        let n = &(&a * &a) - &(&b * &b).scale(&pr);
        n.sign() * sa
    }

    /// Multiplicative inverse by descending through Galois conjugates.
    pub fn inv(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::ZeroInverse);
        }
        let Some(p) = self.pivot_prime() else {
            return Ok(Self::from_rational(self.terms[&1].recip()));
        };
        let (a, b) = self.split(p);
        let pr = BigRational::from_integer(BigInt::from(p));
        let root_p = Self::term(BigRational::one(), p);
        let conj = &a - &(&b * &root_p);
        let norm = &(&a * &a) - &(&b * &b).scale(&pr);
        Ok(&conj * &norm.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl Add for &MultiQuad {
    type Output = MultiQuad;
    fn add(self, o: &MultiQuad) -> MultiQuad {
        let mut terms = self.terms.clone();
        for (d, q) in &o.terms {
            MultiQuad::insert_add(&mut terms, *d, q.clone());
        }
        MultiQuad { terms }
    }
}

impl Sub for &MultiQuad {
    type Output = MultiQuad;
    fn sub(self, o: &MultiQuad) -> MultiQuad {
        self + &(-o)
    }
}

impl Neg for &MultiQuad {
    type Output = MultiQuad;
    fn neg(self) -> MultiQuad {
        MultiQuad {
            terms: self.terms.iter().map(|(d, q)| (*d, -q)).collect(),
        }
    }
}

impl Mul for &MultiQuad {
    type Output = MultiQuad;
    fn mul(self, o: &MultiQuad) -> MultiQuad {
        let mut terms = BTreeMap::new();
        for (d1, q1) in &self.terms {
            for (d2, q2) in &o.terms {
                // √d1·√d2 = g·√((d1/g)(d2/g)), g = gcd(d1, d2).
                let g = gcd_u64(*d1, *d2);
                let d = (d1 / g) * (d2 / g);
                let c = q1 * q2 * BigRational::from_integer(BigInt::from(g));
                MultiQuad::insert_add(&mut terms, d, c);
            }
        }
        MultiQuad { terms }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for MultiQuad {
            type Output = MultiQuad;
            fn $f(self, o: MultiQuad) -> MultiQuad {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for MultiQuad {
    type Output = MultiQuad;
    fn neg(self) -> MultiQuad {
        -&self
    }
}

impl fmt::Display for MultiQuad {
    /// Terms as `p/q` or `p/q*sqrt(d)`, joined by ` + ` / ` - `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, q)) in self.terms.iter().enumerate() {
            let mag = q.abs();
            if i == 0 {
                if q.is_negative() {
                    write!(f, "-")?;
                }
            } else if q.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *d == 1 {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*sqrt({d})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiQuad({self})")
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ArithError> {
    let bad = || ArithError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// One unsigned term: `p/q`, `p/q*sqrt(d)`, `sqrt(d)` or `sqrt(d)/q`.
fn parse_term(s: &str) -> Result<MultiQuad, ArithError> {
    let bad = || ArithError::Parse(s.to_string());
    let s = s.trim();
    let Some(at) = s.find("sqrt(") else {
        return Ok(MultiQuad::from_rational(parse_rational(s)?));
    };
    let close = s[at..].find(')').ok_or_else(bad)? + at;
    let radicand = parse_rational(&s[at + 5..close])?;
    let root = MultiQuad::sqrt_rational(&radicand)?;
    let before = s[..at].trim().trim_end_matches('*').trim();
    let after = s[close + 1..].trim();
    let mut coef = if before.is_empty() {
        BigRational::one()
    } else {
        parse_rational(before)?
    };
    if let Some(den) = after.strip_prefix('/') {
        coef /= parse_rational(den)?;
    } else if !after.is_empty() {
        return Err(bad());
    }
    Ok(root.scale(&coef))
}

impl FromStr for MultiQuad {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = strip_outer_parens(s.trim());
        if s.is_empty() {
            return Err(ArithError::Parse(s.to_string()));
        }
        let mut total = MultiQuad::zero();
        let mut sign = 1;
        let mut start = 0;
        let bytes = s.as_bytes();
        let mut depth = 0;
        let flush = |piece: &str, sign: i32, total: &mut MultiQuad| -> Result<(), ArithError> {
            if piece.trim().is_empty() {
                return Ok(());
            }
            let t = parse_term(piece)?;
            *total = if sign > 0 { &*total + &t } else { &*total - &t };
            Ok(())
        };
        for (i, &c) in bytes.iter().enumerate() {
            match c {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 => {
                    let prev = s[..i].trim_end();
                    // A sign right after `/` or `*` belongs to the number.
                    if prev.ends_with('/') || prev.ends_with('*') {
                        continue;
                    }
                    flush(&s[start..i], sign, &mut total)?;
                    sign = if c == b'-' { -1 } else { 1 };
                    start = i + 1;
                }
                _ => {}
            }
        }
        flush(&s[start..], sign, &mut total)?;
        Ok(total)
    }
}

/// Removes parentheses that enclose the whole expression.
fn strip_outer_parens(mut s: &str) -> &str {
    while s.starts_with('(') && s.ends_with(')') {
        let mut depth = 0;
        let closes_at_end = s.char_indices().all(|(i, c)| {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            depth > 0 || i == s.len() - 1
        });
        if !closes_at_end {
            break;
        }
        s = s[1..s.len() - 1].trim();
    }
    s
}

impl serde::Serialize for MultiQuad {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for MultiQuad {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
