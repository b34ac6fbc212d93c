//! Local Hilbert symbols over ℚ and ramification sets of quaternion algebras.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::factor::factorize;
use super::ArithError;

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Place {
    Prime(u128),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

impl From<Place> for String {
    fn from(p: Place) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Place {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        match s.as_str() {
            "inf" | "∞" => Ok(Place::Infinity),
            _ => s
                .parse()
                .map(Place::Prime)
                .map_err(|_| format!("bad place {s}")),
        }
    }
}

/// Places where a quaternion algebra (or Brauer class of order 2) ramifies.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RamificationSet(pub BTreeSet<Place>);

impl RamificationSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_places(places: impl IntoIterator<Item = Place>) -> Self {
        RamificationSet(places.into_iter().collect())
    }

    pub fn symmetric_difference(&self, o: &Self) -> Self {
        RamificationSet(self.0.symmetric_difference(&o.0).copied().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for RamificationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Integer in the same square class as `q` (`n/d ~ n·d`).
fn square_class_int(q: &BigRational) -> BigInt {
    q.numer() * q.denom()
}

fn valuation(n: &BigInt, p: u128) -> (u32, BigInt) {
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return (e, m);
        }
        m = q;
        e += 1;
    }
}

/// Legendre symbol `(u|p)` for odd prime `p` not dividing `u`.
fn legendre(u: &BigInt, p: u128) -> i8 {
    let bp = BigInt::from(p);
    let r = u.mod_floor(&bp).modpow(&BigInt::from((p - 1) / 2), &bp);
    if r.is_one() {
        1
    } else {
        -1
    }
}

fn mod8(u: &BigInt) -> u64 {
    u.mod_floor(&BigInt::from(8)).to_u64().unwrap_or(0)
}

fn hilbert_int(a: &BigInt, b: &BigInt, place: Place) -> i8 {
    match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = valuation(a, 2);
            let (beta, v) = valuation(b, 2);
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let (u8_, v8) = (mod8(&u), mod8(&v));
            let e = eps(u8_) * eps(v8) + alpha as u64 * omega(v8) + beta as u64 * omega(u8_);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = valuation(a, p);
            let (beta, v) = valuation(b, p);
            let mut s: i8 = 1;
            if (alpha as u128 * beta as u128 * ((p - 1) / 2)) % 2 == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(&u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(&v, p);
            }
            s
        }
    }
}

/// Local Hilbert symbol `(a, b)_v` for nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> Result<i8, ArithError> {
    if a.is_zero() || b.is_zero() {
        return Err(ArithError::Degenerate);
    }
    Ok(hilbert_int(
        &square_class_int(a),
        &square_class_int(b),
        place,
    ))
}

/// The finite places that can ramify `(a, b)`: 2 and the odd primes of `a·b`.
pub fn candidate_primes(a: &BigRational, b: &BigRational) -> Result<BTreeSet<u128>, ArithError> {
    let mut primes: BTreeSet<u128> = BTreeSet::from([2]);
    for x in [a, b] {
        for n in [x.numer(), x.denom()] {
            for (p, _) in factorize(n)? {
                primes.insert(p);
            }
        }
    }
    Ok(primes)
}

/// Ramification set of the quaternion algebra `(a, b)_ℚ`.
pub fn quaternion_ramification(
    a: &BigRational,
    b: &BigRational,
) -> Result<RamificationSet, ArithError> {
    if a.is_zero() || b.is_zero() {
        return Err(ArithError::Degenerate);
    }
    let (ai, bi) = (square_class_int(a), square_class_int(b));
    let mut set = BTreeSet::new();
    if hilbert_int(&ai, &bi, Place::Infinity) == -1 {
        set.insert(Place::Infinity);
    }
    for p in candidate_primes(a, b)? {
        if hilbert_int(&ai, &bi, Place::Prime(p)) == -1 {
            set.insert(Place::Prime(p));
        }
    }
    if set.len() % 2 == 1 {
        return Err(ArithError::OddRamification(format!("({a}, {b})")));
    }
    Ok(RamificationSet(set))
}

/// `s = ⊗_{i<j} (a_i, a_j)` as a ramification set.
pub fn hasse_invariant(diag: &[BigRational]) -> Result<RamificationSet, ArithError> {
    let mut acc = RamificationSet::empty();
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            acc = acc.symmetric_difference(&quaternion_ramification(&diag[i], &diag[j])?);
        }
    }
    Ok(acc)
}

/// `c = s · (−1, −1)`.
pub fn witt_invariant(diag: &[BigRational]) -> Result<RamificationSet, ArithError> {
    let minus = BigRational::from_integer((-1).into());
    Ok(hasse_invariant(diag)?.symmetric_difference(&quaternion_ramification(&minus, &minus)?))
}
